"""Move generation and application.

A move is a placement or a spread.  Spreads name the origin square, a
direction, and the drop counts left to right along the direction; the
carried stack drops bottom-most pieces first.  drops == () is the parsed
form of a bare-direction spread ("carry the whole stack, one drop") and
is resolved against a position by resolve / apply.

apply mutates the position it is given and returns an undo token;
undo restores the position bit for bit.
"""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Union

from .board import (
    BLACK,
    CAPSTONE,
    FLAT,
    STANDING,
    SWAP,
    WHITE,
    Position,
    board_bits,
    outcome,
    piece,
    piece_color,
    piece_kind,
)

N, E, S, W = 0, 1, 2, 3
DIRECTION_CHARS = "+>-<"


class Place(NamedTuple):
    square: int
    kind: int


class Spread(NamedTuple):
    square: int
    direction: int
    drops: tuple[int, ...]


Move = Union[Place, Spread]


class UndoToken(NamedTuple):
    move: Move
    carried: tuple[int, ...]
    crushed: bool
    prev_psp: int


class IllegalMove(ValueError):
    pass


def _deltas(size: int) -> tuple[int, int, int, int]:
    return (size, 1, -size, -1)


def _steps_to_edge(sq: int, d: int, size: int) -> int:
    f, r = sq % size, sq // size
    if d == N:
        return size - 1 - r
    if d == S:
        return r
    if d == E:
        return size - 1 - f
    return f


@lru_cache(maxsize=None)
def _compositions(total: int) -> tuple[tuple[int, ...], ...]:
    """All compositions of total, lexicographically ascending."""
    if total == 0:
        return ((),)
    out = []
    for first in range(1, total + 1):
        for rest in _compositions(total - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _compositions_exact(total: int, parts: int) -> tuple[tuple[int, ...], ...]:
    return tuple(c for c in _compositions(total) if len(c) == parts)


@lru_cache(maxsize=None)
def _compositions_upto(total: int, parts: int) -> tuple[tuple[int, ...], ...]:
    return tuple(c for c in _compositions(total) if len(c) <= parts)


@lru_cache(maxsize=None)
def _edge_table(size: int) -> tuple[tuple[int, int, int, int], ...]:
    return tuple(
        tuple(_steps_to_edge(sq, d, size) for d in range(4))
        for sq in range(size * size)
    )


# Move objects are immutable, so squares can share them across calls.
@lru_cache(maxsize=None)
def _place_triples(sq: int) -> tuple[Place, Place, Place]:
    return (Place(sq, FLAT), Place(sq, STANDING), Place(sq, CAPSTONE))


@lru_cache(maxsize=None)
def _spread_bundle(sq: int, d: int, carry: int, run: int) -> tuple[Spread, ...]:
    return tuple(Spread(sq, d, drops) for drops in _compositions_upto(carry, run))


@lru_cache(maxsize=None)
def _crush_bundle(sq: int, d: int, carry: int, dist: int) -> tuple[Spread, ...]:
    return tuple(
        Spread(sq, d, pre + (1,)) for pre in _compositions_exact(carry - 1, dist - 1)
    )


def resolve(move: Move, pos: Position) -> Move:
    """Concretize a bare-direction spread against a position."""
    if isinstance(move, Spread) and not move.drops:
        h = pos.height(move.square)
        if h == 0:
            raise IllegalMove("spread from an empty square")
        return move._replace(drops=(min(h, pos.size),))
    return move


def legal_moves(pos: Position) -> list[Move]:
    """Every legal move, in a deterministic order.

    Raises on terminal positions.
    """
    if outcome(pos).is_terminal:
        raise IllegalMove("no moves in a terminal position")
    return generate_moves(pos)


def generate_moves(pos: Position) -> list[Move]:
    """legal_moves without the terminal check, for callers that have
    already tested outcome (the solver does, at every node)."""
    n = pos.size
    moves: list[Move] = []
    full = board_bits(n).full
    occ = pos.occupied()
    empties = ~occ & full
    if pos.phase == SWAP:
        e = empties
        while e:
            low = e & -e
            e ^= low
            moves.append(_place_triples(low.bit_length() - 1)[0])
        return moves
    me = pos.to_move
    flats_left = pos.reserves[me * 2] > 0
    caps_left = pos.reserves[me * 2 + 1] > 0
    e = empties
    while e:
        low = e & -e
        e ^= low
        pf, ps, pc = _place_triples(low.bit_length() - 1)
        if flats_left:
            moves.append(pf)
            moves.append(ps)
        if caps_left:
            moves.append(pc)
    road0, road1 = pos._road
    flat_any = pos._flat[0] | pos._flat[1]
    passable = empties | flat_any
    standing_any = occ & ~(road0 | road1)
    cap_mask = pos._road[me] & ~pos._flat[me]
    deltas = _deltas(n)
    edges = _edge_table(n)
    stacks = pos.stacks
    mine = pos._top[me]
    while mine:
        low = mine & -mine
        mine ^= low
        sq = low.bit_length() - 1
        top_is_cap = cap_mask & low
        max_carry = min(len(stacks[sq]), n)
        limits = edges[sq]
        for d in range(4):
            limit = limits[d]
            run = 0
            crush_dist = 0
            cur = sq
            delta = deltas[d]
            while run < limit:
                cur += delta
                bit = 1 << cur
                if passable & bit:
                    run += 1
                    continue
                if top_is_cap and standing_any & bit:
                    crush_dist = run + 1
                break
            for carry in range(1, max_carry + 1):
                if run:
                    moves.extend(_spread_bundle(sq, d, carry, run))
                if crush_dist and carry >= crush_dist:
                    # the capstone must land alone on the standing stone
                    moves.extend(_crush_bundle(sq, d, carry, crush_dist))
    return moves


def apply(pos: Position, move: Move) -> UndoToken:
    """Play move on pos in place, returning the token undo needs."""
    n = pos.size
    if isinstance(move, Place):
        sq, kind = move
        if not 0 <= sq < n * n:
            raise IllegalMove("square off the board")
        if pos.stacks[sq]:
            raise IllegalMove("placement on an occupied square")
        if pos.phase == SWAP:
            if kind != FLAT:
                raise IllegalMove("swap-phase placements must be flat")
            owner = 1 - pos.to_move
        else:
            owner = pos.to_move
        slot = owner * 2 + (1 if kind == CAPSTONE else 0)
        if pos.reserves[slot] == 0:
            raise IllegalMove("no stones of that kind left")
        pos.reserves[slot] -= 1
        pos._push(sq, piece(owner, kind))
        token = UndoToken(move, (), False, pos.plies_since_placement)
        pos.plies_since_placement = 0
        pos.to_move = 1 - pos.to_move
        pos.ply += 1
        return token

    move = resolve(move, pos)
    sq, d, drops = move
    st = pos.stacks[sq]
    if not st:
        raise IllegalMove("spread from an empty square")
    if piece_color(st[-1]) != pos.to_move:
        raise IllegalMove("spread from a square the mover does not control")
    carry = sum(drops)
    if not drops or any(x < 1 for x in drops):
        raise IllegalMove("drops must be positive")
    if carry > n:
        raise IllegalMove("carry exceeds the board-size limit")
    if carry > len(st):
        raise IllegalMove("carry exceeds the stack height")
    if len(drops) > _steps_to_edge(sq, d, n):
        raise IllegalMove("spread runs off the board")

    carried = tuple(st[len(st) - carry :])
    crushed = False
    delta = _deltas(n)[d]
    cur = sq
    for i, cnt in enumerate(drops):
        cur += delta
        t = pos.stacks[cur]
        if t:
            k = piece_kind(t[-1])
            if k == CAPSTONE:
                raise IllegalMove("spread blocked by a capstone")
            if k == STANDING:
                last = i == len(drops) - 1
                if not (
                    last
                    and cnt == 1
                    and piece_kind(carried[-1]) == CAPSTONE
                ):
                    raise IllegalMove("spread blocked by a standing stone")
                crushed = True
    # validated; perform the stack surgery
    for _ in range(carry):
        pos._pop(sq)
    cur = sq
    idx = 0
    for i, cnt in enumerate(drops):
        cur += delta
        if crushed and i == len(drops) - 1:
            wall = pos._pop(cur)
            pos._push(cur, piece(piece_color(wall), FLAT))
        for _ in range(cnt):
            pos._push(cur, carried[idx])
            idx += 1
    token = UndoToken(move, carried, crushed, pos.plies_since_placement)
    pos.plies_since_placement += 1
    pos.to_move = 1 - pos.to_move
    pos.ply += 1
    return token


def undo(pos: Position, token: UndoToken) -> None:
    move, carried, crushed, prev_psp = token
    pos.ply -= 1
    pos.to_move = 1 - pos.to_move
    pos.plies_since_placement = prev_psp
    if isinstance(move, Place):
        code = pos._pop(move.square)
        owner = piece_color(code)
        pos.reserves[owner * 2 + (1 if piece_kind(code) == CAPSTONE else 0)] += 1
        return
    sq, d, drops = move
    delta = _deltas(pos.size)[d]
    cur = sq + delta * len(drops)
    for i in range(len(drops) - 1, -1, -1):
        for _ in range(drops[i]):
            pos._pop(cur)
        if crushed and i == len(drops) - 1:
            flat = pos._pop(cur)
            pos._push(cur, piece(piece_color(flat), STANDING))
        cur -= delta
    for code in carried:
        pos._push(sq, code)


def perft(pos: Position, depth: int) -> int:
    """Leaf count of the move tree to the given depth; terminal
    positions are leaves regardless of remaining depth."""
    if depth == 0 or outcome(pos).is_terminal:
        return 1
    if depth == 1:
        return len(legal_moves(pos))
    total = 0
    for move in legal_moves(pos):
        token = apply(pos, move)
        total += perft(pos, depth - 1)
        undo(pos, token)
    return total


def transform_move(move: Move, g: int, size: int) -> Move:
    """Image of a move under a board transform."""
    from .symmetry import DIRECTION_PERMS, square_perms

    perm = square_perms(size)[g]
    if isinstance(move, Place):
        return Place(perm[move.square], move.kind)
    return Spread(perm[move.square], DIRECTION_PERMS[g][move.direction], move.drops)
