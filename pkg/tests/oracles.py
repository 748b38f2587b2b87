"""Independent reference implementations used only by the tests.

Everything here is written directly from the rules, favoring brute
force over cleverness, and shares no logic with the package: moves are
found by simulating every candidate drop sequence, roads by
breadth-first search, compositions by splitting index ranges.  Keep it
that way; these are the oracles the fast code is judged against.
"""
from __future__ import annotations

import itertools
from collections import deque

from tak.board import (
    BLACK,
    CAPSTONE,
    FLAT,
    STANDING,
    WHITE,
    Position,
    piece_color,
    piece_kind,
)

DIRS = {0: (0, 1), 1: (1, 0), 2: (0, -1), 3: (-1, 0)}  # N E S W


def brute_compositions(total):
    """All ordered positive splits of total, via cut points."""
    out = []
    for cuts in range(total):
        for points in itertools.combinations(range(1, total), cuts):
            bounds = (0,) + points + (total,)
            out.append(tuple(bounds[i + 1] - bounds[i] for i in range(len(bounds) - 1)))
    return out


def road_bfs(pos: Position, color: int) -> bool:
    """Breadth-first road search over flat/capstone tops of one color."""
    n = pos.size

    def counts(sq):
        st = pos.stacks[sq]
        if not st:
            return False
        return piece_color(st[-1]) == color and piece_kind(st[-1]) != STANDING

    for starts, goal_test in (
        ([r * n for r in range(n) if counts(r * n)], lambda f, r: f == n - 1),
        ([f for f in range(n) if counts(f)], lambda f, r: r == n - 1),
    ):
        seen = set(starts)
        queue = deque(starts)
        while queue:
            sq = queue.popleft()
            f, r = sq % n, sq // n
            if goal_test(f, r):
                return True
            for df, dr in DIRS.values():
                nf, nr = f + df, r + dr
                if 0 <= nf < n and 0 <= nr < n:
                    nsq = nr * n + nf
                    if nsq not in seen and counts(nsq):
                        seen.add(nsq)
                        queue.append(nsq)
    return False


def oracle_outcome(pos: Position):
    """(tag, winner) computed straight from the rules text."""
    wr, br = road_bfs(pos, WHITE), road_bfs(pos, BLACK)
    if wr and br:
        return ("road_win", 1 - pos.to_move)
    if wr:
        return ("road_win", WHITE)
    if br:
        return ("road_win", BLACK)
    full = all(pos.stacks)
    white_out = pos.reserves[0] == 0 and pos.reserves[1] == 0
    black_out = pos.reserves[2] == 0 and pos.reserves[3] == 0
    if full or white_out or black_out:
        flats = [0, 0]
        for st in pos.stacks:
            if st and piece_kind(st[-1]) == FLAT:
                flats[piece_color(st[-1])] += 1
        if flats[WHITE] > flats[BLACK]:
            return ("flat_win", WHITE)
        if flats[BLACK] > flats[WHITE]:
            return ("flat_win", BLACK)
        return ("draw", None)
    return ("ongoing", None)


def oracle_moves(pos: Position):
    """Every legal move as a comparable tuple.

    Placements are ("place", square, kind); spreads are
    ("spread", square, direction, drops).  Spreads are found by
    simulating every candidate drop sequence square by square.
    """
    n = pos.size
    found = set()
    if pos.ply < 2:
        for sq in range(n * n):
            if not pos.stacks[sq]:
                found.add(("place", sq, FLAT))
        return found
    me = pos.to_move
    kinds = []
    if pos.reserves[me * 2] > 0:
        kinds += [FLAT, STANDING]
    if pos.reserves[me * 2 + 1] > 0:
        kinds += [CAPSTONE]
    for sq in range(n * n):
        if not pos.stacks[sq]:
            for k in kinds:
                found.add(("place", sq, k))
    for sq in range(n * n):
        st = pos.stacks[sq]
        if not st or piece_color(st[-1]) != me:
            continue
        f0, r0 = sq % n, sq // n
        for d, (df, dr) in DIRS.items():
            for take in range(1, min(len(st), n) + 1):
                carried = st[len(st) - take :]
                for drops in brute_compositions(take):
                    ok = True
                    f, r = f0, r0
                    dropped = 0
                    for i, cnt in enumerate(drops):
                        f, r = f + df, r + dr
                        if not (0 <= f < n and 0 <= r < n):
                            ok = False
                            break
                        target = pos.stacks[r * n + f]
                        if target:
                            tk = piece_kind(target[-1])
                            if tk == CAPSTONE:
                                ok = False
                                break
                            if tk == STANDING:
                                last = i == len(drops) - 1
                                lands_cap_alone = (
                                    cnt == 1
                                    and piece_kind(carried[-1]) == CAPSTONE
                                )
                                if not (last and lands_cap_alone):
                                    ok = False
                                    break
                        dropped += cnt
                    if ok:
                        found.add(("spread", sq, d, drops))
    return found


def as_tuple(move):
    """Map a package Move to the oracle's comparable form."""
    from tak.moves import Place

    if isinstance(move, Place):
        return ("place", move.square, move.kind)
    return ("spread", move.square, move.direction, move.drops)


def oracle_apply(pos: Position, move_tuple):
    """Apply an oracle move to a copied position, returning the copy.

    Used to drive oracle-only searches; not a mirror of the package
    apply (no undo, builds fresh lists).
    """
    q = pos.copy()
    n = q.size
    if move_tuple[0] == "place":
        _, sq, kind = move_tuple
        owner = (1 - q.to_move) if q.ply < 2 else q.to_move
        q.stacks[sq] = [owner * 3 + kind]
        q.reserves[owner * 2 + (1 if kind == CAPSTONE else 0)] -= 1
        q.plies_since_placement = 0
    else:
        _, sq, d, drops = move_tuple
        df, dr = DIRS[d]
        take = sum(drops)
        carried = q.stacks[sq][len(q.stacks[sq]) - take :]
        q.stacks[sq] = q.stacks[sq][: len(q.stacks[sq]) - take]
        f, r = sq % n, sq // n
        at = 0
        for i, cnt in enumerate(drops):
            f, r = f + df, r + dr
            tsq = r * n + f
            target = q.stacks[tsq]
            if target and piece_kind(target[-1]) == STANDING:
                target[-1] = piece_color(target[-1]) * 3 + FLAT
            q.stacks[tsq] = target + carried[at : at + cnt]
            at += cnt
        q.plies_since_placement += 1
    q.to_move = 1 - q.to_move
    q.ply += 1
    q.recompute_hashes()
    return q


def oracle_perft(pos: Position, depth: int) -> int:
    if depth == 0 or oracle_outcome(pos)[0] != "ongoing":
        return 1
    total = 0
    for mt in sorted(oracle_moves(pos), key=repr):
        total += oracle_perft(oracle_apply(pos, mt), depth - 1)
    return total


def plain_negamax(pos: Position, depth: int):
    """Alpha-beta negamax with no transposition table and no symmetry:
    the reference the solver's claims are checked against.

    Returns +1 if the side to move has a forced win within depth plies,
    -1 if every line loses within depth, else 0.
    """

    def rec(p, d, alpha, beta, trail):
        tag, winner = oracle_outcome(p)
        if tag != "ongoing":
            if tag == "draw":
                return 0
            return 1 if winner == p.to_move else -1
        if d == 0:
            return 0
        key = p.serialize()
        if key in trail:
            return 0
        trail = trail | {key}
        best = -2
        children = []
        for mt in sorted(oracle_moves(p), key=repr):
            child = oracle_apply(p, mt)
            tag2, win2 = oracle_outcome(child)
            if tag2 != "ongoing" and tag2 != "draw" and win2 == p.to_move:
                return 1
            children.append(child)
        for child in children:
            score = -rec(child, d - 1, -beta, -alpha, trail)
            if score > best:
                best = score
            if best > alpha:
                alpha = best
            if alpha >= beta:
                break
        return best

    return rec(pos, depth, -2, 2, frozenset())
