"""Depth-bounded proof search.

Iterative-deepening negamax over exact win distances: a position is
worth WIN_BASE minus the plies the mover needs to force a win, the
negation of that when the mover is lost, and 0 when nothing is proven
within the depth bound.  Draws and unknowns collapse to 0 on purpose;
only wins are ever certified.

Repetition of a position with the same side to move along the current
search path scores 0.  Such scores are path-dependent, so they are
never written to the transposition table; win-magnitude scores cannot
be manufactured by a repetition draw (a repetition only pulls values
toward 0) and are always safe to keep.

The table is keyed by the symmetry-canonical hash and every entry is
verified against the canonical serialization, so a lookup can never
confuse two genuinely different positions, and positions that are
mirror images of one another share their proofs.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from .board import (
    BLACK,
    CAPSTONE,
    FLAT,
    STANDING,
    WHITE,
    Outcome,
    Position,
    board_bits,
    color_name,
    mask_adjacent,
    mask_flood,
    mask_has_road,
    new_position,
    outcome,
    piece_color,
    piece_kind,
)
from .moves import Move, Place, Spread, apply, generate_moves, transform_move, undo
from .notation import format_move, square_name
from .symmetry import ALL_TRANSFORMS, INVERSE, canonical_form, serialize_under

WIN_BASE = 100_000
# Longest possible game on any supported size stays far below this.
WIN_MARGIN = 1_000
_EXACT, _LOWER, _UPPER = 0, 1, 2

PROVEN_WIN = "ProvenWin"
PROVEN_LOSS = "ProvenLoss"
UNKNOWN = "ProvenDrawOrUnknown"


@dataclass(frozen=True)
class GameValue:
    """Outcome of a bounded search, from the root mover's side."""

    tag: str
    color: Optional[int] = None
    plies: Optional[int] = None
    bound: Optional[int] = None

    @staticmethod
    def win(color: int, plies: int) -> "GameValue":
        return GameValue(PROVEN_WIN, color=color, plies=plies)

    @staticmethod
    def loss(color: int, plies: int) -> "GameValue":
        return GameValue(PROVEN_LOSS, color=color, plies=plies)

    @staticmethod
    def unknown(bound: int) -> "GameValue":
        return GameValue(UNKNOWN, bound=bound)

    @property
    def is_win(self) -> bool:
        return self.tag == PROVEN_WIN

    def winner(self) -> Optional[int]:
        if self.tag == PROVEN_WIN:
            return self.color
        if self.tag == PROVEN_LOSS:
            return 1 - self.color if self.color is not None else None
        return None

    def __str__(self) -> str:
        if self.tag == PROVEN_WIN:
            return f"ProvenWin({color_name(self.color)}, {self.plies})"
        if self.tag == PROVEN_LOSS:
            return f"ProvenLoss({color_name(self.color)}, {self.plies})"
        return f"ProvenDrawOrUnknown({self.bound})"

    def to_json(self) -> dict:
        out = {"tag": self.tag}
        if self.color is not None:
            out["color"] = color_name(self.color)
        if self.plies is not None:
            out["plies"] = self.plies
        if self.bound is not None:
            out["bound"] = self.bound
        return out


@dataclass(frozen=True)
class SolveResult:
    value: GameValue
    depth: int
    pv: tuple[Move, ...]
    nodes: int
    tt_hits: int

    def pv_text(self, size: int) -> list[str]:
        return [format_move(m, size) for m in self.pv]


@dataclass
class SolverConfig:
    max_depth: int = 20
    use_tt: bool = True
    threads: int = 1
    tt_max_entries: int = 2_000_000


class _Stats:
    __slots__ = ("nodes", "tt_hits")

    def __init__(self):
        self.nodes = 0
        self.tt_hits = 0


def _score_terminal(out: Outcome, to_move: int) -> int:
    if out.tag == "draw":
        return 0
    return WIN_BASE if out.winner == to_move else -WIN_BASE


def _is_win_score(score: int) -> bool:
    return abs(score) > WIN_BASE - WIN_MARGIN


def _placement_wins(pos: Position) -> list[Move]:
    """Placements that end the game won for the mover, square order.

    Works on the top masks without touching the board: a placement can
    only win by road or by ending the flat game.  One placement extends
    the road mask by one square, so the road-winning squares are exactly
    those adjacent to (or on an edge and touching) both opposite-edge
    components of the mover's road mask.
    """
    n = pos.size
    me = pos.to_move
    b = board_bits(n)
    occ = pos.occupied()
    road_me = pos._road[me]
    res_f = pos.reserves[me * 2]
    res_c = pos.reserves[me * 2 + 1]
    empties = ~occ & b.full
    # Board-full and last-stone endings do not depend on where the stone
    # lands, only on what it is.
    ends_flat_game = empties == (empties & -empties) or res_f + res_c == 1

    completes = 0
    if road_me.bit_count() + 1 >= n and (res_f or res_c):
        rw = mask_flood(b.west, road_me, n)
        re_ = mask_flood(b.east, road_me, n)
        completes = (b.west | mask_adjacent(rw, n)) & (b.east | mask_adjacent(re_, n))
        rs = mask_flood(b.south, road_me, n)
        rn = mask_flood(b.north, road_me, n)
        completes |= (b.south | mask_adjacent(rs, n)) & (b.north | mask_adjacent(rn, n))
        completes &= empties

    wins: list[Move] = []
    if completes or ends_flat_game:
        flats_me = pos._flat[me].bit_count()
        flats_opp = pos._flat[1 - me].bit_count()
        e = empties
        while e:
            low = e & -e
            e ^= low
            sq = low.bit_length() - 1
            roads_here = completes & low
            if res_f:
                if roads_here or (ends_flat_game and flats_me + 1 > flats_opp):
                    wins.append(Place(sq, FLAT))
                if ends_flat_game and flats_me > flats_opp:
                    wins.append(Place(sq, STANDING))
            if res_c:
                if roads_here or (ends_flat_game and flats_me > flats_opp):
                    wins.append(Place(sq, CAPSTONE))
    return wins


def _spread_wins(pos: Position, moves: list):
    """Yield the spreads in moves that end the game won for the mover.

    Simulates each spread on copies of the top masks alone; a spread
    never adds or removes pieces, so roads and the fill ending are fully
    decided by where the carried tops land.
    """
    n = pos.size
    me = pos.to_move
    opp = 1 - me
    full = board_bits(n).full
    road_count = pos._road[me].bit_count()
    n_empty = (~pos.occupied() & full).bit_count()
    deltas = (n, 1, -n, -1)
    stacks = pos.stacks
    top_all = pos._top
    road_all = pos._road
    flat_all = pos._flat

    for m in moves:
        if type(m) is not Spread:
            continue
        drops = m.drops
        # A spread adds at most one road top per drop square plus one for
        # the piece revealed at the source, and can only fill the board if
        # the drops cover every empty square.
        if road_count + len(drops) + 1 < n and n_empty > len(drops):
            continue
        st = stacks[m.square]
        take = sum(drops)
        tops = [top_all[0], top_all[1]]
        roads = [road_all[0], road_all[1]]
        flats = [flat_all[0], flat_all[1]]
        keep = ~(1 << m.square)
        tops[0] &= keep
        tops[1] &= keep
        roads[0] &= keep
        roads[1] &= keep
        flats[0] &= keep
        flats[1] &= keep
        h = len(st)
        if h > take:
            code = st[h - take - 1]
            bit_ = 1 << m.square
            c = code // 3
            k = code - c * 3
            tops[c] |= bit_
            if k != STANDING:
                roads[c] |= bit_
                if k == FLAT:
                    flats[c] |= bit_
        at = h - take
        sq_ = m.square
        delta = deltas[m.direction]
        for cnt in drops:
            sq_ += delta
            at += cnt
            bit_ = 1 << sq_
            keep = ~bit_
            code = st[at - 1]
            c = code // 3
            k = code - c * 3
            tops[1 - c] &= keep
            tops[c] |= bit_
            if k != STANDING:
                roads[c] |= bit_
                roads[1 - c] &= keep
                if k == FLAT:
                    flats[c] |= bit_
                    flats[1 - c] &= keep
                else:
                    flats[0] &= keep
                    flats[1] &= keep
            else:
                roads[0] &= keep
                roads[1] &= keep
                flats[0] &= keep
                flats[1] &= keep
        if mask_has_road(roads[me], n):
            yield m
        elif (
            (tops[0] | tops[1]) == full
            and flats[me].bit_count() > flats[opp].bit_count()
            and not mask_has_road(roads[opp], n)
        ):
            yield m


def winning_move(pos: Position, moves: Optional[list] = None) -> Optional[Move]:
    """A move that ends the game won for the mover, if any exists.
    Deterministic: first hit in canonical text order."""
    if pos.ply < 2:
        # A swap placement is the first or second stone on the board;
        # nothing can end there.
        return None
    wins = _placement_wins(pos)
    if moves is None:
        moves = generate_moves(pos)
    wins.extend(_spread_wins(pos, moves))
    if not wins:
        return None
    n = pos.size
    return min(wins, key=lambda m: format_move(m, n))


def _first_win(pos: Position, moves: Optional[list] = None):
    """(some winning move or None, move list if one had to be built).

    Existence check for the search: any winning move will do, and when a
    placement wins the move list is never generated at all.
    """
    if pos.ply < 2:
        return None, moves
    wins = _placement_wins(pos)
    if wins:
        return wins[0], moves
    if moves is None:
        moves = generate_moves(pos)
    for m in _spread_wins(pos, moves):
        return m, moves
    return None, moves


class Solver:
    """Holds a transposition table and searches positions with it.

    One instance may serve many solve calls; the table carries proofs
    across them.  Entries survive any position; the canonical-text
    verification makes stale or colliding entries harmless.
    """

    def __init__(self, config: SolverConfig | None = None):
        self.config = config or SolverConfig()
        self.tt: dict[int, tuple] = {}
        self._text_cache: dict[tuple, str] = {}

    # -- canonical identity ------------------------------------------------

    def _canon_key(self, pos: Position):
        """(tt key, transform index) for pos.  The key is shared by the
        whole symmetry orbit."""
        if pos._tall:
            g = min(ALL_TRANSFORMS, key=lambda t: serialize_under(pos, t))
            return pos.canonical_key(), g
        words = pos.eight_hashes()
        least = words[0]
        g = 0
        for i in range(1, 8):
            w = words[i]
            if w < least:
                least = w
                g = i
        return least ^ pos._suffix_key(), g

    def _canon_info(self, pos: Position):
        """(tt key, verification text, transform index) for pos.

        The text is the serialization of the transform with the least
        hash word, which every member of a symmetry orbit agrees on, so
        it doubles as the full-comparison guard against key collisions.
        """
        key, g = self._canon_key(pos)
        return key, serialize_under(pos, g), g

    def _move_text(self, move: Move, size: int) -> str:
        key = (move, size)
        text = self._text_cache.get(key)
        if text is None:
            text = format_move(move, size)
            self._text_cache[key] = text
        return text

    # -- move ordering -----------------------------------------------------

    def _ordered_moves(
        self, pos: Position, tt_move: Optional[Move], moves: list[Move], depth: int
    ) -> list[Move]:
        """tt move, then road-extending placements, then the rest in
        canonical text order.

        Ordering decides how fast proofs are found, never what they say.
        """
        n = pos.size
        moves = sorted(moves, key=lambda m: self._move_text(m, n))
        near_road = mask_adjacent(pos._road[pos.to_move], n)
        front = []
        rest = []
        for m in moves:
            if type(m) is Place and m.kind != STANDING and (near_road >> m.square) & 1:
                front.append(m)
            else:
                rest.append(m)
        ordered = front + rest
        if tt_move is not None and tt_move in moves:
            ordered.remove(tt_move)
            ordered.insert(0, tt_move)
        return ordered

    def _winning_move(self, pos: Position, moves=None) -> Optional[Move]:
        return winning_move(pos, moves)

    def _stabilizer(self, pos: Position) -> list[int]:
        """Transforms (other than identity) fixing this position."""
        if pos._tall:
            base = serialize_under(pos, 0)
            return [g for g in range(1, 8) if serialize_under(pos, g) == base]
        words = pos.eight_hashes()
        cands = [g for g in range(1, 8) if words[g] == words[0]]
        if not cands:
            return cands
        base = serialize_under(pos, 0)
        return [g for g in cands if serialize_under(pos, g) == base]

    def _dedupe_symmetric(self, moves: list[Move], stab: list[int], size: int) -> list[Move]:
        """One representative per move orbit under the stabilizer: moves
        that are mirror images of each other in a self-symmetric
        position have equal values, so search only the canonically
        first of each class."""
        keep = []
        seen = set()
        for m in moves:
            if m in seen:
                continue
            orbit = {m}
            frontier = [m]
            while frontier:
                cur = frontier.pop()
                for g in stab:
                    img = transform_move(cur, g, size)
                    if img not in orbit:
                        orbit.add(img)
                        frontier.append(img)
            seen |= orbit
            keep.append(min(orbit, key=lambda x: self._move_text(x, size)))
        return keep

    # -- search ------------------------------------------------------------

    def _search(self, pos, depth, alpha, beta, path, stats):
        """Negamax. Returns (score, repetition_tainted)."""
        stats.nodes += 1
        out = outcome(pos)
        if out.is_terminal:
            return _score_terminal(out, pos.to_move), False
        # Path identity by 64-bit hash: a collision could only inject a
        # spurious draw-for-search, which is tainted and never stored.
        ident = pos.hash()
        if ident in path:
            return 0, True
        if depth == 0:
            return 0, False

        alpha_orig = alpha
        tt_move = None
        key = verify = g = None
        if self.config.use_tt:
            key, g = self._canon_key(pos)
            entry = self.tt.get(key)
            if entry is not None:
                # Serialize only on a key hit; misses dominate.
                verify = serialize_under(pos, g)
                if entry[0] == verify:
                    e_depth, e_score, e_flag, e_move = entry[1:]
                    if e_move is not None:
                        tt_move = transform_move(e_move, INVERSE[g], pos.size)
                    # What an entry is usable for depends on which side of
                    # its bound carries the certificate.  A win at least
                    # this fast or a loss at most this slow is a real
                    # forced sequence, valid exactly when the remaining
                    # budget covers its distance; honoring one beyond the
                    # budget would smuggle a deep proof into a shallow
                    # level and break the minimal-depth report.  Every
                    # other bound only restates what a search to e_depth
                    # could see, so it needs e_depth >= depth.
                    if e_score > WIN_BASE - WIN_MARGIN:
                        if e_flag == _UPPER:
                            usable = e_depth >= depth
                        else:
                            usable = WIN_BASE - e_score <= depth
                    elif e_score < -(WIN_BASE - WIN_MARGIN):
                        if e_flag == _LOWER:
                            usable = e_depth >= depth
                        else:
                            usable = WIN_BASE + e_score <= depth
                    else:
                        usable = e_depth >= depth
                    if usable:
                        stats.tt_hits += 1
                        if e_flag == _EXACT:
                            return e_score, False
                        if e_flag == _LOWER:
                            alpha = max(alpha, e_score)
                        else:
                            beta = min(beta, e_score)
                        if alpha >= beta:
                            return e_score, False

        win, moves = _first_win(pos)
        if win is not None:
            score = WIN_BASE - 1
            if self.config.use_tt:
                if verify is None:
                    verify = serialize_under(pos, g)
                self._store(key, verify, depth, score, _EXACT, win, g, pos.size)
            return score, False
        if moves is None:
            moves = generate_moves(pos)
        stab = self._stabilizer(pos)
        if stab:
            moves = self._dedupe_symmetric(moves, stab, pos.size)

        best = -WIN_BASE - 1
        best_move = None
        tainted = False
        path.add(ident)
        try:
            for m in self._ordered_moves(pos, tt_move, moves, depth):
                token = apply(pos, m)
                v, t = self._search(pos, depth - 1, -beta, -alpha, path, stats)
                undo(pos, token)
                v = -v
                if v > WIN_BASE - WIN_MARGIN:
                    v -= 1
                elif v < -(WIN_BASE - WIN_MARGIN):
                    v += 1
                tainted = tainted or t
                if v > best:
                    best = v
                    best_move = m
                if best > alpha:
                    alpha = best
                if alpha >= beta or best >= WIN_BASE - 1:
                    break
        finally:
            path.discard(ident)

        if self.config.use_tt and (
            _is_win_score(best) or (not tainted and depth >= 2)
        ):
            if best <= alpha_orig:
                flag = _UPPER
            elif best >= beta:
                flag = _LOWER
            else:
                flag = _EXACT
            if verify is None:
                verify = serialize_under(pos, g)
            self._store(key, verify, depth, best, flag, best_move, g, pos.size)
        return best, tainted

    def _store(self, key, verify, depth, score, flag, move, g, size):
        if move is not None and g is not None:
            move = transform_move(move, g, size)
        if key not in self.tt and len(self.tt) >= self.config.tt_max_entries:
            return
        self.tt[key] = (verify, depth, score, flag, move)

    def _search_root(self, root, depth, stats, alpha, beta):
        """One search from the root over the given window, optionally
        splitting the root moves across threads (shared table, private
        boards).

        In the winning window a first hit ends the level: iterative
        deepening already ruled out faster wins, so every win found at
        this level has the same distance.
        """
        out = outcome(root)
        if out.is_terminal:
            return _score_terminal(out, root.to_move)
        all_moves = generate_moves(root)
        win = winning_move(root, all_moves)
        if win is not None:
            return WIN_BASE - 1
        stab = self._stabilizer(root)
        if stab:
            all_moves = self._dedupe_symmetric(all_moves, stab, root.size)
        moves = self._ordered_moves(root, self._root_tt_move(root), all_moves, depth)
        if self.config.threads <= 1 or len(moves) < 2:
            best = -WIN_BASE - 1
            path = set()
            for m in moves:
                token = apply(root, m)
                v, _ = self._search(root, depth - 1, -beta, -alpha, path, stats)
                undo(root, token)
                v = -v
                if v > WIN_BASE - WIN_MARGIN:
                    v -= 1
                elif v < -(WIN_BASE - WIN_MARGIN):
                    v += 1
                if v > best:
                    best = v
                if best > alpha:
                    alpha = best
                if alpha >= beta or best > WIN_BASE - WIN_MARGIN:
                    break
            return best

        results = {}
        lock = threading.Lock()
        index = {"next": 0, "stop": False}

        def worker():
            local = _Stats()
            board = root.copy()
            while True:
                with lock:
                    if index["stop"]:
                        break
                    i = index["next"]
                    if i >= len(moves):
                        break
                    index["next"] = i + 1
                m = moves[i]
                token = apply(board, m)
                v, _ = self._search(board, depth - 1, -beta, -alpha, set(), local)
                undo(board, token)
                v = -v
                if v > WIN_BASE - WIN_MARGIN:
                    v -= 1
                elif v < -(WIN_BASE - WIN_MARGIN):
                    v += 1
                with lock:
                    results[i] = v
                    if v > WIN_BASE - WIN_MARGIN:
                        index["stop"] = True
            with lock:
                stats.nodes += local.nodes
                stats.tt_hits += local.tt_hits

        threads = [
            threading.Thread(target=worker)
            for _ in range(min(self.config.threads, len(moves)))
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        return max(results.values())

    def _root_tt_move(self, root) -> Optional[Move]:
        if not self.config.use_tt:
            return None
        key, verify, g = self._canon_info(root)
        entry = self.tt.get(key)
        if entry is not None and entry[0] == verify and entry[4] is not None:
            return transform_move(entry[4], INVERSE[g], root.size)
        return None

    # -- public API ----------------------------------------------------------

    def solve(self, pos: Position, max_depth: Optional[int] = None) -> SolveResult:
        """Iterative deepening from pos until a win or loss is proven
        or the depth budget runs out."""
        if outcome(pos).is_terminal:
            raise ValueError("solve requires an ongoing position")
        limit = self.config.max_depth if max_depth is None else max_depth
        if limit < 1:
            raise ValueError("max_depth must be at least 1")

        root, g_root = canonical_form(pos)
        stats = _Stats()
        score = 0
        reached = limit
        win_floor = WIN_BASE - WIN_MARGIN
        for depth in range(1, limit + 1):
            # Only certainties matter, so scout each level twice with
            # null-ish windows around the win and loss thresholds; every
            # in-between value fails cheaply instead of being measured.
            score = self._search_root(root.copy(), depth, stats, win_floor, WIN_BASE + 1)
            if score > win_floor:
                reached = depth
                break
            score = self._search_root(
                root.copy(), depth, stats, -WIN_BASE - 1, -win_floor
            )
            if score < -win_floor:
                reached = depth
                break
            score = 0

        mover = pos.to_move
        if score > win_floor:
            plies = WIN_BASE - score
            value = GameValue.win(mover, plies)
            pv = self._principal_variation(root, plies, stats, mover_wins=True)
        elif score < -win_floor:
            plies = WIN_BASE + score
            value = GameValue.loss(mover, plies)
            pv = self._principal_variation(root, plies, stats, mover_wins=False)
        else:
            value = GameValue.unknown(limit)
            pv = ()
        if pv and g_root != 0:
            inv = INVERSE[g_root]
            pv = tuple(transform_move(m, inv, pos.size) for m in pv)
        return SolveResult(value, reached, tuple(pv), stats.nodes, stats.tt_hits)

    def _principal_variation(
        self, root: Position, plies: int, stats, mover_wins: bool
    ) -> tuple:
        """Replay the proof line by re-searching each step against the
        warm table, always taking the canonically first best move.

        The window alternates with the side to move: under the winner the
        children are exact losses, under the loser exact wins; everything
        else fails the scout and drops out of the argmax on its own.
        """
        pv = []
        cur = root.copy()
        remaining = plies
        winner_to_move = mover_wins
        win_floor = WIN_BASE - WIN_MARGIN
        while remaining > 0 and not outcome(cur).is_terminal and len(pv) < 4 * plies + 8:
            if winner_to_move:
                lo, hi = -WIN_BASE - 1, -win_floor
            else:
                lo, hi = win_floor, WIN_BASE + 1
            best_v = -WIN_BASE - 1
            best_m = None
            moves = generate_moves(cur)
            moves.sort(key=lambda m: self._move_text(m, cur.size))
            for m in moves:
                token = apply(cur, m)
                out = outcome(cur)
                if out.is_terminal:
                    v = -_score_terminal(out, cur.to_move)
                else:
                    v, _ = self._search(
                        cur, max(remaining - 1, 1), lo, hi, set(), stats
                    )
                    v = -v
                undo(cur, token)
                if v > WIN_BASE - WIN_MARGIN:
                    v -= 1
                if v > best_v:
                    best_v = v
                    best_m = m
            if best_m is None:
                break
            pv.append(best_m)
            apply(cur, best_m)
            winner_to_move = not winner_to_move
            # abs() so the walk also paces itself on the losing side,
            # where the stalling distance shows up negated.
            remaining = WIN_BASE - abs(best_v) if _is_win_score(best_v) else remaining - 1
        return tuple(pv)


def solve(pos: Position, max_depth: int = 20, config: SolverConfig | None = None) -> SolveResult:
    cfg = config or SolverConfig(max_depth=max_depth)
    return Solver(cfg).solve(pos, max_depth)


def refuted_in_two(pos: Position, black_move: Move) -> Optional[Move]:
    """If the given Black move lets White end the game at once, return
    such a White reply (canonically first); otherwise None."""
    if pos.to_move != BLACK:
        raise ValueError("refuted_in_two expects Black to move")
    work = pos.copy()
    apply(work, black_move)
    if outcome(work).is_terminal:
        return None
    return winning_move(work)


def best_move(pos: Position, max_depth: int = 20) -> Move:
    """Win-preserving move when one is proven, else the move that
    stalls the opponent's proof the longest.  Deterministic: ties go to
    the first move in canonical text order."""
    if outcome(pos).is_terminal:
        raise ValueError("best_move requires an ongoing position")
    solver = Solver(SolverConfig(max_depth=max_depth))
    # Warm the table once so the per-move probes below are cheap.
    solver.solve(pos, max_depth)
    stats = _Stats()
    work = pos.copy()
    moves = generate_moves(work)
    moves.sort(key=lambda m: solver._move_text(m, work.size))
    win_floor = WIN_BASE - WIN_MARGIN
    best_v = -WIN_BASE - 2
    chosen = None
    for m in moves:
        token = apply(work, m)
        out = outcome(work)
        if out.is_terminal:
            v = -_score_terminal(out, work.to_move)
        else:
            # Two scouts pin the child down as a win, a loss, or neither.
            v, _ = solver._search(
                work, max_depth - 1, win_floor, WIN_BASE + 1, set(), stats
            )
            if v <= win_floor:
                v, _ = solver._search(
                    work, max_depth - 1, -WIN_BASE - 1, -win_floor, set(), stats
                )
                if v >= -win_floor:
                    v = 0
            v = -v
        undo(work, token)
        if v > WIN_BASE - WIN_MARGIN:
            v -= 1
        elif v < -(WIN_BASE - WIN_MARGIN):
            v += 1
        if v > best_v:
            best_v = v
            chosen = m
    return chosen


def aturan_openings(size: int = 3) -> list[tuple[int, int]]:
    """All ordered (Black square, White square) flat placements."""
    nn = size * size
    return [(b, w) for b in range(nn) for w in range(nn) if b != w]


def aturan_position(black_sq: int, white_sq: int, size: int = 3) -> Position:
    """Start position after the two opening flats, White to move."""
    if black_sq == white_sq:
        raise ValueError("opening flats need distinct squares")
    pos = new_position(size)
    pos.stacks[black_sq] = [BLACK * 3 + FLAT]
    pos.stacks[white_sq] = [WHITE * 3 + FLAT]
    pos.reserves[2] -= 1
    pos.reserves[0] -= 1
    pos.ply = 2
    pos.to_move = WHITE
    pos.recompute_hashes()
    return pos


@dataclass(frozen=True)
class AturanEntry:
    black_square: str
    white_square: str
    result: SolveResult


@dataclass
class AturanReport:
    size: int
    max_depth: int
    entries: list[AturanEntry] = field(default_factory=list)

    def all_proven_for(self, color: int) -> bool:
        return all(
            e.result.value.is_win and e.result.value.color == color
            for e in self.entries
        )

    def orbit_count(self) -> int:
        keys = set()
        for e in self.entries:
            b = _parse_sq(e.black_square, self.size)
            w = _parse_sq(e.white_square, self.size)
            keys.add(aturan_position(b, w, self.size).canonical_key())
        return len(keys)


def _parse_sq(name: str, size: int) -> int:
    from .notation import parse_square

    return parse_square(name, size)


def solve_all_aturan(
    size: int = 3,
    max_depth: int = 20,
    threads: int = 1,
    progress=None,
) -> AturanReport:
    """Solve every ordered opening pair, one fresh search per symmetry
    orbit, sharing each orbit's proof across its members.

    A fresh table per orbit keeps the reported proof depths independent
    of enumeration order; a shared one would let certificates leak
    between orbits and shrink later depths arbitrarily.
    """
    if size != 3:
        raise ValueError("only the 3x3 board is solved")
    report = AturanReport(size=size, max_depth=max_depth)
    orbit_results: dict[int, SolveResult] = {}
    for black_sq, white_sq in aturan_openings(size):
        pos = aturan_position(black_sq, white_sq, size)
        okey = pos.canonical_key()
        cached = orbit_results.get(okey)
        if cached is None:
            solver = Solver(
                SolverConfig(max_depth=max_depth, threads=threads)
            )
            canon = canonical_form(pos)[0]
            cached = solver.solve(canon, max_depth)
            orbit_results[okey] = cached
        g = canonical_form(pos)[1]
        inv = INVERSE[g]
        pv = tuple(transform_move(m, inv, size) for m in cached.pv)
        entry = AturanEntry(
            square_name(black_sq, size),
            square_name(white_sq, size),
            SolveResult(cached.value, cached.depth, pv, cached.nodes, cached.tt_hits),
        )
        report.entries.append(entry)
        if progress is not None:
            progress(entry)
    return report
