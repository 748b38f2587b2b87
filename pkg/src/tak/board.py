"""Board state for Tak on square boards, sizes 3 through 8.

A position is a grid of stacks plus reserve counts, side to move, and a
ply counter.  Squares are addressed by (file, rank) with both 0-based
internally; square index = rank * size + file.  Stacks store piece codes
bottom to top.  Only the top piece of a stack may be standing or a
capstone; everything underneath is flat.

The first two plies are the swap opening: each player places a flat
stone belonging to their opponent.

Hot-path bookkeeping lives in bitmasks and one packed integer: per
color, masks of squares whose top is that color (any kind), counts
toward roads (flat or capstone), or is a flat; and eight 64-bit Zobrist
hashes, one per dihedral transform of the board, packed into a single
int so a push or pop is one XOR.  The canonical transposition key is
then the minimum of the eight words.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

WHITE, BLACK = 0, 1
FLAT, STANDING, CAPSTONE = 0, 1, 2

COLOR_NAMES = ("White", "Black")


def color_name(color: int) -> str:
    return COLOR_NAMES[color]

#: piece code = color * 3 + kind
PIECE_NAMES = ("wF", "wS", "wC", "bF", "bS", "bC")
_PIECE_BY_NAME = {name: code for code, name in enumerate(PIECE_NAMES)}

SWAP, NORMAL = "swap", "normal"

#: per-player (flats, capstones) by board size
STONE_COUNTS = {
    3: (10, 0),
    4: (15, 0),
    5: (21, 1),
    6: (30, 1),
    7: (40, 2),
    8: (50, 2),
}

#: stacks taller than this fall back to serialization hashing
HASH_HEIGHT_CAP = 16

_M64 = (1 << 64) - 1


def stone_counts(size: int) -> tuple[int, int]:
    """Per-player (flats, capstones) for a board size in 3..8."""
    try:
        return STONE_COUNTS[size]
    except KeyError:
        raise ValueError(f"unsupported board size {size}") from None


def piece(color: int, kind: int) -> int:
    return color * 3 + kind


def piece_color(code: int) -> int:
    return code // 3


def piece_kind(code: int) -> int:
    return code % 3


# ---------------------------------------------------------------------------
# Zobrist keys.  One 64-bit key per (square, height, piece code), plus side
# and phase keys.  Deterministic across runs so recorded hashes stay stable.
# The packed table carries all eight transform images of a key at once:
# word g of packed[sq][h][code] is the base key of (transformed square, h,
# code), so one big-int XOR updates every transform's hash together.

class _Keys:
    __slots__ = ("square", "packed", "side", "swap")

    def __init__(self, size: int):
        from .symmetry import square_perms

        rng = random.Random(0x7A6B0000 + size)
        self.square = [
            [[rng.getrandbits(64) for _ in range(6)] for _ in range(HASH_HEIGHT_CAP)]
            for _ in range(size * size)
        ]
        self.side = rng.getrandbits(64)
        self.swap = rng.getrandbits(64)
        perms = square_perms(size)
        self.packed = [
            [
                [
                    sum(
                        self.square[perms[g][sq]][h][code] << (64 * g)
                        for g in range(8)
                    )
                    for code in range(6)
                ]
                for h in range(HASH_HEIGHT_CAP)
            ]
            for sq in range(size * size)
        ]


_KEY_CACHE: dict[int, _Keys] = {}


def _keys(size: int) -> _Keys:
    k = _KEY_CACHE.get(size)
    if k is None:
        k = _KEY_CACHE[size] = _Keys(size)
    return k


# Per-size bit helpers for the road flood and fill tests.
class _Bits:
    __slots__ = ("full", "west", "east", "south", "north", "n")

    def __init__(self, n: int):
        nn = n * n
        self.n = n
        self.full = (1 << nn) - 1
        self.west = sum(1 << (r * n) for r in range(n))
        self.east = sum(1 << (r * n + n - 1) for r in range(n))
        self.south = (1 << n) - 1
        self.north = self.south << (nn - n)


_BITS_CACHE: dict[int, _Bits] = {}


def board_bits(size: int) -> _Bits:
    b = _BITS_CACHE.get(size)
    if b is None:
        b = _BITS_CACHE[size] = _Bits(size)
    return b


def mask_flood(seeds: int, mask: int, size: int) -> int:
    """Connected component of mask grown from seeds & mask."""
    b = board_bits(size)
    n = size
    notwest, noteast = ~b.west, ~b.east
    seeds &= mask
    while seeds:
        grown = (
            seeds
            | (seeds << n)
            | (seeds >> n)
            | ((seeds & noteast) << 1)
            | ((seeds & notwest) >> 1)
        ) & mask
        if grown == seeds:
            break
        seeds = grown
    return seeds


def mask_adjacent(mask: int, size: int) -> int:
    """Squares orthogonally adjacent to mask (mask itself included)."""
    b = board_bits(size)
    return (
        mask
        | (mask << size)
        | (mask >> size)
        | ((mask & ~b.east) << 1)
        | ((mask & ~b.west) >> 1)
    ) & b.full


def mask_has_road(mask: int, size: int) -> bool:
    """True when mask joins west-east or south-north."""
    b = board_bits(size)
    n = size
    notwest, noteast = ~b.west, ~b.east
    east, north = b.east, b.north
    if mask & b.west and mask & east:
        seeds = mask & b.west
        while True:
            grown = (
                seeds
                | (seeds << n)
                | (seeds >> n)
                | ((seeds & noteast) << 1)
                | ((seeds & notwest) >> 1)
            ) & mask
            if grown == seeds:
                break
            seeds = grown
        if seeds & east:
            return True
    if mask & b.south and mask & north:
        seeds = mask & b.south
        while True:
            grown = (
                seeds
                | (seeds << n)
                | (seeds >> n)
                | ((seeds & noteast) << 1)
                | ((seeds & notwest) >> 1)
            ) & mask
            if grown == seeds:
                break
            seeds = grown
        return bool(seeds & north)
    return False


@dataclass(frozen=True)
class Outcome:
    """Game result attached to a position.

    tag is one of "ongoing", "road_win", "flat_win", "draw"; winner is
    WHITE or BLACK for the win tags and None otherwise.
    """

    tag: str
    winner: int | None = None

    @property
    def is_terminal(self) -> bool:
        return self.tag != "ongoing"


ONGOING = Outcome("ongoing")
DRAW = Outcome("draw")


class Position:
    """Mutable Tak position.

    Move application mutates in place (see moves.apply / moves.undo);
    all other operations treat positions as values.
    """

    __slots__ = (
        "size",
        "stacks",
        "reserves",
        "to_move",
        "ply",
        "plies_since_placement",
        "_hp",
        "_tall",
        "_top",
        "_road",
        "_flat",
        "_pk",
    )

    def __init__(self, size: int):
        flats, caps = stone_counts(size)
        self.size = size
        self.stacks: list[list[int]] = [[] for _ in range(size * size)]
        # [white flats, white caps, black flats, black caps]
        self.reserves = [flats, caps, flats, caps]
        self.to_move = WHITE
        self.ply = 0
        self.plies_since_placement = 0
        self._hp = 0
        self._tall = 0
        self._top = [0, 0]
        self._road = [0, 0]
        self._flat = [0, 0]
        self._pk = _keys(size).packed

    # -- basic queries ------------------------------------------------

    @property
    def phase(self) -> str:
        return SWAP if self.ply < 2 else NORMAL

    def top(self, sq: int) -> int | None:
        st = self.stacks[sq]
        return st[-1] if st else None

    def height(self, sq: int) -> int:
        return len(self.stacks[sq])

    def reserve(self, color: int, kind: int) -> int:
        return self.reserves[color * 2 + (0 if kind != CAPSTONE else 1)]

    def occupied(self) -> int:
        return self._top[0] | self._top[1]

    def board_full(self) -> bool:
        return self.occupied() == board_bits(self.size).full

    def eight_hashes(self) -> list[int]:
        """The board hash of each dihedral transform, identity first."""
        hp = self._hp
        return [(hp >> (64 * g)) & _M64 for g in range(8)]

    # -- piece events (keep hashes and masks in sync) -------------------

    def _set_top(self, sq: int, code: int) -> None:
        bit = 1 << sq
        color = code // 3
        kind = code % 3
        self._top[color] |= bit
        if kind != STANDING:
            self._road[color] |= bit
        if kind == FLAT:
            self._flat[color] |= bit

    def _clear_top(self, sq: int, code: int) -> None:
        keep = ~(1 << sq)
        color = code // 3
        self._top[color] &= keep
        self._road[color] &= keep
        self._flat[color] &= keep

    def _push(self, sq: int, code: int) -> None:
        st = self.stacks[sq]
        h = len(st)
        bit = 1 << sq
        if h:
            keep = ~bit
            old = st[-1] // 3
            self._top[old] &= keep
            self._road[old] &= keep
            self._flat[old] &= keep
        st.append(code)
        color = code // 3
        kind = code - color * 3
        self._top[color] |= bit
        if kind != STANDING:
            self._road[color] |= bit
            if kind == FLAT:
                self._flat[color] |= bit
        if h < HASH_HEIGHT_CAP:
            self._hp ^= self._pk[sq][h][code]
        elif h == HASH_HEIGHT_CAP:
            self._tall += 1

    def _pop(self, sq: int) -> int:
        st = self.stacks[sq]
        code = st.pop()
        bit = 1 << sq
        keep = ~bit
        old = code // 3
        self._top[old] &= keep
        self._road[old] &= keep
        self._flat[old] &= keep
        if st:
            new = st[-1]
            color = new // 3
            kind = new - color * 3
            self._top[color] |= bit
            if kind != STANDING:
                self._road[color] |= bit
                if kind == FLAT:
                    self._flat[color] |= bit
        h = len(st)
        if h < HASH_HEIGHT_CAP:
            self._hp ^= self._pk[sq][h][code]
        elif h == HASH_HEIGHT_CAP:
            self._tall -= 1
        return code

    def recompute_hashes(self) -> None:
        """Rebuild the packed hashes and top masks from the stacks."""
        packed = _keys(self.size).packed
        self._hp = 0
        self._tall = 0
        self._top = [0, 0]
        self._road = [0, 0]
        self._flat = [0, 0]
        for sq, st in enumerate(self.stacks):
            if len(st) > HASH_HEIGHT_CAP:
                self._tall += 1
            for h, code in enumerate(st[:HASH_HEIGHT_CAP]):
                self._hp ^= packed[sq][h][code]
            if st:
                self._set_top(sq, st[-1])

    # -- hashing and equality ------------------------------------------

    def _suffix_key(self) -> int:
        k = _keys(self.size)
        out = k.side if self.to_move == BLACK else 0
        if self.ply < 2:
            out ^= k.swap
        return out

    def hash(self) -> int:
        """64-bit position hash over stacks, side to move, and phase."""
        if self._tall:
            digest = hashlib.blake2b(self.serialize().encode(), digest_size=8)
            return int.from_bytes(digest.digest(), "big")
        return (self._hp & _M64) ^ self._suffix_key()

    def canonical_key(self) -> int:
        """Hash shared by all eight dihedral transforms of this position."""
        if self._tall:
            from .symmetry import ALL_TRANSFORMS, serialize_under

            text = min(serialize_under(self, g) for g in ALL_TRANSFORMS)
            digest = hashlib.blake2b(text.encode(), digest_size=8)
            return int.from_bytes(digest.digest(), "big")
        return min(self.eight_hashes()) ^ self._suffix_key()

    def equal_for_search(self, other: Position) -> bool:
        """Equality used by transposition lookups: stacks, side, phase.

        The raw ply count and the placement counter are deliberately
        excluded.
        """
        return (
            self.size == other.size
            and self.to_move == other.to_move
            and self.phase == other.phase
            and self.stacks == other.stacks
        )

    # -- serialization --------------------------------------------------

    def serialize(self) -> str:
        """Canonical text form.

        One field per rank from the top rank down, squares comma-separated
        a-file first, each square the concatenated piece codes bottom to
        top or "-" when empty; then side to move, phase, and both
        reserves.
        """
        n = self.size
        ranks = []
        for r in range(n - 1, -1, -1):
            row = []
            for f in range(n):
                st = self.stacks[r * n + f]
                row.append("".join(PIECE_NAMES[c] for c in st) if st else "-")
            ranks.append(",".join(row))
        wf, wc, bf, bc = self.reserves
        return "{} {} {} F{}C{} F{}C{}".format(
            "/".join(ranks),
            "wb"[self.to_move],
            self.phase,
            wf,
            wc,
            bf,
            bc,
        )

    def copy(self) -> Position:
        dup = Position.__new__(Position)
        dup.size = self.size
        dup.stacks = [st[:] for st in self.stacks]
        dup.reserves = self.reserves[:]
        dup.to_move = self.to_move
        dup.ply = self.ply
        dup.plies_since_placement = self.plies_since_placement
        dup._hp = self._hp
        dup._tall = self._tall
        dup._top = self._top[:]
        dup._road = self._road[:]
        dup._flat = self._flat[:]
        dup._pk = self._pk
        return dup

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Position({self.serialize()!r})"


def new_position(size: int) -> Position:
    """Empty board with full reserves, White to place in the swap phase."""
    return Position(size)


def deserialize(text: str) -> Position:
    """Rebuild a position from Position.serialize output.

    The ply counter is synthesized from phase and side to move (the text
    form does not carry history), and the placement counter starts at 0.
    """
    try:
        board_part, tm, phase, wres, bres = text.split(" ")
    except ValueError:
        raise ValueError(f"malformed position text: {text!r}") from None
    ranks = board_part.split("/")
    n = len(ranks)
    pos = Position(n)
    for i, rank_text in enumerate(ranks):
        r = n - 1 - i
        cells = rank_text.split(",")
        if len(cells) != n:
            raise ValueError(f"rank {r + 1} has {len(cells)} squares, expected {n}")
        for f, cell in enumerate(cells):
            if cell == "-":
                continue
            if len(cell) % 2:
                raise ValueError(f"bad stack text {cell!r}")
            st = pos.stacks[r * n + f]
            for j in range(0, len(cell), 2):
                code = _PIECE_BY_NAME.get(cell[j : j + 2])
                if code is None:
                    raise ValueError(f"bad piece code in {cell!r}")
                st.append(code)
    for idx, code in enumerate(pos.stacks):
        for j, pc in enumerate(code[:-1]):
            if piece_kind(pc) != FLAT:
                raise ValueError(f"non-flat piece below the top of square {idx}")
    if tm not in ("w", "b"):
        raise ValueError(f"bad side to move {tm!r}")
    pos.to_move = WHITE if tm == "w" else BLACK
    if phase not in (SWAP, NORMAL):
        raise ValueError(f"bad phase {phase!r}")
    pos.ply = (0 if pos.to_move == WHITE else 1) if phase == SWAP else (2 + pos.to_move)
    for color, res_text in ((WHITE, wres), (BLACK, bres)):
        if not res_text.startswith("F") or "C" not in res_text:
            raise ValueError(f"bad reserve text {res_text!r}")
        flats_s, caps_s = res_text[1:].split("C")
        pos.reserves[color * 2] = int(flats_s)
        pos.reserves[color * 2 + 1] = int(caps_s)
    check_conservation(pos)
    pos.recompute_hashes()
    return pos


def check_conservation(pos: Position) -> None:
    """Raise if on-board pieces plus reserves differ from the stone table."""
    flats, caps = stone_counts(pos.size)
    placed = [0, 0, 0, 0]
    for st in pos.stacks:
        for code in st:
            placed[piece_color(code) * 2 + (1 if piece_kind(code) == CAPSTONE else 0)] += 1
    for color in (WHITE, BLACK):
        if placed[color * 2] + pos.reserves[color * 2] != flats:
            raise ValueError(f"flat count broken for color {color}")
        if placed[color * 2 + 1] + pos.reserves[color * 2 + 1] != caps:
            raise ValueError(f"capstone count broken for color {color}")


# ---------------------------------------------------------------------------
# Outcome.  Roads are connected groups of road-counting tops (flats and
# capstones, not standing stones) joining opposite board edges.  The masks
# make this a bit flood; the breadth-first oracle used by the tests lives
# with the tests on purpose.

def has_road(pos: Position, color: int) -> bool:
    return mask_has_road(pos._road[color], pos.size)


def flat_counts(pos: Position) -> tuple[int, int]:
    """Squares topped by a flat stone of each color (walls and caps do
    not score)."""
    return pos._flat[0].bit_count(), pos._flat[1].bit_count()


def outcome(pos: Position) -> Outcome:
    """Result of the position.

    A road beats the flat count when both trigger on the same move, and a
    double road goes to the player who just moved.  The flat game ends
    when the board is full or either player has placed every stone.
    """
    n = pos.size
    w_road = mask_has_road(pos._road[0], n)
    b_road = mask_has_road(pos._road[1], n)
    if w_road and b_road:
        return Outcome("road_win", 1 - pos.to_move)
    if w_road:
        return Outcome("road_win", WHITE)
    if b_road:
        return Outcome("road_win", BLACK)
    out_of_stones = (
        pos.reserves[0] + pos.reserves[1] == 0
        or pos.reserves[2] + pos.reserves[3] == 0
    )
    if out_of_stones or pos.occupied() == board_bits(n).full:
        w_flats, b_flats = flat_counts(pos)
        if w_flats > b_flats:
            return Outcome("flat_win", WHITE)
        if b_flats > w_flats:
            return Outcome("flat_win", BLACK)
        return DRAW
    return ONGOING
