"""The eight board symmetries (dihedral group of the square).

Transform g in 0..7 is decomposed as g = rot + 4 * flip: an optional
transpose across the a1 diagonal followed by rot quarter-turns
counterclockwise.  Tables are derived numerically per board size; the
composition and inverse tables are size-independent.
"""
from __future__ import annotations

ALL_TRANSFORMS = tuple(range(8))
IDENTITY = 0

_NAMES = (
    "identity",
    "rot90",
    "rot180",
    "rot270",
    "transpose",
    "rot90*transpose",
    "rot180*transpose",
    "rot270*transpose",
)


def transform_name(g: int) -> str:
    return _NAMES[g]


def _map_fr(g: int, f: int, r: int, n: int) -> tuple[int, int]:
    if g >= 4:
        f, r = r, f
    for _ in range(g % 4):
        f, r = n - 1 - r, f
    return f, r


_PERM_CACHE: dict[int, list[list[int]]] = {}


def square_perms(size: int) -> list[list[int]]:
    """perm[g][sq] = image square of sq under transform g."""
    perms = _PERM_CACHE.get(size)
    if perms is None:
        perms = []
        for g in range(8):
            p = [0] * (size * size)
            for r in range(size):
                for f in range(size):
                    nf, nr = _map_fr(g, f, r, size)
                    p[r * size + f] = nr * size + nf
            perms.append(p)
        _PERM_CACHE[size] = perms
    return perms


def _build_direction_perms() -> list[list[int]]:
    # directions 0..3 = N,E,S,W as used by the move generator
    deltas = {(0, 1): 0, (1, 0): 1, (0, -1): 2, (-1, 0): 3}
    out = []
    n = 5  # any size works; direction action is size-independent
    for g in range(8):
        row = [0] * 4
        for (df, dr), d in deltas.items():
            f0, r0 = 2, 2
            a = _map_fr(g, f0, r0, n)
            b = _map_fr(g, f0 + df, r0 + dr, n)
            row[d] = deltas[(b[0] - a[0], b[1] - a[1])]
        out.append(row)
    return out


DIRECTION_PERMS = _build_direction_perms()


def _build_group_tables() -> tuple[list[list[int]], list[int]]:
    perms = square_perms(3)
    index = {tuple(p): g for g, p in enumerate(perms)}
    compose = [[0] * 8 for _ in range(8)]
    inverse = [0] * 8
    for a in range(8):
        for b in range(8):
            # apply b first, then a
            combined = tuple(perms[a][perms[b][sq]] for sq in range(9))
            compose[a][b] = index[combined]
        inverse[a] = next(
            b for b in range(8) if compose[a][b] == IDENTITY
        )
    return compose, inverse


COMPOSE, INVERSE = _build_group_tables()


def _permute_mask(mask: int, perm: list[int]) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << perm[low.bit_length() - 1]
        mask ^= low
    return out


def transform(pos, g: int):
    """Return a new position with the board mapped through transform g."""
    from .board import Position

    dup = Position.__new__(Position)
    dup.size = pos.size
    perm = square_perms(pos.size)[g]
    stacks = [None] * (pos.size * pos.size)
    for sq, st in enumerate(pos.stacks):
        stacks[perm[sq]] = st[:]
    dup.stacks = stacks
    dup.reserves = pos.reserves[:]
    dup.to_move = pos.to_move
    dup.ply = pos.ply
    dup.plies_since_placement = pos.plies_since_placement
    # hash of transform(p, g) under transform h equals hash of p under h*g
    words = pos.eight_hashes()
    dup._hp = sum(words[COMPOSE[h][g]] << (64 * h) for h in range(8))
    dup._tall = pos._tall
    dup._top = [_permute_mask(m, perm) for m in pos._top]
    dup._road = [_permute_mask(m, perm) for m in pos._road]
    dup._flat = [_permute_mask(m, perm) for m in pos._flat]
    dup._pk = pos._pk
    return dup


_PIECE_NAMES = None


def serialize_under(pos, g: int) -> str:
    """serialize() of transform(pos, g), built without copying the
    position.  Square sq of the image holds the stack of the preimage
    square, so walk the output order through the inverse permutation."""
    global _PIECE_NAMES
    names = _PIECE_NAMES
    if names is None:
        from .board import PIECE_NAMES

        names = _PIECE_NAMES = PIECE_NAMES
    n = pos.size
    perm = square_perms(n)[INVERSE[g]]
    stacks = pos.stacks
    ranks = []
    for r in range(n - 1, -1, -1):
        base = r * n
        row = []
        for f in range(n):
            st = stacks[perm[base + f]]
            h = len(st)
            if h == 0:
                row.append("-")
            elif h == 1:
                row.append(names[st[0]])
            elif h == 2:
                row.append(names[st[0]] + names[st[1]])
            else:
                row.append("".join([names[c] for c in st]))
        ranks.append(",".join(row))
    wf, wc, bf, bc = pos.reserves
    return "{} {} {} F{}C{} F{}C{}".format(
        "/".join(ranks), "wb"[pos.to_move], pos.phase, wf, wc, bf, bc
    )


def canonical_form(pos) -> tuple["Position", int]:
    """The lexicographically smallest serialization among the eight
    transforms, with the transform that produces it.

    Canonical of canonical is the identity transform.
    """
    best_g = 0
    best_text = None
    for g in ALL_TRANSFORMS:
        text = serialize_under(pos, g)
        if best_text is None or text < best_text:
            best_g, best_text = g, text
    return transform(pos, best_g), best_g
