"""Move text: parsing, formatting, and shorthand expansion.

Canonical form is square + direction + drop digits for spreads
("c2>231") and an optional S/C prefix plus square for placements
("Sa3").  The parser additionally accepts an F placement prefix, an
optional carry-count prefix on spreads ("6c2>231"), and bare directions
("b1<", carry the whole stack in one drop); none of those are ever
emitted.

Shorthand covers three diagram conveniences: "(S)a1" (flat or wall),
"b2<(2)" (any drop count 1..2), and "c2±1" (north or south).
"""
from __future__ import annotations

from .board import CAPSTONE, FLAT, STANDING, stone_counts
from .moves import DIRECTION_CHARS, Move, Place, Spread

_KIND_BY_PREFIX = {"S": STANDING, "C": CAPSTONE, "F": FLAT}
_PREFIX_BY_KIND = {STANDING: "S", CAPSTONE: "C", FLAT: ""}


class NotationError(ValueError):
    """Parse failure; offset is the byte position of the offending
    character in the input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


def square_name(sq: int, size: int) -> str:
    return chr(ord("a") + sq % size) + str(sq // size + 1)


def parse_square(text: str, size: int, offset: int = 0) -> int:
    if len(text) < 2:
        raise NotationError("expected a square", offset)
    f = ord(text[0]) - ord("a")
    if not 0 <= f < size:
        raise NotationError(f"file {text[0]!r} off the board", offset)
    if not text[1].isdigit():
        raise NotationError("expected a rank digit", offset + 1)
    r = int(text[1]) - 1
    if not 0 <= r < size:
        raise NotationError(f"rank {text[1]!r} off the board", offset + 1)
    return r * size + f


def parse_move(text: str, size: int) -> Move:
    """Parse one move for the given board size.

    No position is consulted: bare-direction spreads come back with
    empty drops, to be resolved on application.
    """
    if size not in (3, 4, 5, 6, 7, 8):
        raise ValueError(f"unsupported board size {size}")
    if not text:
        raise NotationError("empty move text", 0)
    i = 0
    count = None
    kind = None
    if text[i] in _KIND_BY_PREFIX:
        kind = _KIND_BY_PREFIX[text[i]]
        i += 1
    elif text[i].isdigit():
        count = int(text[i])
        if count == 0:
            raise NotationError("carry count cannot be 0", i)
        i += 1
    sq = parse_square(text[i:], size, i)
    i += 2
    if i == len(text):
        if count is not None:
            raise NotationError("carry count on a placement", 0)
        k = FLAT if kind is None else kind
        if k == CAPSTONE and stone_counts(size)[1] == 0:
            raise NotationError(f"no capstones at size {size}", 0)
        return Place(sq, k)
    if text[i] not in DIRECTION_CHARS:
        raise NotationError(f"expected a direction, got {text[i]!r}", i)
    if kind is not None:
        raise NotationError("placement prefix on a spread", 0)
    direction = DIRECTION_CHARS.index(text[i])
    i += 1
    drops = []
    while i < len(text):
        if not text[i].isdigit():
            raise NotationError(f"unexpected character {text[i]!r}", i)
        d = int(text[i])
        if d == 0:
            raise NotationError("drop count cannot be 0", i)
        drops.append(d)
        i += 1
    if not drops:
        # "6c2>" carries six and drops them together; "c2>" carries the
        # whole stack (resolved against the position later)
        drops = [count] if count is not None else []
    elif count is not None and sum(drops) != count:
        raise NotationError(
            f"carry count {count} does not match drop sum {sum(drops)}", 0
        )
    if sum(drops) > size:
        raise NotationError(f"drop sum {sum(drops)} exceeds carry limit {size}", 0)
    return Spread(sq, direction, tuple(drops))


def format_move(move: Move, size: int) -> str:
    """Canonical text for a move; inverse of parse_move on its output."""
    if isinstance(move, Place):
        return _PREFIX_BY_KIND[move.kind] + square_name(move.square, size)
    if not move.drops:
        raise ValueError("cannot format an unresolved spread")
    return (
        square_name(move.square, size)
        + DIRECTION_CHARS[move.direction]
        + "".join(str(d) for d in move.drops)
    )


def expand_shorthand(text: str, size: int) -> list[Move]:
    """Expand a diagram move that may use (S), (n), or ± shorthand.

    Plain moves come back as a one-element list.  "(S)a1" is the flat
    and the wall placement; "b2<(2)" is every drop count from 1 up to
    the parenthesized digit; "c2±1" is the north and the south spread.
    """
    variants = [text]
    if "(" in text:
        open_i = text.index("(")
        close_i = text.find(")", open_i)
        if close_i != open_i + 2:
            raise NotationError("bad parenthesized shorthand", open_i)
        inner = text[open_i + 1]
        rest = text[open_i + 2 + 1 :]
        head = text[:open_i]
        if "(" in rest:
            raise NotationError("multiple shorthand groups", open_i)
        if inner == "S":
            if head or not rest:
                raise NotationError("misplaced (S) shorthand", open_i)
            variants = [rest, "S" + rest]
        elif inner.isdigit():
            if rest:
                raise NotationError("digits after (n) shorthand", open_i)
            top = int(inner)
            if top == 0:
                raise NotationError("drop count cannot be 0", open_i + 1)
            variants = [head + str(k) for k in range(1, top + 1)]
        else:
            raise NotationError(f"bad shorthand {inner!r}", open_i + 1)
    elif "±" in text:
        i = text.index("±")
        variants = [
            text[:i] + "+" + text[i + 1 :],
            text[:i] + "-" + text[i + 1 :],
        ]
    moves = []
    for v in variants:
        m = parse_move(v, size)
        if m not in moves:
            moves.append(m)
    return moves
