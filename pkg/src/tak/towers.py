"""Counting results about falling towers and game length.

A tower of height t on a board with carry limit n can fall in
2^min(n, t) - 1 ways: pick how many pieces to take (1..min(n, t)), then
any composition of that count as the drop sequence.  These are exactly
the spreads the move generator emits per direction on an open row, which
the tests cross-check.
"""
from __future__ import annotations

from .board import stone_counts
from .moves import _compositions


def fall_patterns(height: int, carry_limit: int) -> list[tuple[int, ...]]:
    """Every drop sequence for a tower of the given height, ordered by
    pieces taken, then lexicographically."""
    if height < 0 or carry_limit < 0:
        raise ValueError("height and carry limit must be nonnegative")
    out: list[tuple[int, ...]] = []
    for taken in range(1, min(height, carry_limit) + 1):
        out.extend(_compositions(taken))
    return out


def fall_count(height: int, carry_limit: int) -> int:
    """2^min(carry_limit, height) - 1, the closed form for
    len(fall_patterns(height, carry_limit))."""
    if height < 0 or carry_limit < 0:
        raise ValueError("height and carry limit must be nonnegative")
    return 2 ** min(height, carry_limit) - 1


def game_length_bound(size: int, k: int) -> int:
    """Upper bound 2 * f * k on game length under a rule that ends the
    game after k consecutive spreads by each player, where f is one
    player's total stone count (flats plus capstones)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    flats, caps = stone_counts(size)
    return 2 * (flats + caps) * k
