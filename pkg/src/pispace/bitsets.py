"""Subsets of an indexed ground set, encoded as int bitmasks.

Masks give O(1) set algebra for grounds up to a machine word and remain
exact beyond that (Python ints are unbounded).  Public interfaces speak
sorted index tuples; these helpers translate between the two.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator


def bit(i: int) -> int:
    return 1 << i


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def subsets_of_size(mask: int, k: int) -> Iterator[int]:
    """Size-k submasks, lexicographic on their index tuples."""
    for combo in combinations(indices_of(mask), k):
        yield mask_of(combo)


def submasks(mask: int) -> Iterator[int]:
    """All submasks including 0 and mask itself (descending numeric order)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def lex_sorted(masks: Iterable[int]) -> list[int]:
    """Sort masks lexicographically on their sorted index tuples."""
    return sorted(masks, key=indices_of)
