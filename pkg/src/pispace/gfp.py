"""Exact linear algebra over prime fields GF(p), p < 2**31."""

from __future__ import annotations

from typing import Sequence


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def rank_mod_p(vectors: Sequence[Sequence[int]], p: int) -> int:
    """Rank of the matrix whose rows are the given vectors, over GF(p).

    Plain Gaussian elimination with modular inverses; everything stays an
    int mod p, so the result is exact.
    """
    rows = [[x % p for x in v] for v in vectors]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    while col < ncols and rank < len(rows):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(a - f * b) % p for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def columns_independent(columns: Sequence[Sequence[int]], p: int) -> bool:
    """True iff the given column vectors are linearly independent over GF(p)."""
    if not columns:
        return True
    return rank_mod_p(columns, p) == len(columns)
