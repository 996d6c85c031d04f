"""Exact integer kernels for converting between power and factorial moments."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

__all__ = [
    "MAX_ORDER",
    "StirlingTable",
    "SymmetricPolyVector",
    "stirling_table",
    "stirling2",
    "elementary_symmetric",
    "falling_factorial_expansion",
]

MAX_ORDER = 20


@dataclass(frozen=True)
class StirlingTable:
    """Triangle of Stirling numbers of the second kind, ``entries[s][j]``."""

    max_n: int
    entries: Tuple[Tuple[int, ...], ...]

    def __getitem__(self, index: Tuple[int, int]) -> int:
        s, j = index
        return self.entries[s][j]


@lru_cache(maxsize=None)
def stirling_table(max_n: int = MAX_ORDER) -> StirlingTable:
    if max_n < 0:
        raise ValueError(f"max_n must be non-negative, got {max_n}")
    rows = [(1,)]
    for s in range(1, max_n + 1):
        prev = rows[-1]
        row = [0] * (s + 1)
        for j in range(1, s + 1):
            upper = prev[j] if j < s else 0
            row[j] = j * upper + prev[j - 1]
        rows.append(tuple(row))
    return StirlingTable(max_n, tuple(rows))


def stirling2(s: int, j: int) -> int:
    """Number of partitions of an ``s``-set into ``j`` non-empty blocks.

    >>> stirling2(5, 2)
    15
    """
    if not 0 <= j <= s <= MAX_ORDER:
        raise ValueError(f"stirling2 needs 0 <= j <= s <= {MAX_ORDER}, got s={s}, j={j}")
    return stirling_table()[s, j]


@dataclass(frozen=True)
class SymmetricPolyVector:
    """Elementary symmetric polynomials ``e_0..e_{s-1}`` of ``1, 2, ..., s-1``."""

    s: int
    e: Tuple[int, ...]


def elementary_symmetric(s: int) -> SymmetricPolyVector:
    """Elementary symmetric polynomials of ``{1, ..., s-1}``.

    ``e[r]`` is the coefficient of ``x^(s-1-r)`` in ``(x+1)(x+2)...(x+s-1)``,
    so ``e[0] = 1`` and ``e[s-1] = (s-1)!``.
    """
    if s < 1:
        raise ValueError(f"s must be positive, got {s}")
    e = [1]
    for root in range(1, s):
        # multiply the running polynomial by (x + root)
        e = [a + root * b for a, b in zip(e + [0], [0] + e)]
    return SymmetricPolyVector(s, tuple(e))


def falling_factorial_expansion(s: int) -> Tuple[int, ...]:
    """Return ``(c_0, c_1, ..., c_s)`` with ``X(X-1)...(X-s+1) = sum_r c_r X^r``.

    These are the signed Stirling numbers of the first kind,
    ``c_r = (-1)^(s-r) e_{s-r}``; ``c_0 = 0`` for every ``s >= 1``.
    """
    e = elementary_symmetric(s).e
    coeffs = [0] * (s + 1)
    for r in range(1, s + 1):
        coeffs[r] = (-1) ** (s - r) * e[s - r]
    return tuple(coeffs)
