"""Lower bound on the 2-exponent of the class number in high degree.

An imaginary n-quadratic field with class number 2^m needs m at least
``min_exponent(n)``.  Below n = 6 the bound says nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .radicand import Radicand

_TABLE = {6: 7, 7: 37, 8: 99}


@dataclass(frozen=True)
class BoundResult:
    n: int
    min_exponent: int


def min_exponent(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    if n <= 5:
        return 0
    if n in _TABLE:
        return _TABLE[n]
    return 2 ** (n - 1) - 34


def bound(n: int) -> BoundResult:
    return BoundResult(n, min_exponent(n))


def max_degree_exponent(m: int, n_max: int = 64) -> int:
    """Largest n whose floor still allows class number dividing 2^m."""
    n = 1
    while n < n_max and min_exponent(n + 1) <= m:
        n += 1
    return n


def prime_radicand_count(neg) -> int:
    """How many radicands are -1 or minus a prime."""
    return sum(1 for r in neg if len(Radicand.of(r).primes) <= 1)
