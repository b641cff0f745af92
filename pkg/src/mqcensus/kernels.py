"""Hot integer kernels.

Each kernel has a numba path and a plain numpy/Python path; ``_accel``
picks one at import time.  The numba bodies are written so that they also
run unjitted, which keeps the two paths honest against each other.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit


# ---------------------------------------------------------------------------
# positive definite forms: bulk tally over all discriminants
# ---------------------------------------------------------------------------

@njit
def _tally_jit(bound, a_lo, a_hi):
    counts = np.zeros(bound + 1, dtype=np.int32)
    for a in range(a_lo, a_hi + 1):
        step = 4 * a
        for b in range(-a + 1, a + 1):
            c = a if b >= 0 else a + 1
            n = step * c - b * b
            while n <= bound:
                counts[n] += 1
                n += step
    return counts


def _tally_numpy(bound, a_lo, a_hi):
    counts = np.zeros(bound + 1, dtype=np.int32)
    for a in range(a_lo, a_hi + 1):
        step = 4 * a
        for b in range(-a + 1, a + 1):
            c = a if b >= 0 else a + 1
            n = step * c - b * b
            if n <= bound:
                counts[n:bound + 1:step] += 1
    return counts


def tally_a_max(bound):
    """Largest leading coefficient of a reduced form with |disc| <= bound."""
    return math.isqrt(bound // 3)


def reduced_form_tally(bound, a_lo=1, a_hi=None):
    """Return ``t`` with ``t[n]`` = number of reduced forms of discriminant ``-n``.

    Forms are (a, b, c) with |b| <= a <= c and b >= 0 when |b| = a or a = c.
    Non-primitive forms are included; for a fundamental discriminant every
    form is primitive, so ``t[|d|]`` is the class number there.  Restricting
    ``a`` to [a_lo, a_hi] gives a partial tally; partial tallies over a
    partition of the range sum to the full one.
    """
    if a_hi is None:
        a_hi = tally_a_max(bound)
    if bound < 3 or a_hi < a_lo:
        return np.zeros(bound + 1, dtype=np.int32)
    if USE_NUMBA:
        return _tally_jit(bound, a_lo, a_hi)
    return _tally_numpy(bound, a_lo, a_hi)


# ---------------------------------------------------------------------------
# positive definite forms: one discriminant
# ---------------------------------------------------------------------------

def small_primes(limit):
    """Primes <= limit as an int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve).astype(np.int64)


@njit
def _powmod(base, exp, mod):
    result = 1
    base %= mod
    while exp > 0:
        if exp & 1:
            result = (result * base) % mod
        base = (base * base) % mod
        exp >>= 1
    return result


@njit
def _ideal_count_head_jit(D, primes, amax):
    # number of b mod 2a with b^2 = -D (mod 4a), summed over 1 <= a <= amax
    cnt = np.ones(amax + 1, dtype=np.int64)
    for p in primes:
        if p > amax:
            break
        if p == 2:
            if D % 2 == 0:
                for k in range(4, amax + 1, 4):
                    cnt[k] = 0
            elif (-D) % 8 == 1:
                for k in range(2, amax + 1, 2):
                    cnt[k] *= 2
            else:
                for k in range(2, amax + 1, 2):
                    cnt[k] = 0
            continue
        if D % p == 0:
            pp = p * p
            for k in range(pp, amax + 1, pp):
                cnt[k] = 0
        elif _powmod((-D) % p, (p - 1) // 2, p) == 1:
            for k in range(p, amax + 1, p):
                cnt[k] *= 2
        else:
            for k in range(p, amax + 1, p):
                cnt[k] = 0
    total = 0
    for k in range(1, amax + 1):
        total += cnt[k]
    return total


def _ideal_count_head_numpy(D, primes, amax):
    cnt = np.ones(amax + 1, dtype=np.int64)
    for p in primes.tolist():
        if p > amax:
            break
        if p == 2:
            if D % 2 == 0:
                cnt[4::4] = 0
            elif (-D) % 8 == 1:
                cnt[2::2] *= 2
            else:
                cnt[2::2] = 0
        elif D % p == 0:
            cnt[p * p::p * p] = 0
        elif pow((-D) % p, (p - 1) // 2, p) == 1:
            cnt[p::p] *= 2
        else:
            cnt[p::p] = 0
    return int(cnt[1:].sum())


@njit
def _reduced_tail_jit(D, alo, ahi):
    # reduced forms with alo <= a <= ahi, checked one b at a time
    total = 0
    par = D & 1
    for a in range(alo, ahi + 1):
        four_a = 4 * a
        lower = 4 * a * a - D
        b = -a + 1
        if (b & 1) != par:
            b += 1
        while b <= a:
            num = b * b + D
            if num % four_a == 0 and b * b >= lower:
                c = num // four_a
                if c > a or b >= 0:
                    total += 1
            b += 2
    return total


def _reduced_tail_numpy(D, alo, ahi):
    total = 0
    for a in range(alo, ahi + 1):
        start = -a + 1
        if (start - D) % 2:
            start += 1
        b = np.arange(start, a + 1, 2, dtype=np.int64)
        num = b * b + D
        c, rem = np.divmod(num, 4 * a)
        ok = (rem == 0) & (c >= a) & ((c > a) | (b >= 0))
        total += int(ok.sum())
    return total


def count_reduced_definite(D):
    """Class number of the fundamental discriminant ``-D`` (D > 0).

    Below sqrt(D)/2 every residue root gives a reduced form, so those
    leading coefficients are counted through the multiplicative root count;
    the short range up to sqrt(D/3) is checked form by form.
    """
    head_max = math.isqrt(D) // 2
    tail_max = math.isqrt(D // 3)
    primes = small_primes(head_max)
    if USE_NUMBA:
        head = _ideal_count_head_jit(D, primes, head_max) if head_max >= 1 else 0
        tail = _reduced_tail_jit(D, head_max + 1, tail_max)
    else:
        head = _ideal_count_head_numpy(D, primes, head_max) if head_max >= 1 else 0
        tail = _reduced_tail_numpy(D, head_max + 1, tail_max)
    return int(head) + int(tail)
