"""Real quadratic fields: indefinite forms, class numbers, fundamental units.

The class number comes from the narrow class group, built exactly as the
set of rho-cycles of reduced indefinite forms.  Starting from the
principal cycle, the group is closed under composition with the negative
principal form and with the prime forms of norm up to the Minkowski bound
sqrt(D)/2, which together generate every narrow class.  The wide class
number is h+ or h+/2 according to the norm of the fundamental unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

import mpmath
import numpy as np

from .kernels import small_primes

#: beyond this discriminant the Minkowski-bound prime scan gets slow
DEFAULT_MAX_DISC = 10**13


class BoundExceeded(ValueError):
    """Discriminant exceeds the feasibility limit for the chosen method."""


def discriminant(r: int) -> int:
    """Fundamental discriminant of Q(sqrt(r)): ``r`` if r = 1 mod 4 else ``4r``."""
    r = int(r)
    if r in (0, 1):
        raise ValueError(f"{r} is not a radicand")
    return r if r % 4 == 1 else 4 * r


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------

def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def sqrt_mod_prime(n: int, p: int) -> int:
    """Some x with x*x = n (mod p), assuming one exists."""
    n %= p
    if n == 0 or p == 2:
        return n
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


class IndefiniteForms:
    """Arithmetic of forms (a, b, c) with b*b - 4ac = D > 0, D not a square."""

    def __init__(self, D: int):
        if D <= 0 or isqrt(D) ** 2 == D or D % 4 not in (0, 1):
            raise ValueError(f"bad discriminant {D}")
        self.D = D
        self.s = isqrt(D)

    def c_of(self, a, b):
        return (b * b - self.D) // (4 * a)

    def is_reduced(self, a, b) -> bool:
        # 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b
        if b <= 0 or b > self.s:
            return False
        A = 2 * abs(a)
        return (A + b) ** 2 > self.D and (A <= b or (A - b) ** 2 < self.D)

    def rho(self, a, b, c):
        ac = abs(c)
        if ac > self.s:
            r = (-b) % (2 * ac)
            if r > ac:
                r -= 2 * ac
        else:
            r = self.s - (self.s + b) % (2 * ac)
        return c, r, (r * r - self.D) // (4 * c)

    def reduce(self, f):
        a, b, c = f
        while not self.is_reduced(a, b):
            a, b, c = self.rho(a, b, c)
        return a, b, c

    def compose(self, f1, f2):
        """Dirichlet composition; the result is not reduced."""
        a1, b1, _ = f1
        a2, b2, _ = f2
        half = (b1 + b2) // 2
        g1, u1, v1 = _xgcd(a1, a2)
        e, x, w = _xgcd(g1, half)
        u, v = x * u1, x * v1
        if e < 0:
            e, u, v, w = -e, -u, -v, -w
        A = a1 * a2 // (e * e)
        B = (u * a1 * b2 + v * a2 * b1 + w * ((b1 * b2 + self.D) // 2)) // e
        B %= 2 * abs(A)
        return A, B, (B * B - self.D) // (4 * A)

    def principal(self, sign: int = 1):
        s, D = self.s, self.D
        b = s if (s - D) % 2 == 0 else s - 1
        c = (b * b - D) // 4
        return (sign, b, sign * c)

    def cycle(self, f):
        """All reduced forms in the rho-cycle of the reduced form ``f``."""
        out = [f]
        g = self.rho(*f)
        while g[:2] != f[:2]:
            out.append(g)
            g = self.rho(*g)
        return out

    def prime_form(self, p: int):
        """A form with leading coefficient p, or None when p is inert."""
        D = self.D
        if p == 2:
            if D % 8 == 5:
                return None
            b = 1 if D % 2 else 2 * ((D // 4) % 2)
        else:
            if D % p and pow(D % p, (p - 1) // 2, p) != 1:
                return None
            b = sqrt_mod_prime(D, p)
            if (b - D) % 2:
                b = p - b
        return (p, b, (b * b - D) // (4 * p))


# ---------------------------------------------------------------------------
# class groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NarrowClassGroup:
    D: int
    narrow_h: int
    unit_norm: int          # norm of the fundamental unit
    principal_cycle: int    # number of reduced forms in the principal cycle
    reps: tuple             # one reduced form per narrow class

    @property
    def h(self) -> int:
        return self.narrow_h if self.unit_norm == -1 else self.narrow_h // 2


_prime_cache = {"limit": 0, "primes": np.zeros(0, dtype=np.int64)}


def _primes_upto(n):
    if n > _prime_cache["limit"]:
        lim = max(n, 2 * _prime_cache["limit"], 1 << 12)
        _prime_cache["primes"] = small_primes(lim)
        _prime_cache["limit"] = lim
    ps = _prime_cache["primes"]
    return ps[: np.searchsorted(ps, n, side="right")].tolist()


@lru_cache(maxsize=1 << 17)
def narrow_class_group(D: int, max_disc: int = DEFAULT_MAX_DISC) -> NarrowClassGroup:
    if D > max_disc:
        raise BoundExceeded(f"discriminant {D} exceeds {max_disc}")
    F = IndefiniteForms(D)
    visited: dict = {}
    reps: list = []

    def add_cycle(f):
        idx = len(reps)
        reps.append(f)
        for g in F.cycle(f):
            visited[g[:2]] = idx

    def extend(g):
        g = F.reduce(g)
        if g[:2] in visited:
            return
        old = list(reps)
        x = g
        while x[:2] not in visited:
            for h in old:
                add_cycle(F.reduce(F.compose(h, x)))
            x = F.reduce(F.compose(x, g))

    principal = F.principal(1)
    add_cycle(principal)
    principal_len = len(visited)
    negative = F.principal(-1)
    unit_norm = -1 if visited.get(negative[:2]) == 0 else 1
    extend(negative)
    # p <= sqrt(D)/2  <=>  4p^2 <= D
    for p in _primes_upto(isqrt(D // 4)):
        f = F.prime_form(p)
        if f is not None:
            extend(f)
    return NarrowClassGroup(D, len(reps), unit_norm, principal_len, tuple(reps))


def class_number_real(r, max_disc: int = DEFAULT_MAX_DISC) -> int:
    """Wide class number of Q(sqrt(r)), r > 1 squarefree."""
    if r <= 1:
        raise ValueError("real radicand expected")
    return narrow_class_group(discriminant(r), max_disc).h


def narrow_class_number(r, max_disc: int = DEFAULT_MAX_DISC) -> int:
    return narrow_class_group(discriminant(r), max_disc).narrow_h


# ---------------------------------------------------------------------------
# fundamental unit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FundamentalUnit:
    """epsilon = x + y*sqrt(d0) > 1, with x, y in (1/2)Z."""

    d0: int
    x: Fraction
    y: Fraction
    norm: int
    period: int

    @property
    def trace(self) -> int:
        return int(2 * self.x)

    @property
    def regulator(self) -> mpmath.mpf:
        with mpmath.workdps(40):
            x = mpmath.mpf(self.x.numerator) / self.x.denominator
            y = mpmath.mpf(self.y.numerator) / self.y.denominator
            return mpmath.log(x + y * mpmath.sqrt(self.d0))

    def check(self) -> bool:
        return self.x * self.x - self.d0 * self.y * self.y == self.norm


@lru_cache(maxsize=1 << 15)
def fundamental_unit(r) -> FundamentalUnit:
    """Least unit > 1 of the maximal order of Q(sqrt(r)).

    Expands the reduced irrational (b + sqrt(D))/2 into a continued
    fraction; with period L and convergent denominators q_k the unit is
    q_{L-1} * xi + q_{L-2}, of norm (-1)^L.
    """
    d0 = int(r)
    if d0 <= 1:
        raise ValueError("real radicand expected")
    D = discriminant(d0)
    s = isqrt(D)
    b0 = s if (s - D) % 2 == 0 else s - 1
    P, Q = b0, 2
    q_prev, q_cur = 1, 0      # q_{-2}, q_{-1}
    L = 0
    while True:
        a = (P + s) // Q
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        P = a * Q - P
        Q = (D - P * P) // Q
        L += 1
        if P == b0 and Q == 2:
            break
    # epsilon = q_{L-1} (b0 + sqrt(D))/2 + q_{L-2}
    if D == d0:
        x = Fraction(q_cur * b0 + 2 * q_prev, 2)
        y = Fraction(q_cur, 2)
    else:
        x = Fraction(q_cur * b0 // 2 + q_prev)
        y = Fraction(q_cur)
    return FundamentalUnit(d0, x, y, -1 if L % 2 else 1, L)


# ---------------------------------------------------------------------------
# analytic cross-check
# ---------------------------------------------------------------------------

def kronecker_table(D: int) -> np.ndarray:
    """chi_D(a) = (D/a) for 0 <= a < |D|, built multiplicatively."""
    n = abs(D)
    chi = np.ones(n, dtype=np.int8)
    chi[0] = 0
    for p in small_primes(n - 1).tolist():
        if p == 2:
            v = 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
        elif D % p == 0:
            v = 0
        else:
            v = 1 if pow(D % p, (p - 1) // 2, p) == 1 else -1
        if v == 1:
            continue
        pk = p
        while pk < n:
            chi[pk::pk] *= v if v else 0
            if v == 0:
                break
            pk *= p
    return chi


def class_number_real_analytic(r, max_disc: int = 2 * 10**6) -> int:
    """h from h*log(eps) = -1/2 sum chi(a) log sin(pi a / D).

    Float evaluation; raises when the quotient is not within 0.05 of an
    integer, which would make the rounding unsafe.
    """
    D = discriminant(r)
    if D > max_disc:
        raise BoundExceeded(f"analytic route limited to D <= {max_disc}")
    chi = kronecker_table(D).astype(np.float64)
    a = np.arange(1, D)
    hr = -0.5 * float(np.dot(chi[1:], np.log(np.sin(np.pi * a / D))))
    reg = float(fundamental_unit(r).regulator)
    value = hr / reg
    h = round(value)
    if h < 1 or abs(value - h) > 0.05:
        raise ArithmeticError(f"analytic class number for {r} not integral: {value}")
    return h


def is_square_class(z_trace: int, z_norm: int) -> bool:
    """Is z a square in its real quadratic field, given Tr(z) and N(z)?

    z = w*w forces N(z) = n*n and Tr(w)^2 = Tr(z) + 2*N(w) with N(w) = +-n.
    """
    if z_norm < 0:
        return False
    n = isqrt(z_norm)
    if n * n != z_norm:
        return False
    for t2 in (z_trace + 2 * n, z_trace - 2 * n):
        if t2 > 0 and isqrt(t2) ** 2 == t2:
            return True
    return False


__all__ = [
    "BoundExceeded", "FundamentalUnit", "IndefiniteForms", "NarrowClassGroup",
    "class_number_real", "class_number_real_analytic", "discriminant",
    "fundamental_unit", "is_square_class", "kronecker_table", "narrow_class_group",
    "narrow_class_number", "sqrt_mod_prime",
]