"""Squarefree radicands, radicand lists and the subfield lattice of
multiquadratic fields.

A radicand is kept as a signed squarefree integer together with its prime
factorisation.  Multiplying two radicands modulo squares is then a sign
product plus a symmetric difference of prime sets, so no product ever has
to be factored again.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, prod
from typing import Iterable


class RadicandError(ValueError):
    pass


class DependentRadicands(RadicandError):
    """Two subset products of a supposedly primitive list coincide."""


class AlreadyContained(RadicandError):
    """The radicand to adjoin already lies in the field."""


class Radicand(int):
    """Signed squarefree integer carrying its prime factors.

    Behaves as the plain integer value for hashing, ordering and printing,
    so sets of radicands cost no more than sets of ints.
    """

    primes: frozenset

    def __new__(cls, sign: int, primes: Iterable[int] = ()):
        if sign not in (1, -1):
            raise RadicandError(f"sign must be +1 or -1, got {sign}")
        ps = frozenset(primes)
        obj = int.__new__(cls, sign * prod(ps))
        obj.primes = ps
        return obj

    @classmethod
    def _raw(cls, value: int, primes: frozenset) -> "Radicand":
        obj = int.__new__(cls, value)
        obj.primes = primes
        return obj

    @classmethod
    def of(cls, n: int) -> "Radicand":
        """Radicand for a squarefree integer, factored by trial division."""
        if isinstance(n, Radicand):
            return n
        n = int(n)
        if n == 0:
            raise RadicandError("0 is not a radicand")
        ps = _factor_squarefree(abs(n))
        if ps is None:
            raise RadicandError(f"{n} is not squarefree")
        return cls._raw(n, ps)

    @property
    def sign(self) -> int:
        return 1 if self > 0 else -1

    @property
    def is_unit(self) -> bool:
        return int(self) == 1

    @property
    def sorted_primes(self) -> tuple:
        return tuple(sorted(self.primes))

    def __repr__(self) -> str:
        return f"Radicand({int(self)})"

    def __reduce__(self):
        return (Radicand, (self.sign, tuple(sorted(self.primes))))


UNIT = Radicand(1)


@lru_cache(maxsize=1 << 16)
def _factor_squarefree(n: int):
    ps = []
    m = n
    for p in (2, 3, 5):
        if m % p == 0:
            m //= p
            if m % p == 0:
                return None
            ps.append(p)
    p, step = 7, 4
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return None
            ps.append(p)
        p += step
        step = 6 - step
    if m > 1:
        ps.append(m)
    return frozenset(ps)


def sf(n: int) -> int:
    """Squarefree part of a nonzero integer, sign kept: ``sf(20) == 5``."""
    if n == 0:
        raise RadicandError("sf(0) is undefined")
    sign = 1 if n > 0 else -1
    m, out = abs(n), 1
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e & 1:
            out *= p
        p += 1 if p == 2 else 2
    return sign * out * m


def sf_mul(a: Radicand, b: Radicand) -> Radicand:
    """Squarefree part of ``a*b``."""
    g = gcd(a, b)
    return Radicand._raw((int(a) * int(b)) // (g * g), a.primes ^ b.primes)


def _as_radicand(x) -> Radicand:
    return x if isinstance(x, Radicand) else Radicand.of(x)


def complete_radicand_list(primitive: Iterable) -> frozenset:
    """All squarefree products over nonempty subsets of a primitive list."""
    gens = [_as_radicand(x) for x in primitive]
    if not gens:
        raise RadicandError("empty primitive list")
    if any(g.is_unit for g in gens):
        raise RadicandError("1 is not allowed in a radicand list")
    members = []
    for g in gens:
        members += [sf_mul(g, x) for x in members] + [g]
    out = frozenset(members)
    if len(out) != len(members) or UNIT in out:
        raise DependentRadicands(f"{sorted(int(g) for g in gens)} is not primitive")
    return out


def split_signs(q: Iterable) -> tuple:
    """(negative members, positive members) of a radicand list."""
    neg = frozenset(x for x in q if x < 0)
    pos = frozenset(x for x in q if x > 0)
    return neg, pos


def primitive_from_complete(q: Iterable) -> tuple:
    """A primitive list generating the same field, greedy by |value|."""
    rest = sorted(q, key=lambda x: (abs(x), x))
    gens: list = []
    span: set = set()
    for x in rest:
        if x in span:
            continue
        new = {sf_mul(x, y) for y in span} | {x}
        span |= new
        gens.append(x)
    return tuple(gens)


@dataclass(frozen=True, eq=False)
class FieldRec:
    """An imaginary n-quadratic field by its negative/positive radicands.

    ``p_exp`` is log2 of the product of the imaginary quadratic class
    numbers; fields whose product is not a power of two are never stored.
    ``h`` is the field's class number once known.
    """

    neg: frozenset
    pos: frozenset
    p_exp: int | None = None
    h: int | None = None

    @property
    def n(self) -> int:
        return (len(self.neg) + len(self.pos) + 1).bit_length() - 1

    @property
    def key(self) -> tuple:
        return canonical_key(self.neg)

    @property
    def p_product(self) -> int | None:
        return None if self.p_exp is None else 1 << self.p_exp

    def primitive(self) -> tuple:
        return primitive_from_complete(self.neg | self.pos)

    def with_h(self, h: int) -> "FieldRec":
        return FieldRec(self.neg, self.pos, self.p_exp, h)

    def __eq__(self, other):
        return isinstance(other, FieldRec) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return (f"FieldRec(neg={format_list(self.neg)}, pos={format_list(self.pos)}, "
                f"p_exp={self.p_exp}, h={self.h})")

    @classmethod
    def from_primitive(cls, primitive: Iterable, p_exp=None, h=None) -> "FieldRec":
        neg, pos = split_signs(complete_radicand_list(primitive))
        if not neg:
            raise RadicandError("field is real")
        return cls(neg, pos, p_exp, h)


def extend_field(k: FieldRec, r: Radicand) -> tuple:
    """Negative and positive radicands of ``k(sqrt(r))`` for negative ``r``."""
    if r >= 0:
        raise RadicandError("only negative radicands are adjoined")
    if r in k.neg:
        raise AlreadyContained(f"{int(r)} already in the field")
    neg = k.neg | {r} | {sf_mul(r, a) for a in k.pos}
    pos = k.pos | {sf_mul(r, a) for a in k.neg}
    return frozenset(neg), frozenset(pos)


def canonical_key(neg: Iterable) -> tuple:
    """Sorted tuple of negative radicand values; equal iff same field."""
    key = tuple(sorted(int(x) for x in neg))
    if not key:
        raise RadicandError("empty negative radicand set")
    return key


def format_list(q: Iterable) -> str:
    return ",".join(str(int(x)) for x in sorted(q, key=int))


def parse_list(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(Radicand.of(int(tok)) for tok in text.split(","))
