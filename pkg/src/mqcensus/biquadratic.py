"""Imaginary biquadratic fields with class number dividing 2^m.

Candidates come from pairs of imaginary quadratic radicands whose class
numbers multiply to a divisor of 2^(m+1); the real quadratic subfield's
class number prunes them further, and Kuroda's formula

    h_K = 1/2 * h_a * h_b * h_c * q,   q in {1, 2}

gives the exact class number of each survivor.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations

from .quadratic import QuadraticCensus, class_number_imag
from .radicand import FieldRec, Radicand, RadicandError, sf_mul
from .realquad import class_number_real, discriminant, fundamental_unit, is_square_class

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BiquadCandidate:
    """Unordered pair a < b of negative radicands with h_a*h_b = 2^p_exp."""

    a: Radicand
    b: Radicand
    p_exp: int

    @property
    def c(self) -> Radicand:
        return sf_mul(self.a, self.b)

    @property
    def p_prime(self) -> int:
        return 1 << self.p_exp

    @property
    def pair(self) -> tuple:
        return (int(self.a), int(self.b))


def stage1_candidates(census: QuadraticCensus, m: int) -> set:
    """All pairs {a, b} from Q_i x Q_j with i + j <= m + 1."""
    top = m + 1
    if census.max_level < top:
        raise ValueError(f"census has levels up to {census.max_level}, need {top}")
    out = set()
    levels = [sorted(q) for q in census.levels[: top + 1]]
    for i, qi in enumerate(levels):
        for a, b in combinations(qi, 2):
            if 2 * i <= top:
                out.add(BiquadCandidate(a, b, 2 * i))
        for j in range(i + 1, top - i + 1):
            for a in qi:
                for b in levels[j]:
                    lo, hi = (a, b) if a < b else (b, a)
                    out.add(BiquadCandidate(lo, hi, i + j))
    return out


def _odd_prime_count(D: int) -> int:
    """Number of distinct primes dividing the discriminant D."""
    t = 0
    n = abs(D)
    if n % 2 == 0:
        t += 1
        while n % 2 == 0:
            n //= 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            t += 1
            while n % p == 0:
                n //= p
        p += 2
    return t + (n > 1)


def genus_floor(c: int) -> int:
    """e with 2^e | h(Q(sqrt(c))) guaranteed by genus theory.

    The narrow class group has 2-rank t-1 (t = number of primes dividing
    the discriminant), and the wide group loses at most one factor 2.
    """
    return max(_odd_prime_count(discriminant(c)) - 2, 0)


def _real_h_worker(cs):
    return [(c, class_number_real(c)) for c in cs]


def real_class_numbers(cs, jobs: int = 1, cache=None) -> dict:
    """{c: h_c} for a collection of positive radicands."""
    out = {}
    todo = []
    for c in sorted(set(int(c) for c in cs)):
        h = cache.get(c) if cache is not None else None
        if h is None:
            todo.append(c)
        else:
            out[c] = h
    if jobs > 1 and len(todo) > 256:
        chunks = [todo[k::jobs * 4] for k in range(jobs * 4)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_real_h_worker, chunks):
                out.update(part)
    else:
        out.update(_real_h_worker(todo))
    if cache is not None:
        for c in todo:
            cache.put(c, out[c])
    return out


def stage2_filter(cands, m: int, jobs: int = 1, cache=None) -> dict:
    """Keep pairs with P' * h_c dividing 2^(m+1).

    Returns {candidate: h_c}.  Pairs whose real subfield is forced by
    genus theory to have too large a 2-part are dropped without computing
    h_c; that pretest never removes a pair the divisibility test keeps.
    """
    top = m + 1
    need = []
    for cand in cands:
        room = top - cand.p_exp
        if room >= 0 and genus_floor(cand.c) <= room:
            need.append(cand)
    hs = real_class_numbers((cand.c for cand in need), jobs, cache)
    out = {}
    for cand in need:
        h_c = hs[int(cand.c)]
        if (1 << top) % (cand.p_prime * h_c) == 0:
            out[cand] = h_c
    return out


def unit_index(a, b) -> int:
    """Unit index q = [E_K : E_1 E_2 E_3] of K = Q(sqrt(a), sqrt(b)), a, b < 0.

    With eps the fundamental unit of the real subfield Q(sqrt(c)) and W the
    roots of unity of K, q = 2 exactly when some nu*eps (nu in W) is a
    square in K, or when W is strictly larger than the product of the
    subfields' root-of-unity groups.  Elements of Q(sqrt(c)) that become
    squares in K are those in k^2 or a*k^2, so the test reduces to:

      * -1 not a radicand: |a| * eps is a square in Q(sqrt(c)).
        (zeta_3 is itself a square of a root of unity, so -3 changes nothing.)
      * -1 a radicand: 2 * eps is a square, since i = (1+i)^2 / 2.
      * Q(zeta_8) = Q(sqrt(-1), sqrt(-2)) has q = 2 from zeta_8 alone.
    """
    a, b = int(a), int(b)
    if a >= 0 or b >= 0 or a == b:
        raise RadicandError("unit_index needs two distinct negative radicands")
    a, b = sorted((a, b), reverse=True)   # a = -1 if present
    if (a, b) == (-1, -2):
        return 2
    c = int(sf_mul(Radicand.of(a), Radicand.of(b)))
    eps = fundamental_unit(c)
    if eps.norm == -1:
        # nu*eps square needs N(nu*eps) = N(eps) to be a square
        return 1
    if a == -1:
        scale = 2
    else:
        scale = -a
    return 2 if is_square_class(scale * eps.trace, scale * scale) else 1


def class_number_biquad(a, b, census: QuadraticCensus | None = None, h_c: int | None = None) -> int:
    """Exact class number of Q(sqrt(a), sqrt(b)) for negative a != b."""
    ha = class_number_imag(a, census)
    hb = class_number_imag(b, census)
    if h_c is None:
        h_c = class_number_real(int(sf_mul(Radicand.of(a), Radicand.of(b))))
    num = ha * hb * h_c * unit_index(a, b)
    if num % 2:
        raise ArithmeticError(f"Kuroda numerator odd for ({a}, {b})")
    return num // 2


@dataclass
class BiquadReport:
    m: int
    stage1: int
    stage2: int
    by_h: dict           # class number -> count, over all stage-2 survivors
    kept: int

    def lines(self) -> list:
        out = [f"m={self.m}", f"stage1={self.stage1}", f"stage2={self.stage2}"]
        out += [f"h={h}\t{n}" for h, n in sorted(self.by_h.items())]
        out.append(f"kept={self.kept}")
        return out


def census_biquad(census: QuadraticCensus, m: int, jobs: int = 1, cache=None):
    """All imaginary biquadratic fields with class number dividing 2^m.

    Returns (fields, report), fields being FieldRec with ``h`` set.
    """
    cands = stage1_candidates(census, m)
    survivors = stage2_filter(cands, m, jobs, cache)
    fields = set()
    by_h: Counter = Counter()
    for cand, h_c in survivors.items():
        q = unit_index(cand.a, cand.b)
        num = cand.p_prime * h_c * q
        if num % 2:
            raise ArithmeticError(f"Kuroda numerator odd for {cand.pair}")
        h = num // 2
        by_h[h] += 1
        if (1 << m) % h == 0:
            fields.add(FieldRec(frozenset({cand.a, cand.b}), frozenset({cand.c}), cand.p_exp, h))
    report = BiquadReport(m, len(cands), len(survivors), dict(by_h), len(fields))
    log.info("biquadratic m=%d: %d -> %d -> %d", m, len(cands), len(survivors), len(fields))
    return fields, report
