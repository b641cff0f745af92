"""Imaginary n-quadratic fields, n >= 3, with class number dividing 2^m.

Every such field is K(sqrt(r)) with K one level down and r an imaginary
quadratic radicand already occurring there.  A candidate is vetted by the
product P of its imaginary quadratic class numbers, which must divide
2^(2^(n-1) - 1 + m); only vetted candidates reach the class-number oracle.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd

from .degree_bound import min_exponent, prime_radicand_count
from .oracle import OracleUnavailable
from .quadratic import QuadraticCensus, class_number_imag
from .radicand import FieldRec, Radicand, canonical_key, format_list

log = logging.getLogger(__name__)


class MissingClassNumber(KeyError):
    pass


def p_cap(n: int, m: int) -> int:
    """log2 of the largest P(K) allowed for an n-quadratic K with h | 2^m."""
    return (1 << (n - 1)) - 1 + m


def _exp2(h: int):
    """log2(h) if h is a power of two, else None."""
    return h.bit_length() - 1 if h > 0 and h & (h - 1) == 0 else None


@dataclass(frozen=True)
class CandidatePartial:
    """A vetted candidate whose P still lacks the class numbers of s_prime."""

    neg: frozenset
    pos: frozenset
    s_prime: frozenset
    p_est_exp: int

    @property
    def p_estimate(self) -> int:
        return 1 << self.p_est_exp

    @property
    def key(self) -> tuple:
        return canonical_key(self.neg)


@dataclass(frozen=True)
class Eliminated:
    reason: str


def _sf(a: int, b: int) -> int:
    g = gcd(a, b)
    return (a * b) // (g * g)


def vet_candidate(k: FieldRec, r, levels: dict, n: int, m: int):
    """Vet K(sqrt(r)).

    ``levels`` maps radicand -> i for r in Q_i, i <= m + 1.  Returns an
    ``Eliminated``, a ``FieldRec`` with P known, or a ``CandidatePartial``.
    """
    if isinstance(levels, QuadraticCensus):
        levels = {int(x): i for i, q in enumerate(levels.levels[: m + 2]) for x in q}
    cap = p_cap(n, m)
    r_int = int(r)
    if r in k.neg:
        return Eliminated("already contained")
    hr = levels.get(r_int)
    if hr is None or hr > cap - k.p_exp:
        return Eliminated("h_r too large")
    est = k.p_exp + hr
    unknown = []
    for a in k.pos:
        s = _sf(r_int, int(a))
        i = levels.get(s)
        if i is None:
            unknown.append(s)
        else:
            est += i
        if est + (m + 2) * len(unknown) > cap:
            return Eliminated("P bound")
    neg = frozenset(k.neg | {r} | {Radicand.of(_sf(r_int, int(a))) for a in k.pos})
    pos = frozenset(k.pos | {Radicand.of(_sf(r_int, int(a))) for a in k.neg})
    if not unknown:
        return FieldRec(neg, pos, est)
    return CandidatePartial(neg, pos, frozenset(Radicand.of(s) for s in unknown), est)


def collect_missing(partials) -> frozenset:
    out = set()
    for c in partials:
        out |= c.s_prime
    return frozenset(out)


def finalize_partials(partials, resolved: dict, n: int, m: int) -> list:
    """Complete P for each partial; keep those still within the cap."""
    cap = p_cap(n, m)
    out = []
    for c in partials:
        e = c.p_est_exp
        for s in c.s_prime:
            h = resolved.get(int(s))
            if h is None:
                raise MissingClassNumber(int(s))
            es = _exp2(h)
            if es is None:
                e = None
                break
            e += es
        if e is not None and e <= cap:
            out.append(FieldRec(c.neg, c.pos, e))
    return out


@dataclass
class SegmentReport:
    n: int
    m: int
    parents: int = 0
    pool: int = 0
    pairs_tried: int = 0
    complete_raw: int = 0
    partial_raw: int = 0
    vetted_complete: int = 0
    vetted_partial: int = 0
    missing_radicands: int = 0
    promoted: int = 0
    vetted_total: int = 0
    by_h: dict = field(default_factory=dict)
    fields: int = 0

    def lines(self) -> list:
        keys = ["n", "m", "parents", "pool", "pairs_tried", "complete_raw", "partial_raw",
                "vetted_complete", "vetted_partial", "missing_radicands", "promoted",
                "vetted_total", "fields"]
        out = [f"{k}={getattr(self, k)}" for k in keys]
        out += [f"h={h}\t{c}" for h, c in sorted(self.by_h.items())]
        return out

    @classmethod
    def from_lines(cls, lines) -> "SegmentReport":
        rep = cls(0, 0)
        for line in lines:
            line = line.strip()
            if not line:
                continue
            if line.startswith("h="):
                h, c = line[2:].split("\t")
                rep.by_h[int(h)] = int(c)
            else:
                k, _, v = line.partition("=")
                setattr(rep, k, int(v))
        return rep


@dataclass
class VetResult:
    complete: list          # FieldRec with P, deduplicated
    partials: list          # CandidatePartial, deduplicated, not already complete
    report: SegmentReport


def _vet_chunk(args):
    parents, levels, pool_by_level, n, m = args
    cap = p_cap(n, m)
    complete, partial, tried = [], [], 0
    for k in parents:
        bound = min(cap - k.p_exp, m + 1)
        for i in range(bound + 1):
            for r in pool_by_level.get(i, ()):
                tried += 1
                res = vet_candidate(k, r, levels, n, m)
                if isinstance(res, FieldRec):
                    complete.append(res)
                elif isinstance(res, CandidatePartial):
                    partial.append(res)
    return complete, partial, tried


def radicand_pool(prev, census: QuadraticCensus, m: int) -> dict:
    """{i: sorted radicands of Q_i that occur in some parent}, i <= m + 1."""
    seen = set()
    for k in prev:
        seen |= k.neg
    out = {}
    for i, q in enumerate(census.levels[: m + 2]):
        sel = sorted(q & seen)
        if sel:
            out[i] = sel
    return out


def vet_segment(prev, census: QuadraticCensus, n: int, m: int, jobs: int = 1) -> VetResult:
    if n < 3:
        raise ValueError("segments start at n = 3")
    if census.max_level < m + 1:
        raise ValueError(f"census has levels up to {census.max_level}, need {m + 1}")
    prev = sorted(prev, key=lambda k: k.key)
    levels = {int(r): i for i, q in enumerate(census.levels[: m + 2]) for r in q}
    pool = radicand_pool(prev, census, m)
    rep = SegmentReport(n, m, parents=len(prev), pool=sum(len(v) for v in pool.values()))

    width = max(1, jobs)
    chunks = [prev[j::width * 4] for j in range(width * 4)] if width > 1 else [prev]
    args = [(c, levels, pool, n, m) for c in chunks if c]
    if width > 1 and len(prev) > 64:
        with ProcessPoolExecutor(max_workers=width) as ex:
            parts = list(ex.map(_vet_chunk, args))
    else:
        parts = [_vet_chunk(a) for a in args]

    complete, partial = {}, {}
    for comp, part, tried in parts:
        rep.pairs_tried += tried
        rep.complete_raw += len(comp)
        rep.partial_raw += len(part)
        for f in comp:
            old = complete.get(f.key)
            if old is not None and old.p_exp != f.p_exp:
                raise AssertionError(f"inconsistent P for {format_list(f.neg)}")
            complete[f.key] = f
        for c in part:
            partial.setdefault(c.key, c)
    partial = {k: c for k, c in partial.items() if k not in complete}
    rep.vetted_complete = len(complete)
    rep.vetted_partial = len(partial)
    comp_list = [complete[k] for k in sorted(complete)]
    part_list = [partial[k] for k in sorted(partial)]
    return VetResult(comp_list, part_list, rep)


def promote_partials(vet: VetResult, census: QuadraticCensus, n: int, m: int, cache=None) -> list:
    """Resolve the missing class numbers and return all vetted fields."""
    missing = collect_missing(vet.partials)
    resolved = {int(s): class_number_imag(s, census, cache) for s in sorted(missing, key=abs)}
    promoted = finalize_partials(vet.partials, resolved, n, m)
    vet.report.missing_radicands = len(missing)
    vet.report.promoted = len(promoted)
    vetted = sorted(vet.complete + promoted, key=lambda f: f.key)
    vet.report.vetted_total = len(vetted)
    return vetted


def resolve_class_numbers(vetted, oracle, n: int, m: int, report: SegmentReport | None = None) -> set:
    """Ask the oracle for each vetted field; keep h | 2^m."""
    if vetted and oracle is None:
        raise OracleUnavailable(f"{len(vetted)} degree-{1 << n} class numbers needed, no oracle",
                                vetted, report)
    try:
        hs = oracle.field_class_numbers(vetted) if vetted else []
    except OracleUnavailable as exc:
        raise OracleUnavailable(str(exc), vetted, report) from None
    by_h: Counter = Counter()
    out = set()
    for f, h in zip(vetted, hs):
        by_h[h] += 1
        if (1 << m) % h == 0:
            out.add(f.with_h(h))
    if report is not None:
        report.by_h = {h: c for h, c in sorted(by_h.items()) if (1 << m) % h == 0}
        report.fields = len(out)
    check_fields(out, n)
    return out


def check_fields(fields, n: int) -> None:
    for f in fields:
        if len(f.neg) != 1 << (n - 1) or len(f.pos) != (1 << (n - 1)) - 1:
            raise AssertionError(f"bad radicand counts for {format_list(f.neg)}")
        if prime_radicand_count(f.neg) > n:
            raise AssertionError(f"too many prime radicands in {format_list(f.neg)}")
        if f.h is not None and min_exponent(n) > f.h.bit_length() - 1:
            raise AssertionError(f"degree bound violated by {format_list(f.neg)}")


def run_segment(prev, census: QuadraticCensus, n: int, m: int, oracle, jobs: int = 1, cache=None):
    """Compute the n-quadratic fields from the (n-1)-quadratic ones."""
    vet = vet_segment(prev, census, n, m, jobs)
    vetted = promote_partials(vet, census, n, m, cache)
    fields = resolve_class_numbers(vetted, oracle, n, m, vet.report)
    log.info("segment n=%d: %s", n, " ".join(vet.report.lines()))
    return fields, vet.report


def full_census(m: int, census: QuadraticCensus, oracle, jobs: int = 1, cache=None) -> dict:
    """{n: fields} for n = 2, 3, ... until a segment comes back empty."""
    from .biquadratic import census_biquad

    fields, _ = census_biquad(census, m, jobs)
    out = {2: fields}
    n = 2
    while out[n]:
        n += 1
        out[n], _ = run_segment(out[n - 1], census, n, m, oracle, jobs, cache)
        if out[n] and min_exponent(n) > m:
            raise AssertionError(f"fields of degree 2^{n} with h | 2^{m} contradict the degree bound")
    return out


def vetting_chain(biquads, census: QuadraticCensus, m: int, n_stop: int, jobs: int = 1,
                  cache=None) -> dict:
    """Vet segments 3..n_stop without any class number of degree >= 8.

    Each segment's parents are all vetted candidates of the previous one
    instead of the fields that survive the class-number check.  Vetting
    only looks at P, so every set stays a superset of the true one: an
    empty segment proves there are no fields of that degree.
    Returns {n: SegmentReport}.
    """
    reports = {}
    prev = list(biquads)
    for n in range(3, n_stop + 1):
        vet = vet_segment(prev, census, n, m, jobs)
        prev = promote_partials(vet, census, n, m, cache)
        reports[n] = vet.report
        log.info("vetting chain n=%d: %d vetted", n, len(prev))
        if not prev:
            break
    return reports


__all__ = [
    "CandidatePartial", "Eliminated", "MissingClassNumber",
    "OracleUnavailable", "SegmentReport", "VetResult", "check_fields", "collect_missing",
    "finalize_partials", "full_census", "p_cap", "promote_partials", "radicand_pool",
    "resolve_class_numbers", "run_segment", "vet_candidate", "vet_segment", "vetting_chain",
]
