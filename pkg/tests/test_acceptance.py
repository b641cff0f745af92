"""Acceptance criteria 1-9, one PASS/FAIL line each.

The lines are printed as the tests run and again in pytest's terminal
summary.  Criteria 4 and 5 are evaluated on the exact quadratic census
and fail against the published counts, because the published run left
h(-257) = 16 out of Q_4; they are strict xfails.  The same criteria are
also replayed on the level sets without -257 and reported on their own
lines.
"""

import random
from itertools import combinations
from math import gcd, isqrt, prod

import pytest

from mqcensus import fixtures
from mqcensus.biquadratic import census_biquad, stage1_candidates, stage2_filter, unit_index
from mqcensus.degree_bound import min_exponent, prime_radicand_count
from mqcensus.multiquad import promote_partials, resolve_class_numbers, vet_segment, vetting_chain
from mqcensus.oracle import ClassNumberOracle
from mqcensus.quadratic import build_census, class_number_imag, default_bound
from mqcensus.radicand import (UNIT, DependentRadicands, Radicand, complete_radicand_list, sf_mul,
                               split_signs)
from mqcensus.realquad import discriminant
from mqcensus.responders.fixture import FixtureResponder

M = 5
EXACT, REPLAY = "exact census", "published-levels replay"

_state = {}


@pytest.fixture(scope="module")
def variants(full_census):
    return {EXACT: full_census, REPLAY: full_census.without(fixtures.LEVEL_OMISSIONS)}


def biquads(variants, name):
    if ("bq", name) not in _state:
        _state[("bq", name)] = census_biquad(variants[name], M)
    return _state[("bq", name)]


def segment3(variants, name):
    if ("v3", name) not in _state:
        census = variants[name]
        fields, _ = biquads(variants, name)
        vet = vet_segment(fields, census, 3, M)
        vetted = promote_partials(vet, census, 3, M)
        _state[("v3", name)] = (vet, vetted)
    return _state[("v3", name)]


def verdict(ok):
    return "PASS" if ok else "FAIL"


def diffs(pairs):
    return [f"{label} {got} != {want}" for label, got, want in pairs if got != want]


# ---------------------------------------------------------------------------

def test_criterion_1_quadratic_baselines(report_line):
    census = build_census(default_bound(2), 2)
    q0 = {-int(r) for r in census.levels[0]}
    checks = [
        ("Q_0", q0 == set(fixtures.GAUSS_H1), True),
        ("|Q_1|", len(census.levels[1]), 18),
        ("max|Q_1|", max(-int(r) for r in census.levels[1]), 427),
        ("|Q_2|", len(census.levels[2]), 54),
        ("h(-110)", class_number_imag(-110), 12),
    ]
    bad = diffs(checks)
    report_line(f"criterion 1 quadratic baselines: {verdict(not bad)}"
                + (f" ({'; '.join(bad)})" if bad else " (Q_0 = Gauss 9, |Q_1| = 18 max 427, |Q_2| = 54, h(-110) = 12)"))
    assert not bad


def test_criterion_2_brown_parry(report_line, small_census):
    fields, _ = census_biquad(small_census, 0)
    got = {f.key for f in fields}
    want = fixtures.brown_parry_fields()
    ok = got == want and len(got) == 47
    report_line(f"criterion 2 m=0 biquadratic = Brown-Parry: {verdict(ok)} "
                f"({len(got & want)}/47 match, {len(got - want)} extra)")
    assert ok


def test_criterion_3_bww(report_line, small_census):
    fields, _ = census_biquad(small_census, 1)
    got = {f.key for f in fields if f.h == 2}
    want, anomalies = fixtures.bww_fields()
    cells = sorted((a.where, a.text) for a in anomalies)
    ok = got == want and len(got) == 160 and cells == [("row -13", "31 -67"), ("row -3", "59")]
    report_line(f"criterion 3 m=1 class number 2 = BWW: {verdict(ok)} "
                f"({len(got & want)}/160 match, {len(got - want)} extra, WARN at {len(cells)} cells: "
                + ", ".join(f"{w} {t!r}" for w, t in cells) + ")")
    assert ok


def _criterion_4(variants, name):
    census = variants[name]
    s1 = stage1_candidates(census, M)
    s2 = stage2_filter(s1, M)
    fields, rep = biquads(variants, name)
    pub = fixtures.BIQUAD_PIPELINE
    pairs = [("stage1", len(s1), pub["stage1"]), ("stage2", len(s2), pub["stage2"])]
    pairs += [(f"h={h}", rep.by_h.get(h, 0), fixtures.BIQUAD_COUNTS[h]) for h in (1, 2, 4, 8, 16, 32)]
    pairs += [("h=64", rep.by_h.get(64, 0), pub["h64"]), ("|B_2(32)|", len(fields), pub["fields"])]
    return diffs(pairs)


@pytest.mark.xfail(strict=True, reason="published Q_4 lacks -257 (h = 16); see the decisions ledger")
def test_criterion_4_biquadratic_counts(report_line, variants):
    bad = _criterion_4(variants, EXACT)
    report_line(f"criterion 4 biquadratic counts [{EXACT}]: {verdict(not bad)}"
                + (f" ({'; '.join(bad)})" if bad else ""))
    assert not bad


def test_criterion_4_replay(report_line, variants):
    bad = _criterion_4(variants, REPLAY)
    report_line(f"criterion 4 biquadratic counts [{REPLAY}]: {verdict(not bad)}"
                + (f" ({'; '.join(bad)})" if bad else " (82531 -> 11607, 408/1186/2749/6657, 11207 + 400)"))
    assert not bad


def _criterion_5(variants, name):
    vet, vetted = segment3(variants, name)
    rep = vet.report
    want = fixtures.SEGMENT_STATS[3]
    dedup = diffs([("complete", rep.vetted_complete, want["vetted_complete"]),
                   ("partial", rep.vetted_partial, want["vetted_partial"])])
    raw = diffs([("complete_raw", rep.complete_raw, want["vetted_complete"]),
                 ("partial_raw", rep.partial_raw, want["vetted_partial"])])
    rest = diffs([("missing", rep.missing_radicands, want["missing_radicands"]),
                  ("promoted", rep.promoted, want["promoted"]),
                  ("vetted", len(vetted), want["vetted_total"])])
    # the counts may match either before or after deduplication
    bad = (dedup if raw else []) + rest
    return bad, rep


@pytest.mark.xfail(strict=True, reason="published Q_4 lacks -257 (h = 16); see the decisions ledger")
def test_criterion_5_vetting_statistics(report_line, variants):
    bad, rep = _criterion_5(variants, EXACT)
    report_line(f"criterion 5 n=3 vetting [{EXACT}]: {verdict(not bad)}"
                + (f" ({'; '.join(bad)}; raw {rep.complete_raw}/{rep.partial_raw})" if bad else ""))
    assert not bad


def test_criterion_5_replay(report_line, variants):
    bad, rep = _criterion_5(variants, REPLAY)
    report_line(f"criterion 5 n=3 vetting [{REPLAY}]: {verdict(not bad)} "
                f"({rep.vetted_complete} + {rep.vetted_partial}, |S_3| = {rep.missing_radicands}, "
                f"{rep.promoted} promoted, {rep.vetted_total} vetted; raw {rep.complete_raw}/{rep.partial_raw})"
                + (f" ({'; '.join(bad)})" if bad else ""))
    assert not bad


def _criterion_6(variants, name):
    census = variants[name]
    oracle = ClassNumberOracle(census, responders=[FixtureResponder()])
    vet3, vetted3 = segment3(variants, name)
    f3 = resolve_class_numbers(vetted3, oracle, 3, M, vet3.report)
    vet4 = vet_segment(f3, census, 4, M)
    vetted4 = promote_partials(vet4, census, 4, M)
    f4 = resolve_class_numbers(vetted4, oracle, 4, M, vet4.report)
    pairs = [(f"n=3 h={h}", vet3.report.by_h.get(h, 0), c) for h, c in fixtures.TRIQUAD_COUNTS.items()]
    pairs += [("|B_3(32)|", len(f3), 1002), ("n=4 vetted", len(vetted4), 102)]
    pairs += [(f"n=4 h={h}", vet4.report.by_h.get(h, 0), c) for h, c in fixtures.QUADRIQUAD_COUNTS.items()]
    lists = {f.key: f.h for f in f4}
    pairs.append(("n=4 lists", lists == fixtures.quadriquad_fields(), True))
    return diffs(pairs), oracle.calls


def test_criterion_6_oracle_gated(report_line, variants):
    bad, calls = _criterion_6(variants, EXACT)
    report_line(f"criterion 6 oracle-gated n=3/n=4 [{EXACT}, fixture responder]: {verdict(not bad)}"
                + (f" ({'; '.join(bad)})" if bad else
                   " (17/27/48/146/280/484 = 1002; 102 vetted, 0/1/5/3/6/12, 27 lists)"))
    assert not bad


def test_criterion_6_replay(report_line, variants):
    bad, _ = _criterion_6(variants, REPLAY)
    report_line(f"criterion 6 oracle-gated n=3/n=4 [{REPLAY}, fixture responder]: {verdict(not bad)}"
                + (f" ({'; '.join(bad)})" if bad else ""))
    assert not bad


def test_criterion_7_termination_without_oracle(report_line, variants):
    census = variants[EXACT]
    fields, _ = biquads(variants, EXACT)
    reports = vetting_chain(fields, census, M, 5)
    ok = sorted(reports) == [3, 4, 5] and reports[5].vetted_total == 0
    report_line(f"criterion 7 n=5 vetting without oracle: {verdict(ok)} "
                f"(vetted n=3/4/5 from all vetted parents: "
                + "/".join(str(reports[n].vetted_total) for n in sorted(reports)) + ")")
    assert ok


def test_criterion_8_degree_bound(report_line):
    got = [min_exponent(n) for n in (6, 7, 8, 9)]
    tables = [(2, fixtures.BROWN_PARRY), (2, fixtures.BWW_SPECIAL), (2, fixtures.parse_bww_rows()[0]),
              (3, fixtures.FEAVER)] + [(4, v) for v in fixtures.QUADRIQUAD_LISTS.values()]
    worst = []
    for n, table in tables:
        for prim in table:
            neg, _ = split_signs(complete_radicand_list(prim))
            if prime_radicand_count(neg) > n:
                worst.append(prim)
    ok = got == [7, 37, 99, 222] and not worst
    report_line(f"criterion 8 degree bound: {verdict(ok)} (min_exponent(6..9) = {got}, "
                f"{len(worst)} table fields over the prime-radicand limit)")
    assert ok


def _naive_h(D):
    h = 0
    for a in range(1, isqrt(D // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b * b + D) % (4 * a) == 0:
                c = (b * b + D) // (4 * a)
                if (c > a or (c == a and b >= 0)) and gcd(gcd(a, abs(b)), c) == 1:
                    h += 1
    return h


def test_criterion_9_property_suites(report_line, variants):
    failures = []
    # sf_mul group laws over all signed products of the first primes
    elems = [Radicand(s, ps) for s in (1, -1) for k in range(4)
             for ps in combinations((2, 3, 5, 7), k)]
    for a in elems:
        if sf_mul(a, UNIT) != a or sf_mul(a, a) != UNIT:
            failures.append(f"identity/inverse at {a}")
        for b in elems:
            if sf_mul(a, b) != sf_mul(b, a):
                failures.append(f"commutativity at {a},{b}")
            for c in elems[::3]:
                if sf_mul(sf_mul(a, b), c) != sf_mul(a, sf_mul(b, c)):
                    failures.append(f"associativity at {a},{b},{c}")
    # complete lists of random primitive lists
    rng = random.Random(1000)
    done = 0
    while done < 1000:
        n = rng.randint(1, 5)
        gens = [Radicand(rng.choice((1, -1)), rng.sample((2, 3, 5, 7, 11, 13, 17), rng.randint(1, 3)))
                for _ in range(n)]
        try:
            q = complete_radicand_list(gens)
        except DependentRadicands:
            continue
        done += 1
        neg, pos = split_signs(q)
        if len(q) != 2 ** n - 1 or (neg and (len(neg), len(pos)) != (2 ** (n - 1), 2 ** (n - 1) - 1)):
            failures.append(f"list sizes for {gens}")
    # sieve against brute force for |d| <= 10^4
    sieve = build_census(10_000, 3)
    for k in range(1, 10_001):
        try:
            Radicand.of(-k)
        except ValueError:
            continue
        D = -discriminant(-k)
        if D <= 10_000 and sieve.class_number(-k) != _naive_h(D):
            failures.append(f"class number of {-k}")
    # Kuroda integrality and q in {1, 2} on every stage-2 survivor
    census = variants[EXACT]
    survivors = stage2_filter(stage1_candidates(census, M), M)
    for cand, h_c in survivors.items():
        q = unit_index(cand.a, cand.b)
        if q not in (1, 2) or (cand.p_prime * h_c * q) % 2:
            failures.append(f"Kuroda at {cand.pair}")
    # P recomputed from scratch on every Complete candidate of n = 3
    vet, _ = segment3(variants, EXACT)
    for f in vet.complete:
        if prod(class_number_imag(s, census) for s in f.neg) != f.p_product:
            failures.append(f"P at {f.key}")
    report_line(f"criterion 9 property suites: {verdict(not failures)} "
                f"(1000 lists, |d| <= 10^4 sieve, {len(survivors)} Kuroda checks, "
                f"{len(vet.complete)} P identities)" + (f" first failures: {failures[:3]}" if failures else ""))
    assert not failures


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
