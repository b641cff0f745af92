import os
import subprocess
import sys
from math import gcd, isqrt

import numpy as np
import pytest

from mqcensus import kernels
from mqcensus.fixtures import ARNO_H4, GAUSS_H1, H2
from mqcensus.quadratic import (ClassNumberCache, QuadraticCensus, build_census, class_number_imag,
                                default_bound, load_levels, save_levels)
from mqcensus.radicand import sf
from mqcensus.realquad import discriminant


def naive_class_number(D):
    """Primitive reduced forms of discriminant -D, counted one by one."""
    h = 0
    for a in range(1, isqrt(D // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b * b + D) % (4 * a):
                continue
            c = (b * b + D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, abs(b)), c) == 1:
                h += 1
    return h


def fundamental_negative(limit):
    out = []
    for k in range(1, limit + 1):
        if sf(k) != k:
            continue
        D = -discriminant(-k)
        if D <= limit:
            out.append((-k, D))
    return out


@pytest.fixture(scope="module")
def census_1e4():
    return build_census(10_000, 3)


def test_sieve_matches_brute_force_up_to_1e4(census_1e4):
    pairs = fundamental_negative(10_000)
    assert len(pairs) > 3000
    for r, D in pairs:
        want = naive_class_number(D)
        assert census_1e4.class_number(r) == want, r
        assert kernels.count_reduced_definite(D) == want, r


def test_kernel_paths_agree():
    bound = 30_000
    a_hi = kernels.tally_a_max(bound)
    ref = kernels._tally_numpy(bound, 1, a_hi)
    assert np.array_equal(ref, kernels._tally_jit(bound, 1, a_hi))
    for D in (3, 4, 20, 4 * 105, 4 * 1_000_003, 99_999_991):
        hm, tm = isqrt(D) // 2, isqrt(D // 3)
        primes = kernels.small_primes(hm)
        a = int(kernels._ideal_count_head_numpy(D, primes, hm)) + int(kernels._reduced_tail_numpy(D, hm + 1, tm))
        b = int(kernels._ideal_count_head_jit(D, primes, hm)) + int(kernels._reduced_tail_jit(D, hm + 1, tm))
        assert a == b == kernels.count_reduced_definite(D)


def test_partial_tallies_sum_to_full():
    bound = 20_000
    full = kernels.reduced_form_tally(bound)
    a_max = kernels.tally_a_max(bound)
    parts = kernels.reduced_form_tally(bound, 1, 20) + kernels.reduced_form_tally(bound, 21, a_max)
    assert np.array_equal(full, parts)


def test_parallel_census_equals_serial():
    a = build_census(20_000, 3, jobs=1)
    b = build_census(20_000, 3, jobs=2)
    assert np.array_equal(a.h_abs, b.h_abs)


@pytest.mark.parametrize("bound,max_level,sizes", [
    (700, 0, [9]),
    (2000, 1, [9, 18]),
    (6500, 2, [9, 18, 54]),
    (4, 0, [2]),
])
def test_level_sizes(bound, max_level, sizes):
    assert build_census(bound, max_level).level_sizes() == sizes


def test_levels_match_tables(small_census):
    assert {-int(r) for r in small_census.levels[0]} == set(GAUSS_H1)
    assert {-int(r) for r in small_census.levels[1]} == set(H2)
    arno = {a for grp in ARNO_H4.values() for a in grp}
    assert {-int(r) for r in small_census.levels[2]} == arno


def test_default_bounds_complete_levels():
    assert default_bound(0) == 700
    assert default_bound(2) == 6500
    assert default_bound(6) == 2_383_747
    with pytest.raises(ValueError):
        default_bound(-1)


def test_known_values(small_census):
    assert class_number_imag(-110) == 12
    assert class_number_imag(-1, small_census) == 1
    assert class_number_imag(-5) == 2
    assert class_number_imag(-257) == 16
    with pytest.raises(ValueError):
        class_number_imag(5)


def test_census_round_trip(tmp_path, small_census):
    p = tmp_path / "census.tsv"
    small_census.save(p)
    back = QuadraticCensus.load(p)
    assert back.bound == small_census.bound
    assert back.levels == small_census.levels
    lp = tmp_path / "levels.txt"
    save_levels(small_census.levels, lp)
    assert load_levels(lp) == small_census.levels


def test_without_drops_only_levels(small_census):
    cut = small_census.without([-5])
    assert -5 not in cut.levels[1]
    assert cut.class_number(-5) == 2
    assert cut.level_of(-5) is None
    assert small_census.level_of(-5) == 1


def test_class_number_cache(tmp_path):
    path = tmp_path / "h.tsv"
    cache = ClassNumberCache(path)
    assert class_number_imag(-2379, cache=cache) == cache.get(-2379)
    cache.put(-2379, cache.get(-2379))
    with pytest.raises(ValueError):
        cache.put(-2379, cache.get(-2379) + 2)
    assert ClassNumberCache(path).get(-2379) == cache.get(-2379)


def test_numpy_fallback_flag():
    code = ("from mqcensus import _accel, kernels, quadratic\n"
            "assert not _accel.USE_NUMBA\n"
            "c = quadratic.build_census(6500, 2)\n"
            "print(c.level_sizes(), kernels.count_reduced_definite(4 * 110))\n")
    env = dict(os.environ, MQCENSUS_NO_NUMBA="1")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert res.stdout.strip() == "[9, 18, 54] 12"
