import pytest

from mqcensus import fixtures
from mqcensus.degree_bound import bound, max_degree_exponent, min_exponent, prime_radicand_count
from mqcensus.radicand import complete_radicand_list, split_signs


@pytest.mark.parametrize("n,m", [(1, 0), (5, 0), (6, 7), (7, 37), (8, 99), (9, 222), (10, 478)])
def test_min_exponent(n, m):
    assert min_exponent(n) == m
    assert bound(n).min_exponent == m


def test_min_exponent_monotone():
    vals = [min_exponent(n) for n in range(1, 20)]
    assert vals == sorted(vals)
    assert all(a < b for a, b in zip(vals[5:], vals[6:]))
    with pytest.raises(ValueError):
        min_exponent(0)


def test_max_degree_exponent():
    assert max_degree_exponent(5) == 5
    assert max_degree_exponent(7) == 6
    assert max_degree_exponent(40) == 7


def test_prime_radicand_count_examples():
    assert prime_radicand_count({-1, -2, -3, -6}) == 3
    assert prime_radicand_count({-1}) == 1


def _neg(primitive):
    return split_signs(complete_radicand_list(primitive))[0]


def test_prime_radicand_count_on_tables():
    tables = [(2, fixtures.BROWN_PARRY), (2, fixtures.BWW_SPECIAL), (3, fixtures.FEAVER)]
    tables += [(4, lists) for lists in fixtures.QUADRIQUAD_LISTS.values()]
    rows, _ = fixtures.parse_bww_rows()
    tables.append((2, rows))
    total = 0
    for n, table in tables:
        for primitive in table:
            assert prime_radicand_count(_neg(primitive)) <= n, primitive
            total += 1
    assert total == 47 + 20 + 17 + 27 + 140
