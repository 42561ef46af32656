import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprod.avgcore import TruncationLadder
from sumprod.errors import CostGuardError, ParameterError
from sumprod.patterns import (density_report, dsharp_estimate, equal_valuation_pairs, find_patterns,
                              iterated_affine_correlation, valuation_obstruction_check)
from sumprod.poly import IntPolynomial
from sumprod.primes import sieve_block
from sumprod.sets import BitmaskSet, IntervalSet, build_example1, build_example2, parse_set


def brute_hits(A, Q, xr, yr, min_xy=2, distinct=True, max_product=None):
    Q = IntPolynomial.parse(Q)
    out = []
    for y in range(max(yr[0], min_xy), yr[1] + 1):
        for x in range(max(xr[0], min_xy), xr[1] + 1):
            if max_product is not None and x * y > max_product:
                continue
            s, p = x + Q(y), x * y
            if distinct and s == p:
                continue
            if s >= 1 and A.contains(s) and A.contains(p):
                out.append((x, y))
    return out


def test_valuation_obstruction():
    assert valuation_obstruction_check(2)
    assert valuation_obstruction_check(1000)
    count, bad = equal_valuation_pairs(6)
    assert bad == []
    # (6, 6): v2(12) = 2 = v2(36)
    assert count >= 1


def test_small_pattern_sets():
    hits = find_patterns(parse_set("naturals"), "y", (1, 10), (1, 10), max_product=10).hits()
    assert {(h.x, h.y) for h in hits} == {(2, 3), (3, 2), (2, 4), (4, 2), (2, 5), (5, 2), (3, 3)}
    assert find_patterns(parse_set("odds"), "y", (1, 300), (1, 300)).hits() == []


def test_primes_minus_one_hit():
    hits = find_patterns(parse_set("primes-shifted:-1"), "y", (1, 100), (1, 100)).hits()
    assert (2, 14) in {(h.x, h.y) for h in hits}


@pytest.mark.parametrize("text,Q", [("mult-even", "y-1"), ("residue:3:1", "y^2"), ("primes-shifted:1", "y"),
                                    ("interval:20:300", "2y+1"), ("example2:1", "y"), ("naturals", "0")])
@pytest.mark.parametrize("min_xy,distinct", [(2, True), (1, False)])
def test_scan_matches_brute_force(text, Q, min_xy, distinct):
    A = parse_set(text)
    got = [(h.x, h.y) for h in find_patterns(A, Q, (1, 60), (1, 45), min_xy, distinct).hits()]
    assert sorted(got) == sorted(brute_hits(A, Q, (1, 60), (1, 45), min_xy, distinct))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_scan_on_random_bitmask(seed, threads):
    rng = np.random.default_rng(seed)
    A = BitmaskSet.from_bool(rng.random(3000) < 0.3)
    got = [(h.x, h.y) for h in find_patterns(A, "y", (1, 50), (1, 50), max_product=900, threads=threads)]
    assert sorted(got) == sorted(brute_hits(A, "y", (1, 50), (1, 50), max_product=900))


def test_odds_have_no_patterns_for_any_range():
    odds = parse_set("odds")
    for hi in (10, 100, 1000):
        assert not find_patterns(odds, "y", (1, hi), (1, hi), min_xy=1).hits()


def test_example2_has_no_patterns():
    assert not find_patterns(build_example2(1), "y", (1, 3000), (1, 3000), min_xy=1).hits()


def test_mask_cap_guard():
    with pytest.raises(CostGuardError):
        find_patterns(parse_set("naturals"), "y^2", (1, 10), (1, 10**5), max_product=10**6)


def test_example1_density_gap():
    A = build_example1(92681)
    rep = density_report(A, TruncationLadder.of(92681))
    assert rep.cesaro[0] >= 0.29
    assert rep.logarithmic[0] <= 0.1 * rep.cesaro[0]


def test_density_report_values():
    rep = density_report(parse_set("residue:3:0"), TruncationLadder.of(10))
    assert rep.cesaro[0] == pytest.approx(0.3, abs=1e-15)


def test_dsharp_examples():
    lad = TruncationLadder.of(10**4)
    assert dsharp_estimate(parse_set("naturals"), lad, [1]).value == 1.0
    assert dsharp_estimate(parse_set("evens"), lad, [2, 4, 12]).value == pytest.approx(1.0, abs=1e-15)
    assert dsharp_estimate(parse_set("odds"), lad, [2, 4]).value == 0.0
    with pytest.raises(ParameterError):
        dsharp_estimate(parse_set("odds"), lad, [2, 3])


NESTED = [("residue:12:0", "residue:6:0", "evens", "naturals"), ("empty", "interval:1:500", "naturals"),
          ("residue:4:1", "odds", "naturals")]


@pytest.mark.parametrize("chain", NESTED, ids=lambda c: ">".join(c))
def test_dsharp_monotone_on_nested_sets(chain):
    lad = TruncationLadder.of(5000)
    vals = [dsharp_estimate(parse_set(s), lad, [1, 2], multiplier_cap=24).value for s in chain]
    assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))


def test_correlation_trivial_and_zero_shift_two_paths():
    assert iterated_affine_correlation(parse_set("naturals"), "y", 2, 1, 100, 1000).value == 1.0
    for a in (2, 3, 5):
        A = parse_set(f"residue:{a}:0")
        est = iterated_affine_correlation(A, "0", 1, a, 1000, 10**5)
        dens = density_report(A, TruncationLadder.of(10**5)).logarithmic[0]
        assert abs(est.value - dens) <= 1e-10


@pytest.mark.parametrize("Q,k,a,v", [("0", 1, 1, 1), ("y-1", 1, 1, 1), ("y-1", 2, 1, 1), ("y^2+3", 1, 2, 3)])
def test_liouville_path_matches_generic_path(Q, k, a, v):
    fast = iterated_affine_correlation(parse_set("mult-even"), Q, k, 1, 60, 3000, a, v)
    generic_set = parse_set("mult-even").to_bitmask(2 * 10**7)
    slow = iterated_affine_correlation(generic_set, Q, k, 1, 60, 3000, a, v)
    assert fast.path == "liouville" and slow.path == "direct"
    assert abs(fast.value - slow.value) <= 1e-12


def test_correlation_against_literal_average():
    A = parse_set("evens")
    M, N = 30, 400
    ps = sieve_block(1, M).primes.tolist()
    S = math.fsum(1 / p for p in ps)
    H = math.fsum(1 / n for n in range(1, N + 1))
    lit = 0.0
    for p in ps:
        inner = math.fsum(A.contains(n + p - 1) * A.contains(p * n) / n for n in range(1, N + 1))
        lit += inner / H / p
    est = iterated_affine_correlation(A, "y-1", 1, 1, M, N)
    assert est.value == pytest.approx(lit / S, abs=1e-13)


def test_evens_shifted_correlation_near_half():
    est = iterated_affine_correlation(parse_set("evens"), "y-1", 1, 1, 1000, 10**5)
    assert abs(est.value - 0.5) <= 0.05


def test_mult_even_unshifted_correlation_vanishes():
    # lambda(pn) = -lambda(n), so n and pn never both have an even number of prime factors
    est = iterated_affine_correlation(parse_set("mult-even"), "0", 1, 1, 1000, 10**5)
    assert est.value == 0.0


def test_correlation_guards():
    with pytest.raises(CostGuardError):
        iterated_affine_correlation(parse_set("evens"), "y", 9, 1, 10**3, 10**5)
    with pytest.raises(CostGuardError):
        iterated_affine_correlation(IntervalSet(1, 10), "y", 2, 1, 1000, 10**5, budget=1e6)
