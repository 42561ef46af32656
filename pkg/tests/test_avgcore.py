import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprod.avgcore import (EULER_GAMMA, HarmonicTable, TruncationLadder, cesaro_average, harmonic,
                             log_average, log_average_array, log_average_ladder, residue_log_weights)
from sumprod.errors import ParameterError
from sumprod.sequences import Constant, ResidueIndicator, Shifted, alternating, catalog, parse_sequence, random_table

CATALOG = catalog()


def test_trivial_examples():
    assert log_average(Constant(1), 100) == pytest.approx(1.0, abs=1e-15)
    assert cesaro_average(ResidueIndicator(3, 0), 10) == pytest.approx(0.3, abs=1e-15)
    # (1/2 + 1/4) / (1 + 1/2 + 1/3 + 1/4) = 9/25
    assert log_average(ResidueIndicator(2, 0), 4) == pytest.approx(0.36, abs=1e-15)


def test_rejects_bad_cutoffs():
    with pytest.raises(ParameterError):
        log_average(Constant(1), 0)
    with pytest.raises(ParameterError):
        TruncationLadder((10, 10))
    with pytest.raises(ParameterError):
        TruncationLadder(())


@pytest.mark.parametrize("n", [1, 2, 3, 10, 1000, 123457])
def test_harmonic_matches_mpmath(n):
    assert harmonic(n) == pytest.approx(float(mpmath.harmonic(n)), rel=1e-14)


def test_harmonic_beyond_cap_uses_asymptotic():
    small = HarmonicTable(cap=1000)
    for n in (1001, 5000, 10**6):
        # the next omitted term is -1/(12 n^2)
        assert abs(small(n) - float(mpmath.harmonic(n))) <= 1 / (12 * n * n) + 1e-14


@given(st.integers(1, 10**6))
def test_harmonic_sandwich(n):
    # exact bracket: 0 <= H(n) - log n - gamma <= 1/(2n) is checked in high precision
    exact = mpmath.harmonic(n) - mpmath.log(n) - mpmath.euler
    assert 0 < exact <= mpmath.mpf(1) / (2 * n)
    assert abs(HarmonicTable().sandwich_residual(n) - float(exact)) < 1e-12
    assert EULER_GAMMA == pytest.approx(float(mpmath.euler), abs=1e-16)


def test_log_average_array_matches_sequence_path():
    f = random_table(7, 5)
    n = np.arange(1, 2001)
    assert log_average_array(f.values(n)) == pytest.approx(log_average(f, 2000), abs=1e-14)


def test_residue_log_weights_partition_harmonic_sum():
    R = residue_log_weights(12, 10**5)
    assert math.fsum(R) == pytest.approx(harmonic(10**5), rel=1e-14)
    assert R[1] == pytest.approx(math.fsum(1.0 / n for n in range(1, 10**5 + 1, 12)), rel=1e-14)


def test_ladder_diagnostic_small_for_periodic():
    res = log_average_ladder(ResidueIndicator(2, 0), TruncationLadder.of(10**4, 10**5, 10**6))
    assert res.values[-1] == pytest.approx(0.5, abs=0.05)
    assert res.diagnostic < 0.01


coeff = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@given(coeff, coeff, st.integers(0, len(CATALOG) - 1), st.integers(0, len(CATALOG) - 1), st.integers(1, 3000))
def test_linearity(a, b, i, j, N):
    f, g = CATALOG[i], CATALOG[j]
    lhs = log_average(a * f + b * g, N)
    rhs = a * log_average(f, N) + b * log_average(g, N)
    assert abs(lhs - rhs) <= 1e-12


@given(st.integers(0, len(CATALOG) - 1), st.integers(1, 5000))
def test_boundedness(i, N):
    f = CATALOG[i]
    assert abs(log_average(f, N)) <= f.bound + 1e-12
    assert abs(cesaro_average(f, N)) <= f.bound + 1e-12


@given(st.integers(0, len(CATALOG) - 1), st.integers(2, 20000))
def test_shift_near_invariance(i, N):
    f = CATALOG[i]
    gap = abs(log_average(Shifted(f, 1), N) - log_average(f, N))
    assert gap <= 2 * f.bound * (1 / harmonic(N) + 1 / N)


def test_alternating_average_is_small():
    assert abs(log_average(alternating(), 10**6)) < 0.05
    assert parse_sequence("alternating").period == 2
