import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprod.errors import EmptyBlockError, ParameterError
from sumprod.primes import sieve_block
from sumprod.sequences import AdditiveCharacter, ResidueIndicator, alternating, catalog, random_table
from sumprod.spectral import (CorrelationSequence, correlation_sequence, herglotz_psd_check,
                              isometry_identity_gap, prime_exp_sum, rational_mass)

CATALOG = catalog()


def corr_loop(f, N, m):
    v = f.values(np.arange(1, N + m + 1))
    H = math.fsum(1 / n for n in range(1, N + 1))
    return sum(v[n - 1] * np.conj(v[n + m - 1]) / n for n in range(1, N + 1)) / H


@pytest.mark.parametrize("f", [random_table(2, 7), AdditiveCharacter("sqrt(3)"), alternating()], ids=str)
def test_correlation_matches_loop(f):
    corr = correlation_sequence(f, 500, 12)
    for m in (0, 1, 5, 12):
        assert abs(corr.phi(m) - corr_loop(f, 500, m)) <= 1e-13


@pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.name)
def test_fft_and_direct_agree(f):
    a = correlation_sequence(f, 20000, 40, method="direct")
    b = correlation_sequence(f, 20000, 40, method="fft")
    assert np.max(np.abs(a.values - b.values)) <= 1e-12


@pytest.mark.parametrize("f", CATALOG + [random_table(9, 5)], ids=lambda f: f.name)
def test_hermitian_symmetry_two_paths(f):
    # phi_f(-m) = conj(phi_f(m)) against the correlation of conj(f), computed separately
    N, L = 10**4, 20
    corr = correlation_sequence(f, N, L)
    other = correlation_sequence(f.conj(), N, L)
    for m in range(L + 1):
        assert abs(corr.phi(-m) - other.values[m]) <= 1e-12


@pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.name)
def test_psd_at_order_25(f):
    res = herglotz_psd_check(correlation_sequence(f, 10**5, 30), 25)
    assert res.psd


def test_psd_detects_a_non_positive_sequence():
    bad = CorrelationSequence.from_values([1.0, 2.0, 0.0], N=10**12)
    assert not herglotz_psd_check(bad, 3).psd


def test_rational_mass_examples():
    corr = correlation_sequence(alternating(), 10**6, 1000)
    assert rational_mass(corr, 2, 500) == pytest.approx(1.0, abs=1e-3)
    chi = correlation_sequence(AdditiveCharacter("sqrt(2)"), 10**6, 1000)
    for q in range(1, 7):
        assert abs(rational_mass(chi, q, 1000 // q)) <= 0.05


@given(st.integers(0, len(CATALOG) - 1), st.sampled_from([(1, 2), (1, 6), (2, 4), (2, 6), (3, 6), (3, 12), (4, 12)]))
def test_rational_mass_refinement(i, qs):
    q, q2 = qs
    corr = correlation_sequence(CATALOG[i], 10**5, 240)
    assert rational_mass(corr, q2, 240 // q2) >= rational_mass(corr, q, 240 // q) - 2 * corr.eps


def test_rational_mass_rejects_long_ranges():
    corr = correlation_sequence(alternating(), 1000, 10)
    with pytest.raises(ParameterError):
        rational_mass(corr, 3, 4)


def test_isometry_trivial_cases():
    f = random_table(4, 3)
    assert isometry_identity_gap(f, 1000, [0], [1])[0] == 0.0
    gap, contract = isometry_identity_gap(alternating(), 10**4, [0, 1], [1, 1])
    assert gap <= 1e-12 <= contract
    gap, contract = isometry_identity_gap(ResidueIndicator(3, 0), 10**5, [0, 1, 2], [1, 1, 1])
    assert gap <= contract


@given(st.integers(0, len(CATALOG) - 1), st.lists(st.integers(0, 20), min_size=1, max_size=5, unique=True),
       st.lists(st.complex_numbers(max_magnitude=1, allow_nan=False), min_size=5, max_size=5))
def test_isometry_within_contract(i, lags, coeffs):
    f = CATALOG[i]
    corr = correlation_sequence(f, 5000, 20)
    gap, contract = isometry_identity_gap(f, 5000, lags, coeffs[: len(lags)], corr=corr)
    assert gap <= contract


def test_prime_exp_sum_trivial():
    assert prime_exp_sum("x", "0", M=1000) == 1.0
    assert prime_exp_sum("x", "1/2", W=2, M=10) == -1.0
    # alpha = 0 with a filter returns the filter's share of the block weight
    ps = sieve_block(1, 1000).primes
    share = math.fsum(1 / p for p in ps if p % 4 == 1) / math.fsum(1 / p for p in ps)
    assert prime_exp_sum("x", "0", a=4, b=1, M=1000).real == pytest.approx(share, abs=1e-15)


def test_prime_exp_sum_empty_filters():
    with pytest.raises(EmptyBlockError):
        prime_exp_sum("x", "sqrt2", a=4, b=0, M=1000)
    with pytest.raises(EmptyBlockError):
        prime_exp_sum("x", "sqrt2", W=6, M=6)


@pytest.mark.parametrize("mode", ["logarithmic", "cesaro"])
def test_prime_exp_sum_square_matches_mpmath(mode):
    mpmath.mp.dps = 40
    ps = sieve_block(1, 3000).primes.tolist()
    r2 = mpmath.sqrt(2)
    w = [1 / p if mode == "logarithmic" else 1.0 for p in ps]
    z = sum(wi * complex(mpmath.expjpi(2 * mpmath.frac(p * p * r2))) for wi, p in zip(w, ps)) / math.fsum(w)
    assert abs(prime_exp_sum("x^2", "sqrt(2)", M=3000, mode=mode) - z) <= 1e-12


def test_prime_exp_sum_linear_decreases():
    mods = [abs(prime_exp_sum("x", "sqrt(2)", M=M)) for M in (10**3, 10**4, 10**5, 10**6)]
    assert all(a > b for a, b in zip(mods, mods[1:]))


def test_prime_exp_sum_modulus_bounded():
    for Q in ("x", "x^2", "(x^2+x)/2", "3x^3-x"):
        assert abs(prime_exp_sum(Q, "pi", W=4, M=5000)) <= 1 + 1e-12
