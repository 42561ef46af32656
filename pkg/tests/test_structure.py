import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprod.avgcore import harmonic, log_average
from sumprod.errors import ParameterError
from sumprod.sequences import (CATALOG_NAMES, AdditiveCharacter, Constant, ResidueIndicator, alternating, catalog,
                               parse_sequence, random_table)
from sumprod.spectral import correlation_sequence, rational_mass
from sumprod.structure import aperiodicity_score, modulus_ladder, modulus_ladder_decompose, residue_projection

CATALOG = catalog()
SET_INDICATORS = [f for f in CATALOG if f.name in ("residue:3:0", "mult-even", "set:example1")]
LADDER_SLACK = 1e-12


def class_orthogonality(d, N):
    n = np.arange(1, N + 1)
    r = d.f.values(n) - d.table[n % d.q]
    out = []
    for c in range(d.q):
        sel = n % d.q == c
        v = r[sel] / n[sel]
        out.append(abs(complex(math.fsum(np.real(v).tolist()), math.fsum(np.imag(v).tolist()))) / harmonic(N))
    return max(out)


def test_class_means_match_definition():
    f = random_table(8, 5)
    d = residue_projection(f, 3, 600)
    n = np.arange(1, 601)
    for c in range(3):
        sel = n % 3 == c
        mean = np.sum(f.values(n[sel]) / n[sel]) / np.sum(1 / n[sel])
        assert abs(d.table[c] - mean) <= 1e-14


@pytest.mark.parametrize("f,q", [(Constant(1), 1), (ResidueIndicator(3, 0), 3), (ResidueIndicator(3, 0), 6),
                                 (alternating(), 2), (random_table(1, 12), 12), (random_table(1, 4), 12)])
def test_periodic_functions_have_zero_residual(f, q):
    assert residue_projection(f, q, 10**5).residual_energy <= 1e-12


@given(st.integers(0, len(CATALOG) - 1), st.sampled_from([1, 2, 3, 5, 6, 12]))
def test_orthogonality_per_class(i, q):
    N = 20000
    d = residue_projection(CATALOG[i], q, N)
    assert class_orthogonality(d, N) <= 1e-10 * q


@given(st.integers(0, len(CATALOG) - 1), st.sampled_from([2, 3, 6]))
def test_idempotence(i, q):
    d = residue_projection(CATALOG[i], q, 10**4)
    again = residue_projection(d.f_str, q, 10**4)
    assert np.max(np.abs(again.table - d.table)) <= 1e-12
    assert again.residual_energy <= 1e-12


@pytest.mark.parametrize("f", SET_INDICATORS, ids=lambda f: f.name)
def test_range_preservation(f):
    for q in (2, 6, 60):
        t = residue_projection(f, q, 10**5).table
        assert np.all(t >= 0) and np.all(t <= 1)


def test_pythagoras():
    f = AdditiveCharacter("sqrt(2)")
    N = 10**5
    d = residue_projection(f, 6, N)
    total = log_average(f * f.conj(), N)
    str_energy = log_average(d.f_str * d.f_str.conj(), N)
    assert total == pytest.approx(str_energy + d.residual_energy, abs=1e-12)


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_ladder_monotone(name):
    lad = modulus_ladder_decompose(parse_sequence(name), 5, 10**5)
    assert lad.moduli == [1, 2, 6, 12, 60]
    assert all(b <= a + LADDER_SLACK for a, b in zip(lad.energies, lad.energies[1:]))


def test_modulus_ladder_values():
    assert modulus_ladder(7) == [1, 2, 6, 12, 60, 60, 420]


def test_quasiperiodic_has_rational_spectrum():
    for f, q in ((alternating(), 2), (ResidueIndicator(3, 0), 3), (random_table(3, 4), 4)):
        assert residue_projection(f, q, 10**5).residual_energy <= 1e-6
        corr = correlation_sequence(f, 10**5, 400)
        energy = complex(log_average(f * f.conj(), 10**5)).real
        assert rational_mass(corr, q, 400 // q) >= energy - 1e-3


def test_aperiodicity_score():
    assert aperiodicity_score(alternating(), 1, 10, 1000) == 0.0
    assert aperiodicity_score(alternating(), 2, 10, 1000) == pytest.approx(1.0, abs=1e-15)
    assert aperiodicity_score(Constant(1), 3, 7, 1000) == pytest.approx(1.0, abs=1e-14)
    # brute force for a random table
    f = random_table(5, 7)
    N, q, H = 800, 3, 11
    v = f.values(np.arange(1, N + q * H + 1))
    s = [abs(sum(v[n + q * h - 1] for h in range(1, H + 1)) / H) ** 2 / n for n in range(1, N + 1)]
    assert aperiodicity_score(f, q, H, N) == pytest.approx(math.fsum(s) / harmonic(N), abs=1e-13)


def test_preconditions():
    with pytest.raises(ParameterError):
        residue_projection(Constant(1), 20, 100)
    with pytest.raises(ParameterError):
        modulus_ladder_decompose(Constant(1), 5, 500)


def test_ladder_reaches_zero_once_modulus_is_divisible():
    lad = modulus_ladder_decompose(ResidueIndicator(4, 0), 4, 10**5)
    assert lad.energies[-1] <= 1e-12 < lad.energies[-2]
