import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprod.angles import Angle, unit_phase
from sumprod.errors import ParameterError
from sumprod.poly import IntPolynomial
from sumprod.sequences import CATALOG_NAMES, AdditiveCharacter, catalog, parse_sequence
from sumprod.sets import (BitmaskSet, Example1Set, build_example1, build_example2, example1_intervals, parse_set,
                          v2, v2_array)


def test_catalog_is_one_bounded():
    fs = catalog()
    assert [f.name for f in fs] == list(CATALOG_NAMES)
    n = np.arange(1, 5001)
    for f in fs:
        assert f.bound <= 1
        assert np.all(np.abs(f.values(n)) <= f.bound + 1e-15)


def test_parse_round_trip_names():
    for name in CATALOG_NAMES:
        assert parse_sequence(name).name == name
    with pytest.raises(ParameterError):
        parse_sequence("nonsense:1")


def test_exact_rational_phases():
    assert unit_phase(np.array([0.5]))[0] == -1
    assert unit_phase(np.array([0.25]))[0] == 1j
    chi = AdditiveCharacter("1/2")
    assert chi.values(np.arange(1, 5)).tolist() == [-1, 1, -1, 1]


def test_large_argument_reduction():
    # n*sqrt(2) mod 1 for n near 10^12 keeps its fractional part
    a = Angle("sqrt(2)")
    import mpmath

    mpmath.mp.dps = 40
    n = 10**12 + 7
    exact = float(mpmath.frac(n * mpmath.sqrt(2)))
    assert a.frac_times(np.array([n]))[0] == pytest.approx(exact, abs=1e-9)


def test_polynomial_parse_and_eval():
    Q = IntPolynomial.parse("(x^2+x)/2")
    assert Q.denominator == 2
    assert [Q(y) // Q.denominator for y in range(5)] == [0, 1, 3, 6, 10]
    assert IntPolynomial.parse("y-1")(5) == 4


@given(st.integers(1, 2**62))
def test_v2(n):
    k = v2(n)
    assert n % (1 << k) == 0 and (n >> k) % 2 == 1
    assert v2_array(np.array([n], dtype=np.int64))[0] == k


def test_example1_mask():
    A = build_example1(10**5)
    m = A.members()
    assert m[0] == 65536 and m[-1] == 92681 and m.size == 27146
    assert example1_intervals(10**5) == [(65536, 92681)]
    exact = Example1Set()
    for n in (65535, 65536, 92681, 92682, 2**32, 2**32 + 1):
        assert exact.contains(n) == (n in range(65536, 92682) or 2**32 <= n <= 6074000999)


def test_example2_membership():
    A = build_example2(1)
    for n in range(1, 2000):
        assert A.contains(n) == bool(A.indicator(np.array([n]))[0])


def test_set_masks_agree_with_contains():
    for text in ("evens", "odds", "mult-even", "primes", "residue:5:2", "interval:10:40", "primes-shifted:-1"):
        A = parse_set(text)
        m = A.mask(500)
        assert [bool(m[v]) for v in range(1, 501)] == [A.contains(v) for v in range(1, 501)], text


@given(members=st.lists(st.integers(1, 3000), max_size=200), N_max=st.integers(3000, 4000))
def test_bitmask_file_round_trip(tmp_path_factory, members, N_max):
    path = tmp_path_factory.mktemp("bm") / "set.bin"
    A = BitmaskSet.from_members(members, N_max)
    A.write(path)
    B = BitmaskSet.read(path)
    assert B.N_max == N_max
    assert B.members().tolist() == sorted(set(members))
    assert parse_set(f"file:{path}").members().tolist() == sorted(set(members))
