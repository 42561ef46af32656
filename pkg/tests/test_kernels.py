"""Both kernel backends must agree on every entry point."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprod import kernels
from sumprod.angles import Angle
from sumprod.ramsey import Constraints, _csr, pattern_edges

BACKENDS = kernels.backends()
IMPLS = list(BACKENDS.values())


def test_fallback_always_present():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


@given(st.lists(st.floats(-1e6, 1e6), min_size=0, max_size=300), st.integers(0, 10**6))
def test_comp_dot(xs, seed):
    a = np.array(xs, dtype=np.float64)
    b = np.random.default_rng(seed).random(a.size)
    vals = [impl.comp_dot(a, b) for impl in IMPLS]
    assert all(abs(v - vals[0]) <= 1e-9 * (1 + np.abs(a * b).sum()) for v in vals)


def test_comp_dot_is_compensated():
    a = np.array([1e16, 1.0, -1e16, 1.0])
    for impl in IMPLS:
        assert impl.comp_dot(a, np.ones(4)) == 2.0


def test_harmonic_prefix():
    ref = np.cumsum(np.concatenate([[0.0], 1.0 / np.arange(1, 5001)]))
    for impl in IMPLS:
        assert np.allclose(impl.harmonic_prefix(5000), ref, rtol=1e-14, atol=0)


@given(st.lists(st.integers(-(2**62), 2**62), min_size=1, max_size=50), st.sampled_from(["sqrt(2)", "pi", "1/3", "e"]))
def test_frac_phase(qs, alpha):
    a = Angle(alpha)
    q = np.array(qs, dtype=np.int64)
    vals = [impl.frac_phase(q, a.hi, a.lo) for impl in IMPLS]
    for v in vals:
        assert np.array_equal(v, vals[0])
        assert np.all((v >= 0) & (v < 1))


def test_add_multiples_and_liouville():
    ds = np.array([2, 3, 7, 5000, 10**9], dtype=np.int64)
    ws = np.array([0.5, 0.25, 1.0, 2.0, 9.0])
    outs = [impl.add_multiples(ds, ws, 1000) for impl in IMPLS]
    assert outs[0][42] == 1.75 and outs[0][7] == 1.0
    tabs = [impl.liouville_table(10**5) for impl in IMPLS]
    for o, t in zip(outs, tabs):
        assert np.array_equal(o, outs[0]) and np.array_equal(t, tabs[0])
    assert tabs[0][1:9].tolist() == [1, -1, -1, 1, -1, 1, -1, -1]


@given(st.integers(0, 2**32 - 1), st.booleans(), st.integers(50, 4000))
def test_scan_pairs_mask(seed, distinct, prod_limit):
    rng = np.random.default_rng(seed)
    mask = (rng.random(5000) < 0.4).view(np.uint8)
    ys = np.arange(1, 60, dtype=np.int64)
    qys = ys * ys - 3
    outs = [impl.scan_pairs_mask(mask, ys, qys, 1, 70, prod_limit, distinct) for impl in IMPLS]
    for xs, yv in outs:
        assert np.array_equal(xs, outs[0][0]) and np.array_equal(yv, outs[0][1])


@pytest.mark.parametrize("N,r", [(15, 2), (16, 2), (60, 3), (12, 1)])
def test_color_search_outcomes(N, r):
    edges, _ = pattern_edges(N, Constraints())
    indptr, indices = _csr(N, edges)
    res = [impl.color_search(N, indptr, indices, r, 10**7) for impl in IMPLS]
    assert len({status for status, _, _ in res}) == 1
