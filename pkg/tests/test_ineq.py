import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumprod.angles import Angle
from sumprod.errors import CostGuardError, EmptyBlockError, ParameterError
from sumprod.ineq import (PairSums, _direct_char_sum, char_log_sum, dilated_log_sums, dilation_transfer_gap,
                          multiplicative_vdc, tk_lhs_direct, tk_lhs_expanded, tk_transfer_discrepancy,
                          turan_kubilius_log)
from sumprod.primes import PrimeBlock, sieve_block
from sumprod.sequences import (AdditiveCharacter, Constant, Liouville, ResidueIndicator, alternating, catalog,
                               mult_even, random_table)

# ---- plain-loop oracles (no shared code with the library paths)


def log_avg_loop(vals, N):
    return math.fsum(vals[n] / n for n in range(1, N + 1)) / math.fsum(1 / n for n in range(1, N + 1))


def tk_oracle(ps, N):
    S = math.fsum(1 / p for p in ps)
    dev = {n: math.fsum((p if n % p == 0 else 0) / p for p in ps) / S - 1 for n in range(1, N + 1)}
    return log_avg_loop({n: d * d for n, d in dev.items()}, N)


def vdc_oracle(fam, g, ps, N):
    S = math.fsum(1 / p for p in ps)
    H = math.fsum(1 / n for n in range(1, N + 1))
    mixed = sum(sum(fam[p](n) * g(p * n) / n for n in range(1, N + 1)) / p for p in ps) / (S * H)
    rhs = 0.0
    for p in ps:
        for q in ps:
            rhs += sum(fam[p](q * n) * fam[q](p * n).conjugate() / n for n in range(1, N + 1)).real / (p * q)
    return abs(mixed) ** 2, rhs / (S * S * H)


def scalar(f):
    return lambda n: complex(f.values(np.array([n], dtype=np.int64))[0])


# ---- Turán-Kubilius


@pytest.mark.parametrize("N", [2, 30, 211, 600])
def test_tk_matches_literal_double_average(N):
    ps = sieve_block(1, N).primes.tolist()
    rep = turan_kubilius_log(sieve_block(1, N), N)
    assert rep.lhs == pytest.approx(tk_oracle(ps, N), abs=1e-12)
    assert rep.holds


def test_tk_single_prime_two():
    # P = {2}, N = 2: dev(1) = -1, dev(2) = 1, average 1
    assert turan_kubilius_log(sieve_block(1, 2), 2).lhs == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("N", [10**2, 10**3, 10**4, 10**5])
def test_tk_two_paths_agree(N):
    b = sieve_block(1, N)
    assert abs(tk_lhs_expanded(b, N) - tk_lhs_direct(b, N)) <= 1e-10


@pytest.mark.parametrize("W,M,N", [(4, 1000, 5000), (3, 500, 500), (10, 2000, 10**4)])
def test_tk_with_w_blocks(W, M, N):
    rep = turan_kubilius_log(sieve_block(W, M), N)
    assert rep.holds and rep.extra["path_gap"] <= 1e-10


def test_tk_rejects_bad_blocks():
    with pytest.raises(EmptyBlockError):
        turan_kubilius_log(sieve_block(6, 6), 10)
    with pytest.raises(ParameterError):
        turan_kubilius_log(sieve_block(1, 100), 50)


# ---- dilation lemma


def test_dilation_gap_q1_is_exactly_zero():
    for f in catalog():
        assert dilation_transfer_gap(f, 1, 10**4).lhs == 0.0


@pytest.mark.parametrize("q", [2, 3, 7])
def test_dilation_gap_matches_loop(q):
    f = random_table(3, 6, real=True)
    N = 700
    vals = {n: float(f.values(np.array([n]))[0]) for n in range(1, N + 1)}
    dil = {n: (q * vals[n // q] if n % q == 0 else 0.0) for n in range(1, N + 1)}
    expected = abs(log_avg_loop(vals, N) - log_avg_loop(dil, N))
    assert dilation_transfer_gap(f, q, N).lhs == pytest.approx(expected, abs=1e-13)


def test_dilation_rejects_unbounded():
    with pytest.raises(ParameterError):
        dilation_transfer_gap(Constant(2), 2, 100)


# ---- transfer discrepancy


def test_transfer_constant_is_zero():
    assert tk_transfer_discrepancy(Constant(1), 1, 100, 10**4, k=2) <= 1e-14


def test_transfer_matches_literal_nested_average():
    f = random_table(11, 4)
    ps = sieve_block(1, 20).primes.tolist()
    N = 300
    S = math.fsum(1 / p for p in ps)
    val = lambda n: complex(f.values(np.array([n]))[0])  # noqa: E731
    H = math.fsum(1 / n for n in range(1, N + 1))
    base = sum(val(n) / n for n in range(1, N + 1)) / H
    inner = 0
    for p1 in ps:
        for p2 in ps:
            inner += sum(val(p1 * p2 * n) / n for n in range(1, N + 1)) / H / (p1 * p2)
    expected = abs(base - inner / S**2)
    assert tk_transfer_discrepancy(f, 1, 20, N, k=2) == pytest.approx(expected, abs=1e-12)


def test_transfer_shared_mode_is_a_different_truncation():
    # shared mode truncates inner averages at N/d; for f = 1 that is visible
    assert tk_transfer_discrepancy(Constant(1), 1, 100, 10**4, mode="shared") > 0.05


def test_transfer_cost_guard():
    with pytest.raises(CostGuardError):
        tk_transfer_discrepancy(Liouville(), 1, 1000, 1000, k=3, budget=1e6)


@pytest.mark.parametrize("f", [random_table(5, 12), Liouville(), AdditiveCharacter("sqrt(2)"), mult_even()],
                         ids=lambda f: f.name)
def test_dilated_log_sums_paths_agree_with_loop(f):
    ds = [1, 2, 6, 35]
    N = 400
    out = dilated_log_sums(f, ds, N)
    for d, z in zip(ds, out):
        ref = sum(complex(f.values(np.array([d * n]))[0]) / n for n in range(1, N + 1))
        assert abs(z - ref) <= 1e-12


# ---- closed-form character sums


@given(st.floats(1e-6, 1 - 1e-6), st.integers(1, 20000))
def test_char_log_sum_matches_direct(b, N):
    beta = Angle(b)
    assert abs(char_log_sum(beta, N) - _direct_char_sum(beta, N)) <= 1e-12


@pytest.mark.parametrize("alpha", ["sqrt(2)", "1/3", "1/2", "0", "pi"])
def test_char_log_sum_exact_values(alpha):
    beta = Angle(alpha)
    N = 10**5
    assert abs(char_log_sum(beta, N) - _direct_char_sum(beta, N)) <= 1e-12


def test_full_series_limit():
    # -log(1 - e(1/3)) at huge N
    z = cmath.exp(2j * math.pi / 3)
    assert abs(char_log_sum(Angle("1/3"), 10**12) - (-cmath.log(1 - z))) <= 1e-11


# ---- multiplicative van der Corput


FAMILIES = {
    "const": (lambda p: Constant(1), Constant(1)),
    "random": (lambda p: random_table(100 + p, 6), random_table(1, 6)),
    "char": (lambda p: AdditiveCharacter("sqrt(2)"), AdditiveCharacter("sqrt(2)").conj()),
    "liouville": (lambda p: Liouville(), Liouville()),
    "mixed": (lambda p: alternating() if p % 4 == 1 else ResidueIndicator(3, 1), AdditiveCharacter("1/5")),
}


@pytest.mark.parametrize("name", FAMILIES)
def test_vdc_matches_literal_sums(name):
    fp, g = FAMILIES[name]
    block = sieve_block(1, 13)
    N = 250
    ps = block.primes.tolist()
    fam = {p: scalar(fp(p)) for p in ps}
    lhs, rhs = vdc_oracle(fam, scalar(g), ps, N)
    rep = multiplicative_vdc(fp, g, block, N)
    assert rep.lhs == pytest.approx(lhs, abs=1e-12)
    assert rep.rhs_main == pytest.approx(rhs, abs=1e-12)


@given(st.permutations(list(range(24))), st.integers(0, 10**6))
def test_vdc_permutation_invariance(perm, seed):
    block = sieve_block(1, 100)  # 25 primes; the largest stays last
    ps = block.primes
    shuffled = np.concatenate([ps[:-1][np.array(perm)], ps[-1:]])
    other = PrimeBlock(1, 100, shuffled)
    fp = lambda p: random_table(seed + p, 4)  # noqa: E731
    g = random_table(seed, 4)
    a = multiplicative_vdc(fp, g, block, 10**4)
    b = multiplicative_vdc(fp, g, other, 10**4)
    assert abs(a.lhs - b.lhs) < 1e-12 and abs(a.rhs_main - b.rhs_main) < 1e-12


def test_vdc_cost_guard_and_paths():
    from sumprod.sequences import FunctionSequence

    slow = FunctionSequence(lambda n: np.cos(n.astype(float)), "cos", bound=1.0, is_real=True)
    with pytest.raises(CostGuardError):
        multiplicative_vdc(lambda p: slow, Constant(1), sieve_block(1, 1000), 10**6, budget=1e6)
    rep = multiplicative_vdc(lambda p: Liouville(), Liouville(), sieve_block(1, 100), 10**4)
    assert set(rep.extra["paths"]) == {"multiplicative"}


def test_pair_sums_frequency_cache():
    ps = PairSums(1000)
    chi = AdditiveCharacter("sqrt(2)")
    z1 = ps(chi, 2, chi.conj(), 3)
    z2 = ps(chi, 4, chi.conj(), 6)
    ref = sum(complex(chi.values(np.array([2 * n]))[0] * chi.conj().values(np.array([3 * n]))[0]) / n
              for n in range(1, 1001))
    assert abs(z1 - ref) < 1e-12 and abs(z2 - z1) > 1e-6
