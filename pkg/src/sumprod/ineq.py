"""Finite-scale checks of the dilation lemma, the logarithmic Turán-Kubilius
inequality and the multiplicative van der Corput inequality."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .angles import Angle
from .avgcore import HARMONIC, _chunks, harmonic, residue_log_weights, weighted_sums
from .errors import CostGuardError, ParameterError
from .primes import PrimeBlock, mertens_reciprocal_sum, sieve_block
from .sequences import AdditiveCharacter, SequenceSpec

DILATION_C = 3.0
VDC_C1 = 4.0
VDC_C2 = 4.0
TK_CONSTANT = 9.0
DEFAULT_BUDGET = 4 * 10**9  # evaluations of a sequence at a point


@dataclass
class InequalityReport:
    lhs: float
    rhs_main: float
    rhs_error_budget: float
    holds: bool
    parameters: dict
    extra: dict = field(default_factory=dict)

    @classmethod
    def make(cls, lhs: float, rhs_main: float, budget: float, parameters: dict, **extra) -> "InequalityReport":
        return cls(lhs, rhs_main, budget, bool(lhs <= rhs_main + budget), parameters, extra)

    @property
    def slack(self) -> float:
        return self.rhs_main + self.rhs_error_budget - self.lhs

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs_main": self.rhs_main,
            "rhs_error_budget": self.rhs_error_budget,
            "holds": self.holds,
            "parameters": self.parameters,
            **self.extra,
        }


def _require_one_bounded(f: SequenceSpec, what: str = "f") -> None:
    if f.bound > 1 + 1e-12:
        raise ParameterError(f"{what} must be 1-bounded (bound {f.bound})")


# ---------------------------------------------------------------- sums over n


def _log_sum(vals_of: Callable[[np.ndarray], np.ndarray], N: int) -> complex:
    re: list[float] = []
    im: list[float] = []
    for a, b in _chunks(1, N):
        n = np.arange(a, b, dtype=np.int64)
        v = vals_of(n)
        w = 1.0 / n
        if np.iscomplexobj(v):
            re.append(kernels.comp_dot(np.ascontiguousarray(v.real), w))
            im.append(kernels.comp_dot(np.ascontiguousarray(v.imag), w))
        else:
            re.append(kernels.comp_dot(np.ascontiguousarray(v, dtype=np.float64), w))
    return complex(math.fsum(re), math.fsum(im))


_TAIL_MIN = 64.0


def char_log_sum(beta: Angle, N: int) -> complex:
    """sum_{n<=N} e(n beta)/n.

    For z = e(beta) != 1 the full series is -log(1 - z) =
    -log(2 sin(pi b)) + i pi (1/2 - b) with b = frac(beta); the tail over
    n > N is expanded by repeated summation by parts, which converges fast
    once N |1 - z| is large.  Otherwise the sum is taken directly.
    """
    b = (beta.hi + beta.lo / 2.0**64) / 2.0**64
    if b == 0.0:
        return complex(harmonic(N)) if beta.hi == 0 and beta.lo == 0 else _direct_char_sum(beta, N)
    gap = 2.0 * math.sin(math.pi * min(b, 1.0 - b))  # |1 - z|
    M = N + 1
    if M * gap < _TAIL_MIN:
        return _direct_char_sum(beta, N)
    z = complex(math.cos(2 * math.pi * b), math.sin(2 * math.pi * b))
    one_minus_z = -2j * math.sin(math.pi * b) * complex(math.cos(math.pi * b), math.sin(math.pi * b))
    full = complex(-math.log(2.0 * math.sin(math.pi * b)), math.pi * (0.5 - b))
    zM = complex(beta.phase(np.array([M], dtype=np.int64))[0])
    # term_j = z^(M+j) (-1)^j j! / ((1-z)^(j+1) M (M+1) ... (M+j))
    term = zM / (one_minus_z * M)
    tail = [term]
    j = 0
    while abs(term) > 1e-19 * max(abs(full), 1.0) and j < 60:
        term = term * (-z * (j + 1)) / (one_minus_z * (M + j + 1))
        tail.append(term)
        j += 1
    t = complex(math.fsum(x.real for x in tail), math.fsum(x.imag for x in tail))
    return full - t


def _direct_char_sum(beta: Angle, N: int) -> complex:
    return _log_sum(AdditiveCharacter(beta).values, N)


class PairSums:
    """Sums T(a, s, b, t) = sum_{n<=N} a(s n) b(t n) / n with shared caches.

    Periodic pairs reduce to residue-class weights, completely multiplicative
    pairs factor out a(s) b(t), and pairs of linear characters collapse to a
    single frequency.  Anything else is summed directly under a work budget.
    """

    def __init__(self, N: int, budget: float = DEFAULT_BUDGET):
        self.N = N
        self.budget = budget
        self.spent = 0.0
        self._freq: dict[Angle, complex] = {}
        self._cm: dict[tuple, complex] = {}
        self.paths: dict[str, int] = {}

    def _charge(self, work: float) -> None:
        self.spent += work
        if self.spent > self.budget:
            raise CostGuardError(
                f"direct summation needs more than {self.budget:.3g} evaluations", self.spent, self.budget
            )

    def _count(self, path: str) -> None:
        self.paths[path] = self.paths.get(path, 0) + 1

    def plan_cost(self, a: SequenceSpec, b: SequenceSpec) -> float:
        """Work for one direct pair sum (0 when a fast path applies)."""
        if a.period is not None and b.period is not None:
            return 0.0
        if a.completely_multiplicative and b.completely_multiplicative:
            return 0.0
        if a.frequency is not None and b.frequency is not None:
            return 0.0
        return 2.0 * self.N

    def __call__(self, a: SequenceSpec, s: int, b: SequenceSpec, t: int) -> complex:
        N = self.N
        if a.period is not None and b.period is not None:
            self._count("periodic")
            L = math.lcm(a.period, b.period)
            r = np.arange(L, dtype=np.int64)
            vals = a.values(s * r) * b.values(t * r)
            R = residue_log_weights(L, N)
            if np.iscomplexobj(vals):
                return complex(kernels.comp_dot(np.ascontiguousarray(vals.real), R),
                               kernels.comp_dot(np.ascontiguousarray(vals.imag), R))
            return complex(kernels.comp_dot(np.ascontiguousarray(vals, dtype=np.float64), R))
        if a.completely_multiplicative and b.completely_multiplicative:
            self._count("multiplicative")
            key = (a.cache_key, b.cache_key)
            if key not in self._cm:
                self._charge(2.0 * N)
                self._cm[key] = _log_sum(lambda n: a.values(n) * b.values(n), N)
            return complex(a(s)) * complex(b(t)) * self._cm[key]
        if a.frequency is not None and b.frequency is not None:
            self._count("frequency")
            beta = a.frequency.scaled(s) + b.frequency.scaled(t)
            if beta not in self._freq:
                self._freq[beta] = char_log_sum(beta, N)
            return self._freq[beta]
        self._count("direct")
        self._charge(2.0 * N)
        return _log_sum(lambda n: a.values(s * n) * b.values(t * n), N)


# ---------------------------------------------------------------- dilation


def dilation_transfer_gap(f: SequenceSpec, q: int, N: int) -> InequalityReport:
    """|E^log f(n) - E^log q 1_{q|n} f(n/q)| against the budget 3 log q / log N.

    Uses sum_{n<=N, q|n} q f(n/q)/n = sum_{m<=N/q} f(m)/m, so both sides
    come out of one pass over [N].
    """
    _require_one_bounded(f)
    if q < 1 or N < 1:
        raise ParameterError("q and N must be positive")
    if q > N:
        raise ParameterError(f"q = {q} exceeds N = {N}")
    small, full = weighted_sums(f, [N // q, N])
    H = harmonic(N)
    lhs = abs(full / H - small / H)
    budget = DILATION_C * math.log(q) / math.log(N) if N > 1 else 0.0
    return InequalityReport.make(lhs, 0.0, budget, {"f": f.name, "q": q, "N": N})


# ---------------------------------------------------------------- Turán-Kubilius


def _check_block(block: PrimeBlock, N: int) -> None:
    if block.empty:
        mertens_reciprocal_sum(block)  # raises EmptyBlockError
    if block.max_prime > N:
        raise ParameterError(f"block has primes up to {block.max_prime} > N = {N}")


def tk_lhs_expanded(block: PrimeBlock, N: int) -> float:
    """E^log_{p,q} pq E^log_n 1_{lcm(p,q)|n} - 2 E^log_p p E^log_n 1_{p|n} + 1.

    E^log_n 1_{d|n} = H(N//d) / (d H(N)); only pairs with pq <= N contribute
    off the diagonal.
    """
    ps = block.primes
    S = mertens_reciprocal_sum(block)
    HN = harmonic(N)
    Hp = np.array([harmonic(N // p) for p in ps.tolist()])
    diag = [h / p for h, p in zip(Hp.tolist(), ps.tolist())]
    cross: list[float] = []
    plist = ps.tolist()
    for i, p in enumerate(plist):
        j_hi = int(np.searchsorted(ps, N // p, side="right"))
        if j_hi <= i + 1:
            continue
        d = p * ps[i + 1 : j_hi]
        # each unordered pair counted twice
        cross.append(2.0 * math.fsum((HARMONIC.at(N // d) / d).tolist()))
    pair_sum = math.fsum(diag) + math.fsum(cross)
    first = pair_sum / (S * S * HN)
    second = 2.0 * math.fsum(diag) / (S * HN)
    return first - second + 1.0


def tk_lhs_direct(block: PrimeBlock, N: int) -> float:
    """E^log_n (omega_P(n)/S - 1)^2 with omega_P(n) = #{p in P : p | n}.

    The inner average E^log_p (p 1_{p|n} - 1) simplifies to omega_P(n)/S - 1.
    """
    S = mertens_reciprocal_sum(block)
    omega = kernels.add_multiples(block.primes, np.ones(len(block)), N)
    n = np.arange(1, N + 1, dtype=np.float64)
    dev = omega[1:] / S - 1.0
    return kernels.comp_dot(dev * dev, 1.0 / n) / harmonic(N)


def turan_kubilius_log(block: PrimeBlock, N: int, crosscheck: bool = True) -> InequalityReport:
    """Logarithmic Turán-Kubilius: lhs <= 9 / sum_{p in P} 1/p."""
    _check_block(block, N)
    S = mertens_reciprocal_sum(block)
    lhs = tk_lhs_expanded(block, N)
    extra = {"reciprocal_sum": S, "normalized_lhs": lhs * S}
    if crosscheck:
        direct = tk_lhs_direct(block, N)
        extra["lhs_direct"] = direct
        extra["path_gap"] = abs(direct - lhs)
    return InequalityReport.make(
        lhs, TK_CONSTANT / S, 0.0, {"W": block.W, "M": block.M, "N": N, "primes": len(block)}, **extra
    )


# ---------------------------------------------------------------- transfer


def _tuple_products(block: PrimeBlock, k: int, budget: float) -> dict[int, float]:
    """Products p_k...p_1 over k-tuples with weight prod(1/p_i), merged by product."""
    ps = block.primes.tolist()
    if float(len(ps)) ** k > budget:
        raise CostGuardError(f"{len(ps)}^{k} prime tuples exceed the budget", float(len(ps)) ** k, budget)
    cur: dict[int, float] = {1: 1.0}
    for _ in range(k):
        nxt: dict[int, list[float]] = {}
        for d, w in cur.items():
            for p in ps:
                nxt.setdefault(d * p, []).append(w / p)
        cur = {d: math.fsum(ws) for d, ws in nxt.items()}
    return cur


def dilated_log_sums(f: SequenceSpec, ds: Sequence[int], N: int, budget: float = DEFAULT_BUDGET) -> np.ndarray:
    """sum_{n<=N} f(d n)/n for each d (complex array)."""
    ds = [int(d) for d in ds]
    if f.period is not None:
        L = f.period
        R = residue_log_weights(L, N)
        r = np.arange(L, dtype=np.int64)
        out = np.empty(len(ds), dtype=np.complex128)
        for i, d in enumerate(ds):
            v = f.values((d % L) * r)
            out[i] = complex(kernels.comp_dot(np.ascontiguousarray(np.real(v), dtype=np.float64), R),
                             kernels.comp_dot(np.ascontiguousarray(np.imag(v), dtype=np.float64), R))
        return out
    if f.completely_multiplicative:
        base = _log_sum(f.values, N)
        fd = f.values(np.array(ds, dtype=np.int64))
        return fd * base
    work = float(len(ds)) * N
    if work > budget:
        raise CostGuardError(f"{len(ds)} dilations x N = {N} exceeds the budget", work, budget)
    if ds and max(ds) * N >= 1 << 62:
        raise CostGuardError("dilated arguments overflow 64-bit integers", max(ds) * N, 1 << 62)
    return np.array([_log_sum(lambda n, d=d: f.values(d * n), N) for d in ds], dtype=np.complex128)


def tk_transfer_discrepancy(f: SequenceSpec, W: int, M: int, N: int, k: int = 1,
                            mode: str = "direct", budget: float = DEFAULT_BUDGET) -> float:
    """|E^log_{n<=N} f(n) - E^log_{p_k..p_1} E^log_{n<=N} f(p_k...p_1 n)|.

    Each prime level is weighted by 1/p over the block P_W ∩ [M].  In
    ``direct`` mode the inner averages are exact at truncation N.  ``shared``
    mode evaluates sum_d w_d d 1_{d|n} f(n/d) in a single divisor pass over
    [N], i.e. inner averages truncated at N/d instead of N.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    block = sieve_block(W, M)
    S = mertens_reciprocal_sum(block)
    prods = _tuple_products(block, k, budget)
    ds = sorted(prods)
    ws = np.array([prods[d] for d in ds]) / S**k
    H = harmonic(N)
    (base,) = weighted_sums(f, [N])
    if mode == "direct":
        sums = dilated_log_sums(f, ds, N, budget)
        inner = complex(math.fsum((ws * sums.real).tolist()), math.fsum((ws * sums.imag).tolist()))
    elif mode == "shared":
        keep = [i for i, d in enumerate(ds) if d <= N]
        coef = kernels.add_multiples(np.array([ds[i] for i in keep], dtype=np.int64),
                                     np.array([ws[i] * ds[i] for i in keep]), N)
        # sum_{m<=N} f(m)/m * sum_{d|m} d w_d  ==  sum_d w_d sum_{n<=N/d} f(n)/n
        re: list[float] = []
        im: list[float] = []
        for a, b in _chunks(1, N):
            n = np.arange(a, b, dtype=np.int64)
            v = f.values(n) * coef[a:b] / n
            re.append(math.fsum(np.real(v).tolist()))
            im.append(math.fsum(np.imag(v).tolist()) if np.iscomplexobj(v) else 0.0)
        inner = complex(math.fsum(re), math.fsum(im))
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    return abs(base / H - inner / H)


# ---------------------------------------------------------------- multiplicative vdC


def multiplicative_vdc(fp: Callable[[int], SequenceSpec], g: SequenceSpec, block: PrimeBlock, N: int,
                       budget: float = DEFAULT_BUDGET) -> InequalityReport:
    """|E^log_p E^log_n f_p(n) g(pn)|^2 <= Re E^log_{p,q} E^log_n f_p(qn) conj(f_q(pn)) + budget.

    budget = 4 / sum 1/p + 4 log(max p) / log N.  ``fp`` maps a prime to its
    sequence (use ``lambda p: f`` for a constant family).
    """
    _check_block(block, N)
    _require_one_bounded(g, "g")
    ps = block.primes.tolist()
    fams = {p: fp(p) for p in ps}
    for p, f in fams.items():
        _require_one_bounded(f, f"f_{p}")
    S = mertens_reciprocal_sum(block)
    H = harmonic(N)
    sums = PairSums(N, budget)
    conjs = {p: f.conj() for p, f in fams.items()}

    est = sum(sums.plan_cost(fams[p], conjs[q]) for p in ps for q in ps)
    est += sum(sums.plan_cost(fams[p], g) for p in ps)
    if est > budget:
        raise CostGuardError(f"multiplicative vdC needs about {est:.3g} evaluations", est, budget)

    mixed_re, mixed_im = [], []
    for p in ps:
        z = sums(fams[p], 1, g, p) / p
        mixed_re.append(z.real)
        mixed_im.append(z.imag)
    mixed = complex(math.fsum(mixed_re), math.fsum(mixed_im)) / (S * H)
    lhs = abs(mixed) ** 2

    terms = []
    for p in ps:
        for q in ps:
            terms.append(sums(fams[p], q, conjs[q], p).real / (p * q))
    rhs_main = math.fsum(terms) / (S * S * H)
    err = VDC_C1 / S + VDC_C2 * math.log(block.max_prime) / math.log(N)
    params = {"g": g.name, "f_example": fams[ps[0]].name, "W": block.W, "M": block.M, "N": N,
              "primes": len(ps)}
    return InequalityReport.make(lhs, rhs_main, err, params, mixed_average=mixed, paths=dict(sums.paths))
