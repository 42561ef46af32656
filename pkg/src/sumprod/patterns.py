"""Pattern search for {x + Q(y), xy}, densities, the counterexample sets and
the iterated affine correlation estimator."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .avgcore import TruncationLadder, _chunks, cesaro_average_ladder, harmonic, log_average_ladder
from .errors import CostGuardError, ParameterError
from .ineq import DEFAULT_BUDGET, _tuple_products
from .poly import IntPolynomial
from .primes import liouville, mertens_reciprocal_sum, sieve_block
from .sequences import SetIndicator
from .sets import (BitmaskSet, Example2Set, MultiplicativelyEven, Naturals, SetSpec, build_example1,
                   build_example2, v2_array)

__all__ = [
    "build_example1", "build_example2", "valuation_obstruction_check", "equal_valuation_pairs",
    "PatternHit", "find_patterns", "density_report", "dsharp_estimate", "iterated_affine_correlation",
]

MASK_CAP = 1 << 31
_INT62 = 1 << 62


# ---------------------------------------------------------------- 2-adic obstruction


def equal_valuation_pairs(bound: int) -> tuple[int, list[tuple[int, int]]]:
    """Count pairs 1 <= x, y <= bound with v2(x+y) = v2(xy); list those with odd valuation."""
    if bound < 1:
        raise ParameterError("bound must be >= 1")
    ys = np.arange(1, bound + 1, dtype=np.int64)
    vy = v2_array(ys)
    count = 0
    bad: list[tuple[int, int]] = []
    for x in range(1, bound + 1):
        vs = v2_array(x + ys)
        vp = v2_array(np.int64(x)) + vy
        eq = vs == vp
        count += int(eq.sum())
        odd = eq & (vs % 2 == 1)
        if odd.any():
            bad += [(x, int(y)) for y in ys[odd].tolist()]
    return count, bad


def valuation_obstruction_check(bound: int) -> bool:
    """True iff every pair x, y <= bound with v2(x+y) = v2(xy) has that valuation even."""
    if bound < 2:
        raise ParameterError("bound must be >= 2")
    return not equal_valuation_pairs(bound)[1]


# ---------------------------------------------------------------- pattern search


@dataclass(frozen=True)
class PatternHit:
    x: int
    y: int
    sum_value: int  # x + Q(y)
    prod_value: int  # x * y
    distinct: bool
    min_xy: int

    def as_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "sum": self.sum_value, "product": self.prod_value}


@dataclass
class PatternScan:
    """Lazy exhaustive scan; iterate for hits (sorted by y, then x)."""

    A: SetSpec
    Q: IntPolynomial
    x_range: tuple[int, int]
    y_range: tuple[int, int]
    min_xy: int = 2
    require_distinct: bool = True
    max_product: int | None = None
    threads: int = 1
    skipped: int = 0
    mask_limit: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        if self.min_xy not in (1, 2):
            raise ParameterError("min_xy must be 1 or 2")
        x_lo, x_hi = self.x_range
        y_lo, y_hi = self.y_range
        self.x_lo = max(x_lo, self.min_xy, 1)
        self.y_lo = max(y_lo, self.min_xy, 1)
        self.x_hi, self.y_hi = x_hi, y_hi
        prod_cap = self.x_hi * self.y_hi
        if self.max_product is not None:
            prod_cap = min(prod_cap, self.max_product)
        self.prod_limit = prod_cap
        if self.y_hi >= self.y_lo:
            # the largest y that can pair with x_lo under the product cap
            self.y_hi = min(self.y_hi, prod_cap // max(self.x_lo, 1))
        ys = np.arange(self.y_lo, max(self.y_hi, self.y_lo - 1) + 1, dtype=np.int64)
        qys = np.array([self.Q(int(y)) for y in ys.tolist()], dtype=object)
        fits = np.array([abs(q) + self.x_hi < _INT62 for q in qys.tolist()], dtype=bool)
        self.skipped = int((~fits).sum()) * max(self.x_hi - self.x_lo + 1, 0)
        self.ys = ys[fits]
        self.qys = np.array(qys[fits].tolist(), dtype=np.int64) if fits.any() else np.zeros(0, np.int64)
        max_sum = int(self.qys.max()) + self.x_hi if self.qys.size else 0
        self.mask_limit = max(max_sum, prod_cap, 1)
        if self.A.N_max is not None:
            self.mask_limit = min(self.mask_limit, max(self.A.N_max, 1))
        if self.mask_limit > MASK_CAP:
            raise CostGuardError(f"membership table up to {self.mask_limit} exceeds {MASK_CAP}",
                                 self.mask_limit, MASK_CAP)

    def _scan(self, mask: np.ndarray, ys: np.ndarray, qys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return kernels.scan_pairs_mask(mask, ys, qys, self.x_lo, self.x_hi, self.prod_limit,
                                       self.require_distinct)

    def __iter__(self) -> Iterator[PatternHit]:
        if self.ys.size == 0 or self.x_hi < self.x_lo:
            return
        mask = self.A.mask(self.mask_limit).view(np.uint8)
        parts = max(1, self.threads) * 4
        pieces = [(a, b) for a, b in zip(np.array_split(self.ys, parts), np.array_split(self.qys, parts)) if a.size]
        if self.threads > 1:
            with ThreadPoolExecutor(self.threads) as ex:
                results = list(ex.map(lambda ab: self._scan(mask, *ab), pieces))
        else:
            results = (self._scan(mask, a, b) for a, b in pieces)
        for xs, ys in results:
            for x, y in zip(xs.tolist(), ys.tolist()):
                s = x + self.Q(y)
                yield PatternHit(x, y, s, x * y, s != x * y, self.min_xy)

    def hits(self) -> list[PatternHit]:
        return list(self)


def find_patterns(A: SetSpec, Q: IntPolynomial | str, x_range: tuple[int, int], y_range: tuple[int, int],
                  min_xy: int = 2, require_distinct: bool = True, max_product: int | None = None,
                  threads: int = 1) -> PatternScan:
    """All (x, y) in the ranges with x + Q(y) and xy both in A.

    ``max_product`` restricts to xy <= max_product.  Pairs whose Q(y) cannot
    be represented in 64 bits are skipped and counted in ``skipped``.
    """
    if isinstance(Q, str):
        Q = IntPolynomial.parse(Q)
    return PatternScan(A, Q, tuple(x_range), tuple(y_range), min_xy, require_distinct, max_product, threads)


# ---------------------------------------------------------------- densities


@dataclass
class DensityReport:
    set_name: str
    cutoffs: tuple[int, ...]
    cesaro: tuple[float, ...]
    logarithmic: tuple[float, ...]

    def as_dict(self) -> dict:
        return {"set": self.set_name, "cutoffs": list(self.cutoffs), "cesaro": list(self.cesaro),
                "logarithmic": list(self.logarithmic)}


def density_report(A: SetSpec, ladder: TruncationLadder) -> DensityReport:
    f = SetIndicator(A)
    ces = cesaro_average_ladder(f, ladder)
    log = log_average_ladder(f, ladder).values
    return DensityReport(A.name, ladder.cutoffs, tuple(ces), tuple(log))


@dataclass
class DSharpEstimate:
    value: float
    witness: tuple[int, int]  # (a_j, m) attaining the min-max
    table: dict[int, tuple[int, float]]  # a_j -> (best m, its log average)


def dsharp_estimate(A: SetSpec, ladder: TruncationLadder, chain: Sequence[int], multiplier_cap: int = 100,
                    budget: float = DEFAULT_BUDGET) -> DSharpEstimate:
    """min over a_j in the chain of max over multiples m of a_j (m <= cap) of E^log_{n<=N} 1_A(mn).

    N is the top of the ladder.
    """
    chain = [int(a) for a in chain]
    if not chain:
        raise ParameterError("divisibility chain must be nonempty")
    if any(a < 1 for a in chain) or any(b % a for a, b in zip(chain, chain[1:])):
        raise ParameterError(f"{chain} is not a divisibility chain")
    if multiplier_cap < chain[0]:
        raise ParameterError("multiplier cap below the first chain element")
    N = ladder.top
    work = sum(multiplier_cap // a for a in chain) * float(N)
    if work > budget:
        raise CostGuardError(f"d-sharp scan needs {work:.3g} evaluations", work, budget)
    H = harmonic(N)
    cache: dict[int, float] = {}

    def avg(m: int) -> float:
        if m not in cache:
            acc = []
            for a, b in _chunks(1, N):
                n = np.arange(a, b, dtype=np.int64)
                acc.append(kernels.comp_dot(A.indicator(m * n).astype(np.float64), 1.0 / n))
            cache[m] = math.fsum(acc) / H
        return cache[m]

    table: dict[int, tuple[int, float]] = {}
    for a in chain:
        best_m, best = a, -1.0
        for m in range(a, multiplier_cap + 1, a):
            v = avg(m)
            if v > best:
                best_m, best = m, v
        table[a] = (best_m, best)
    a_min = min(chain, key=lambda a: (table[a][1], a))
    value = min(max(table[a_min][1], 0.0), 1.0)
    return DSharpEstimate(value, (a_min, table[a_min][0]), table)


# ---------------------------------------------------------------- correlations


def _liouville_inner(Q: IntPolynomial, ds: list[int], N: int, a: int, v: int, threads: int) -> np.ndarray:
    """Inner sums for A = multiplicatively even numbers.

    1_A(a v d n) = [lambda(a v d) lambda(n) = 1], so every inner sum is a
    dot product of a shifted +1-indicator with one of two fixed weight vectors.
    """
    shifts = [Q(v * d) for d in ds]
    lo = min(min(shifts), 0)
    hi = max(shifts) + a * N
    if hi >= _INT62 or lo <= -_INT62:
        raise CostGuardError("shifted arguments overflow 64-bit integers", float(hi), float(_INT62))
    if hi - lo > 1 << 30:
        raise CostGuardError(f"Liouville table over a span of {hi - lo} values", float(hi - lo), float(1 << 30))
    span = np.arange(lo, hi + 1, dtype=np.int64)
    even = (liouville(span) == 1) & (span >= 1)
    even_f = even.astype(np.float64)
    n = np.arange(1, N + 1, dtype=np.int64)
    lam_n = liouville(n).astype(np.int64)
    w_plus = (lam_n == 1) / n.astype(np.float64)
    w_minus = (lam_n == -1) / n.astype(np.float64)
    lam_avd = [int(liouville(np.array([a * v]))[0]) * int(liouville(np.array([d]))[0]) if d < 1 << 62 else 0
               for d in ds]

    def one(i: int) -> float:
        s = shifts[i]
        w = w_plus if lam_avd[i] == 1 else w_minus
        # values a n + s for n = 1..N sit at offsets a + s - lo + a k
        start = a + s - lo
        seg = even_f[start : start + a * N : a]
        return kernels.comp_dot(np.ascontiguousarray(seg), w)

    idx = range(len(ds))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return np.array(list(ex.map(one, idx)))
    return np.array([one(i) for i in idx])


def _generic_inner(A: SetSpec, Q: IntPolynomial, ds: list[int], N: int, a: int, v: int, threads: int) -> np.ndarray:
    n = np.arange(1, N + 1, dtype=np.int64)
    w = 1.0 / n

    def one(d: int) -> float:
        s = Q(v * d)
        if abs(s) + a * N >= _INT62 or a * v * d * N >= _INT62:
            raise CostGuardError(f"arguments for product {d} overflow 64-bit integers", float(a * v * d * N),
                                 float(_INT62))
        ind = A.indicator(a * n + s) & A.indicator(a * v * d * n)
        return kernels.comp_dot(ind.astype(np.float64), w)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return np.array(list(ex.map(one, ds)))
    return np.array([one(d) for d in ds])


@dataclass
class CorrelationEstimate:
    value: float
    products: int  # distinct p_k...p_1
    tuples: int
    path: str


def iterated_affine_correlation(A: SetSpec, Q: IntPolynomial | str, k: int, W: int, M: int, N: int, a: int = 1,
                                v: int = 1, budget: float = DEFAULT_BUDGET, threads: int = 1) -> CorrelationEstimate:
    """E^log_{p_k..p_1 in P_W ∩ [M]} E^log_{n<=N} 1_A(a n + Q(v p_k...p_1)) 1_A(a v p_k...p_1 n).

    Tuples are merged by their product d with weight prod(1/p_i) / S^k.
    """
    if isinstance(Q, str):
        Q = IntPolynomial.parse(Q)
    if k < 1 or a < 1 or v < 1 or N < 1:
        raise ParameterError("k, a, v and N must be positive")
    block = sieve_block(W, M)
    S = mertens_reciprocal_sum(block)
    log_bound = k * math.log(M) + math.log(N) + math.log(a * v)
    if log_bound >= 62 * math.log(2):
        raise CostGuardError(f"products reach exp({log_bound:.1f}), beyond 64-bit", log_bound, 62 * math.log(2))
    prods = _tuple_products(block, k, budget)
    ds = sorted(prods)
    ws = np.array([prods[d] for d in ds]) / S**k
    tuples = len(block) ** k
    if isinstance(A, Naturals):
        return CorrelationEstimate(1.0, len(ds), tuples, "trivial")
    if isinstance(A, MultiplicativelyEven):
        inner = _liouville_inner(Q, ds, N, a, v, threads)
        path = "liouville"
    else:
        work = float(len(ds)) * N
        if work > budget:
            raise CostGuardError(f"{len(ds)} products x N = {N} exceeds the budget", work, budget)
        inner = _generic_inner(A, Q, ds, N, a, v, threads)
        path = "direct"
    value = math.fsum((ws * inner).tolist()) / harmonic(N)
    return CorrelationEstimate(value, len(ds), tuples, path)
