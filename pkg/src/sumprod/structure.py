"""Splitting a bounded sequence into a q-periodic part plus a remainder.

The periodic part is the conditional expectation on residue classes mod q
under logarithmic weights, i.e. the orthogonal projection onto q-periodic
sequences in the weighted L^2 space over [N].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .avgcore import _chunks, harmonic
from .errors import ParameterError
from .sequences import PeriodicTable, SequenceSpec


@dataclass
class Decomposition:
    q: int
    N: int
    f: SequenceSpec = field(repr=False)
    table: np.ndarray = field(repr=False)  # f_str(n) = table[n mod q]
    residual_energy: float = 0.0

    @property
    def f_str(self) -> PeriodicTable:
        return PeriodicTable(self.table, label=f"E[{self.f.name} | n mod {self.q}]")

    @property
    def f_rnd(self) -> SequenceSpec:
        return self.f - self.f_str


def _class_sums(vals: np.ndarray, w: np.ndarray, a: int, q: int, re: list, im: list) -> None:
    """Append compensated sum of vals*w over each residue class (chunk starts at n = a)."""
    cplx = np.iscomplexobj(vals)
    for r in range(q):
        off = (r - a) % q
        ws = np.ascontiguousarray(w[off::q])
        if ws.size == 0:
            continue
        v = vals[off::q]
        if cplx:
            re[r].append(kernels.comp_dot(np.ascontiguousarray(v.real), ws))
            im[r].append(kernels.comp_dot(np.ascontiguousarray(v.imag), ws))
        else:
            re[r].append(kernels.comp_dot(np.ascontiguousarray(v, dtype=np.float64), ws))


def _residual_energy(f: SequenceSpec, table: np.ndarray, q: int, N: int) -> float:
    acc: list[float] = []
    for a, b in _chunks(1, N):
        n = np.arange(a, b, dtype=np.int64)
        d = f.values(n) - table[n % q]
        acc.append(kernels.comp_dot(np.ascontiguousarray(np.abs(d) ** 2), 1.0 / n))
    return math.fsum(acc) / harmonic(N)


def residue_projection(f: SequenceSpec, q: int, N: int) -> Decomposition:
    """f_str(r) = (sum_{n ≡ r} f(n)/n) / (sum_{n ≡ r} 1/n) over n <= N (needs q <= N/10)."""
    if q < 1:
        raise ParameterError("q must be >= 1")
    if 10 * q > N:
        raise ParameterError(f"q = {q} too large for N = {N} (need q <= N/10)")
    re = [[] for _ in range(q)]
    im = [[] for _ in range(q)]
    den = [[] for _ in range(q)]
    for a, b in _chunks(1, N):
        n = np.arange(a, b, dtype=np.int64)
        w = 1.0 / n
        _class_sums(f.values(n), w, a, q, re, im)
        # same summation order as the numerators, so constants divide out exactly
        _class_sums(np.ones(n.size), w, a, q, den, den)
    num = np.array([complex(math.fsum(x), math.fsum(y)) for x, y in zip(re, im)])
    d = np.array([math.fsum(x) for x in den])
    table = num / d
    table = table.real.copy() if f.is_real else table
    return Decomposition(q, N, f, table, _residual_energy(f, table, q, N))


def aperiodicity_score(f: SequenceSpec, q: int, H: int, N: int) -> float:
    """E^log_{n<=N} |E_{h in [H]} f(n + q h)|^2 (needs qH <= N/10).

    Inner sums come from prefix sums taken separately along each residue
    class mod q.
    """
    if q < 1 or H < 1:
        raise ParameterError("q and H must be positive")
    if 10 * q * H > N:
        raise ParameterError(f"qH = {q * H} too large for N = {N}")
    total = N + q * H
    rows = -(-total // q)
    v = np.zeros(rows * q, dtype=np.complex128 if not f.is_real else np.float64)
    v[:total] = f.values(np.arange(1, total + 1, dtype=np.int64))
    A = v.reshape(rows, q)
    P = np.zeros((rows + 1, q), dtype=A.dtype)
    np.cumsum(A, axis=0, out=P[1:])
    i = np.arange(N)
    row, col = i // q, i % q
    # terms at indices i + q h, h = 1..H: rows row+1 .. row+H of column col
    S = P[row + H + 1, col] - P[row + 1, col]
    mean_sq = np.abs(S / H) ** 2
    return kernels.comp_dot(np.ascontiguousarray(mean_sq), 1.0 / (i + 1.0)) / harmonic(N)


@dataclass
class LadderDecomposition:
    moduli: list[int]
    energies: list[float]
    best: Decomposition
    decompositions: list[Decomposition] = field(repr=False, default_factory=list)


def modulus_ladder(K: int) -> list[int]:
    """lcm(1..k) for k = 1..K."""
    out, q = [], 1
    for k in range(1, K + 1):
        q = math.lcm(q, k)
        out.append(q)
    return out


def modulus_ladder_decompose(f: SequenceSpec, K: int = 5, N: int = 10**6) -> LadderDecomposition:
    """Project onto q-periodic sequences for q = lcm(1..k), k <= K.

    The moduli are nested (each divides the next), so the residual energies
    are non-increasing up to rounding.
    """
    if K < 1:
        raise ParameterError("K must be >= 1")
    qs = modulus_ladder(K)
    if 10 * qs[-1] > N:
        raise ParameterError(f"lcm(1..{K}) = {qs[-1]} too large for N = {N}")
    decs = [residue_projection(f, q, N) for q in qs]
    return LadderDecomposition(qs, [d.residual_energy for d in decs], decs[-1], decs)
