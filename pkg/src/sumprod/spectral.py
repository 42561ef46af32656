"""Logarithmic autocorrelations, Toeplitz positivity, rational spectral mass
and exponential sums over primes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .angles import Angle
from .avgcore import _chunks, harmonic
from .errors import EmptyBlockError, ParameterError
from .poly import IntPolynomial
from .primes import sieve_block
from .sequences import SequenceSpec

DIRECT_MAX_LAG = 64


@dataclass
class CorrelationSequence:
    """phi(m) = E^log_{n<=N} f(n) conj(f(n+m)) for 0 <= m <= L.

    Negative lags are defined by phi(-m) = conj(phi(m)).
    """

    name: str
    N: int
    L: int
    bound: float
    values: np.ndarray = field(repr=False)

    @classmethod
    def from_values(cls, values, N: int = 1 << 62, bound: float = 1.0, name: str = "explicit") -> "CorrelationSequence":
        v = np.asarray(values, dtype=np.complex128)
        return cls(name, N, v.size - 1, bound, v)

    def phi(self, m: int) -> complex:
        if abs(m) > self.L:
            raise ParameterError(f"lag {m} beyond L = {self.L}")
        v = complex(self.values[abs(m)])
        return v if m >= 0 else v.conjugate()

    @property
    def eps(self) -> float:
        """2 bound^2 (L/N + 1/H(N)): finite-scale slack for positivity statements."""
        return 2.0 * self.bound**2 * (self.L / self.N + 1.0 / harmonic(self.N))

    def toeplitz(self, order: int) -> np.ndarray:
        i = np.arange(order)
        d = i[:, None] - i[None, :]
        v = self.values[np.abs(d)]
        return np.where(d >= 0, v, np.conj(v))


def _corr_direct(f: SequenceSpec, N: int, L: int) -> np.ndarray:
    re = [[] for _ in range(L + 1)]
    im = [[] for _ in range(L + 1)]
    for a, b in _chunks(1, N):
        n = np.arange(a, b + L, dtype=np.int64)
        v = f.values(n)
        w = 1.0 / n[: b - a]
        head = v[: b - a] * w
        for m in range(L + 1):
            tail = v[m : m + b - a]
            if np.iscomplexobj(v):
                x, y = np.ascontiguousarray(head.real), np.ascontiguousarray(head.imag)
                u, z = np.ascontiguousarray(tail.real), np.ascontiguousarray(tail.imag)
                # (x + iy)(u - iz)
                re[m] += [kernels.comp_dot(x, u), kernels.comp_dot(y, z)]
                im[m] += [kernels.comp_dot(y, u), -kernels.comp_dot(x, z)]
            else:
                re[m].append(kernels.comp_dot(np.ascontiguousarray(head, dtype=np.float64),
                                              np.ascontiguousarray(tail, dtype=np.float64)))
    return np.array([complex(math.fsum(r), math.fsum(i)) for r, i in zip(re, im)])


def _corr_fft(f: SequenceSpec, N: int, L: int) -> np.ndarray:
    n = np.arange(1, N + L + 1, dtype=np.int64)
    v = f.values(n).astype(np.complex128)
    head = np.zeros(N + L, dtype=np.complex128)
    head[:N] = v[:N] / n[:N]
    size = 1 << int(math.ceil(math.log2(2 * (N + L))))
    # sum_n head[n] conj(v[n+m]) = conj(sum_n conj(head[n]) v[n+m])
    cross = np.fft.fft(v, size) * np.conj(np.fft.fft(head, size))
    cc = np.fft.ifft(cross)[: L + 1]
    return np.conj(cc)


def correlation_sequence(f: SequenceSpec, N: int, L: int, method: str = "auto") -> CorrelationSequence:
    """Log-weighted autocorrelations up to lag L (requires L <= N/10).

    Lags up to 64 are summed directly with compensation; longer sequences go
    through one FFT cross-correlation.
    """
    if N < 1 or L < 0:
        raise ParameterError("need N >= 1 and L >= 0")
    if 10 * L > N:
        raise ParameterError(f"L = {L} too large for N = {N} (need L <= N/10)")
    if method == "auto":
        method = "direct" if L <= DIRECT_MAX_LAG else "fft"
    if method == "direct":
        raw = _corr_direct(f, N, L)
    elif method == "fft":
        raw = _corr_fft(f, N, L)
    else:
        raise ParameterError(f"unknown method {method!r}")
    vals = raw / harmonic(N)
    vals[0] = vals[0].real
    if f.is_real:
        vals = vals.real.astype(np.complex128)
    return CorrelationSequence(f.name, N, L, f.bound, vals)


@dataclass
class PSDResult:
    min_eigenvalue: float
    psd: bool
    tol: float
    eigenvalues: np.ndarray = field(repr=False)


def herglotz_psd_check(corr: CorrelationSequence, order: int) -> PSDResult:
    """Smallest eigenvalue of the Hermitian Toeplitz matrix [phi(i - j)].

    psd is min_eig >= -order * eps.
    """
    if order < 1 or order > corr.L + 1:
        raise ParameterError(f"order must lie in [1, L+1] = [1, {corr.L + 1}]")
    eig = np.linalg.eigvalsh(corr.toeplitz(order))
    tol = order * corr.eps
    return PSDResult(float(eig[0]), bool(eig[0] >= -tol), tol, eig)


def rational_mass(corr: CorrelationSequence, q: int, M: int) -> float:
    """Re E_{m in [M]} phi(q m): finite stand-in for mu({0, 1/q, ..., (q-1)/q})."""
    if q < 1 or M < 1:
        raise ParameterError("q and M must be positive")
    if q * M > corr.L:
        raise ParameterError(f"q*M = {q * M} exceeds L = {corr.L}")
    return math.fsum(corr.values[q : q * M + 1 : q].real.tolist()) / M


def isometry_identity_gap(f: SequenceSpec, N: int, lags, coeffs, corr: CorrelationSequence | None = None) -> tuple[float, float]:
    """|E^log |sum c_i f(n + m_i)|^2 - sum_ij c_i conj(c_j) phi(m_j - m_i)|.

    Returns (gap, contract) with contract = l^2 max|c|^2 eps, eps taken at
    L = the largest lag spread.
    """
    lags = [int(m) for m in lags]
    c = np.asarray(coeffs, dtype=np.complex128)
    if len(lags) != c.size or not lags:
        raise ParameterError("lags and coefficients must be nonempty and of equal length")
    spread = max(lags) - min(lags)
    L = max(spread, 1)
    if corr is None or corr.L < spread or corr.N != N:
        corr = correlation_sequence(f, N, L if 10 * L <= N else spread)
    acc_re: list[float] = []
    for a, b in _chunks(1, N):
        n = np.arange(a, b, dtype=np.int64)
        s = np.zeros(n.size, dtype=np.complex128)
        for ci, m in zip(c.tolist(), lags):
            s += ci * f.values(n + m)
        acc_re.append(kernels.comp_dot(np.ascontiguousarray(np.abs(s) ** 2), 1.0 / n))
    lhs = math.fsum(acc_re) / harmonic(N)
    terms = []
    for i, mi in enumerate(lags):
        for j, mj in enumerate(lags):
            terms.append((c[i] * np.conj(c[j]) * corr.phi(mj - mi)).real)
    rhs = math.fsum(terms)
    eps = 2.0 * f.bound**2 * (L / N + 1.0 / harmonic(N))
    contract = len(lags) ** 2 * float(np.abs(c).max()) ** 2 * eps
    return abs(lhs - rhs), contract


def prime_exp_sum(Q: IntPolynomial | str, alpha: Angle | str | float, a: int = 1, b: int = 0, W: int = 1,
                  M: int = 1000, mode: str = "logarithmic") -> complex:
    """Average of 1_{aZ+b}(p) e(Q(p) alpha) over the block P_W ∩ [M].

    Logarithmic mode weights p by 1/p, Cesàro mode uniformly; both normalize
    by the whole block so the residue filter reports its share of the mass.
    """
    if isinstance(Q, str):
        Q = IntPolynomial.parse(Q)
    alpha = Angle(alpha)
    if a < 1:
        raise ParameterError("a must be >= 1")
    if mode not in ("logarithmic", "log", "cesaro"):
        raise ParameterError(f"unknown mode {mode!r}")
    block = sieve_block(W, M)
    ps = block.primes
    if ps.size == 0:
        raise EmptyBlockError(f"prime block W={W}, M={M} is empty")
    keep = ps % a == b % a
    if not keep.any():
        raise EmptyBlockError(f"no primes p ≡ {b} (mod {a}) in the block W={W}, M={M}")
    eff = alpha.scaled(1, Q.denominator) if Q.denominator != 1 else alpha
    z = eff.phase(Q.eval_array(ps[keep]))
    if mode == "cesaro":
        w = np.ones(int(keep.sum()))
        total = float(ps.size)
    else:
        w = 1.0 / ps[keep].astype(np.float64)
        total = math.fsum((1.0 / ps.astype(np.float64)).tolist())
    re = kernels.comp_dot(np.ascontiguousarray(z.real), w)
    im = kernels.comp_dot(np.ascontiguousarray(z.imag), w)
    return complex(re, im) / total
