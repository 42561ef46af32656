"""Finite-truncation Cesàro and logarithmic averages.

Sums over [N] are accumulated chunk by chunk with compensated summation, so
no sequence is materialized over the whole range at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterator, Sequence

import numpy as np

from . import kernels
from .errors import ParameterError

if TYPE_CHECKING:
    from .sequences import SequenceSpec

EULER_GAMMA = 0.57721566490153286060651209008240243
CHUNK = 1 << 18


@dataclass(frozen=True)
class TruncationLadder:
    """Increasing cutoffs N_1 < N_2 < ... < N_S standing in for a limit N -> oo."""

    cutoffs: tuple[int, ...]

    def __post_init__(self) -> None:
        cs = tuple(int(c) for c in self.cutoffs)
        if not cs:
            raise ParameterError("a ladder needs at least one cutoff")
        if cs[0] < 1:
            raise ParameterError("cutoffs must be >= 1")
        if any(b <= a for a, b in zip(cs, cs[1:])):
            raise ParameterError(f"cutoffs must be strictly increasing: {cs}")
        object.__setattr__(self, "cutoffs", cs)

    @classmethod
    def of(cls, *cutoffs: int) -> "TruncationLadder":
        return cls(tuple(cutoffs))

    @property
    def top(self) -> int:
        return self.cutoffs[-1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.cutoffs)

    def __len__(self) -> int:
        return len(self.cutoffs)


class HarmonicTable:
    """Prefix sums H(N) = sum_{n<=N} 1/n.

    Entries are tabulated (compensated) up to ``cap``; beyond it
    H(N) = log N + gamma + 1/(2N), which is within 1/(8N^2) of the truth.
    """

    def __init__(self, cap: int = 1 << 23):
        self.cap = cap
        self._table = np.zeros(1, dtype=np.float64)

    @property
    def size(self) -> int:
        return self._table.size - 1

    def ensure(self, n: int) -> np.ndarray:
        n = min(n, self.cap)
        if n > self.size:
            n = min(max(n, 2 * self.size, 1 << 12), self.cap)
            self._table = kernels.harmonic_prefix(n)
        return self._table

    def __call__(self, n: int) -> float:
        if n < 0:
            raise ParameterError("H(N) needs N >= 0")
        if n <= self.cap:
            return float(self.ensure(n)[n])
        return math.log(n) + EULER_GAMMA + 0.5 / n

    def at(self, ns: np.ndarray) -> np.ndarray:
        """Vectorized H over an integer array (values clipped at 0 give H(0) = 0)."""
        ns = np.asarray(ns, dtype=np.int64)
        out = np.empty(ns.shape, dtype=np.float64)
        small = ns <= self.cap
        if small.any():
            tab = self.ensure(int(ns[small].max()))
            out[small] = tab[np.maximum(ns[small], 0)]
        big = ~small
        if big.any():
            nb = ns[big].astype(np.float64)
            out[big] = np.log(nb) + EULER_GAMMA + 0.5 / nb
        return out

    def sandwich_residual(self, n: int) -> float:
        """H(N) - log N - gamma, which lies in [1/(2N) - 1/(8N^2), 1/(2N)]."""
        return self(n) - math.log(n) - EULER_GAMMA


HARMONIC = HarmonicTable()


def harmonic(n: int) -> float:
    return HARMONIC(n)


def _chunks(lo: int, hi: int, size: int = CHUNK) -> Iterator[tuple[int, int]]:
    """Half-open [a, b) pieces covering [lo, hi]."""
    a = lo
    while a <= hi:
        b = min(a + size, hi + 1)
        yield a, b
        a = b


def _acc(vals: np.ndarray, weights: np.ndarray, re: list, im: list) -> None:
    if np.iscomplexobj(vals):
        re.append(kernels.comp_dot(np.ascontiguousarray(vals.real), weights))
        im.append(kernels.comp_dot(np.ascontiguousarray(vals.imag), weights))
    else:
        re.append(kernels.comp_dot(np.ascontiguousarray(vals, dtype=np.float64), weights))


def weighted_sums(f: "SequenceSpec", cutoffs: Sequence[int], logarithmic: bool = True) -> list[complex]:
    """Partial sums sum_{n<=N} f(n) w(n) for every N in ``cutoffs`` (one pass).

    w(n) = 1/n when ``logarithmic`` else 1.
    """
    cutoffs = sorted(cutoffs)
    out: list[complex] = []
    re: list[float] = []
    im: list[float] = []
    start = 1
    for N in cutoffs:
        for a, b in _chunks(start, N):
            n = np.arange(a, b, dtype=np.int64)
            w = 1.0 / n if logarithmic else np.ones(n.size)
            _acc(f.values(n), w, re, im)
        start = N + 1
        out.append(complex(math.fsum(re), math.fsum(im)))
    return out


def _check_n(N: int) -> None:
    if int(N) != N or N < 1:
        raise ParameterError(f"N must be a positive integer, got {N}")


def _as_number(z: complex, f: "SequenceSpec"):
    return z.real if f.is_real else z


def cesaro_average(f: "SequenceSpec", N: int):
    """(1/N) * sum_{n<=N} f(n)."""
    _check_n(N)
    (s,) = weighted_sums(f, [N], logarithmic=False)
    return _as_number(s / N, f)


def log_average(f: "SequenceSpec", N: int):
    """(sum_{n<=N} f(n)/n) / H(N)."""
    _check_n(N)
    (s,) = weighted_sums(f, [N], logarithmic=True)
    return _as_number(s / harmonic(N), f)


def log_average_array(vals: np.ndarray, start: int = 1):
    """Logarithmic average of precomputed values f(start), f(start+1), ...

    Only ``start == 1`` is a logarithmic average over [N]; other starts
    normalize by the weights actually used.
    """
    n = np.arange(start, start + len(vals), dtype=np.int64)
    w = 1.0 / n
    re: list[float] = []
    im: list[float] = []
    _acc(np.asarray(vals), w, re, im)
    norm = harmonic(start + len(vals) - 1) - harmonic(start - 1)
    z = complex(math.fsum(re), math.fsum(im)) / norm
    return z if np.iscomplexobj(vals) else z.real


@lru_cache(maxsize=32)
def residue_log_weights(L: int, N: int) -> np.ndarray:
    """R[r] = sum_{n<=N, n ≡ r mod L} 1/n for r = 0..L-1."""
    out = np.zeros(L, dtype=np.float64)
    for r in range(L):
        first = r if r else L
        if first > N:
            continue
        inv = 1.0 / np.arange(first, N + 1, L, dtype=np.float64)
        out[r] = kernels.comp_dot(inv, np.ones_like(inv))
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class LadderAverages:
    cutoffs: tuple[int, ...]
    values: tuple
    diagnostic: float  # max |value_{s+1} - value_s|; 0 for a single cutoff


def log_average_ladder(f: "SequenceSpec", ladder: TruncationLadder) -> LadderAverages:
    sums = weighted_sums(f, ladder.cutoffs, logarithmic=True)
    vals = tuple(_as_number(s / harmonic(N), f) for s, N in zip(sums, ladder.cutoffs))
    diffs = [abs(b - a) for a, b in zip(vals, vals[1:])]
    return LadderAverages(ladder.cutoffs, vals, max(diffs) if diffs else 0.0)


def cesaro_average_ladder(f: "SequenceSpec", ladder: TruncationLadder) -> tuple:
    sums = weighted_sums(f, ladder.cutoffs, logarithmic=False)
    return tuple(_as_number(s / N, f) for s, N in zip(sums, ladder.cutoffs))
