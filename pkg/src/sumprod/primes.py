"""Prime generation, prime blocks P_W ∩ [M], Mertens-type sums, and the
Liouville function table."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import EmptyBlockError, ParameterError

SEGMENT = 1 << 18
SIEVE_CAP = 1 << 28
LIOUVILLE_CAP = 1 << 25
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def miller_rabin(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _small_primes(n: int) -> np.ndarray:
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if s[i]:
            s[i * i :: i] = False
    return np.flatnonzero(s).astype(np.int64)


def segmented_sieve(m: int, segment: int = SEGMENT) -> np.ndarray:
    """Packed primality bits for 0..m (bit v of the little-endian bitstream).

    Each segment is sieved by the base primes <= sqrt(m) and packed before the
    next one is allocated, so peak memory is one segment plus m/8 bytes.
    """
    segment -= segment % 8
    if m < 2:
        return np.packbits(np.zeros(m + 1, dtype=bool), bitorder="little")
    base = _small_primes(math.isqrt(m)).tolist()
    packed = []
    for lo in range(0, m + 1, segment):
        hi = min(lo + segment, m + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base:
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            seg[start - lo :: p] = False
        if lo == 0:
            seg[: min(2, hi)] = False
        packed.append(np.packbits(seg, bitorder="little"))
    return np.concatenate(packed)


class _PrimeTable:
    """Process-wide cache of packed primality bits, grown on demand."""

    def __init__(self) -> None:
        self.limit = -1
        self.bits = np.zeros(0, dtype=np.uint8)

    def ensure(self, m: int) -> None:
        if m > self.limit:
            new = max(m, min(2 * self.limit, SIEVE_CAP), 1 << 16)
            self.bits = segmented_sieve(new)
            self.limit = new

    def is_prime(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape, dtype=bool)
        ok = (n >= 2) & (n <= SIEVE_CAP)
        if ok.any():
            self.ensure(int(n[ok].max()))
            v = n[ok]
            out[ok] = (self.bits[v >> 3] >> (v & 7).astype(np.uint8)) & 1 == 1
        big = n > SIEVE_CAP
        if big.any():
            out[big] = [miller_rabin(int(v)) for v in n[big].tolist()]
        return out

    def primes_upto(self, m: int) -> np.ndarray:
        self.ensure(m)
        flags = np.unpackbits(self.bits, bitorder="little")[: m + 1]
        return np.flatnonzero(flags).astype(np.int64)


_PRIMES = _PrimeTable()


def is_prime(n) -> np.ndarray | bool:
    """Vectorized primality; scalar in, bool out."""
    if np.isscalar(n):
        return bool(_PRIMES.is_prime(np.array([n]))[0])
    return _PRIMES.is_prime(n)


def primes_upto(m: int) -> np.ndarray:
    return _PRIMES.primes_upto(m) if m >= 2 else np.zeros(0, dtype=np.int64)


def is_prime_trial(n: int) -> bool:
    """Independent primality test by trial division (for cross-checks)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeBlock:
    """All primes p <= M with p ≡ 1 (mod W); for W = 1 every prime <= M."""

    W: int
    M: int
    primes: np.ndarray = field(repr=False, compare=False)

    @property
    def empty(self) -> bool:
        return self.primes.size == 0

    def __len__(self) -> int:
        return int(self.primes.size)

    @property
    def max_prime(self) -> int:
        if self.empty:
            raise EmptyBlockError(f"block W={self.W}, M={self.M} is empty")
        return int(self.primes[-1])

    def log_weights(self) -> np.ndarray:
        """1/p for each p; normalized by ``mertens_reciprocal_sum``."""
        return 1.0 / self.primes.astype(np.float64)


@lru_cache(maxsize=64)
def sieve_block(W: int, M: int) -> PrimeBlock:
    """PrimeBlock for (W, M).  An empty result is allowed; check ``.empty``."""
    if W < 1:
        raise ParameterError("W must be >= 1")
    if M < 2:
        raise ParameterError("M must be >= 2")
    ps = primes_upto(M)
    if W > 1:
        ps = ps[ps % W == 1]
    ps = np.ascontiguousarray(ps)
    ps.setflags(write=False)
    return PrimeBlock(W, M, ps)


def block_from_primes(primes, W: int = 1, M: int | None = None) -> PrimeBlock:
    """A PrimeBlock from an explicit list (used for custom sub-blocks)."""
    ps = np.array(sorted(int(p) for p in primes), dtype=np.int64)
    if ps.size and not is_prime(ps).all():
        raise ParameterError("block contains non-primes")
    ps.setflags(write=False)
    return PrimeBlock(W, M if M is not None else (int(ps[-1]) if ps.size else 2), ps)


def _require(block: PrimeBlock) -> None:
    if block.empty:
        raise EmptyBlockError(
            f"empty prime block (W={block.W}, M={block.M}): Turán-Kubilius bound undefined"
        )


def mertens_reciprocal_sum(block: PrimeBlock) -> float:
    """Sum of 1/p over the block."""
    _require(block)
    return math.fsum(1.0 / p for p in block.primes.tolist())


def mertens_log_sum(block: PrimeBlock) -> float:
    """Sum of log(p)/p over the block."""
    _require(block)
    return math.fsum(math.log(p) / p for p in block.primes.tolist())


class _LiouvilleTable:
    def __init__(self) -> None:
        self.table = np.zeros(1, dtype=np.int8)

    def upto(self, n: int) -> np.ndarray:
        if n >= self.table.size:
            size = min(max(n + 1, 2 * self.table.size, 1 << 16), LIOUVILLE_CAP + 1)
            if n >= size:
                size = n + 1
            self.table = kernels.liouville_table(size - 1)
        return self.table


_LIOUVILLE = _LiouvilleTable()


def _liouville_scalar(n: int) -> int:
    n = abs(n)
    if n == 0:
        return 0
    count = 0
    for p in primes_upto(math.isqrt(n)).tolist():
        if p * p > n:
            break
        while n % p == 0:
            n //= p
            count += 1
    if n > 1:
        count += 1
    return -1 if count % 2 else 1


def liouville(n) -> np.ndarray:
    """lambda(|n|) for an integer array (lambda(0) = 0)."""
    n = np.abs(np.asarray(n, dtype=np.int64))
    if n.size == 0:
        return np.zeros(0, dtype=np.int8)
    top = int(n.max())
    if top <= LIOUVILLE_CAP:
        return _LIOUVILLE.upto(top)[n]
    out = np.empty(n.shape, dtype=np.int8)
    small = n <= LIOUVILLE_CAP
    out[small] = _LIOUVILLE.upto(LIOUVILLE_CAP)[n[small]]
    big = np.flatnonzero(~small.ravel())
    flat = out.reshape(-1)
    nflat = n.reshape(-1)
    for i in big.tolist():
        flat[i] = _liouville_scalar(int(nflat[i]))
    return out


def liouville_scalar(n: int) -> int:
    """lambda(n) for a single, possibly large, integer."""
    if abs(n) <= LIOUVILLE_CAP:
        return int(_LIOUVILLE.upto(abs(n))[abs(n)])
    return _liouville_scalar(n)
