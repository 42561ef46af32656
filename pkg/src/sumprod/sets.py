"""Subsets of the natural numbers: bitmasks, named generators and predicates.

Every set answers ``contains(n)`` for a Python int and ``indicator(ns)`` for an
int64 array.  Bitmask sets serialize to a flat binary file: 8-byte
little-endian N_max, then ceil(N_max/8) bytes where bit i (LSB first) of the
stream is membership of i+1.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ParameterError
from .primes import is_prime, liouville, liouville_scalar, miller_rabin, primes_upto

INT64_MAX = (1 << 63) - 1


def v2(n: int) -> int:
    """2-adic valuation of a nonzero integer."""
    n = abs(n)
    return (n & -n).bit_length() - 1


def v2_array(n: np.ndarray) -> np.ndarray:
    """2-adic valuation for an array of nonzero int64 values."""
    n = np.abs(np.asarray(n, dtype=np.int64))
    low = n & -n
    _, e = np.frexp(low.astype(np.float64))
    return (e - 1).astype(np.int64)


class SetSpec:
    """Base class.  ``N_max`` is None for sets defined on all of N."""

    name: str = "set"
    N_max: int | None = None
    flags: dict

    def contains(self, n: int) -> bool:
        return bool(self.indicator(np.array([n], dtype=np.int64))[0])

    def __contains__(self, n: int) -> bool:
        return self.contains(n)

    def indicator(self, n: np.ndarray) -> np.ndarray:
        """Boolean membership for an int64 array (n <= 0 is never a member)."""
        raise NotImplementedError

    def mask(self, limit: int) -> np.ndarray:
        """Boolean array m of length limit+1 with m[v] = (v in A)."""
        out = np.zeros(limit + 1, dtype=bool)
        step = 1 << 20
        for lo in range(1, limit + 1, step):
            hi = min(lo + step, limit + 1)
            out[lo:hi] = self.indicator(np.arange(lo, hi, dtype=np.int64))
        return out

    def to_bitmask(self, N_max: int) -> "BitmaskSet":
        return BitmaskSet.from_bool(self.mask(N_max)[1:], name=self.name)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class Naturals(SetSpec):
    def __init__(self) -> None:
        self.name = "naturals"
        self.flags = {}

    def contains(self, n: int) -> bool:
        return n >= 1

    def indicator(self, n):
        return np.asarray(n) >= 1

    def mask(self, limit: int) -> np.ndarray:
        out = np.ones(limit + 1, dtype=bool)
        out[0] = False
        return out


class EmptySet(SetSpec):
    def __init__(self) -> None:
        self.name = "empty"
        self.flags = {"empty": True}

    def contains(self, n: int) -> bool:
        return False

    def indicator(self, n):
        return np.zeros(np.shape(n), dtype=bool)


class ResidueSet(SetSpec):
    """{n >= 1 : n ≡ b (mod a)}."""

    def __init__(self, a: int, b: int):
        if a < 1:
            raise ParameterError("residue modulus must be >= 1")
        self.a, self.b = a, b % a
        self.name = {(2, 0): "evens", (2, 1): "odds"}.get((a, self.b), f"residue:{a}:{self.b}")
        self.flags = {}

    def contains(self, n: int) -> bool:
        return n >= 1 and n % self.a == self.b

    def indicator(self, n):
        n = np.asarray(n, dtype=np.int64)
        return (n >= 1) & (n % self.a == self.b)

    def mask(self, limit: int) -> np.ndarray:
        out = np.zeros(limit + 1, dtype=bool)
        out[self.b if self.b else self.a :: self.a] = True
        return out


class IntervalSet(SetSpec):
    """[lo, hi] ∩ N."""

    def __init__(self, lo: int, hi: int):
        self.lo, self.hi = max(lo, 1), hi
        self.name = f"interval:{lo}:{hi}"
        self.N_max = hi
        self.flags = {"empty": self.hi < self.lo}

    def contains(self, n: int) -> bool:
        return self.lo <= n <= self.hi

    def indicator(self, n):
        n = np.asarray(n, dtype=np.int64)
        return (n >= self.lo) & (n <= self.hi)


class MultiplicativelyEven(SetSpec):
    """n with an even number of prime factors counted with multiplicity."""

    def __init__(self) -> None:
        self.name = "mult-even"
        self.flags = {}

    def contains(self, n: int) -> bool:
        return n >= 1 and liouville_scalar(n) == 1

    def indicator(self, n):
        n = np.asarray(n, dtype=np.int64)
        return (n >= 1) & (liouville(n) == 1)

    def mask(self, limit: int) -> np.ndarray:
        out = liouville(np.arange(limit + 1)) == 1
        out[0] = False
        return out


class PrimesShifted(SetSpec):
    """P + c = {p + c : p prime} ∩ N; c = -1 gives P - 1."""

    def __init__(self, c: int):
        self.c = c
        self.name = f"primes-shifted:{c}" if c else "primes"
        self.flags = {}

    def contains(self, n: int) -> bool:
        return n >= 1 and miller_rabin(n - self.c)

    def indicator(self, n):
        n = np.asarray(n, dtype=np.int64)
        return (n >= 1) & is_prime(n - self.c)

    def mask(self, limit: int) -> np.ndarray:
        out = np.zeros(limit + 1, dtype=bool)
        ps = primes_upto(limit - self.c) + self.c
        ps = ps[ps >= 1]
        out[ps] = True
        return out


def example1_intervals(upto: int) -> list[tuple[int, int]]:
    """Closed intervals [2^(2^k), floor(2^(2^k + 1/2))] for k >= 4 meeting [1, upto]."""
    out = []
    k = 4
    while (1 << (1 << k)) <= upto:
        lo = 1 << (1 << k)
        hi = math.isqrt(1 << ((1 << (k + 1)) + 1))
        out.append((lo, min(hi, upto)))
        k += 1
    return out


class Example1Set(SetSpec):
    """Union over k >= 4 of [2^(2^k), 2^(2^k + 1/2)), with exact integer endpoints."""

    def __init__(self) -> None:
        self.name = "example1"
        self.flags = {}
        self._iv = example1_intervals(INT64_MAX)

    def contains(self, n: int) -> bool:
        if n < 1 << 16:
            return False
        # 2^(2^k) <= n < 2^(2^(k+1)) with k = floor(log2(bitlen - 1))
        k = (n.bit_length() - 1).bit_length() - 1
        lo = 1 << (1 << k)
        return lo <= n and n * n < (lo * lo) << 1

    def indicator(self, n):
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape, dtype=bool)
        for lo, hi in self._iv:
            out |= (n >= lo) & (n <= hi)
        return out

    def mask(self, limit: int) -> np.ndarray:
        out = np.zeros(limit + 1, dtype=bool)
        for lo, hi in example1_intervals(limit):
            out[lo : hi + 1] = True
        return out


class Example2Set(SetSpec):
    """Union over l <= k <= k_max of 2^(2l-1)(2N+1) ∩ [N_kl^(1/2), N_kl], N_kl = 2^(5^(k^2+l)).

    A pure predicate: the exponents are handled symbolically, so membership of
    any integer is decided without forming N_kl.
    """

    def __init__(self, k_max: int):
        if k_max < 1:
            raise ParameterError("k_max must be >= 1")
        self.k_max = k_max
        self.name = f"example2:{k_max}"
        self.flags = {}
        # (l, E) with N_kl = 2^E
        self.blocks = [(l, 5 ** (k * k + l)) for k in range(1, k_max + 1) for l in range(1, k + 1)]

    @staticmethod
    def _in_window(n: int, E: int) -> bool:
        # sqrt(2^E) <= n <= 2^E; E is odd so the lower end is irrational
        bl = n.bit_length()
        upper = bl <= E or (bl == E + 1 and n == 1 << E)
        return upper and (n * n).bit_length() > E

    def contains(self, n: int) -> bool:
        if n < 1:
            return False
        v = v2(n)
        if v % 2 == 0:
            return False
        l = (v + 1) // 2
        return any(ll == l and self._in_window(n, E) for ll, E in self.blocks)

    def indicator(self, n):
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape, dtype=bool)
        pos = n >= 1
        if not pos.any():
            return out
        val = np.full(n.shape, -1, dtype=np.int64)
        val[pos] = v2_array(n[pos])
        for l, E in self.blocks:
            lo = math.isqrt(1 << E) + 1 if E < 126 else None
            if lo is None or lo > INT64_MAX:
                continue
            hi = min(1 << E, INT64_MAX)
            out |= (val == 2 * l - 1) & (n >= lo) & (n <= hi)
        return out

    def mask(self, limit: int) -> np.ndarray:
        out = np.zeros(limit + 1, dtype=bool)
        for l, E in self.blocks:
            if E >= 126 or math.isqrt(1 << E) + 1 > limit:
                continue
            lo, hi = math.isqrt(1 << E) + 1, min(1 << E, limit)
            # n = 2^(2l-1) * odd: start at the first such n >= lo, stride 2^(2l)
            unit, step = 1 << (2 * l - 1), 1 << (2 * l)
            first = -(-(lo - unit) // step) * step + unit
            out[first : hi + 1 : step] = True
        return out


class PredicateSet(SetSpec):
    """A custom set from a Python predicate on ints (vectorized by looping)."""

    def __init__(self, pred: Callable[[int], bool], name: str = "custom"):
        self.pred = pred
        self.name = name
        self.flags = {}

    def contains(self, n: int) -> bool:
        return n >= 1 and bool(self.pred(n))

    def indicator(self, n):
        n = np.asarray(n, dtype=np.int64)
        return np.fromiter((v >= 1 and bool(self.pred(v)) for v in n.ravel().tolist()),
                           dtype=bool, count=n.size).reshape(n.shape)


@dataclass
class BitmaskSet(SetSpec):
    """Explicit subset of [N_max] stored as packed bits (bit i = membership of i+1)."""

    bits: np.ndarray = field(repr=False)
    N_max: int = 0
    name: str = "bitmask"
    flags: dict = field(default_factory=dict)

    @classmethod
    def from_bool(cls, members: np.ndarray, name: str = "bitmask") -> "BitmaskSet":
        """``members[i]`` is membership of i+1."""
        members = np.asarray(members, dtype=bool)
        bits = np.packbits(members, bitorder="little")
        return cls(bits, int(members.size), name, {"empty": not members.any()})

    @classmethod
    def from_members(cls, members, N_max: int, name: str = "bitmask") -> "BitmaskSet":
        b = np.zeros(N_max, dtype=bool)
        m = np.asarray(list(members), dtype=np.int64)
        if m.size and (m.min() < 1 or m.max() > N_max):
            raise ParameterError("members must lie in [1, N_max]")
        b[m - 1] = True
        return cls.from_bool(b, name)

    def members(self) -> np.ndarray:
        return np.flatnonzero(self.bool_array()) + 1

    def bool_array(self) -> np.ndarray:
        return np.unpackbits(self.bits, bitorder="little", count=self.N_max).astype(bool)

    def contains(self, n: int) -> bool:
        if not 1 <= n <= self.N_max:
            return False
        i = n - 1
        return bool((self.bits[i >> 3] >> (i & 7)) & 1)

    def indicator(self, n):
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape, dtype=bool)
        ok = (n >= 1) & (n <= self.N_max)
        i = n[ok] - 1
        out[ok] = (self.bits[i >> 3] >> (i & 7).astype(np.uint8)) & 1 == 1
        return out

    def mask(self, limit: int) -> np.ndarray:
        out = np.zeros(limit + 1, dtype=bool)
        top = min(limit, self.N_max)
        out[1 : top + 1] = self.bool_array()[:top]
        return out

    def write(self, path: str | Path) -> None:
        with open(path, "wb") as fh:
            fh.write(struct.pack("<Q", self.N_max))
            fh.write(self.bits[: (self.N_max + 7) // 8].tobytes())

    @classmethod
    def read(cls, path: str | Path) -> "BitmaskSet":
        data = Path(path).read_bytes()
        if len(data) < 8:
            raise ParameterError(f"{path}: truncated bitmask header")
        (n_max,) = struct.unpack_from("<Q", data)
        nbytes = (n_max + 7) // 8
        if len(data) != 8 + nbytes:
            raise ParameterError(f"{path}: expected {8 + nbytes} bytes, found {len(data)}")
        bits = np.frombuffer(data, dtype=np.uint8, offset=8).copy()
        # bits past N_max in the last byte are ignored
        if n_max % 8:
            bits[-1] &= (1 << (n_max % 8)) - 1
        out = cls(bits, int(n_max), Path(path).name)
        out.flags["empty"] = not bits.any()
        return out


def build_example1(N_max: int) -> BitmaskSet:
    """Bitmask of the example1 interval union restricted to [N_max]; flagged empty below 2^16."""
    members = np.zeros(max(N_max, 0), dtype=bool)
    for lo, hi in example1_intervals(N_max):
        members[lo - 1 : hi] = True
    out = BitmaskSet.from_bool(members, name="example1")
    out.flags["empty"] = N_max < 1 << 16
    return out


def build_example2(k_max: int) -> Example2Set:
    return Example2Set(k_max)


_NAMED: dict[str, Callable[[], SetSpec]] = {
    "naturals": Naturals,
    "all": Naturals,
    "empty": EmptySet,
    "evens": lambda: ResidueSet(2, 0),
    "odds": lambda: ResidueSet(2, 1),
    "mult-even": MultiplicativelyEven,
    "primes": lambda: PrimesShifted(0),
    "example1": Example1Set,
}


def parse_set(text: str) -> SetSpec:
    """Set from a short description.

    Forms: naturals, empty, evens, odds, mult-even, primes, example1,
    example1:N_MAX (bitmask), example2:K_MAX, residue:A:B, interval:LO:HI,
    primes-shifted:C, file:PATH.
    """
    text = text.strip()
    if text.startswith("file:"):
        return BitmaskSet.read(text[5:])
    head, _, rest = text.partition(":")
    args = rest.split(":") if rest else []
    try:
        if head in _NAMED and not args:
            return _NAMED[head]()
        if head == "example1" and len(args) == 1:
            return build_example1(int(args[0]))
        if head == "example2":
            return Example2Set(int(args[0]) if args else 1)
        if head == "residue" and len(args) == 2:
            return ResidueSet(int(args[0]), int(args[1]))
        if head == "interval" and len(args) == 2:
            return IntervalSet(int(args[0]), int(args[1]))
        if head == "primes-shifted" and len(args) == 1:
            return PrimesShifted(int(args[0]))
    except ValueError as exc:
        raise ParameterError(f"bad set description {text!r}: {exc}") from None
    raise ParameterError(f"unknown set description {text!r}")
