"""Bounded arithmetic functions f: Z -> C, evaluated lazily on int64 arrays."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .angles import Angle
from .errors import ParameterError
from .poly import IntPolynomial
from .primes import liouville
from .sets import SetSpec, parse_set


class SequenceSpec:
    """Base class for bounded sequences.

    Subclasses implement ``values``.  ``period`` is an exact period when one
    is known (else None), ``frequency`` is set for linear characters e(n*alpha),
    and ``completely_multiplicative`` enables fast paths in the correlation
    code.
    """

    kind: str = "custom"
    bound: float = 1.0
    is_real: bool = True
    period: int | None = None
    completely_multiplicative: bool = False
    frequency: Angle | None = None

    @property
    def name(self) -> str:
        return self.kind

    @property
    def cache_key(self) -> tuple:
        """Equal keys mean equal sequences; defaults to object identity."""
        return ("id", id(self))

    def values(self, n: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, n: int):
        v = self.values(np.array([n], dtype=np.int64))[0]
        return float(v) if self.is_real else complex(v)

    def residue_table(self) -> np.ndarray:
        """Values on 0..period-1 (periodic sequences only)."""
        if self.period is None:
            raise ParameterError(f"{self.name} is not periodic")
        return self.values(np.arange(self.period, dtype=np.int64))

    def conj(self) -> "SequenceSpec":
        return self if self.is_real else Conjugate(self)

    def shifted(self, m: int) -> "SequenceSpec":
        return self if m == 0 else Shifted(self, m)

    def dilated(self, s: int) -> "SequenceSpec":
        """n -> f(s*n)."""
        return self if s == 1 else Dilated(self, s)

    def dilation_transfer(self, q: int) -> "SequenceSpec":
        """n -> q * 1_{q|n} * f(n/q)."""
        return DilationTransfer(self, q)

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = Constant(other)
        return Combination([(1, self), (1, other)])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = Constant(other)
        return Combination([(1, self), (-1, other)])

    def __mul__(self, other):
        if isinstance(other, SequenceSpec):
            return Product(self, other)
        return Combination([(other, self)])

    __rmul__ = __mul__

    def __neg__(self):
        return Combination([(-1, self)])

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


def _out_dtype(*specs: SequenceSpec):
    return np.float64 if all(s.is_real for s in specs) else np.complex128


class Constant(SequenceSpec):
    kind = "const"

    def __init__(self, c: complex):
        c = complex(c)
        self.is_real = c.imag == 0
        self.c = c.real if self.is_real else c
        self.bound = abs(c)
        self.period = 1
        self.completely_multiplicative = c == 1

    @property
    def name(self) -> str:
        c = self.c
        if self.is_real and float(c).is_integer():
            c = int(c)
        return f"const:{c}"

    def values(self, n):
        dt = np.float64 if self.is_real else np.complex128
        return np.full(np.shape(n), self.c, dtype=dt)


class ResidueIndicator(SequenceSpec):
    """1_{n ≡ b (mod a)}."""

    kind = "residue"

    def __init__(self, a: int, b: int):
        if a < 1:
            raise ParameterError("modulus must be >= 1")
        self.a, self.b = a, b % a
        self.period = a

    @property
    def name(self) -> str:
        return f"residue:{self.a}:{self.b}"

    def values(self, n):
        return (np.asarray(n, dtype=np.int64) % self.a == self.b).astype(np.float64)


class PeriodicTable(SequenceSpec):
    """f(n) = table[n mod L]."""

    kind = "table"

    def __init__(self, table: Sequence[complex], label: str | None = None):
        t = np.asarray(table)
        if t.ndim != 1 or t.size == 0:
            raise ParameterError("table must be a nonempty 1-d sequence")
        self.is_real = not np.iscomplexobj(t) or bool(np.all(t.imag == 0))
        self.table = (t.real if self.is_real else t).astype(np.float64 if self.is_real else np.complex128)
        self.period = int(t.size)
        self.bound = float(np.abs(self.table).max())
        self.label = label

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        return "table:" + ",".join(f"{v:g}" for v in self.table.tolist())

    def values(self, n):
        return self.table[np.asarray(n, dtype=np.int64) % self.period]


def alternating() -> PeriodicTable:
    """(-1)^n."""
    return PeriodicTable([1.0, -1.0], label="alternating")


def random_table(seed: int, period: int, real: bool = False) -> PeriodicTable:
    """A 1-bounded periodic table with random entries (unit circle or [-1,1])."""
    rng = np.random.default_rng(seed)
    if real:
        t = rng.uniform(-1.0, 1.0, period)
    else:
        t = np.exp(2j * np.pi * rng.random(period)) * np.sqrt(rng.random(period))
    return PeriodicTable(t, label=f"random:{seed}:{period}")


class AdditiveCharacter(SequenceSpec):
    """e(Q(n) * alpha) = exp(2 pi i Q(n) alpha).

    Q(n) is formed exactly in int64 and reduced against the 128-bit
    fixed-point alpha, so large Q(n) keep their fractional part.
    """

    kind = "char"
    is_real = False

    def __init__(self, alpha: Angle | str | float, Q: IntPolynomial | str | None = None):
        self.alpha = Angle(alpha)
        if Q is None:
            Q = IntPolynomial((0, 1))
        elif isinstance(Q, str):
            Q = IntPolynomial.parse(Q)
        self.Q = Q
        self._eff = self.alpha.scaled(1, Q.denominator) if Q.denominator != 1 else self.alpha
        if Q.degree == 1 and Q.q0_zero:
            self.frequency = self._eff.scaled(Q.coeffs[1])
        if self._eff.is_rational:
            self.period = Fraction(self._eff.exact).denominator if Q.degree >= 0 else 1
        if self._eff.is_rational and self.period in (1, 2):
            self.is_real = True

    @property
    def name(self) -> str:
        q = str(self.Q)
        return f"char:{self.alpha.text}" + ("" if q == "y" else f":{q}")

    def values(self, n):
        k = self.Q.eval_array(np.asarray(n, dtype=np.int64))
        z = self._eff.phase(k)
        return z.real.copy() if self.is_real else z


class Liouville(SequenceSpec):
    """lambda(n) = (-1)^Omega(n); lambda(0) = 0."""

    kind = "liouville"
    completely_multiplicative = True
    cache_key = ("liouville",)

    def values(self, n):
        return liouville(n).astype(np.float64)


class SetIndicator(SequenceSpec):
    kind = "set"

    def __init__(self, A: SetSpec):
        self.A = A

    @property
    def name(self) -> str:
        return "mult-even" if self.A.name == "mult-even" else f"set:{self.A.name}"

    def values(self, n):
        return self.A.indicator(n).astype(np.float64)


def mult_even() -> SetIndicator:
    from .sets import MultiplicativelyEven

    return SetIndicator(MultiplicativelyEven())


class FunctionSequence(SequenceSpec):
    """Wraps a vectorized callable; ``bound`` is taken on trust."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], label: str,
                 bound: float = 1.0, is_real: bool = True, period: int | None = None):
        self.func = func
        self.label = label
        self.bound = bound
        self.is_real = is_real
        self.period = period

    @property
    def name(self) -> str:
        return self.label

    def values(self, n):
        return np.asarray(self.func(np.asarray(n, dtype=np.int64)))


class Conjugate(SequenceSpec):
    kind = "conj"

    def __init__(self, f: SequenceSpec):
        self.f = f
        self.bound = f.bound
        self.is_real = f.is_real
        self.period = f.period
        self.completely_multiplicative = f.completely_multiplicative
        if f.frequency is not None:
            self.frequency = -f.frequency

    @property
    def name(self) -> str:
        return f"conj({self.f.name})"

    @property
    def cache_key(self) -> tuple:
        return ("conj", self.f.cache_key)

    def conj(self):
        return self.f

    def values(self, n):
        return np.conj(self.f.values(n))


class Shifted(SequenceSpec):
    """n -> f(n + m)."""

    kind = "shift"

    def __init__(self, f: SequenceSpec, m: int):
        self.f, self.m = f, m
        self.bound, self.is_real, self.period = f.bound, f.is_real, f.period

    @property
    def name(self) -> str:
        return f"{self.f.name}(n{self.m:+d})"

    def values(self, n):
        return self.f.values(np.asarray(n, dtype=np.int64) + self.m)


class Dilated(SequenceSpec):
    """n -> f(s * n)."""

    kind = "dilate"

    def __init__(self, f: SequenceSpec, s: int):
        self.f, self.s = f, s
        self.bound, self.is_real = f.bound, f.is_real
        self.completely_multiplicative = False
        if f.period is not None:
            self.period = f.period // math.gcd(f.period, s)
        if f.frequency is not None:
            self.frequency = f.frequency.scaled(s)

    @property
    def name(self) -> str:
        return f"{self.f.name}({self.s}n)"

    def values(self, n):
        return self.f.values(self.s * np.asarray(n, dtype=np.int64))


class DilationTransfer(SequenceSpec):
    """n -> q * 1_{q|n} * f(n/q)."""

    kind = "transfer"

    def __init__(self, f: SequenceSpec, q: int):
        if q < 1:
            raise ParameterError("q must be >= 1")
        self.f, self.q = f, q
        self.bound, self.is_real = q * f.bound, f.is_real

    @property
    def name(self) -> str:
        return f"{self.q}*1_{{{self.q}|n}}*{self.f.name}(n/{self.q})"

    def values(self, n):
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape, dtype=_out_dtype(self.f))
        hit = n % self.q == 0
        out[hit] = self.q * self.f.values(n[hit] // self.q)
        return out


class Combination(SequenceSpec):
    """sum_i c_i * f_i."""

    kind = "combo"

    def __init__(self, terms: list[tuple[complex, SequenceSpec]]):
        flat: list[tuple[complex, SequenceSpec]] = []
        for c, f in terms:
            if isinstance(f, Combination):
                flat.extend((c * cc, ff) for cc, ff in f.terms)
            else:
                flat.append((c, f))
        self.terms = flat
        self.is_real = all(complex(c).imag == 0 and f.is_real for c, f in flat)
        self.bound = sum(abs(c) * f.bound for c, f in flat)
        periods = [f.period for _, f in flat]
        if all(p is not None for p in periods):
            self.period = math.lcm(*periods)

    @property
    def name(self) -> str:
        return " + ".join(f"{c}*{f.name}" for c, f in self.terms)

    def values(self, n):
        out = np.zeros(np.shape(n), dtype=np.float64 if self.is_real else np.complex128)
        for c, f in self.terms:
            out = out + (c.real if self.is_real and isinstance(c, complex) else c) * f.values(n)
        return out


class Product(SequenceSpec):
    """Pointwise f * g."""

    kind = "product"

    def __init__(self, f: SequenceSpec, g: SequenceSpec):
        self.f, self.g = f, g
        self.bound = f.bound * g.bound
        self.is_real = f.is_real and g.is_real
        self.completely_multiplicative = f.completely_multiplicative and g.completely_multiplicative
        if f.period is not None and g.period is not None:
            self.period = math.lcm(f.period, g.period)

    @property
    def name(self) -> str:
        return f"({self.f.name})*({self.g.name})"

    def values(self, n):
        return self.f.values(n) * self.g.values(n)


def parse_sequence(text: str) -> SequenceSpec:
    """Sequence from a short description.

    Forms: const:C, residue:A:B, alternating, liouville, mult-even,
    char:ALPHA[:Q] (e.g. ``char:sqrt2``, ``char:sqrt(2):y^2``),
    table:v0,v1,..., random:SEED:PERIOD, set:SETSPEC.
    """
    text = text.strip()
    head, _, rest = text.partition(":")
    try:
        if head == "const":
            return Constant(complex(rest.replace("i", "j")) if "i" in rest or "j" in rest else float(rest))
        if head == "residue":
            a, b = rest.split(":")
            return ResidueIndicator(int(a), int(b))
        if head == "alternating" and not rest:
            return alternating()
        if head == "liouville" and not rest:
            return Liouville()
        if head == "mult-even" and not rest:
            return mult_even()
        if head == "char":
            alpha, _, q = rest.partition(":")
            return AdditiveCharacter(alpha, q or None)
        if head == "table":
            vals = [complex(v.replace("i", "j")) for v in rest.split(",")]
            return PeriodicTable(vals)
        if head == "random":
            seed, period = rest.split(":")
            return random_table(int(seed), int(period))
        if head == "set":
            return SetIndicator(parse_set(rest))
    except (ValueError, SyntaxError) as exc:
        raise ParameterError(f"bad sequence description {text!r}: {exc}") from None
    raise ParameterError(f"unknown sequence description {text!r}")


CATALOG_NAMES = (
    "const:1",
    "residue:3:0",
    "alternating",
    "char:sqrt2",
    "liouville",
    "mult-even",
    "set:example1",
)


def catalog() -> list[SequenceSpec]:
    """The built-in 1-bounded test functions."""
    return [parse_sequence(s) for s in CATALOG_NAMES]
