"""Real frequencies stored to 128 fractional bits for phase reduction.

``e(Q(n) * alpha)`` with ``Q(n)`` near 10^12 loses the fractional part in
plain double arithmetic.  ``Angle`` keeps frac(alpha) as a 128-bit fixed-point
integer so ``frac(k * alpha)`` can be formed exactly from an integer ``k``.
"""

from __future__ import annotations

import ast
import operator
import re
from fractions import Fraction

import mpmath
import numpy as np

from . import kernels

_PREC_BITS = 320
_SCALE = 1 << 128
_WORD = (1 << 64) - 1
_SHORT_SQRT = re.compile(r"sqrt(\d+)")

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def _evaluate(node, exact: bool):
    if isinstance(node, ast.Expression):
        return _evaluate(node.body, exact)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        if exact:
            return Fraction(str(node.value)) if isinstance(node.value, float) else Fraction(node.value)
        return mpmath.mpf(str(node.value)) if isinstance(node.value, float) else mpmath.mpf(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _evaluate(node.operand, exact)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left = _evaluate(node.left, exact)
        right = _evaluate(node.right, exact)
        if exact and isinstance(node.op, ast.Pow):
            if right.denominator != 1:
                raise _NotRational
            return left ** int(right)
        return _BINOPS[type(node.op)](left, right)
    if isinstance(node, ast.Name):
        if exact:
            raise _NotRational
        consts = {"pi": mpmath.pi, "e": mpmath.e, "phi": (1 + mpmath.sqrt(5)) / 2}
        if node.id in consts:
            return mpmath.mpf(consts[node.id])
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and len(node.args) == 1:
        if exact:
            raise _NotRational
        fn = {"sqrt": mpmath.sqrt, "log": mpmath.log, "exp": mpmath.exp}.get(node.func.id)
        if fn is not None:
            return fn(_evaluate(node.args[0], False))
    raise ValueError(f"unsupported expression: {ast.dump(node)}")


def unit_phase(x: np.ndarray) -> np.ndarray:
    """e(x) for x in [0, 1), reduced by quarter turns so e(j/4) is exact."""
    x = np.asarray(x, dtype=np.float64)
    k = np.rint(4.0 * x)
    r = 2.0 * np.pi * (x - 0.25 * k)
    base = np.cos(r) + 1j * np.sin(r)
    quarter = np.array([1, 1j, -1, -1j], dtype=np.complex128)
    return base * quarter[k.astype(np.int64) % 4]


class _NotRational(Exception):
    pass


class Angle:
    """A real number alpha, kept exactly (rational) or to 320 bits."""

    __slots__ = ("text", "exact", "mp", "hi", "lo")

    def __init__(self, value: "Angle | float | int | Fraction | str"):
        if isinstance(value, Angle):
            self.text, self.exact, self.mp = value.text, value.exact, value.mp
            self.hi, self.lo = value.hi, value.lo
            return
        with mpmath.workprec(_PREC_BITS):
            self.exact: Fraction | None = None
            if isinstance(value, str):
                self.text = value.strip()
                src = self.text.replace("^", "**")
                src = _SHORT_SQRT.sub(r"sqrt(\1)", src)  # "sqrt2" shorthand
                tree = ast.parse(src, mode="eval")
                try:
                    self.exact = Fraction(_evaluate(tree, True))
                except _NotRational:
                    self.mp = _evaluate(tree, False)
                else:
                    self.mp = mpmath.mpf(self.exact.numerator) / self.exact.denominator
            else:
                if isinstance(value, float):
                    self.exact = Fraction(value)  # the double itself, exactly
                else:
                    self.exact = Fraction(value)
                self.text = repr(value) if not isinstance(value, Fraction) else str(value)
                self.mp = mpmath.mpf(self.exact.numerator) / self.exact.denominator
            self._set_words()

    def _set_words(self) -> None:
        if self.exact is not None:
            frac = self.exact - (self.exact.numerator // self.exact.denominator)
            fixed = (frac.numerator * _SCALE) // frac.denominator
        else:
            with mpmath.workprec(_PREC_BITS):
                frac = self.mp - mpmath.floor(self.mp)
                fixed = int(mpmath.floor(frac * _SCALE))
        self.hi = fixed >> 64
        self.lo = fixed & _WORD

    @property
    def value(self) -> float:
        return float(self.mp)

    @property
    def is_rational(self) -> bool:
        return self.exact is not None

    def scaled(self, num: int, den: int = 1) -> "Angle":
        """alpha * num / den as a new Angle."""
        out = Angle.__new__(Angle)
        out.text = f"({self.text})*{num}/{den}" if den != 1 else f"({self.text})*{num}"
        with mpmath.workprec(_PREC_BITS):
            if self.exact is not None:
                out.exact = self.exact * num / den
                out.mp = mpmath.mpf(out.exact.numerator) / out.exact.denominator
            else:
                out.exact = None
                out.mp = self.mp * num / den
        out._set_words()
        return out

    def __neg__(self) -> "Angle":
        return self.scaled(-1)

    def __add__(self, other: "Angle") -> "Angle":
        other = Angle(other)
        out = Angle.__new__(Angle)
        out.text = f"{self.text}+{other.text}"
        with mpmath.workprec(_PREC_BITS):
            if self.exact is not None and other.exact is not None:
                out.exact = self.exact + other.exact
                out.mp = mpmath.mpf(out.exact.numerator) / out.exact.denominator
            else:
                out.exact = None
                out.mp = self.mp + other.mp
        out._set_words()
        return out

    def frac_times(self, k: np.ndarray) -> np.ndarray:
        """frac(k * alpha) for an int64 array k."""
        return kernels.frac_phase(np.ascontiguousarray(k, dtype=np.int64), self.hi, self.lo)

    def phase(self, k: np.ndarray) -> np.ndarray:
        """e(k * alpha) = exp(2 pi i k alpha) for an int64 array k."""
        return unit_phase(self.frac_times(k))

    def __repr__(self) -> str:
        return f"Angle({self.text!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Angle) and (self.hi, self.lo, self.exact) == (other.hi, other.lo, other.exact)

    def __hash__(self) -> int:
        return hash((self.hi, self.lo))
