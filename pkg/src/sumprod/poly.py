"""Integer polynomials with exact evaluation and overflow-guarded vector evaluation."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

_INT64_SAFE = 1 << 62
_TERM = re.compile(r"^(?P<coef>\d*)\*?(?:(?P<var>[a-z])(?:\^(?P<exp>\d+))?)?$")


@dataclass(frozen=True)
class IntPolynomial:
    """Q(y) = c0 + c1*y + ... + cd*y^d with integer coefficients.

    ``denominator`` lets the same object stand for a polynomial with rational
    coefficients Q(y)/denominator; it is only used by phase computations.
    """

    coeffs: tuple[int, ...]
    denominator: int = 1

    def __post_init__(self) -> None:
        cs = [int(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        if self.denominator < 1:
            raise ValueError("denominator must be positive")

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Parse expressions like ``y-1``, ``2*y^2 - 3y + 1``, ``x**2``, ``0``.

        A trailing ``/d`` divides the whole polynomial by the integer d.
        """
        s = text.replace(" ", "").replace("**", "^").lower()
        denom = 1
        if "/" in s:
            s, d = s.rsplit("/", 1)
            if s.startswith("(") and s.endswith(")"):
                s = s[1:-1]
            denom = int(d)
        if not s:
            raise ValueError(f"empty polynomial: {text!r}")
        coeffs: dict[int, int] = {}
        var = None
        for term in re.findall(r"[+-]?[^+-]+", s):
            sign = -1 if term[0] == "-" else 1
            body = term.lstrip("+-")
            m = _TERM.match(body)
            if not m or (not m["coef"] and not m["var"]):
                raise ValueError(f"cannot parse term {term!r} in {text!r}")
            if m["var"]:
                if var is not None and m["var"] != var:
                    raise ValueError(f"mixed variables in {text!r}")
                var = m["var"]
                exp = int(m["exp"]) if m["exp"] else 1
            else:
                exp = 0
            coef = int(m["coef"]) if m["coef"] else 1
            coeffs[exp] = coeffs.get(exp, 0) + sign * coef
        deg = max(coeffs) if coeffs else 0
        return cls(tuple(coeffs.get(i, 0) for i in range(deg + 1)), denom)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @cached_property
    def q1_zero(self) -> bool:
        return sum(self.coeffs) == 0

    @cached_property
    def q0_zero(self) -> bool:
        return not self.coeffs or self.coeffs[0] == 0

    def __call__(self, y: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def magnitude_bound(self, y_abs_max: int) -> int:
        """Upper bound for |Q(y)| over |y| <= y_abs_max."""
        return sum(abs(c) * y_abs_max**i for i, c in enumerate(self.coeffs))

    def eval_array(self, y: np.ndarray) -> np.ndarray:
        """Vectorized evaluation as int64.

        Raises OverflowError when some value could leave the int64 range.
        """
        y = np.asarray(y, dtype=np.int64)
        if y.size == 0:
            return np.zeros(0, dtype=np.int64)
        ymax = int(np.abs(y).max())
        if self.magnitude_bound(ymax) >= _INT64_SAFE:
            raise OverflowError(f"Q({ymax}) may overflow 64-bit evaluation")
        acc = np.zeros_like(y)
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def __str__(self) -> str:
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for i in range(len(self.coeffs) - 1, -1, -1):
                c = self.coeffs[i]
                if c == 0:
                    continue
                mono = "" if i == 0 else ("y" if i == 1 else f"y^{i}")
                mag = abs(c)
                coef = str(mag) if (mag != 1 or i == 0) else ""
                sep = "*" if coef and mono else ""
                sign = "-" if c < 0 else "+"
                parts.append((sign, f"{coef}{sep}{mono}"))
            body = ("-" if parts[0][0] == "-" else "") + parts[0][1]
            for sign, t in parts[1:]:
                body += f" {sign} {t}"
        if self.denominator != 1:
            return f"({body})/{self.denominator}"
        return body
