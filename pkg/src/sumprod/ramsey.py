"""Colorings of [N] avoiding monochromatic {x+y, xy}, and the threshold M(r).

The pattern pairs of [N] form a graph on the values 1..N (an edge joins x+y
and xy); a good r-coloring is a proper coloring of that graph, found by
backtracking in the compiled kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import kernels
from .errors import CostGuardError, ParameterError

DEFAULT_NODE_BUDGET = 10**9


@dataclass(frozen=True)
class Constraints:
    """Admissible (x, y): x, y >= min_xy, and x + y != xy when require_distinct."""

    min_xy: int = 2
    require_distinct: bool = True

    def __post_init__(self) -> None:
        if self.min_xy not in (1, 2):
            raise ParameterError("min_xy must be 1 or 2")

    def flags(self) -> str:
        return f"min_xy={self.min_xy} require_distinct={int(self.require_distinct)}"

    @classmethod
    def parse_flags(cls, line: str) -> "Constraints":
        kv = dict(item.split("=", 1) for item in line.split())
        return cls(int(kv.get("min_xy", 2)), bool(int(kv.get("require_distinct", 1))))


@dataclass
class Coloring:
    N: int
    r: int
    colors: np.ndarray  # colors[i] is the color of i + 1

    def __post_init__(self) -> None:
        self.colors = np.asarray(self.colors, dtype=np.int64)
        if self.colors.shape != (self.N,):
            raise ParameterError(f"need {self.N} colors, got {self.colors.size}")
        if self.N and (self.colors.min() < 0 or self.colors.max() >= self.r):
            raise ParameterError(f"colors must lie in [0, {self.r})")

    def color(self, v: int) -> int:
        return int(self.colors[v - 1])

    def restrict(self, N: int) -> "Coloring":
        if not 0 <= N <= self.N:
            raise ParameterError("can only restrict to a smaller range")
        return Coloring(N, self.r, self.colors[:N].copy())


def verify_coloring(c: Coloring, constraints: Constraints = Constraints()) -> tuple[int, int] | None:
    """First admissible (x, y), x <= y, with x+y, xy <= N and both the same color; else None.

    Enumerates x, then y, straight from the definition.
    """
    N = c.N
    x = constraints.min_xy
    while x + x <= N and x * x <= N:
        y = x
        while x + y <= N and x * y <= N:
            s, p = x + y, x * y
            if not (constraints.require_distinct and s == p):
                if c.colors[s - 1] == c.colors[p - 1]:
                    return (x, y)
            y += 1
        x += 1
    return None


def pattern_edges(N: int, constraints: Constraints = Constraints()) -> tuple[np.ndarray, bool]:
    """Deduplicated value pairs (x+y, xy) inside [N], and whether a singleton {v} occurs."""
    edges = set()
    loop = False
    for x in range(constraints.min_xy, N + 1):
        if 2 * x > N or x * x > N:
            break
        for y in range(x, N + 1):
            s, p = x + y, x * y
            if s > N or p > N:
                break
            if s == p:
                if constraints.require_distinct:
                    continue
                loop = True
                continue
            edges.add((min(s, p), max(s, p)))
    arr = np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)
    return arr, loop


def _csr(N: int, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Adjacency of vertices 0..N-1 (value v is vertex v-1)."""
    if edges.size == 0:
        return np.zeros(N + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    u = np.concatenate([edges[:, 0], edges[:, 1]]) - 1
    w = np.concatenate([edges[:, 1], edges[:, 0]]) - 1
    order = np.lexsort((w, u))
    u, w = u[order], w[order]
    indptr = np.zeros(N + 1, dtype=np.int64)
    np.add.at(indptr, u + 1, 1)
    return np.cumsum(indptr), w.astype(np.int64)


@dataclass
class SearchCertificate:
    outcome: str  # "good", "exhausted" or "budget"
    N: int
    r: int
    constraints: Constraints
    coloring: Coloring | None = None
    nodes: int = 0

    def to_text(self) -> str:
        if self.coloring is None:
            raise ParameterError(f"a {self.outcome} certificate carries no coloring")
        return f"{self.N} {self.r}\n{' '.join(map(str, self.coloring.colors.tolist()))}\n{self.constraints.flags()}\n"

    @classmethod
    def from_text(cls, text: str) -> "SearchCertificate":
        lines = text.strip("\n").split("\n")
        if len(lines) < 2:
            raise ParameterError("certificate needs at least two lines")
        N, r = (int(t) for t in lines[0].split())
        colors = [int(t) for t in lines[1].split()]
        cons = Constraints.parse_flags(lines[2]) if len(lines) > 2 else Constraints()
        return cls("good", N, r, cons, Coloring(N, r, np.array(colors, dtype=np.int64)))

    def as_dict(self) -> dict:
        return {
            "outcome": self.outcome, "N": self.N, "r": self.r, "nodes": self.nodes,
            "min_xy": self.constraints.min_xy, "require_distinct": self.constraints.require_distinct,
            "colors": None if self.coloring is None else self.coloring.colors.tolist(),
        }


def search_coloring(N: int, r: int, constraints: Constraints = Constraints(),
                    node_budget: int = DEFAULT_NODE_BUDGET) -> SearchCertificate:
    """Exhaustive search for a good r-coloring of [N]."""
    if r < 1:
        raise ParameterError("r must be >= 1")
    if r > 63:
        raise ParameterError("at most 63 colors")
    if N < 1:
        raise ParameterError("N must be >= 1")
    edges, loop = pattern_edges(N, constraints)
    if loop:
        return SearchCertificate("exhausted", N, r, constraints, None, 0)
    indptr, indices = _csr(N, edges)
    status, colors, nodes = kernels.color_search(N, indptr, indices, r, node_budget)
    if status == 1:
        col = Coloring(N, r, np.asarray(colors, dtype=np.int64))
        if verify_coloring(col, constraints) is not None:  # pragma: no cover - kernel bug guard
            raise RuntimeError(f"search returned a bad coloring for N={N}, r={r}")
        return SearchCertificate("good", N, r, constraints, col, int(nodes))
    return SearchCertificate("exhausted" if status == 0 else "budget", N, r, constraints, None, int(nodes))


def search_threshold(r: int, N_start: int, N_limit: int, constraints: Constraints = Constraints(),
                     node_budget: int = DEFAULT_NODE_BUDGET) -> Iterator[SearchCertificate]:
    """One certificate per N in [N_start, N_limit]; the node budget is shared."""
    if N_start < 1 or N_limit < N_start:
        raise ParameterError("need 1 <= N_start <= N_limit")
    left = node_budget
    for N in range(N_start, N_limit + 1):
        if left <= 0:
            raise CostGuardError(f"node budget exhausted before N = {N}", float(node_budget), float(node_budget))
        cert = search_coloring(N, r, constraints, left)
        left -= cert.nodes
        yield cert
        if cert.outcome == "budget":
            raise CostGuardError(f"node budget exhausted at N = {N}", float(node_budget), float(node_budget))


@dataclass
class LowerBound:
    """Largest N with a verified good coloring; ``complete`` when [N+1] was exhausted.

    A good coloring of [N] restricts to one of every [N'] with N' < N, so an
    exhausted N + 1 makes every larger range exhausted too and M(r) = N + 1.
    """

    r: int
    N: int
    certificate: SearchCertificate | None
    complete: bool
    nodes: int
    history: list[SearchCertificate] = field(default_factory=list, repr=False)

    @property
    def threshold(self) -> int | None:
        return self.N + 1 if self.complete else None


def mr_lower_bound(r: int, constraints: Constraints = Constraints(), node_budget: int = 10**7,
                   N_cap: int = 10**5) -> LowerBound:
    """Grow N until exhaustion, budget or N_cap; the budget is shared across all N."""
    best: SearchCertificate | None = None
    history: list[SearchCertificate] = []
    left = node_budget
    N = 1
    total = 0
    while N <= N_cap and left > 0:
        cert = search_coloring(N, r, constraints, left)
        total += cert.nodes
        left -= cert.nodes
        history.append(cert)
        if cert.outcome == "good":
            best = cert
            N += 1
            continue
        return LowerBound(r, N - 1, best, cert.outcome == "exhausted", total, history)
    return LowerBound(r, N - 1, best, False, total, history)
