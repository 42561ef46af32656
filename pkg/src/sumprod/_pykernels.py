"""Pure numpy/Python implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
``sumprod.kernels`` picks one at import time.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_TWO64 = 18446744073709551616.0


def comp_dot(a: np.ndarray, b: np.ndarray) -> float:
    """Accurately summed dot product of two float64 vectors."""
    return math.fsum(np.multiply(a, b))


def harmonic_prefix(n: int) -> np.ndarray:
    """H[0..n] with H[k] = sum_{j<=k} 1/j, Neumaier-compensated."""
    out = np.empty(n + 1, dtype=np.float64)
    out[0] = 0.0
    s = 0.0
    c = 0.0
    for k in range(1, n + 1):
        x = 1.0 / k
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        out[k] = s + c
    return out


def _mulhi64(a: np.ndarray, b: np.uint64) -> np.ndarray:
    # high 64 bits of a*b for uint64 a (vector) and b (scalar), via 32-bit limbs
    a_lo = a & _MASK32
    a_hi = a >> _SHIFT32
    b_lo = b & _MASK32
    b_hi = b >> _SHIFT32
    lo_lo = a_lo * b_lo
    hi_lo = a_hi * b_lo
    lo_hi = a_lo * b_hi
    hi_hi = a_hi * b_hi
    cross = (lo_lo >> _SHIFT32) + (hi_lo & _MASK32) + lo_hi
    return hi_hi + (hi_lo >> _SHIFT32) + (cross >> _SHIFT32)


def frac_phase(q: np.ndarray, a_hi: int, a_lo: int) -> np.ndarray:
    """Fractional part of q*alpha where frac(alpha) = (a_hi*2^64 + a_lo) / 2^128.

    ``q`` is int64 and may be negative; the product is reduced mod 1 exactly
    up to the 128-bit truncation of alpha.
    """
    q = np.asarray(q, dtype=np.int64)
    neg = q < 0
    mag = np.abs(q).astype(np.uint64)
    with np.errstate(over="ignore"):
        top = mag * np.uint64(a_hi) + _mulhi64(mag, np.uint64(a_lo))
    frac = top.astype(np.float64) / _TWO64
    frac = np.where(neg, -frac, frac)
    frac -= np.floor(frac)
    frac[frac >= 1.0] = 0.0
    return frac


def add_multiples(ds: np.ndarray, ws: np.ndarray, n: int) -> np.ndarray:
    """c[m] = sum of ws[i] over i with ds[i] | m, for 0 <= m <= n (c[0] unused)."""
    out = np.zeros(n + 1, dtype=np.float64)
    for d, w in zip(np.asarray(ds, dtype=np.int64).tolist(), np.asarray(ws, dtype=np.float64).tolist()):
        if 0 < d <= n:
            out[d::d] += w
    return out


def liouville_table(n: int) -> np.ndarray:
    """lambda(m) for 0 <= m <= n as int8 (entry 0 is 0)."""
    omega = np.zeros(n + 1, dtype=np.uint8)
    if n >= 2:
        sieve = np.ones(n + 1, dtype=bool)
        sieve[:2] = False
        for i in range(2, math.isqrt(n) + 1):
            if sieve[i]:
                sieve[i * i :: i] = False
        for p in np.flatnonzero(sieve).tolist():
            pk = p
            while pk <= n:
                omega[pk::pk] += 1
                pk *= p
    lam = np.where(omega % 2 == 0, 1, -1).astype(np.int8)
    lam[0] = 0
    return lam


def scan_pairs_mask(mask: np.ndarray, ys: np.ndarray, qys: np.ndarray,
                    x_lo: int, x_hi: int, prod_limit: int, require_distinct: bool):
    """Exhaustive {x+Q(y), xy} scan against a membership table.

    ``mask[v]`` is membership of v for 0 <= v < len(mask); values outside the
    table are non-members.  Only pairs with x*y <= prod_limit are visited.
    Returns parallel int64 arrays (x, y).
    """
    limit = len(mask) - 1
    out_x = []
    out_y = []
    for y, qy in zip(np.asarray(ys).tolist(), np.asarray(qys).tolist()):
        hi = min(x_hi, limit // y, prod_limit // y) if y > 0 else x_hi
        if hi < x_lo:
            continue
        xs = np.arange(x_lo, hi + 1, dtype=np.int64)
        prod = xs * y
        ok = mask[prod].astype(bool)
        s = xs + qy
        inside = (s >= 0) & (s <= limit)
        ok &= inside
        ok[inside] &= mask[s[inside]].astype(bool)
        if require_distinct:
            ok &= s != prod
        if ok.any():
            sel = xs[ok]
            out_x.append(sel)
            out_y.append(np.full(sel.size, y, dtype=np.int64))
    if not out_x:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(out_x), np.concatenate(out_y)


def color_search(n_vertices: int, indptr: np.ndarray, indices: np.ndarray,
                 r: int, node_budget: int):
    """Backtracking r-coloring of a graph given in CSR form.

    Returns (status, colors, nodes) with status 1 = proper coloring found,
    0 = search space exhausted, -1 = node budget hit.  MRV vertex choice,
    forward checking, and new colors opened in increasing order only.
    """
    indptr = np.asarray(indptr).tolist()
    indices = np.asarray(indices).tolist()
    full = (1 << r) - 1
    dom = [full] * n_vertices
    col = [-1] * n_vertices
    deg = [indptr[v + 1] - indptr[v] for v in range(n_vertices)]
    active = [v for v in range(n_vertices) if deg[v] > 0]
    trail: list[tuple[int, int]] = []
    nodes = 0

    def select() -> int:
        best = -1
        best_key = None
        for v in active:
            if col[v] < 0:
                key = (bin(dom[v]).count("1"), -deg[v], v)
                if best_key is None or key < best_key:
                    best_key = key
                    best = v
        return best

    def undo(mark: int) -> None:
        while len(trail) > mark:
            u, old = trail.pop()
            dom[u] = old

    def assign(v: int, c: int) -> bool:
        bit = 1 << c
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if col[u] < 0 and dom[u] & bit:
                trail.append((u, dom[u]))
                dom[u] &= ~bit
                if dom[u] == 0:
                    return False
            elif col[u] == c:
                return False
        return True

    # frame: [vertex, remaining candidate bits, trail mark, max_used before]
    stack: list[list[int]] = []
    max_used = -1
    v = select()
    if v < 0:
        return 1, np.zeros(n_vertices, dtype=np.int64), 0
    stack.append([v, dom[v] & ((1 << min(r, max_used + 2)) - 1), len(trail), max_used])
    while stack:
        frame = stack[-1]
        v, cands, mark, prev_max = frame
        undo(mark)
        col[v] = -1
        max_used = prev_max
        if cands == 0:
            stack.pop()
            continue
        c = (cands & -cands).bit_length() - 1
        frame[1] = cands & (cands - 1)
        nodes += 1
        if nodes > node_budget:
            return -1, np.array([max(x, 0) for x in col], dtype=np.int64), nodes
        col[v] = c
        max_used = max(prev_max, c)
        if not assign(v, c):
            continue
        nxt = select()
        if nxt < 0:
            return 1, np.array([max(x, 0) for x in col], dtype=np.int64), nodes
        stack.append([nxt, dom[nxt] & ((1 << min(r, max_used + 2)) - 1), len(trail), max_used])
    return 0, np.zeros(n_vertices, dtype=np.int64), nodes
