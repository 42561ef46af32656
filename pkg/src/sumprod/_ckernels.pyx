# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Signatures mirror ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, floor
from libc.stdint cimport int64_t, uint64_t, int8_t, uint8_t

cnp.import_array()

BACKEND = "cython"

cdef extern from *:
    """
    typedef unsigned __int128 sp_u128;
    """
    ctypedef unsigned long long sp_u128


def comp_dot(const double[::1] a, const double[::1] b):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double s = 0.0, c = 0.0, x, t
    if b.shape[0] != n:
        raise ValueError("length mismatch")
    with nogil:
        for i in range(n):
            x = a[i] * b[i]
            t = s + x
            if fabs(s) >= fabs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return s + c


def harmonic_prefix(Py_ssize_t n):
    out = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] o = out
    cdef double s = 0.0, c = 0.0, x, t
    cdef Py_ssize_t k
    o[0] = 0.0
    for k in range(1, n + 1):
        x = 1.0 / <double>k
        t = s + x
        if fabs(s) >= fabs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        o[k] = s + c
    return out


def frac_phase(q, a_hi, a_lo):
    cdef const int64_t[::1] qv = np.ascontiguousarray(q, dtype=np.int64)
    cdef Py_ssize_t i, n = qv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef uint64_t ah = <uint64_t>a_hi, al = <uint64_t>a_lo, mag, top
    cdef int64_t x
    cdef double f
    for i in range(n):
        x = qv[i]
        mag = <uint64_t>(-x) if x < 0 else <uint64_t>x
        top = mag * ah + <uint64_t>(((<sp_u128>mag) * al) >> 64)
        f = <double>top / 18446744073709551616.0
        if x < 0:
            f = -f
        f -= floor(f)
        if f >= 1.0:
            f = 0.0
        o[i] = f
    return out


def add_multiples(ds, ws, Py_ssize_t n):
    cdef const int64_t[::1] dv = np.ascontiguousarray(ds, dtype=np.int64)
    cdef const double[::1] wv = np.ascontiguousarray(ws, dtype=np.float64)
    out = np.zeros(n + 1, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, m
    cdef int64_t d
    cdef double w
    for i in range(dv.shape[0]):
        d = dv[i]
        w = wv[i]
        if d <= 0 or d > n:
            continue
        m = d
        while m <= n:
            o[m] += w
            m += d
    return out


def liouville_table(Py_ssize_t n):
    # linear sieve on smallest prime factors
    lam = np.zeros(n + 1, dtype=np.int8)
    cdef int8_t[::1] L = lam
    spf_arr = np.zeros(n + 1, dtype=np.int32)
    cdef int[::1] spf = spf_arr
    primes_arr = np.empty(max(n // 2 + 2, 16), dtype=np.int32)
    cdef int[::1] primes = primes_arr
    cdef Py_ssize_t np_ = 0, i, j
    cdef long long p, m
    if n >= 1:
        L[1] = 1
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i] = <int>i
            primes[np_] = <int>i
            np_ += 1
            L[i] = -1
        for j in range(np_):
            p = primes[j]
            m = p * i
            if p > spf[i] or m > n:
                break
            spf[m] = <int>p
            L[m] = -L[i]
    return lam


def scan_pairs_mask(mask, ys, qys, long long x_lo, long long x_hi, long long prod_limit,
                    bint require_distinct):
    cdef const uint8_t[::1] mk = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef const int64_t[::1] yv = np.ascontiguousarray(ys, dtype=np.int64)
    cdef const int64_t[::1] qv = np.ascontiguousarray(qys, dtype=np.int64)
    cdef long long limit = mk.shape[0] - 1
    cdef Py_ssize_t i
    cdef long long y, qy, x, hi, s, prod
    xs_out = []
    ys_out = []
    for i in range(yv.shape[0]):
        y = yv[i]
        qy = qv[i]
        hi = x_hi
        if y > 0 and prod_limit // y < hi:
            hi = prod_limit // y
        if y > 0 and limit // y < hi:
            hi = limit // y
        x = x_lo
        while x <= hi:
            prod = x * y
            if mk[prod]:
                s = x + qy
                if 0 <= s <= limit and mk[s] and (not require_distinct or s != prod):
                    xs_out.append(x)
                    ys_out.append(y)
            x += 1
    return np.array(xs_out, dtype=np.int64), np.array(ys_out, dtype=np.int64)


cdef extern from *:
    int __builtin_popcountll(unsigned long long)
    int __builtin_ctzll(unsigned long long)


cdef inline int _popcount(unsigned long long v):
    return __builtin_popcountll(v)


def color_search(Py_ssize_t n_vertices, indptr_in, indices_in, int r, long long node_budget):
    cdef const int64_t[::1] indptr = np.ascontiguousarray(indptr_in, dtype=np.int64)
    cdef const int64_t[::1] indices = np.ascontiguousarray(indices_in, dtype=np.int64)
    cdef unsigned long long full = (1ULL << r) - 1 if r < 64 else ~0ULL
    dom_a = np.full(n_vertices, full, dtype=np.uint64)
    col_a = np.full(n_vertices, -1, dtype=np.int64)
    deg_a = np.diff(np.asarray(indptr_in, dtype=np.int64))
    cdef uint64_t[::1] dom = dom_a
    cdef int64_t[::1] col = col_a
    cdef int64_t[::1] deg = np.ascontiguousarray(deg_a)
    active_a = np.flatnonzero(deg_a > 0).astype(np.int64)
    cdef int64_t[::1] active = active_a
    cdef Py_ssize_t n_active = active.shape[0]
    # trail of (vertex, old domain); each vertex can be pruned at most r times per path
    trail_v_a = np.empty(max(1, int(indices.shape[0]) + 1), dtype=np.int64)
    trail_d_a = np.empty(max(1, int(indices.shape[0]) + 1), dtype=np.uint64)
    cdef int64_t[::1] trail_v = trail_v_a
    cdef uint64_t[::1] trail_d = trail_d_a
    cdef Py_ssize_t tlen = 0
    # frames
    fr_v_a = np.empty(n_active + 1, dtype=np.int64)
    fr_c_a = np.empty(n_active + 1, dtype=np.uint64)
    fr_m_a = np.empty(n_active + 1, dtype=np.int64)
    fr_u_a = np.empty(n_active + 1, dtype=np.int64)
    cdef int64_t[::1] fr_v = fr_v_a
    cdef uint64_t[::1] fr_c = fr_c_a
    cdef int64_t[::1] fr_m = fr_m_a
    cdef int64_t[::1] fr_u = fr_u_a
    cdef Py_ssize_t depth = 0, k, a
    cdef long long nodes = 0
    cdef int max_used = -1, prev_max, c, pc, best_pc, lim
    cdef long long v, u, best
    cdef unsigned long long cands, bit
    cdef bint ok

    # select first vertex
    best = -1
    best_pc = 999
    for a in range(n_active):
        v = active[a]
        pc = _popcount(dom[v])
        if pc < best_pc or (pc == best_pc and deg[v] > deg[best]):
            best_pc = pc
            best = v
    if best < 0:
        return 1, np.zeros(n_vertices, dtype=np.int64), 0
    lim = max_used + 2 if max_used + 2 < r else r
    fr_v[0] = best
    fr_c[0] = dom[best] & ((1ULL << lim) - 1)
    fr_m[0] = tlen
    fr_u[0] = max_used
    depth = 1
    while depth > 0:
        v = fr_v[depth - 1]
        cands = fr_c[depth - 1]
        while tlen > fr_m[depth - 1]:
            tlen -= 1
            dom[trail_v[tlen]] = trail_d[tlen]
        col[v] = -1
        max_used = <int>fr_u[depth - 1]
        prev_max = max_used
        if cands == 0:
            depth -= 1
            continue
        c = __builtin_ctzll(cands)
        fr_c[depth - 1] = cands & (cands - 1)
        nodes += 1
        if nodes > node_budget:
            for k in range(n_vertices):
                if col[k] < 0:
                    col[k] = 0
            return -1, col_a, nodes
        col[v] = c
        if c > max_used:
            max_used = c
        bit = 1ULL << c
        ok = True
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if col[u] < 0:
                if dom[u] & bit:
                    trail_v[tlen] = u
                    trail_d[tlen] = dom[u]
                    tlen += 1
                    dom[u] &= ~bit
                    if dom[u] == 0:
                        ok = False
                        break
            elif col[u] == c:
                ok = False
                break
        if not ok:
            continue
        best = -1
        best_pc = 999
        for a in range(n_active):
            u = active[a]
            if col[u] >= 0:
                continue
            pc = _popcount(dom[u])
            if pc < best_pc or (pc == best_pc and deg[u] > deg[best]):
                best_pc = pc
                best = u
        if best < 0:
            for k in range(n_vertices):
                if col[k] < 0:
                    col[k] = 0
            return 1, col_a, nodes
        lim = max_used + 2 if max_used + 2 < r else r
        fr_v[depth] = best
        fr_c[depth] = dom[best] & ((1ULL << lim) - 1)
        fr_m[depth] = tlen
        fr_u[depth] = max_used
        depth += 1
    return 0, np.zeros(n_vertices, dtype=np.int64), nodes
