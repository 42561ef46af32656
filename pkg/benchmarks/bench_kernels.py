"""Time every kernel under the compiled and the pure-Python backend.

    python3 benchmarks/bench_kernels.py [--scale 1.0] [--repeat 3] [--json]

Each case is run ``repeat`` times per backend; the best wall time is kept.
Results from both backends are compared before timing is reported.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from sumprod import kernels
from sumprod.angles import Angle
from sumprod.ramsey import Constraints, _csr, pattern_edges


def make_cases(scale: float) -> dict:
    rng = np.random.default_rng(0)
    n = int(2_000_000 * scale)
    a, b = rng.random(n), rng.random(n)
    q = rng.integers(-(1 << 40), 1 << 40, size=n // 4, dtype=np.int64)
    alpha = Angle("sqrt(2)")
    N_div = int(1_000_000 * scale)
    ds = np.array([p for p in range(2, 2000) if all(p % d for d in range(2, int(p**0.5) + 1))], dtype=np.int64)
    ws = 1.0 / ds
    mask = (rng.random(int(400_000 * scale)) < 0.3).view(np.uint8)
    ys = np.arange(2, int(600 * scale**0.5), dtype=np.int64)
    x_hi = int(600 * scale**0.5)
    edges, _ = pattern_edges(215, Constraints())
    indptr, indices = _csr(215, edges)
    return {
        "comp_dot": lambda k: k.comp_dot(a, b),
        "harmonic_prefix": lambda k: k.harmonic_prefix(N_div),
        "frac_phase": lambda k: k.frac_phase(q, alpha.hi, alpha.lo),
        "add_multiples": lambda k: k.add_multiples(ds, ws, N_div),
        "liouville_table": lambda k: k.liouville_table(N_div),
        "scan_pairs_mask": lambda k: k.scan_pairs_mask(mask, ys, ys - 1, 2, x_hi, mask.size - 1, True),
        "color_search": lambda k: k.color_search(215, indptr, indices, 3, 10**7),
    }


def same(x, y) -> bool:
    if isinstance(x, tuple):
        return all(same(u, v) for u, v in zip(x, y))
    if isinstance(x, float):
        return abs(x - y) <= 1e-9 * max(1.0, abs(x))
    if isinstance(x, np.ndarray):
        return x.shape == y.shape and bool(np.allclose(x, y, rtol=1e-12, atol=0))
    return x == y


def best_time(fn, impl, repeat: int):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(impl)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=1.0, help="problem size multiplier")
    ap.add_argument("--repeat", type=int, default=3, help="runs per case and backend")
    ap.add_argument("--json", action="store_true", help="print JSON instead of a table")
    args = ap.parse_args()

    impls = kernels.backends()
    rows = []
    for name, fn in make_cases(args.scale).items():
        row = {"kernel": name}
        outs = {}
        for bname, impl in impls.items():
            row[bname], outs[bname] = best_time(fn, impl, args.repeat)
        if "cython" in impls:
            if name == "color_search":
                row["agree"] = outs["cython"][0] == outs["python"][0]
            else:
                row["agree"] = same(outs["cython"], outs["python"])
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)

    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'kernel':<16} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8}  agree")
    for r in rows:
        cy = f"{r['cython']:11.4f}" if "cython" in r else f"{'n/a':>11}"
        sp = f"{r['speedup']:8.1f}" if "speedup" in r else f"{'':>8}"
        print(f"{r['kernel']:<16} {r['python']:11.4f} {cy} {sp}  {r.get('agree', '')}")


if __name__ == "__main__":
    main()
