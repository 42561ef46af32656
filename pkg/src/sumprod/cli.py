"""Command-line entry point: one subcommand per experiment.

Exit status: 0 on success, 2 on invalid parameters, 3 when a cost guard
refuses the computation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import time
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__, kernels
from .avgcore import TruncationLadder, cesaro_average, log_average, log_average_ladder
from .errors import CostGuardError, EmptyBlockError, ParameterError
from .ineq import dilation_transfer_gap, multiplicative_vdc, tk_transfer_discrepancy, turan_kubilius_log
from .patterns import (density_report, dsharp_estimate, equal_valuation_pairs, find_patterns,
                       iterated_affine_correlation, valuation_obstruction_check)
from .poly import IntPolynomial
from .primes import mertens_log_sum, mertens_reciprocal_sum, sieve_block
from .ramsey import (Coloring, Constraints, SearchCertificate, mr_lower_bound, search_threshold,
                     verify_coloring)
from .sequences import parse_sequence, random_table
from .sets import BitmaskSet, build_example1, build_example2, parse_set
from .spectral import (correlation_sequence, herglotz_psd_check, isometry_identity_gap, prime_exp_sum,
                       rational_mass)
from .structure import aperiodicity_score, modulus_ladder_decompose, residue_projection

EXIT_PARAM = 2
EXIT_REFUSED = 3


# ---------------------------------------------------------------- encoding


def to_jsonable(obj):
    """Plain JSON types; complex numbers become {"re": ..., "im": ...}."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def emit_json(report: dict) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2)


def _cell(v) -> str:
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return f"{v['re']:.12g}{v['im']:+.12g}j"
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return str(v)


def _rows(payload: dict) -> list[dict]:
    rows = payload.get("rows")
    if rows:
        return rows
    return [{"key": k, "value": v} for k, v in payload.items() if k != "rows"]


def emit_csv(payload: dict) -> str:
    rows = _rows(to_jsonable(payload))
    buf = io.StringIO()
    cols = list(dict.fromkeys(k for r in rows for k in r))
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(r.get(k, "")) for k in cols})
    return buf.getvalue()


def emit_table(report: dict) -> str:
    payload = to_jsonable(report["result"])
    lines = [f"# {report['subcommand']}  " + " ".join(f"{k}={_cell(v)}" for k, v in report["parameters"].items())]
    summary = {k: v for k, v in payload.items() if k != "rows"}
    if summary:
        width = max(len(k) for k in summary)
        lines += [f"{k:<{width}}  {_cell(v)}" for k, v in summary.items()]
    rows = payload.get("rows")
    if rows:
        cols = list(dict.fromkeys(k for r in rows for k in r))
        cells = [[_cell(r.get(c, "")) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines.append("  ".join(c.rjust(w) for c, w in zip(cols, widths)))
        lines += ["  ".join(x.rjust(w) for x, w in zip(row, widths)) for row in cells]
    lines.append(f"# wall time {report['wall_time_s']:.3f} s, backend {report['versions']['backend']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- argument helpers


def int_expr(text: str) -> int:
    """Integers written as 1000, 10**6, 1e6 or 2^20."""
    t = text.strip().replace("^", "**")
    try:
        if "**" in t:
            b, e = t.split("**", 1)
            return int(b) ** int(e)
        if "e" in t.lower():
            v = float(t)
            if not v.is_integer():
                raise ValueError
            return int(v)
        return int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def int_list(text: str) -> list[int]:
    return [int_expr(t) for t in text.split(",") if t.strip()]


def float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ladder(args) -> TruncationLadder:
    return TruncationLadder(tuple(args.ladder))


# ---------------------------------------------------------------- subcommands


def cmd_avg(args) -> dict:
    f = parse_sequence(args.f)
    if args.ladder:
        lad = _ladder(args)
        if args.mode == "log":
            res = log_average_ladder(f, lad)
            rows = [{"N": N, "value": v} for N, v in zip(res.cutoffs, res.values)]
            return {"sequence": f.name, "diagnostic": res.diagnostic, "rows": rows}
        from .avgcore import cesaro_average_ladder

        vals = cesaro_average_ladder(f, lad)
        return {"sequence": f.name, "rows": [{"N": N, "value": v} for N, v in zip(lad.cutoffs, vals)]}
    fn = log_average if args.mode == "log" else cesaro_average
    return {"sequence": f.name, "N": args.N, "value": fn(f, args.N)}


def cmd_primes(args) -> dict:
    b = sieve_block(args.W, args.M)
    out = {"W": args.W, "M": args.M, "count": len(b), "empty": b.empty}
    if not b.empty:
        out.update(reciprocal_sum=mertens_reciprocal_sum(b), log_sum=mertens_log_sum(b),
                   log_bound=math.log(args.M) + 2, max_prime=b.max_prime)
        if args.list:
            out["rows"] = [{"p": int(p)} for p in b.primes.tolist()]
    return out


def cmd_tk(args) -> dict:
    M = args.M if args.M is not None else args.N
    rep = turan_kubilius_log(sieve_block(args.W, M), args.N)
    return rep.as_dict()


def cmd_tk_transfer(args) -> dict:
    f = parse_sequence(args.f)
    val = tk_transfer_discrepancy(f, args.W, args.M, args.N, args.k, mode=args.mode, budget=args.budget)
    return {"sequence": f.name, "discrepancy": val}


def cmd_mvdc(args) -> dict:
    block = sieve_block(args.W, args.M)
    if args.family == "random":
        fp = lambda p: random_table(args.seed * 1_000_003 + p, args.period)  # noqa: E731
        g = random_table(args.seed, args.period)
    else:
        f = parse_sequence(args.f)
        fp = lambda p: f  # noqa: E731
        g = parse_sequence(args.g) if args.g else f.conj()
    return multiplicative_vdc(fp, g, block, args.N, budget=args.budget).as_dict()


def cmd_expsum(args) -> dict:
    rows = []
    for M in args.M:
        z = prime_exp_sum(args.Q, args.alpha, args.a, args.b, args.W, M, args.mode)
        rows.append({"M": M, "value": z, "modulus": abs(z)})
    return {"Q": args.Q, "alpha": args.alpha, "mode": args.mode, "rows": rows}


def cmd_spectral(args) -> dict:
    f = parse_sequence(args.f)
    corr = correlation_sequence(f, args.N, args.L)
    out = {"sequence": f.name, "eps": corr.eps}
    order = min(args.order, args.L + 1)
    psd = herglotz_psd_check(corr, order)
    out.update(order=order, min_eigenvalue=psd.min_eigenvalue, psd=psd.psd, tol=psd.tol)
    rows = [{"m": m, "phi": corr.phi(m).real if f.is_real else corr.phi(m)} for m in range(args.L + 1)]
    if args.q:
        out["rational_mass"] = {str(q): rational_mass(corr, q, max(args.L // q, 1)) for q in args.q}
    out["rows"] = rows
    return out


def cmd_structure(args) -> dict:
    f = parse_sequence(args.f)
    if args.q:
        d = residue_projection(f, args.q, args.N)
        out = {"sequence": f.name, "q": d.q, "residual_energy": d.residual_energy,
               "rows": [{"r": r, "f_str": v} for r, v in enumerate(d.table.tolist())]}
    else:
        lad = modulus_ladder_decompose(f, args.K, args.N)
        out = {"sequence": f.name, "K": args.K,
               "rows": [{"q": q, "residual_energy": e} for q, e in zip(lad.moduli, lad.energies)]}
    if args.H:
        out["aperiodicity"] = aperiodicity_score(f, args.q or 1, args.H, args.N)
    return out


def cmd_density(args) -> dict:
    rep = density_report(parse_set(args.set), _ladder(args))
    rows = [{"N": N, "cesaro": c, "logarithmic": l} for N, c, l in zip(rep.cutoffs, rep.cesaro, rep.logarithmic)]
    return {"set": rep.set_name, "rows": rows}


def cmd_dsharp(args) -> dict:
    est = dsharp_estimate(parse_set(args.set), _ladder(args), args.chain, args.cap, budget=args.budget)
    rows = [{"a": a, "best_m": m, "value": v} for a, (m, v) in est.table.items()]
    return {"set": args.set, "value": est.value, "witness_a": est.witness[0], "witness_m": est.witness[1],
            "rows": rows}


def cmd_pattern(args) -> dict:
    A = parse_set(args.set)
    scan = find_patterns(A, args.Q, (args.x_min, args.x_max), (args.y_min, args.y_max), min_xy=args.min_xy,
                         require_distinct=not args.allow_equal, max_product=args.max_product,
                         threads=args.threads)
    hits = []
    total = 0
    for h in scan:
        total += 1
        if args.limit is None or len(hits) < args.limit:
            hits.append(h.as_dict())
    return {"set": A.name, "Q": str(scan.Q), "hits": total, "skipped": scan.skipped, "rows": hits}


def cmd_counterexample(args) -> dict:
    if args.example == 1:
        A = build_example1(args.N_max)
        scan = find_patterns(A, "y-1", (2, args.N_max), (2, args.N_max), max_product=args.N_max,
                             threads=args.threads)
        hits = scan.hits()
        lad = TruncationLadder((args.N_max,))
        dens = density_report(A, lad)
        out = {"example": 1, "N_max": args.N_max, "members": int(A.members().size), "empty": A.flags["empty"],
               "hits": len(hits), "cesaro": dens.cesaro[0], "logarithmic": dens.logarithmic[0]}
        if args.out:
            A.write(args.out)
            out["written"] = str(args.out)
        return out
    A = build_example2(args.k_max)
    count, bad = equal_valuation_pairs(args.bound)
    scan = find_patterns(A, "y", (1, args.bound), (1, args.bound), min_xy=1, threads=args.threads)
    return {"example": 2, "k_max": args.k_max, "bound": args.bound, "equal_valuation_pairs": count,
            "odd_valuation_pairs": len(bad), "obstruction_holds": not bad, "hits": len(scan.hits())}


def cmd_correlate(args) -> dict:
    A = parse_set(args.set)
    est = iterated_affine_correlation(A, args.Q, args.k, args.W, args.M, args.N, args.a, args.v,
                                      budget=args.budget, threads=args.threads)
    dens = density_report(A, TruncationLadder((args.N,))).logarithmic[0]
    return {"set": A.name, "value": est.value, "log_density": dens, "density_squared": dens * dens,
            "products": est.products, "tuples": est.tuples, "path": est.path}


def cmd_ramsey(args) -> dict:
    cons = Constraints(args.min_xy, not args.allow_equal)
    if args.verify:
        cert = SearchCertificate.from_text(Path(args.verify).read_text())
        bad = verify_coloring(cert.coloring, cert.constraints)
        return {"N": cert.N, "r": cert.r, "good": bad is None, "violation": list(bad) if bad else None}
    if args.N_limit is not None:
        rows = []
        for cert in search_threshold(args.r, args.N_start, args.N_limit, cons, args.budget):
            rows.append({"N": cert.N, "outcome": cert.outcome, "nodes": cert.nodes})
        return {"r": args.r, "rows": rows}
    lb = mr_lower_bound(args.r, cons, args.budget, args.N_cap)
    out = {"r": args.r, "best_N": lb.N, "complete": lb.complete, "threshold": lb.threshold, "nodes": lb.nodes,
           "min_xy": cons.min_xy, "require_distinct": cons.require_distinct}
    if lb.certificate is not None:
        out["colors"] = lb.certificate.coloring.colors.tolist()
        if args.out:
            Path(args.out).write_text(lb.certificate.to_text())
            out["written"] = str(args.out)
    return out


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["table", "json", "csv"], default="table", help="output format")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads (count; 1 = fully deterministic)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sumprod", description=__doc__.splitlines()[0])
    parser.add_argument("--selftest", action="store_true", help=argparse.SUPPRESS)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    budget_help = "work limit (sequence evaluations) before refusing"

    def add(name: str, func: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text)
        _common(p)
        p.set_defaults(func=func)
        return p

    p = add("avg", cmd_avg, "Cesàro or logarithmic average of a sequence")
    p.add_argument("--f", required=True, help="sequence, e.g. const:1, residue:3:0, char:sqrt2, liouville")
    p.add_argument("--N", type=int_expr, default=1000, help="cutoff N (integer)")
    p.add_argument("--ladder", type=int_list, help="comma-separated increasing cutoffs (integers)")
    p.add_argument("--mode", choices=["log", "cesaro"], default="log", help="averaging mode")

    p = add("primes", cmd_primes, "prime block P_W ∩ [M] and its Mertens sums")
    p.add_argument("--W", type=int_expr, default=1, help="modulus W (primes ≡ 1 mod W)")
    p.add_argument("--M", type=int_expr, required=True, help="cutoff M (integer)")
    p.add_argument("--list", action="store_true", help="list the primes")

    p = add("tk", cmd_tk, "logarithmic Turán-Kubilius inequality check")
    p.add_argument("--N", type=int_expr, required=True, help="scale N (integer)")
    p.add_argument("--M", type=int_expr, help="prime cutoff M <= N (integer; default N)")
    p.add_argument("--W", type=int_expr, default=1, help="modulus W")

    p = add("tk-transfer", cmd_tk_transfer, "discrepancy between f and its prime-dilated averages")
    p.add_argument("--f", required=True, help="sequence")
    p.add_argument("--W", type=int_expr, default=1, help="modulus W")
    p.add_argument("--M", type=int_expr, default=1000, help="prime cutoff M (integer)")
    p.add_argument("--N", type=int_expr, default=10**5, help="inner scale N (integer)")
    p.add_argument("--k", type=int, default=1, help="iterations (count)")
    p.add_argument("--mode", choices=["direct", "shared"], default="direct", help="inner-average evaluation")
    p.add_argument("--budget", type=float, default=4e9, help=budget_help)

    p = add("mvdc", cmd_mvdc, "multiplicative van der Corput inequality check")
    p.add_argument("--f", default="const:1", help="sequence used as f_p for every p")
    p.add_argument("--g", help="sequence g (default conj of f)")
    p.add_argument("--family", choices=["constant", "random"], default="constant",
                   help="constant family or independent random tables per prime")
    p.add_argument("--period", type=int, default=12, help="period of random tables (integer)")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--W", type=int_expr, default=1, help="modulus W")
    p.add_argument("--M", type=int_expr, default=1000, help="prime cutoff M (integer)")
    p.add_argument("--N", type=int_expr, default=10**6, help="scale N (integer)")
    p.add_argument("--budget", type=float, default=4e9, help=budget_help)

    p = add("expsum", cmd_expsum, "exponential sums e(Q(p) alpha) over a prime block")
    p.add_argument("--Q", default="x", help="polynomial, e.g. x, x^2, (x^2+x)/2")
    p.add_argument("--alpha", default="sqrt(2)", help="real frequency, e.g. sqrt(2), 1/3, pi")
    p.add_argument("--a", type=int, default=1, help="residue modulus of the filter")
    p.add_argument("--b", type=int, default=0, help="residue of the filter")
    p.add_argument("--W", type=int_expr, default=1, help="modulus W")
    p.add_argument("--M", type=int_list, default=[1000], help="comma-separated prime cutoffs (integers)")
    p.add_argument("--mode", choices=["logarithmic", "cesaro"], default="logarithmic", help="prime weights")

    p = add("spectral", cmd_spectral, "correlation sequence, Toeplitz positivity, rational mass")
    p.add_argument("--f", required=True, help="sequence")
    p.add_argument("--N", type=int_expr, default=10**5, help="scale N (integer)")
    p.add_argument("--L", type=int_expr, default=30, help="maximal lag (integer, <= N/10)")
    p.add_argument("--order", type=int, default=25, help="Toeplitz order (integer)")
    p.add_argument("--q", type=int_list, help="comma-separated moduli for rational mass")

    p = add("structure", cmd_structure, "residue-class decomposition f = f_str + f_rnd")
    p.add_argument("--f", required=True, help="sequence")
    p.add_argument("--N", type=int_expr, default=10**5, help="scale N (integer)")
    p.add_argument("--q", type=int, help="single modulus (integer); default: modulus ladder")
    p.add_argument("--K", type=int, default=5, help="ladder length: moduli lcm(1..k), k <= K")
    p.add_argument("--H", type=int, help="also report the aperiodicity score with window H (integer)")

    p = add("density", cmd_density, "Cesàro and logarithmic densities of a set")
    p.add_argument("--set", required=True, help="set, e.g. evens, example1, residue:3:0, file:PATH")
    p.add_argument("--ladder", type=int_list, default=[10**4, 10**6], help="comma-separated cutoffs")

    p = add("dsharp", cmd_dsharp, "finite-scale multiplicative density estimate")
    p.add_argument("--set", required=True, help="set")
    p.add_argument("--ladder", type=int_list, default=[10**4], help="comma-separated cutoffs (top is used)")
    p.add_argument("--chain", type=int_list, default=[2, 4], help="divisibility chain a_1 | a_2 | ...")
    p.add_argument("--cap", type=int, default=100, help="largest multiplier m (integer)")
    p.add_argument("--budget", type=float, default=4e9, help=budget_help)

    p = add("pattern", cmd_pattern, "search for {x + Q(y), xy} inside a set")
    p.add_argument("--set", required=True, help="set")
    p.add_argument("--Q", default="y", help="polynomial in y")
    p.add_argument("--x-min", type=int_expr, default=1, help="smallest x (integer)")
    p.add_argument("--x-max", type=int_expr, required=True, help="largest x (integer)")
    p.add_argument("--y-min", type=int_expr, default=1, help="smallest y (integer)")
    p.add_argument("--y-max", type=int_expr, required=True, help="largest y (integer)")
    p.add_argument("--max-product", type=int_expr, help="only pairs with xy <= this (integer)")
    p.add_argument("--min-xy", type=int, choices=[1, 2], default=2, help="lower bound for x and y")
    p.add_argument("--allow-equal", action="store_true", help="admit x + Q(y) = xy")
    p.add_argument("--limit", type=int, default=1000, help="hits to print (count)")

    p = add("counterexample", cmd_counterexample, "build and check the two counterexample sets")
    p.add_argument("--example", type=int, choices=[1, 2], required=True, help="which construction")
    p.add_argument("--N-max", type=int_expr, default=10**5, help="range for example 1 (integer >= 2^16)")
    p.add_argument("--k-max", type=int, default=1, help="k_max for example 2")
    p.add_argument("--bound", type=int_expr, default=1000, help="x, y range for example 2 checks")
    p.add_argument("--out", help="write the example 1 bitmask to this path")

    p = add("correlate", cmd_correlate, "iterated affine correlation over prime tuples")
    p.add_argument("--set", required=True, help="set")
    p.add_argument("--Q", default="y-1", help="polynomial in y")
    p.add_argument("--k", type=int, default=1, help="number of prime factors (integer)")
    p.add_argument("--W", type=int_expr, default=1, help="modulus W")
    p.add_argument("--M", type=int_expr, default=1000, help="prime cutoff M (integer)")
    p.add_argument("--N", type=int_expr, default=10**5, help="inner scale N (integer)")
    p.add_argument("--a", type=int, default=1, help="affine multiplier a")
    p.add_argument("--v", type=int, default=1, help="multiplier v")
    p.add_argument("--budget", type=float, default=4e9, help=budget_help)

    p = add("ramsey", cmd_ramsey, "good colorings avoiding monochromatic {x+y, xy}")
    p.add_argument("--r", type=int, default=2, help="number of colors")
    p.add_argument("--N-start", type=int_expr, default=1, help="first N for a per-N scan")
    p.add_argument("--N-limit", type=int_expr, help="last N for a per-N scan (omit: grow until exhausted)")
    p.add_argument("--N-cap", type=int_expr, default=10**5, help="largest N tried when growing")
    p.add_argument("--min-xy", type=int, choices=[1, 2], default=2, help="lower bound for x and y")
    p.add_argument("--allow-equal", action="store_true", help="admit x + y = xy")
    p.add_argument("--budget", type=int_expr, default=10**7, help="search nodes before refusing")
    p.add_argument("--out", help="write the best certificate to this path")
    p.add_argument("--verify", help="verify a certificate file instead of searching")
    return parser


# ---------------------------------------------------------------- selftest


def selftest() -> list[str]:
    """Trivial cases of every module; returns the failures."""
    from .sequences import Constant, alternating

    def near(a, b, tol=1e-12):
        return abs(a - b) <= tol

    checks = [
        ("avg const", lambda: near(log_average(Constant(1), 17), 1.0)),
        ("avg residue", lambda: near(cesaro_average(parse_sequence("residue:3:0"), 10), 0.3)),
        ("avg log evens", lambda: near(log_average(parse_sequence("residue:2:0"), 4), 0.36)),
        ("primes W=4", lambda: sieve_block(4, 30).primes.tolist() == [5, 13, 17, 29]),
        ("primes empty", lambda: sieve_block(6, 6).empty),
        ("tk {2}", lambda: near(turan_kubilius_log(sieve_block(1, 2), 2).lhs, 1.0)),
        ("dilation q=1", lambda: dilation_transfer_gap(alternating(), 1, 1000).lhs == 0.0),
        ("transfer const", lambda: near(tk_transfer_discrepancy(Constant(1), 1, 30, 1000), 0.0)),
        ("psd ones", lambda: near(herglotz_psd_check(correlation_sequence(Constant(1), 1000, 5), 3).eigenvalues[-1], 3.0)),
        ("expsum alt", lambda: near(prime_exp_sum("x", "1/2", W=2, M=10), -1.0)),
        ("structure", lambda: residue_projection(parse_sequence("residue:3:0"), 6, 60).residual_energy <= 1e-12),
        ("aperiodic", lambda: aperiodicity_score(alternating(), 1, 10, 1000) == 0.0),
        ("example1", lambda: build_example1(10**5).members()[[0, -1]].tolist() == [65536, 92681]),
        ("valuation", lambda: valuation_obstruction_check(2)),
        ("pattern", lambda: any((h.x, h.y) == (2, 14) for h in find_patterns(parse_set("primes-shifted:-1"), "y", (2, 100), (2, 100)))),
        ("ramsey M(1)", lambda: mr_lower_bound(1).threshold == 6),
        ("verify", lambda: verify_coloring(Coloring(8, 1, np.zeros(8, dtype=np.int64))) == (2, 3)),
    ]
    failures = []
    for name, check in checks:
        try:
            ok = bool(check())
        except Exception as exc:  # report, keep going
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        if not ok:
            failures.append(name)
    return failures


# ---------------------------------------------------------------- main


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.selftest:
        failures = selftest()
        for f in failures:
            print(f"selftest FAIL: {f}", file=stderr)
        print("selftest ok" if not failures else f"selftest: {len(failures)} failure(s)", file=stdout)
        return 1 if failures else 0
    if not args.command:
        parser.print_help(stderr)
        return EXIT_PARAM
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=stderr)
        return EXIT_PARAM
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "format", "selftest")}
    t0 = time.perf_counter()
    try:
        result = args.func(args)
    except (ParameterError, EmptyBlockError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_PARAM
    except CostGuardError as exc:
        print(f"refused: {exc} (estimate {exc.estimate:.3g}, budget {exc.budget:.3g})", file=stderr)
        return EXIT_REFUSED
    except OverflowError as exc:
        print(f"refused: {exc}", file=stderr)
        return EXIT_REFUSED
    report = {
        "subcommand": args.command,
        "parameters": params,
        "result": result,
        "wall_time_s": time.perf_counter() - t0,
        "versions": {"sumprod": __version__, "numpy": np.__version__, "python": platform.python_version(),
                     "backend": kernels.BACKEND},
    }
    if args.format == "json":
        stdout.write(emit_json(report) + "\n")
    elif args.format == "csv":
        stdout.write(emit_csv(result))
    else:
        stdout.write(emit_table(report))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
