"""Command line front end.

Subcommands:

  build       emit a level's graph (edgelist, dot) or complex (json)
  resistance  effective resistance of one family at one level
  rho         resistance sweep with growth-rate fit (csv or json)
  duality     check R * RT = 1 per level
  submult     check the multiplicative resistance bounds
  bounds      cut and short surgery estimates per level

Exit codes: 0 success / checks pass, 1 a verification verdict failed,
2 bad configuration, 3 level exceeds the cap, 4 solver failure.  The
environment variable HEXACARPET_CAP overrides the default level cap.

CSV output is deterministic byte-for-byte across runs; wall-clock
timings appear only in JSON manifests.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy

from . import __version__
from .subdivision import DEFAULT_CAP, CapacityError
from .graphs import FamilyError, to_dot, to_edgelist
from .network import SolverError, effective_resistance
from .analysis import (
    LevelCache,
    cut_report,
    estimate_rho,
    short_report,
    spectral_dimension,
    verify_duality,
    verify_supermultiplicative,
)

FAMILIES = ("skeleton", "dual", "hexacarpet", "cut", "short")


def _fmt(x):
    if x is None or (isinstance(x, float) and x != x):
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _manifest(args, timings):
    return {
        "tool": "hexacarpet",
        "version": __version__,
        "command": args.command,
        "args": {
            k: v
            for k, v in sorted(vars(args).items())
            if k not in ("command", "fn")
        },
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "timings": timings,
    }


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cache(args):
    cap = int(os.environ.get("HEXACARPET_CAP", DEFAULT_CAP))
    max_iter = getattr(args, "max_iter", None)
    return LevelCache(cap=cap, max_iter=max_iter)


def _prefetch(cache, families, levels, threads):
    """Build serially (the complex is shared state), solve in parallel."""
    cache.C.ensure_level(max(levels))
    jobs = []
    for f in families:
        for n in levels:
            cache.graph(f, n)
            jobs.append((f, n))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(lambda j: cache.result(*j), jobs))
    else:
        for j in jobs:
            cache.result(*j)


# -- subcommands --------------------------------------------------------


def cmd_build(args):
    cache = _cache(args)
    if args.format == "json":
        cache.C.ensure_level(args.level)
        if args.level + 1 <= cache.C.cap:
            # one level deeper fills in the barycenter vertex ids
            cache.C.ensure_level(args.level + 1)
        _emit(cache.C.to_json(args.level) + "\n", args.out)
        return 0
    G = cache.graph(args.family, args.level)
    text = to_edgelist(G) if args.format == "edgelist" else to_dot(G)
    _emit(text, args.out)
    return 0


def cmd_resistance(args):
    cache = _cache(args)
    t0 = time.perf_counter()
    G = cache.graph(args.family, args.level)
    res = effective_resistance(
        G,
        rtol=args.tol,
        max_iter=args.max_iter,
        allow_disconnected=args.allow_disconnected,
    )
    dt = time.perf_counter() - t0
    if args.format == "csv":
        lines = [
            "family,level,resistance,disconnected,iterations",
            ",".join(
                [
                    args.family,
                    str(args.level),
                    "" if res.disconnected else _fmt(res.resistance),
                    _fmt(res.disconnected),
                    str(res.iterations),
                ]
            ),
        ]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        doc = {
            "family": args.family,
            "level": args.level,
            "resistance": None if res.disconnected else res.resistance,
            "disconnected": res.disconnected,
            "energy": res.energy,
            "iterations": res.iterations,
            "residual": res.residual,
            "manifest": _manifest(args, {"solve_s": dt}),
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_rho(args):
    cache = _cache(args)
    t0 = time.perf_counter()
    levels = list(range(1, args.max_level + 1))
    short_max = min(args.max_level, 5)
    _prefetch(cache, ("hexacarpet", "skeleton"), levels, args.threads)
    rep = estimate_rho(cache, args.max_level, short_max=short_max)
    dt = time.perf_counter() - t0
    if args.format == "csv":
        _emit(rep.to_csv_text(), args.out)
        return 0
    doc = rep.to_json_dict()
    rho_T = rep.rho_T_fit
    doc["meta"] = {
        "d_S_of_fit": rep.d_S,
        "d_S_upper_formula": spectral_dimension(1.5),
        "d_S_lower_formula": spectral_dimension(1.25),
        "d_S_skeleton_formula": (
            spectral_dimension(rho_T) if rho_T and 6 * rho_T > 1 else None
        ),
        "skeleton_note": (
            "the skeleton-side formula value does not reproduce the "
            "2.38 endpoint estimate; the discrepancy is left open"
        ),
    }
    doc["manifest"] = _manifest(args, {"total_s": dt})
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_duality(args):
    cache = _cache(args)
    t0 = time.perf_counter()
    levels = list(range(1, args.max_level + 1))
    _prefetch(cache, ("hexacarpet", "skeleton"), levels, args.threads)
    rows = verify_duality(cache, levels, tol=args.tol)
    dt = time.perf_counter() - t0
    ok = all(r[4] for r in rows)
    if args.format == "csv":
        lines = ["n,R_n,R_n_T,product,ok"]
        for n, R, RT, prod, good in rows:
            lines.append(
                ",".join([str(n), _fmt(R), _fmt(RT), _fmt(prod), _fmt(good)])
            )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        doc = {
            "rows": [
                {"n": n, "R": R, "RT": RT, "product": p, "ok": g}
                for n, R, RT, p, g in rows
            ],
            "pass": ok,
            "manifest": _manifest(args, {"total_s": dt}),
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0 if ok else 1


def cmd_submult(args):
    cache = _cache(args)
    t0 = time.perf_counter()
    levels = list(range(1, args.max_level + 1))
    _prefetch(cache, ("hexacarpet", "skeleton"), levels, args.threads)
    rows = verify_supermultiplicative(cache, args.max_level, tol=args.tol)
    dt = time.perf_counter() - t0
    ok = all(
        r["upper"] and r["lower"] and r["t_upper"] and r["t_lower"]
        for r in rows
    )
    if args.format == "csv":
        lines = ["m,n,R_mn,R_m_R_n,upper_ok,lower_ok,t_upper_ok,t_lower_ok"]
        for r in rows:
            lines.append(
                ",".join(
                    [
                        str(r["m"]),
                        str(r["n"]),
                        _fmt(r["R"]),
                        _fmt(r["RmRn"]),
                        _fmt(r["upper"]),
                        _fmt(r["lower"]),
                        _fmt(r["t_upper"]),
                        _fmt(r["t_lower"]),
                    ]
                )
            )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        doc = {
            "rows": rows,
            "pass": ok,
            "manifest": _manifest(args, {"total_s": dt}),
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0 if ok else 1


def cmd_bounds(args):
    cache = _cache(args)
    t0 = time.perf_counter()
    cuts = cut_report(cache, args.max_level)
    shorts, const = short_report(cache, min(args.max_level, 5))
    dt = time.perf_counter() - t0
    ok = all(
        r["hat_le_pow"] and r["R_le_pow"] and r["monotone"]
        and r["step_ratio"] and r["formula_gap"] <= args.tol
        for r in cuts
    ) and all(r["le_R"] and r["ratio_ok"] for r in shorts)
    if args.format == "csv":
        lines = [
            "n,strands,R_hat,R_hat_solver,R_tilde,hat_le_pow,R_le_pow,"
            "monotone,ratio_ok"
        ]
        tilde = {r["n"]: r for r in shorts}
        for r in cuts:
            n = r["n"]
            s = tilde.get(n)
            lines.append(
                ",".join(
                    [
                        str(n),
                        str(r["strands"]),
                        _fmt(float(r["R_hat"])),
                        _fmt(r["R_hat_solver"]),
                        _fmt(s["R_tilde"]) if s else "",
                        _fmt(r["hat_le_pow"]),
                        _fmt(r["R_le_pow"]),
                        _fmt(r["monotone"]),
                        _fmt(s["ratio_ok"]) if s else "",
                    ]
                )
            )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        doc = {
            "cut": [
                {
                    **{k: v for k, v in r.items() if k != "R_hat"},
                    "R_hat": [r["R_hat"].numerator, r["R_hat"].denominator],
                }
                for r in cuts
            ],
            "short": shorts,
            "lower_bound_constant": const,
            "pass": ok,
            "manifest": _manifest(args, {"total_s": dt}),
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0 if ok else 1


# -- argument parsing ---------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="hexacarpet",
        description="resistance scaling on barycentric-subdivision graphs",
    )
    p.add_argument("--seed", type=int, default=0, help="rng seed (recorded)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, solver=True):
        sp.add_argument("--tol", type=float, default=1e-8)
        if solver:
            sp.add_argument("--max-iter", type=int, default=None)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--format", default="csv", choices=("csv", "json"))
        sp.add_argument("--out", default=None)
        sp.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("build", help="emit a graph or complex")
    b.add_argument("--family", required=True, choices=FAMILIES)
    b.add_argument("--level", type=int, required=True)
    b.add_argument(
        "--format", default="edgelist", choices=("edgelist", "dot", "json")
    )
    b.add_argument("--out", default=None)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(fn=cmd_build)

    r = sub.add_parser("resistance", help="solve one family at one level")
    r.add_argument("--family", required=True, choices=FAMILIES)
    r.add_argument("--level", type=int, required=True)
    r.add_argument("--tol", type=float, default=1e-10)
    r.add_argument("--max-iter", type=int, default=None)
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--allow-disconnected", action="store_true")
    r.add_argument("--format", default="json", choices=("csv", "json"))
    r.add_argument("--out", default=None)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(fn=cmd_resistance)

    for name, fn, helptext in [
        ("rho", cmd_rho, "resistance sweep and growth-rate fit"),
        ("duality", cmd_duality, "check R * RT = 1 per level"),
        ("submult", cmd_submult, "check multiplicative bounds"),
        ("bounds", cmd_bounds, "cut and short surgery estimates"),
    ]:
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--max-level", type=int, default=5)
        common(sp)
        sp.set_defaults(fn=fn)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "level", 1) < 1 or getattr(args, "max_level", 1) < 1:
        parser.exit(2, "levels start at 1\n")
    if getattr(args, "threads", 1) < 1:
        parser.exit(2, "--threads must be positive\n")
    try:
        return args.fn(args)
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return 3
    except SolverError as exc:
        print(f"solver: {exc}", file=sys.stderr)
        return 4
    except (FamilyError, ValueError) as exc:
        print(f"config: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
