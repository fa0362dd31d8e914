"""Command-line entry point: simulate paths, solve the boundary-value
problem, evaluate relaxation curves, and run the verification suites.

All artifacts are CSV with 17-significant-digit floats ("inf" for infinite
lifetimes).  Exit codes: 0 success, 1 at least one check failed, 2 bad
configuration.  A JSON config file can pre-set any flag; explicit flags win.
"""
from __future__ import annotations

import argparse
import json
import math
import secrets
import sys

import numpy as np

from . import verify as verify_mod
from .diffusion import running_max, simulate_bang_bang, simulate_bm
from .fracbvp import ElasticConfig, relaxation, relaxation_crossing_time, solve_u
from .randtime import (RngStream, sample_inverse_path, sample_subordinator_path)
from .symbols import TemperedSymbol

SAMPLE_KINDS = ("subordinator", "inverse", "truncated-inverse", "bm", "bang-bang")


def _fmt(v) -> str:
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _emit(rows, header: str, out: str | None):
    text = header + "\n" + "\n".join(",".join(_fmt(v) for v in row) for row in rows)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _floats(spec: str) -> list[float]:
    return [float(tok) for tok in str(spec).split(",") if tok != ""]


def _symbol_from(args) -> TemperedSymbol:
    eta = getattr(args, "eta", None)
    mu = getattr(args, "mu", None)
    if (eta is None) == (mu is None):
        raise ValueError("give exactly one of --eta and --mu")
    return TemperedSymbol(eta) if eta is not None else TemperedSymbol.from_drift(mu)


def cmd_sample(args) -> int:
    kind = args.kind
    rows = []
    if kind in ("subordinator", "inverse", "truncated-inverse"):
        sym = _symbol_from(args)
    elif args.mu is None:
        raise ValueError(f"--mu (signed drift) is required for kind={kind}")
    for pid in range(args.n):
        rng = RngStream(args.seed, pid)
        if kind == "subordinator":
            path = sample_subordinator_path(sym, args.t, args.step, rng)
            rows += [(pid, g, v) for g, v in zip(path.grid, path.values)]
        elif kind in ("inverse", "truncated-inverse"):
            t_grid = np.arange(0.0, args.t + 0.5 * args.dt, args.dt)
            path = sample_inverse_path(sym, t_grid, step=args.step, rng=rng)
            vals = path.values
            if kind == "truncated-inverse":
                if args.mu is None or args.mu <= 0:
                    raise ValueError("truncated-inverse needs --mu > 0")
                cap = rng.aux().generator().exponential(scale=1.0 / args.mu)
                vals = np.minimum(vals, cap)
            rows += [(pid, g, v) for g, v in zip(path.grid, vals)]
        elif kind == "bm":
            path = simulate_bm(args.mu, args.x, args.t, args.dt, rng)
            mx = running_max(path, bridge_corrected=not args.no_bridge,
                             rng=rng.aux())
            rows += [(pid, g, v, m) for g, v, m in zip(path.grid, path.values, mx)]
        else:  # bang-bang
            sign = "+" if args.mu >= 0 else "-"
            path, acc = simulate_bang_bang(sign, abs(args.mu), args.t, args.dt, rng)
            rows += [(pid, g, v, lt) for g, v, lt in
                     zip(path.grid, path.values, acc.gamma)]
    header = {"subordinator": "path_id,t,value", "inverse": "path_id,t,value",
              "truncated-inverse": "path_id,t,value",
              "bm": "path_id,t,value,max",
              "bang-bang": "path_id,t,value,local_time"}[kind]
    _emit(rows, header, args.out)
    return 0


def cmd_solve(args) -> int:
    if args.mu is None:
        raise ValueError("--mu (signed drift) is required for solve")
    cfg = ElasticConfig(mu=args.mu, c0=args.c0)
    field = solve_u(cfg, _floats(args.t), _floats(args.x), method=args.method,
                    budget=args.n, step=args.step, dt=args.dt,
                    rng=RngStream(args.seed), threads=args.threads)
    rows = []
    for i, t in enumerate(field.t_grid):
        for j, x in enumerate(field.x_grid):
            rows.append((t, x, field.values[i, j], field.method,
                         field.error_estimate[i, j]))
    _emit(rows, "t,x,u,method,error_estimate", args.out)
    return 0


def cmd_relax(args) -> int:
    sym = _symbol_from(args)
    ts = np.asarray(_floats(args.t))
    r = relaxation(args.a, args.b, args.c, sym, ts)
    if args.c == 0 and args.b > args.a > 0:
        t_b = relaxation_crossing_time(args.a, args.b, sym)
        print(f"crossing time t_b = {_fmt(t_b)}", file=sys.stderr)
    _emit(list(zip(ts, np.atleast_1d(r))), "t,r", args.out)
    return 0


def cmd_verify(args) -> int:
    seed = secrets.randbelow(2 ** 31) if args.fresh else args.seed
    if args.fresh:
        print(f"fresh seed: {seed}")
    reports = verify_mod.run_suite(args.suite, n=args.n, seed=seed, dt=args.dt,
                                   step=args.step, threads=args.threads)
    for rep in reports:
        print(rep.summary_line())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(verify_mod.reports_to_csv(reports))
    return 0 if all(r.passed for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elasticbm",
        description="Tempered subordinators, elastic drifted Brownian motion, "
                    "and fractional boundary conditions")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file of flag defaults (flags win)")
        p.add_argument("--seed", type=int, default=verify_mod.PINNED_SEED)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", help="output CSV path (default stdout)")

    p = sub.add_parser("sample", help="simulate paths and write them as CSV")
    p.add_argument("--kind", choices=SAMPLE_KINDS, required=True)
    p.add_argument("--eta", type=float)
    p.add_argument("--mu", type=float, help="signed drift (eta derived as (mu/2)^2)")
    p.add_argument("--t", type=float, default=1.0, help="time horizon")
    p.add_argument("--x", type=float, default=0.0, help="starting point (bm)")
    p.add_argument("--n", type=int, default=1, help="number of paths")
    p.add_argument("--dt", type=float, default=1e-3, help="time grid pitch")
    p.add_argument("--step", type=float, default=1e-3, help="operational-time pitch")
    p.add_argument("--no-bridge", action="store_true",
                   help="disable the bridge-corrected running maximum")
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("solve", help="evaluate u(t, x) by one of three routes")
    p.add_argument("--mu", type=float, required=True, help="signed drift")
    p.add_argument("--c0", type=float, required=True, help="base elastic coefficient")
    p.add_argument("--t", default="1", help="comma-separated times")
    p.add_argument("--x", default="0", help="comma-separated positions")
    p.add_argument("--method", choices=("mc", "quadrature", "laplace"),
                   default="laplace")
    p.add_argument("--n", type=int, default=100_000, help="Monte Carlo paths")
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--step", type=float, default=1e-3)
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("relax", help="tempered relaxation curve r(t)")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--c", type=int, choices=(0, 1), required=True)
    p.add_argument("--eta", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--t", default="0.25,1,4", help="comma-separated times")
    common(p)
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("verify", help="run statistical/identity check suites")
    p.add_argument("--suite", choices=verify_mod.SUITES, default="all")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--fresh", action="store_true",
                   help="re-randomise the seed instead of the pinned fixture")
    common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    # config file pass: find --config wherever it appears, apply as defaults
    argv_list = list(sys.argv[1:] if argv is None else argv)
    if "--config" in argv_list:
        cfg_path = argv_list[argv_list.index("--config") + 1]
        with open(cfg_path) as fh:
            defaults = json.load(fh)
        parser.set_defaults(**defaults)
        for sp in parser._subparsers._group_actions[0].choices.values():
            sp.set_defaults(**defaults)
    args = parser.parse_args(argv_list)
    try:
        return args.func(args)
    except (ValueError, TypeError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
