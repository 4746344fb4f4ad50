"""Command-line front end.

Subcommands::

    dist     distance between a distribution and an explicit atomic measure
    best     best n-atom approximation (free weights)
    uniform  best n-atom approximation with equal weights
    sweep    n-sweep of errors with limit and second-order columns
    limits   asymptotic reports for a distribution
    density  asymptotic point density table with an empirical histogram
    verify   brute-force oracle versus solver comparison

Data goes to stdout (JSON or CSV); human-readable summaries and
diagnostics go to stderr.  Numbers in data output carry 12 significant
digits; summary lines are displayed to 4.  Exit codes: 0 success, 1
verification failure, 2 usage or parse errors, 3 numerical-integrity
failures, 4 unsupported distribution for the requested operation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import NumericalIntegrityError, UnsupportedSpecError
from .distributions import parse_spec, quantile, spec_to_json
from .levy import AtomicMeasure, distance_to_atomic
from .quantizer import (best_uniform, best_unconstrained, uniform_error,
                        unconstrained_error)
from .asymptotics import (best_error_limit, best_error_second_order,
                          point_density, uniform_error_limits,
                          uniform_error_refined)
from .oracle import GridConfig, brute_force_best, empirical_point_check

__all__ = ["main", "run"]

_EXIT_VERIFY = 1
_EXIT_USAGE = 2
_EXIT_INTEGRITY = 3
_EXIT_UNSUPPORTED = 4


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _emit_json(obj, path: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True), path)


def _emit_csv(header, rows, path: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    _emit(buf.getvalue(), path)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _parse_atoms(text: str) -> AtomicMeasure:
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            return AtomicMeasure.from_json(json.load(fh))
    return AtomicMeasure.from_json(text)


def _parse_n_range(spec: str, step: str) -> list[int]:
    if ".." in spec:
        a, b = spec.split("..", 1)
        start, stop = int(a), int(b)
    else:
        start = stop = int(spec)
    if start < 1 or stop < start:
        raise ValueError(f"bad n range {spec!r}")
    ns = []
    n = start
    if step.startswith("x"):
        factor = float(step[1:])
        if factor <= 1:
            raise ValueError("geometric step must exceed 1")
        while n <= stop:
            ns.append(n)
            n = max(n + 1, int(round(n * factor)))
    elif step.startswith("+"):
        inc = int(step[1:])
        if inc < 1:
            raise ValueError("arithmetic step must be at least 1")
        while n <= stop:
            ns.append(n)
            n += inc
    else:
        raise ValueError(f"bad step {step!r} (use xFACTOR or +INCREMENT)")
    if not ns:
        raise ValueError("empty n range")
    return ns


def _threads() -> int:
    env = os.environ.get("LEVYQ_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_dist(args) -> int:
    spec = parse_spec(args.spec)
    nu = _parse_atoms(args.atoms)
    d = distance_to_atomic(spec, nu, args.epsilon, tol=args.tolerance)
    _note(f"distance({spec}, {nu.n} atoms) = {d:.4g} at epsilon {args.epsilon:.4g}")
    _emit_json({"spec": spec_to_json(spec), "epsilon": args.epsilon,
                "n": nu.n, "distance": float(f"{d:.12g}")}, args.output)
    return 0


def _solve_one(args, mode: str):
    spec = parse_spec(args.spec)
    if mode == "best":
        return spec, best_unconstrained(spec, args.n, args.epsilon, tol=args.tolerance)
    return spec, best_uniform(spec, args.n, args.epsilon, tol=args.tolerance)


def _cmd_best(args) -> int:
    spec, result = _solve_one(args, "best")
    _note(f"{spec}: n={args.n} free-weight error {result.error:.4g} "
          f"(n*error {args.n * result.error:.4g})")
    _emit_json(result.to_json(), args.output)
    return 0


def _cmd_uniform(args) -> int:
    spec, result = _solve_one(args, "uniform")
    _note(f"{spec}: n={args.n} equal-weight error {result.error:.4g} "
          f"(n*error {args.n * result.error:.4g})")
    _emit_json(result.to_json(), args.output)
    return 0


def _sweep_limit(spec, mode: str, epsilon: float):
    try:
        if mode == "best":
            return best_error_limit(spec, epsilon).value("limit")
        return uniform_error_limits(spec, epsilon).value("limsup")
    except UnsupportedSpecError:
        return None


def _sweep_prediction(spec, mode: str, epsilon: float, n: int, constants):
    try:
        if mode == "best":
            c1, c2 = constants
            if not math.isfinite(c2):
                return None
            return c1 + c1 * c1 * c2 / 12.0 / (n * n)
        return uniform_error_refined(spec, epsilon, n).value("prediction")
    except UnsupportedSpecError:
        return None


def _cmd_sweep(args) -> int:
    spec = parse_spec(args.spec)
    ns = _parse_n_range(args.n, args.step)
    limit = _sweep_limit(spec, args.mode, args.epsilon)
    constants = None
    if args.mode == "best":
        try:
            constants = best_error_second_order(spec, args.epsilon)
        except UnsupportedSpecError:
            constants = None

    def solve(n: int) -> float:
        if args.mode == "best":
            return unconstrained_error(spec, n, args.epsilon, tol=args.tolerance)[0]
        return uniform_error(spec, n, args.epsilon, tol=args.tolerance)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        errors = dict(zip(ns, pool.map(solve, ns)))

    rows = []
    for n in ns:
        err = errors[n]
        pred = None
        if constants is not None or args.mode == "uniform":
            pred = _sweep_prediction(spec, args.mode, args.epsilon, n, constants)
        rows.append((n, err, n * err, limit, pred))
    _note(f"{spec}: {args.mode} sweep over {len(ns)} sizes, "
          f"limit {'n/a' if limit is None else f'{limit:.4g}'}")
    if args.format == "csv":
        _emit_csv(("n", "error", "n_error", "limit", "second_order_prediction"),
                  rows, args.output)
    else:
        _emit_json([{"n": n, "error": e, "n_error": ne, "limit": lim,
                     "second_order_prediction": pred}
                    for n, e, ne, lim, pred in rows], args.output)
    return 0


def _cmd_limits(args) -> int:
    spec = parse_spec(args.spec)
    out = {"spec": spec_to_json(spec), "epsilon": args.epsilon}
    best = best_error_limit(spec, args.epsilon)
    out["best_limit"] = best.to_json()
    _note(f"{spec}: free-weight n*error limit {best.value('limit'):.4g}")
    try:
        uni = uniform_error_limits(spec, args.epsilon)
        out["uniform_limits"] = uni.to_json()
        _note(f"{spec}: equal-weight n*error limsup {uni.value('limsup'):.4g}, "
              f"liminf bound {uni.value('liminf_lower_bound'):.4g}")
    except UnsupportedSpecError as exc:
        out["uniform_limits"] = None
        _note(f"{spec}: equal-weight limits unavailable ({exc})")
    try:
        c1, c2 = best_error_second_order(spec, args.epsilon)
        out["best_second_order"] = {"c1": c1, "c2": c2 if math.isfinite(c2) else "-inf"}
    except UnsupportedSpecError:
        out["best_second_order"] = None
    _emit_json(out, args.output)
    return 0


def _cmd_density(args) -> int:
    spec = parse_spec(args.spec)
    lo = quantile(spec, 0.001)
    hi = quantile(spec, 0.999)
    if not math.isfinite(lo):
        lo = quantile(spec, 1e-6)
    if not math.isfinite(hi):
        hi = quantile(spec, 1.0 - 1e-6)
    xs = np.linspace(lo, hi, args.points)
    dens = [point_density(spec, args.epsilon, x) for x in xs]
    atoms = np.asarray(best_unconstrained(spec, args.n, args.epsilon).measure.locations)
    emp: list[float | None] = []
    for i in range(len(xs) - 1):
        width = xs[i + 1] - xs[i]
        frac = np.count_nonzero((atoms >= xs[i]) & (atoms < xs[i + 1])) / len(atoms)
        emp.append(frac / width if width > 0 else 0.0)
    emp.append(None)
    rows = list(zip(xs.tolist(), dens, emp))
    _note(f"{spec}: point density on [{lo:.4g}, {hi:.4g}] with n={args.n} atom histogram")
    if args.format == "csv":
        _emit_csv(("x", "density", "empirical_histogram"), rows, args.output)
    else:
        _emit_json([{"x": x, "density": d, "empirical_histogram": e}
                    for x, d, e in rows], args.output)
    return 0


def _cmd_verify(args) -> int:
    spec = parse_spec(args.spec)
    if args.box:
        lo, hi = (float(v) for v in args.box.split(":"))
        cfg = GridConfig(lo, hi, args.x_res, args.p_res, args.n)
    else:
        cfg = GridConfig.default(spec, args.n, args.x_res, args.p_res)
    solver = best_unconstrained(spec, args.n, args.epsilon)
    oracle_measure, oracle_val = brute_force_best(spec, args.n, args.epsilon, cfg)
    tolerance = args.tolerance if args.tolerance is not None else \
        args.epsilon * args.x_res + args.p_res + 1e-6
    gap = oracle_val - solver.error
    ok = (gap >= -1e-9) and (gap <= tolerance)
    deviation = None
    try:
        atoms = np.asarray(solver.measure.locations)
        deviation = empirical_point_check(atoms, spec, args.epsilon)
    except UnsupportedSpecError:
        pass
    _note(f"{spec}: solver {solver.error:.4g}, oracle {oracle_val:.4g}, "
          f"gap {gap:.2e} (tolerance {tolerance:.2e}) -> {'OK' if ok else 'VIOLATION'}")
    _emit_json({"spec": spec_to_json(spec), "n": args.n, "epsilon": args.epsilon,
                "solver_error": solver.error, "oracle_error": oracle_val,
                "gap": gap, "tolerance": tolerance,
                "point_deviation": deviation, "ok": ok}, args.output)
    return 0 if ok else _EXIT_VERIFY


# ---------------------------------------------------------------------------
# argument plumbing

def _add_common(sub, *, fmt_default="json", tolerance=1e-12):
    sub.add_argument("--spec", required=True,
                     help="distribution: shorthand like exp(1), a JSON object, or @file")
    sub.add_argument("--epsilon", type=float, default=1.0,
                     help="metric slant parameter (default 1)")
    sub.add_argument("--format", choices=("json", "csv"), default=fmt_default)
    sub.add_argument("--output", default=None, help="output path (default stdout)")
    sub.add_argument("--tolerance", type=float, default=tolerance,
                     help="numeric tolerance override where applicable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levyq",
        description="Best purely atomic approximations in the Levy metric")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("dist", help="distance to an explicit atomic measure")
    _add_common(p)
    p.add_argument("--atoms", required=True,
                   help='atomic measure as {"atoms": [{"x": ..., "p": ...}]} or @file')
    p.set_defaults(fn=_cmd_dist)

    for name, fn, help_text in (("best", _cmd_best, "best free-weight approximation"),
                                ("uniform", _cmd_uniform, "best equal-weight approximation")):
        p = subs.add_parser(name, help=help_text)
        _add_common(p, tolerance=1e-13)
        p.add_argument("--n", type=int, required=True)
        p.set_defaults(fn=fn)

    p = subs.add_parser("sweep", help="error sweep over a range of sizes")
    _add_common(p, fmt_default="csv", tolerance=1e-13)
    p.add_argument("--n", required=True, help="size or range, e.g. 4..512")
    p.add_argument("--step", default="x2", help="xFACTOR (geometric) or +INC (arithmetic)")
    p.add_argument("--mode", choices=("best", "uniform"), default="best")
    p.set_defaults(fn=_cmd_sweep)

    p = subs.add_parser("limits", help="asymptotic reports")
    _add_common(p)
    p.set_defaults(fn=_cmd_limits)

    p = subs.add_parser("density", help="asymptotic point density table")
    _add_common(p, fmt_default="csv")
    p.add_argument("--n", type=int, default=200, help="atoms for the empirical histogram")
    p.add_argument("--points", type=int, default=101, help="table rows")
    p.set_defaults(fn=_cmd_density)

    p = subs.add_parser("verify", help="brute-force oracle comparison")
    _add_common(p, tolerance=None)
    p.add_argument("--n", type=int, required=True, help="atoms (1 to 3)")
    p.add_argument("--x-res", type=float, default=1e-4, dest="x_res")
    p.add_argument("--p-res", type=float, default=1e-4, dest="p_res")
    p.add_argument("--box", default=None, help="search box LO:HI (default from quantiles)")
    p.set_defaults(fn=_cmd_verify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UnsupportedSpecError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return _EXIT_UNSUPPORTED
    except NumericalIntegrityError as exc:
        print(f"numerical integrity failure: {exc}", file=sys.stderr)
        return _EXIT_INTEGRITY
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
