"""Command-line front end: tables, scans, limits, LHV bounds, fits."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import asymptotics, lhv
from .errors import BellscopeError
from .functional import lhv_bounds
from .geometry import build_outcome_vectors
from .optimize import OptimizationProblem, StateSpec, maximize_bell, r_profile
from .quantum import SCHEMES

SCHEMA = "bellscope/1"
CROSS_CHECK_MAX_D = 10
CROSS_CHECK_TOL = 1e-4
FIT_SYNTHETIC_D = range(2, 13)


class NumericalFailure(RuntimeError):
    pass


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x) + 0.0:.9g}"


def default_scheme(d: int, mode: str) -> str:
    # the phase-Fourier family holds the EPR optimum but not the finite-r one
    if mode == "epr" and d > 10:
        return "phase-fourier"
    return "full"


def _parse_d_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad d list {text!r}")
    if not out:
        raise argparse.ArgumentTypeError("empty d list")
    return out


def _state(args, d_free_bounds=True) -> StateSpec:
    if args.mode == "epr":
        return StateSpec.epr()
    if args.r is not None:
        return StateSpec.fixed(args.r)
    return StateSpec.free(args.r_min if args.r_min is not None else 0.1,
                          args.r_max if args.r_max is not None else 4.0)


def _problem(args, d: int, state: StateSpec) -> OptimizationProblem:
    return OptimizationProblem(d, state, args.scheme or default_scheme(d, args.mode),
                               restarts=args.restarts, seed=args.seed, tolerance=args.tolerance)


def _result_json(res) -> dict:
    return {
        "d": res.d, "scheme": res.scheme, "method": res.method,
        "bell": res.best_bell, "reevaluated_bell": res.reevaluated_bell,
        "r_opt": res.best_r if res.best_r is None or math.isfinite(res.best_r) else "inf",
        "converged": res.converged,
        "settings": {name: {"scheme": p.scheme, "params": [float(v) for v in p.params]}
                     for name, p in zip(("A1", "A2", "B1", "B2"), res.best_params)},
        "restarts": [{"index": r.index, "seed": r.seed, "value": r.value, "iterations": r.iterations,
                      "evaluations": r.evaluations, "r": r.r, "converged": r.converged}
                     for r in res.per_restart],
    }


# --- commands ------------------------------------------------------------------

def cmd_vectors(args):
    V = build_outcome_vectors(args.d).vectors
    header = [f"x{i + 1}" for i in range(V.shape[1])]
    return header, [list(v) for v in V], {"d": args.d, "vectors": V.tolist()}


def cmd_table(args):
    rows, records, failed = [], [], False
    for d in args.d_list:
        if args.mode == "epr":
            bell = asymptotics.closed_form_epr(d)
            ok, opt = True, None
            if d <= CROSS_CHECK_MAX_D:
                res = maximize_bell(_problem(args, d, StateSpec.epr()))
                opt = res.best_bell
                ok = res.converged and abs(opt - bell) <= CROSS_CHECK_TOL
            rows.append([d, bell, None, ok])
            records.append({"d": d, "bell": bell, "r_opt": None, "optimizer_bell": opt, "converged": ok})
        else:
            res = maximize_bell(_problem(args, d, _state(args)))
            ok = res.converged
            rows.append([d, res.best_bell, res.best_r, ok])
            records.append({"d": d, "bell": res.best_bell, "r_opt": res.best_r, "converged": ok})
        failed |= not ok
    if failed and args.strict:
        raise NumericalFailure("optimizer did not converge for at least one d")
    return ["d", "bell", "r_opt", "converged"], rows, {"rows": records}


def cmd_scan(args):
    if args.d_list:
        # Bell value at the optimal squeezing, one row per d
        rows = []
        for d in args.d_list:
            res = maximize_bell(_problem(args, d, _state(args)))
            rows.append([d, res.best_bell, res.best_r, res.converged])
        return ["d", "bell", "r_opt", "converged"], rows, {
            "rows": [dict(zip(("d", "bell", "r_opt", "converged"), r)) for r in rows]}
    if args.d is None:
        raise BellscopeError("scan needs --d or --d-list")
    r_min = 0.0 if args.r_min is None else args.r_min
    r_max = 3.0 if args.r_max is None else args.r_max
    if not r_min < r_max:
        raise BellscopeError(f"need r-min < r-max, got {r_min} >= {r_max}")
    if args.steps < 2:
        raise BellscopeError("steps must be >= 2")
    grid = np.linspace(r_min, r_max, args.steps)
    pts = r_profile(args.d, grid, args.scheme or default_scheme(args.d, "nopa"),
                    args.restarts, args.seed, args.tolerance)
    rows = [[p.r, p.bell, p.converged] for p in pts]
    if args.strict and not all(p.converged for p in pts):
        raise NumericalFailure("optimizer did not converge at some grid points")
    return ["r", "bell", "converged"], rows, {
        "d": args.d, "rows": [{"r": p.r, "bell": p.bell, "converged": p.converged} for p in pts]}


def cmd_limit(args):
    if args.asymptote:
        v = asymptotics.epr_limit_series()
        return ["d", "bell"], [["inf", v]], {"d": "inf", "bell": v}
    if args.d is None:
        raise BellscopeError("limit needs --d or --asymptote")
    v = asymptotics.closed_form_epr(args.d)
    return ["d", "bell", "modulus"], [[args.d, v, asymptotics.optimal_modulus(args.d)]], {
        "d": args.d, "bell": v, "modulus": asymptotics.optimal_modulus(args.d)}


def cmd_lhv(args):
    if args.enumerate:
        ex = lhv.enumerate_lhv_extrema(args.d)
        lo, hi = ex.min, ex.max
    else:
        lo, hi = lhv_bounds(args.d)
    return ["d", "min", "max"], [[args.d, lo, hi]], {"d": args.d, "min": lo, "max": hi,
                                                     "enumerated": bool(args.enumerate)}


def cmd_optimize(args):
    if args.d is None:
        raise BellscopeError("optimize needs --d")
    res = maximize_bell(_problem(args, args.d, _state(args)))
    if args.strict and not res.converged:
        raise NumericalFailure(f"optimizer did not converge (best {res.best_bell})")
    row = [args.d, res.best_bell, res.best_r, res.converged]
    return ["d", "bell", "r_opt", "converged"], [row], _result_json(res)


def _read_points(path: str) -> list[tuple[float, float]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    pts = []
    for r in rows:
        try:
            pts.append((float(r[0]), float(r[1])))
        except (ValueError, IndexError):
            if pts:
                raise BellscopeError(f"bad row in {path}: {r}")
    return pts


def cmd_fit(args):
    if not args.input:
        raise BellscopeError("fit needs --input")
    m = asymptotics.fit_asymptote(_read_points(args.input))
    vals = [m.a, m.b, m.c, m.e, m.residual_norm]
    keys = ["a", "b", "c", "e", "residual_norm"]
    return keys, [vals], dict(zip(keys, vals))


COMMANDS = {
    "vectors": cmd_vectors, "table": cmd_table, "scan": cmd_scan, "limit": cmd_limit,
    "lhv-bounds": cmd_lhv, "optimize": cmd_optimize, "fit": cmd_fit,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellscope", description="Multi-outcome Bell violation laboratory")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--d", type=int)
    p.add_argument("--d-list", type=_parse_d_list)
    p.add_argument("--mode", choices=("epr", "nopa"), default="epr")
    p.add_argument("--r", type=float)
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--steps", type=int, default=31)
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--enumerate", action="store_true")
    p.add_argument("--asymptote", action="store_true")
    p.add_argument("--input")
    p.add_argument("--strict", action="store_true", help="exit 2 when any optimization fails to converge")
    return p


def render(header, rows, payload, command, fmt_name) -> str:
    if fmt_name == "json":
        doc = {"schema": SCHEMA, "command": command}
        doc.update(payload)
        return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.command in ("vectors", "lhv-bounds") and args.d is None:
        print(f"error: {args.command} needs --d", file=sys.stderr)
        return 1
    if args.command in ("table",) and not args.d_list:
        print("error: table needs --d-list", file=sys.stderr)
        return 1
    try:
        header, rows, payload = COMMANDS[args.command](args)
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BellscopeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render(header, rows, payload, args.command, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
