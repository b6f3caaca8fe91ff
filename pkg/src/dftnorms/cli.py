"""Command-line interface: ``dftnorms {norm,bounds,experiment,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource guard.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys

import numpy as np

from . import bounds, montecarlo, svgplot, verify
from .matrixcore import DomainError, IndexSet, dft, gram_matrix, spread, submatrix
from .speclinalg import condition_number, spectral_norm

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
SQUARE_COLUMNS = ["delta", "mean_norm", "std_norm", "min_norm", "max_norm", "trials", "n", "scaling"]
RECT_COLUMNS = ["delta_t", "delta_omega", "mean_norm", "std_norm", "min_norm", "max_norm",
                "trials", "n", "scaling", "conjectured", "deviation"]
DEFAULT_N = {"fig1": 1024, "fig2": 1024, "fig3": 128, "fig4": 128, "argmax": 1024,
             "quartercircle": 512}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Decimal with 12 significant digits; integers and strings pass through."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return format(float(x), ".12g")
    return "" if x is None else str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return fmt(x)
        return float(format(x, ".12g"))
    return obj


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False, allow_nan=False) + "\n"


def to_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def parse_grid(text: str) -> list[float]:
    """``lo:hi:steps`` (inclusive, linear) or a comma-separated list."""
    try:
        if ":" in text:
            lo, hi, steps = text.split(":")
            steps = int(steps)
            if steps < 1:
                raise ValueError
            return [float(x) for x in np.linspace(float(lo), float(hi), steps)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}; expected lo:hi:steps") from exc


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- norm

def cmd_norm(args) -> int:
    n = _need_n(args)
    try:
        rows = IndexSet.parse(n, args.rows or "")
        cols = IndexSet.parse(n, args.cols or "")
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    a = dft(n)
    res = spectral_norm(submatrix(a, rows, cols))
    g_min, g_max = gram_matrix(a, rows, cols).extreme_eigenvalues()
    sigma = min(res.value, 1.0)
    reports = [bounds.donoho_stark(len(cols), len(rows), n),
               bounds.additive_bound(len(cols), len(rows), n),
               bounds.tao_premise(len(cols), len(rows), n)]
    contiguous = len(cols) > 0 and any(
        IndexSet.block(n, s, len(cols)) == cols for s in range(n))
    if len(rows) >= 2:
        reports.append(bounds.large_sieve(len(cols), spread(rows), n, t_is_block=contiguous))
    record = {
        "n": n, "rows": rows.to_text(), "cols": cols.to_text(),
        "norm": res.value, "method": res.method,
        "gram_min_eigenvalue": g_min, "gram_max_eigenvalue": g_max,
        "condition_number": condition_number(sigma),
        "linearly_independent": sigma < 1 - 1e-9,
        "applicable_bounds": [r.name for r in reports if r.premises_hold],
    }
    if args.format == "csv":
        cols_ = ["n", "rows", "cols", "norm", "gram_min_eigenvalue", "gram_max_eigenvalue",
                 "condition_number", "linearly_independent"]
        rec = dict(record, applicable_bounds=None)
        _emit(to_csv(cols_ + ["applicable_bounds"],
                     [dict(rec, applicable_bounds=";".join(record["applicable_bounds"]))]), args.out)
    else:
        record["bounds"] = [r.to_dict() for r in reports]
        _emit(to_json(record), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- bounds

def cmd_bounds(args) -> int:
    n = _need_n(args)
    t, o = args.t_size, args.omega_size
    if t is None or o is None:
        raise UsageError("--t-size and --omega-size are required")
    if not (0 <= t <= n and 0 <= o <= n):
        raise UsageError(f"sizes must lie in [0, {n}]")
    s = args.s
    reports = [bounds.donoho_stark(t, o, n), bounds.additive_bound(t, o, n),
               bounds.tao_premise(t, o, n)]
    if args.spread is not None:
        if args.spread < 1:
            raise UsageError("--spread must be at least 1")
        reports.append(bounds.large_sieve(t, args.spread, n))
    try:
        reports.append(bounds.candes_romberg(t, o, n, s, args.C))
        reports.append(bounds.random_subdict(t, o, n, s, args.c))
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    reports.append(bounds.rip_partition_bound(t, o, n, s, args.c))
    if args.epsilon is not None:
        reports.append(bounds.both_rand_thresholds(n, args.epsilon, args.C))
    if o > 0:
        reports.append(bounds.both_rand_norm_report(n, o, t, args.C))
    if args.format == "csv":
        columns = ["name", "premises_hold", "bound_value", "bounds_quantity",
                   "failure_probability", "verdict", "premise_detail"]
        _emit(to_csv(columns, [r.to_dict() for r in reports]), args.out)
    else:
        _emit(to_json({"n": n, "t_size": t, "omega_size": o,
                       "reports": [r.to_dict() for r in reports]}), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- experiment

def _square_rows(table) -> list[dict]:
    rows = []
    for s in table:
        lab = s.point_label
        row = {"delta": lab["delta"], "mean_norm": s.mean, "std_norm": s.std_dev,
               "min_norm": s.min, "max_norm": s.max, "trials": s.trials, "n": lab["n"],
               "scaling": lab["scaling"]}
        for k in ("conjectured", "deviation"):
            if k in lab:
                row[k] = lab[k]
        rows.append(row)
    return rows


def _rect_rows(table) -> list[dict]:
    return [{"delta_t": s.point_label["delta_t"], "delta_omega": s.point_label["delta_omega"],
             "mean_norm": s.mean, "std_norm": s.std_dev, "min_norm": s.min, "max_norm": s.max,
             "trials": s.trials, "n": s.point_label["n"], "scaling": s.point_label["scaling"],
             "conjectured": s.point_label["conjectured"],
             "deviation": s.point_label["deviation"]} for s in table]


def _square_svg(rows, title, scaled, with_curve) -> str:
    xs = [r["delta"] for r in rows]
    series = {"mean norm": (xs, [r["mean_norm"] for r in rows])}
    if with_curve:
        dense = np.linspace(min(xs), max(xs), 100)
        if scaled:
            series["2 sqrt(1 - delta)"] = (list(dense), [2 * math.sqrt(1 - d) for d in dense])
        else:
            series["2 sqrt(delta(1 - delta))"] = (list(dense),
                                                  [montecarlo.conjectured_norm(d) for d in dense])
    return svgplot.line_plot(series, title, "delta", "scaled mean norm" if scaled else "mean norm")


def _rect_svg(rows, title, scaled) -> str:
    series = {}
    for r in rows:
        xs, ys = series.setdefault(f"delta_Omega={r['delta_omega']:.3g}", ([], []))
        xs.append(r["delta_t"])
        ys.append(r["mean_norm"])
    return svgplot.line_plot(series, title, "delta_T", "scaled mean norm" if scaled else "mean norm")


def cmd_experiment(args) -> int:
    kind = args.kind
    n = args.n or DEFAULT_N[kind]
    trials = args.trials or montecarlo.DEFAULT_TRIALS
    seed, workers = args.seed, args.workers
    meta = {"experiment": kind, "n": n, "seed": seed, "trials": trials}
    if kind in ("fig1", "fig2", "quartercircle", "argmax"):
        if args.delta_grid:
            grid = parse_grid(args.delta_grid)
        elif kind == "fig1":
            grid = parse_grid("0.05:0.45:9")
        elif kind == "quartercircle":
            grid = parse_grid("0.05:0.5:10")
        else:
            grid = [float(x) for x in montecarlo.log_delta_grid(n)]
        if any(not 0 <= d <= 1 for d in grid):
            raise UsageError("grid values must lie in [0, 1]")
        scaled = kind in ("fig2", "argmax") or args.scaled
        if kind == "quartercircle":
            table = montecarlo.quartercircle_check(n, grid, trials, seed, workers)
            meta["interpretation"] = "deviation = mean - 2 sqrt(delta_eff (1 - delta_eff)), delta_eff = floor(delta n)/n"
        else:
            table = montecarlo.sweep_square(n, grid, trials, seed, scaled, workers=workers,
                                            budget=args.budget)
        rows = _square_rows(table)
        columns = list(SQUARE_COLUMNS)
        if kind == "quartercircle":
            columns += ["conjectured", "deviation"]
        if kind == "argmax":
            best = int(np.argmax([r["mean_norm"] for r in rows]))
            for i, r in enumerate(rows):
                r["is_argmax"] = i == best
            columns.append("is_argmax")
            meta["argmax_delta"] = rows[best]["delta"]
            meta["reference_2_over_sqrt_n"] = 2 / math.sqrt(n)
        svg = _square_svg(rows, f"{kind}: n={n}", scaled, kind != "argmax") if args.svg else None
    else:
        grid = parse_grid(args.delta_grid or "0.1:0.9:9")
        if any(not 0 < d < 1 for d in grid):
            raise UsageError("grid values must lie in (0, 1)")
        scaled = kind == "fig4" or args.scaled
        table = montecarlo.sweep_rect(n, grid, grid, trials, seed, scaled, workers=workers,
                                      budget=args.budget)
        rows = _rect_rows(table)
        columns = RECT_COLUMNS
        meta["interpretation"] = montecarlo.RECT_INTERPRETATION
        svg = _rect_svg(rows, f"{kind}: n={n}", scaled) if args.svg else None
    if args.format == "json":
        _emit(to_json({"metadata": meta, "rows": [{c: r.get(c) for c in columns} for r in rows]}),
              args.out)
    else:
        _emit(to_csv(columns, rows), args.out)
    if svg is not None:
        with open(args.svg, "w") as fh:
            fh.write(svg)
    return EXIT_OK


# ---------------------------------------------------------------- verify

def _u_list(text: str | None, default: list[float]) -> list[float]:
    if not text:
        return default
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --u list {text!r}") from exc


def cmd_verify(args) -> int:
    target = args.target
    seed, workers = args.seed, args.workers
    try:
        if target == "donoho-stark":
            n = args.n or 8
            if not 2 <= n <= 10:
                raise UsageError("donoho-stark is exhaustive: need 2 <= n <= 10")
            result = verify.check_donoho_stark(n)
        elif target == "tao":
            n = args.n or 7
            if n <= 7:
                result = verify.check_tao_exhaustive(n)
            else:
                result = verify.check_tao_random(n, args.trials or 10_000, seed)
        elif target == "coords":
            n = args.n or 6
            if n > 10:
                raise UsageError("coords is exhaustive: need n <= 10")
            result = verify.check_rand_coords(n, args.delta if args.delta is not None else 0.5)
        elif target == "square-case":
            n = args.n or 8
            if n > 10:
                raise UsageError("square-case is exhaustive: need n <= 10")
            result = verify.check_square_case(n)
        elif target == "moment":
            n = args.n or 4096
            q = args.q or math.ceil(2 * math.log(n))
            result = verify.check_moment(n, q, args.trials or 100_000, seed, workers)
        elif target == "extrap":
            n = args.n or 128
            q = args.q or 64
            lam = args.lam if args.lam is not None else 0.5
            delta = args.delta if args.delta is not None else 0.25
            rep = montecarlo.verify_extrapolation(n, q, lam, delta, args.trials or 10_000, seed,
                                                  strict=not args.allow_premise_violation,
                                                  workers=workers)
            result = dict(rep.to_dict(), target="extrap", result="Chebyshev moment extrapolation")
        elif target == "tail":
            n = args.n or 128
            delta = args.delta if args.delta is not None else 0.05
            lam, q = args.lam, args.q
            if lam is None or q is None:
                # fill whatever is missing from the both-random recipe
                rec_lam, rec_q = bounds.both_rand_recipe(n, delta)
                lam = rec_lam if lam is None else lam
                q = rec_q if q is None else q
            us = _u_list(args.u, [math.sqrt(2)])
            rep = montecarlo.verify_tail(n, delta, lam, q, us, args.trials or 10_000, seed,
                                         model=args.model, workers=workers)
            result = dict(rep.to_dict(), target="tail", result="tail bound for random sets")
        else:  # pragma: no cover - argparse restricts choices
            raise UsageError(f"unknown target {target}")
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    _emit(to_json(result), args.out)
    return EXIT_OK if result["passed"] else EXIT_FAIL


# ---------------------------------------------------------------- parser

def _need_n(args) -> int:
    if args.n is None:
        raise UsageError("--n is required")
    if args.n < 1:
        raise UsageError("--n must be positive")
    return args.n


def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dftnorms",
                                     description="Norms of DFT submatrices: bounds and experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="norm, Gram eigenvalues and condition number for explicit sets")
    _common(p)
    p.add_argument("--rows", help="Omega, e.g. 4,8,12,16")
    p.add_argument("--cols", help="T, e.g. 4,8,12,16")
    p.set_defaults(func=cmd_norm, format_default="json")

    p = sub.add_parser("bounds", help="evaluate every closed-form bound for given sizes")
    _common(p)
    p.add_argument("--t-size", type=int)
    p.add_argument("--omega-size", type=int)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--spread", type=int)
    p.add_argument("--c", type=float, default=1.0, help="unspecified small constant (default 1)")
    p.add_argument("--C", type=float, default=1.0, help="unspecified large constant (default 1)")
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_bounds, format_default="json")

    p = sub.add_parser("experiment", help="figure reproductions and sweeps")
    _common(p)
    p.add_argument("kind", choices=tuple(DEFAULT_N))
    p.add_argument("--trials", type=int)
    p.add_argument("--delta-grid", metavar="LO:HI:STEPS")
    p.add_argument("--scaled", action="store_true")
    p.add_argument("--svg", metavar="PATH")
    p.add_argument("--budget", type=int, default=montecarlo.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_experiment, format_default="csv")

    p = sub.add_parser("verify", help="check one result and report pass/fail as JSON")
    _common(p)
    p.add_argument("target", choices=("donoho-stark", "tao", "coords", "square-case",
                                      "moment", "extrap", "tail"))
    p.add_argument("--trials", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--q", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--u", help="threshold multiplier(s), comma separated")
    p.add_argument("--model", choices=("fixed", "bernoulli"), default="fixed")
    p.add_argument("--allow-premise-violation", action="store_true")
    p.set_defaults(func=cmd_verify, format_default="json")
    return parser


def _config_defaults(parser: argparse.ArgumentParser, command: str, path: str) -> dict:
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    section = cp["dftnorms"] if cp.has_section("dftnorms") else cp.defaults()
    subparser = parser._subparsers._group_actions[0].choices[command]
    actions = {a.dest: a for a in subparser._actions}
    out = {}
    for key, value in section.items():
        dest = key.replace("-", "_")
        if dest == "lambda":
            dest = "lam"
        act = actions.get(dest)
        if act is None or dest in ("config", "kind", "target"):
            continue
        if isinstance(act, argparse._StoreTrueAction):
            out[dest] = section.getboolean(key)
        else:
            out[dest] = act.type(value) if act.type else value
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            defaults = _config_defaults(parser, args.command, args.config)
            sub = parser._subparsers._group_actions[0].choices[args.command]
            sub.set_defaults(**defaults)
            args = parser.parse_args(argv)
        if args.format is None:
            args.format = args.format_default
        if args.seed < 0 or args.seed >= 1 << 64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        return args.func(args)
    except UsageError as exc:
        print(f"dftnorms: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except montecarlo.ResourceGuardError as exc:
        print(f"dftnorms: resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, TypeError) as exc:
        print(f"dftnorms: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
