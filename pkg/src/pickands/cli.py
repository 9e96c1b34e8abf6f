"""Command-line front end.

Subcommands: estimate (Monte Carlo table), bounds (interval engine over an
estimates file), table (estimate + bounds composed), regress (mesh sweep +
extrapolation), identity-check (alpha=2 lattice-sum identity), fgn-dump
(raw sampled paths).  Report-producing commands render a matplotlib
figure next to the delimited output unless --no-fig is given.

Exit codes: 0 success, 2 configuration errors, 3 numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from importlib import resources

from . import figures
from .bounds import BoundParams, interval
from .estimator import EstimatorConfig, estimate_eta_sweep, estimate_ratio
from .exceptions import (
    EmbeddingError,
    NumericalError,
    ParameterError,
    PickandsError,
    PreconditionError,
)
from .fgn import GridSpec, build_two_sided_fbm, sample_unit_fgn, seed_vector, spectrum_for
from .identity import identity_integral
from .pathfun import z_from_fbm
from .regress import fit_eta_scaling, predict

__all__ = ["main", "default_alpha_grid", "parse_number", "parse_alphas"]

ESTIMATE_COLUMNS = ["alpha", "estimate", "sample_stddev", "stderr", "ci95_lo", "ci95_hi"]
BOUNDS_COLUMNS = ["alpha", "estimate", "sample_stddev", "lower_bound", "upper_bound"]
REGRESS_COLUMNS = ["alpha", "h_T_hat", "c_hat", "predicted_finest", "raw_finest"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def default_alpha_grid() -> list[float]:
    """The experiment grid 0.70, 0.75, ..., 2.00 (27 values)."""
    return [k / 20.0 for k in range(14, 41)]


def parse_number(text: str) -> float:
    """Float parser that also accepts 1/1024, 2^-10 and 2**-10 forms."""
    s = text.strip()
    try:
        return float(s)
    except ValueError:
        pass
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return float(num) / float(den)
        for op in ("**", "^"):
            if op in s:
                base, exp = s.split(op, 1)
                return float(base) ** float(exp)
    except (ValueError, ZeroDivisionError):
        pass
    raise ParameterError(f"cannot parse number {text!r}")


def parse_alphas(text: str) -> list[float]:
    """Alpha list: 'a:step:b' range, comma-separated values, or empty."""
    s = text.strip()
    if not s:
        return []
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ParameterError(f"range spec must be start:step:stop, got {text!r}")
        start, step, stop = (parse_number(p) for p in parts)
        if step <= 0 or stop < start:
            raise ParameterError(f"bad range spec {text!r}")
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [parse_number(p) for p in s.split(",")]


def _fmt(value) -> str:
    if value is None:
        return "---"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.7g}"
    return str(value)


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_csv(path: str | None, header: list[str], rows: list[list]) -> None:
    stream, close = _open_out(path)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    finally:
        if close:
            stream.close()


def _write_json(path: str | None, payload) -> None:
    stream, close = _open_out(path)
    try:
        json.dump(payload, stream, indent=2, allow_nan=True)
        stream.write("\n")
    finally:
        if close:
            stream.close()


def _fig_path(args) -> str | None:
    if getattr(args, "no_fig", False):
        return None
    if getattr(args, "fig", None):
        return args.fig
    if args.out and args.out != "-":
        root, _ = os.path.splitext(args.out)
        return root + ".png"
    return None


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    return int(os.environ.get("PICKANDS_WORKERS", "1"))


def _bound_params(args) -> BoundParams:
    return BoundParams(
        gamma=args.gamma, psi=args.psi, tau_base=args.tau, eps_scale=args.eps_scale
    )


def _alpha_grid(args) -> list[float]:
    if getattr(args, "alpha", None):
        if args.alphas is not None:
            raise ParameterError("give either --alpha or --alphas, not both")
        return [float(a) for a in args.alpha]
    if args.alphas is not None:
        return parse_alphas(args.alphas)
    return default_alpha_grid()


def _estimate_rows(args) -> list:
    alphas = _alpha_grid(args)
    if not alphas:
        return []
    config = EstimatorConfig(
        tuple(alphas),
        parse_number(args.T),
        parse_number(args.eta),
        args.reps,
        master_seed=args.seed,
        workers=_workers(args),
    )
    return estimate_ratio(config)


def _row_dicts(rows) -> list[dict]:
    return [
        {
            "alpha": r.alpha,
            "estimate": r.mean,
            "sample_stddev": r.sample_stddev,
            "stderr": r.stderr,
            "ci95_lo": r.ci95_lo,
            "ci95_hi": r.ci95_hi,
        }
        for r in rows
    ]


def cmd_estimate(args) -> int:
    rows = _estimate_rows(args)
    dicts = _row_dicts(rows)
    if args.format == "json":
        _write_json(args.out, dicts)
    else:
        _write_csv(
            args.out,
            ESTIMATE_COLUMNS,
            [[d[c] for c in ESTIMATE_COLUMNS] for d in dicts],
        )
    fig = _fig_path(args)
    if fig:
        figures.render_estimates(dicts, fig)
    return EXIT_OK


def _read_estimates_file(path: str) -> list[dict]:
    """Rows with alpha/estimate (and sample_stddev when present)."""
    with open(path, newline="") as stream:
        reader = csv.DictReader(stream)
        rows = []
        for raw in reader:
            if raw.get("alpha") in (None, ""):
                continue
            row = {"alpha": float(raw["alpha"]), "estimate": float(raw["estimate"])}
            sd = raw.get("sample_stddev", "")
            row["sample_stddev"] = float(sd) if sd not in ("", "---", None) else math.nan
            rows.append(row)
    return rows


def _bound_table(in_rows: list[dict], T: float, eta: float, params: BoundParams):
    """(csv rows, report dicts); failed directions become None ('---')."""
    out_rows = []
    reports = []
    for row in in_rows:
        try:
            rep = interval(row["estimate"], row["alpha"], T, eta, params)
            lb, ub = rep.lb, rep.ub
            reports.append(rep.as_dict())
        except PreconditionError as exc:
            lb = ub = None
            reports.append(
                {
                    "alpha": row["alpha"],
                    "T": T,
                    "eta": eta,
                    "estimate": row["estimate"],
                    "lb": None,
                    "ub": None,
                    "breakdown": {},
                    "preconditions_ok": {"upper": False, "lower": False},
                    "failures": {"interval": str(exc)},
                }
            )
        out_rows.append(
            [row["alpha"], row["estimate"], row.get("sample_stddev", math.nan), lb, ub]
        )
    return out_rows, reports


def _write_bounds_output(args, out_rows, reports) -> None:
    if args.format == "json":
        _write_json(args.out, reports)
    else:
        _write_csv(args.out, BOUNDS_COLUMNS, out_rows)
    fig = _fig_path(args)
    if fig:
        dicts = [
            {
                "alpha": row[0],
                "estimate": row[1],
                "lower_bound": row[3],
                "upper_bound": row[4],
            }
            for row in out_rows
        ]
        figures.render_estimates(dicts, fig, title="Estimates and interval bounds")


def cmd_bounds(args) -> int:
    in_rows = _read_estimates_file(args.estimates)
    out_rows, reports = _bound_table(
        in_rows, parse_number(args.T), parse_number(args.eta), _bound_params(args)
    )
    _write_bounds_output(args, out_rows, reports)
    return EXIT_OK


def cmd_table(args) -> int:
    rows = _estimate_rows(args)
    in_rows = [
        {"alpha": r.alpha, "estimate": r.mean, "sample_stddev": r.sample_stddev}
        for r in rows
    ]
    out_rows, reports = _bound_table(
        in_rows, parse_number(args.T), parse_number(args.eta), _bound_params(args)
    )
    _write_bounds_output(args, out_rows, reports)
    return EXIT_OK


def cmd_regress(args) -> int:
    fit_etas = [parse_number(p) for p in args.etas.split(",")] if args.etas else []
    if args.from_file:
        points = _read_points_file(args.from_file)
        fits = []
        for alpha in sorted(points):
            fit = fit_eta_scaling(points[alpha], alpha, independent=args.independent)
            finest = min(e for e, _ in points[alpha])
            raw = dict(points[alpha])[finest]
            fits.append((fit, predict(fit, finest), raw))
        columns = {}
    else:
        if len(set(fit_etas)) < 2:
            raise ParameterError("regress needs at least two distinct --etas")
        alphas = _alpha_grid(args)
        if not alphas:
            raise ParameterError("regress needs a nonempty alpha grid")
        finest = parse_number(args.eta)
        config = EstimatorConfig(
            tuple(alphas),
            parse_number(args.T),
            finest,
            args.reps,
            master_seed=args.seed,
            workers=_workers(args),
        )
        sweep_etas = [finest] + [e for e in fit_etas if e != finest]
        matrix = estimate_eta_sweep(config, sweep_etas, independent=args.independent)
        fits = []
        columns = {e: [] for e in sweep_etas}
        for i, alpha in enumerate(alphas):
            by_eta = dict(zip(sweep_etas, matrix[i]))
            pts = [(e, by_eta[e].mean) for e in fit_etas]
            fit = fit_eta_scaling(pts, alpha, independent=args.independent)
            fits.append((fit, predict(fit, finest), by_eta[finest].mean))
            for e in sweep_etas:
                columns[e].append({"alpha": alpha, "estimate": by_eta[e].mean})

    fit_dicts = [
        dict(f.as_dict(), predicted_finest=pred, raw_finest=raw)
        for f, pred, raw in fits
    ]
    if args.format == "json":
        _write_json(args.out, fit_dicts)
    else:
        _write_csv(
            args.out,
            REGRESS_COLUMNS,
            [[d[c] for c in REGRESS_COLUMNS] for d in fit_dicts],
        )
    fig = _fig_path(args)
    if fig:
        figures.render_regression(fit_dicts, columns, fig)
    return EXIT_OK


def _read_points_file(path: str) -> dict[float, list[tuple[float, float]]]:
    """alpha -> [(eta, estimate)] from a CSV with those three columns."""
    points: dict[float, list[tuple[float, float]]] = {}
    with open(path, newline="") as stream:
        for raw in csv.DictReader(stream):
            alpha = float(raw["alpha"])
            points.setdefault(alpha, []).append(
                (float(raw["eta"]), float(raw["estimate"]))
            )
    return points


def cmd_identity_check(args) -> int:
    etas = [parse_number(p) for p in args.eta]
    rows = []
    worst = 0.0
    for eta in etas:
        value = identity_integral(eta)
        err = abs(value - 2.0)
        worst = max(worst, err)
        rows.append([eta, value, err])
    if args.format == "json":
        _write_json(
            args.out,
            [{"eta": r[0], "value": r[1], "abs_error": r[2]} for r in rows],
        )
    else:
        _write_csv(args.out, ["eta", "value", "abs_error"], rows)
    fig = _fig_path(args)
    if fig:
        from .identity import identity_integrand

        curves = {}
        for eta in etas:
            ys = [0.02 * k for k in range(501)]
            curves[eta] = (ys, [identity_integrand(y, eta) for y in ys])
        figures.render_identity(curves, fig)
    if worst > args.tol:
        print(
            f"identity check failed: max |value - 2| = {worst:.3e} > tol {args.tol:g}",
            file=sys.stderr,
        )
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_fgn_dump(args) -> int:
    grid = GridSpec(args.alpha, parse_number(args.T), parse_number(args.eta))
    spectrum = spectrum_for(args.alpha, grid.n_steps)
    times = grid.times()
    rows = []
    paths = []
    for rep in range(args.count):
        seeds = seed_vector(args.seed, rep, grid.n_steps)
        path = build_two_sided_fbm(sample_unit_fgn(spectrum, seeds), grid)
        z = z_from_fbm(path)
        paths.append((times, path.values, z.z_values))
        for k in range(grid.n_steps + 1):
            rows.append([rep, times[k], path.values[k], z.z_values[k]])
    _write_csv(args.out, ["rep", "t", "B_t", "Z_t"], rows)
    fig = _fig_path(args)
    if fig and paths:
        figures.render_paths(paths, fig)
    return EXIT_OK


def appendix_fixture_path() -> str:
    """Filesystem path of the bundled reference table."""
    return str(resources.files("pickands").joinpath("data/appendix_b.csv"))


def _add_common(parser, with_grid: bool = True) -> None:
    if with_grid:
        parser.add_argument("--alpha", type=float, action="append",
                            help="single alpha (repeatable)")
        parser.add_argument("--alphas", help="range a:step:b or comma list")
        parser.add_argument("--T", default="32", help="truncation horizon")
        parser.add_argument("--eta", default="2^-10", help="lattice mesh")
        parser.add_argument("--reps", type=int, default=500)
        parser.add_argument("--seed", type=int, default=0, help="master seed")
        parser.add_argument("--workers", type=int, default=None,
                            help="worker processes (default $PICKANDS_WORKERS or 1)")
    parser.add_argument("--out", default=None, help="output path ('-' = stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--fig", default=None, help="figure path override")
    parser.add_argument("--no-fig", action="store_true", help="skip figure rendering")


def _add_bound_flags(parser) -> None:
    parser.add_argument("--gamma", type=float, default=0.025, help="window growth rate")
    parser.add_argument("--psi", type=float, default=0.3, help="q_j decay rate")
    parser.add_argument("--tau", type=float, default=1.4, help="window-0 tau")
    parser.add_argument("--eps-scale", type=float, default=1.0,
                        help="multiplier on the eps schedules")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pickands",
        description="Estimate Pickands constants for fractional Brownian motion",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="Monte Carlo estimates of H_alpha^eta(T)")
    _add_common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bounds", help="interval bounds from an estimates file")
    p.add_argument("estimates", help="CSV with alpha,estimate columns")
    p.add_argument("--T", default="128")
    p.add_argument("--eta", default="2^-18")
    _add_bound_flags(p)
    _add_common(p, with_grid=False)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("table", help="estimate then bounds, one command")
    _add_common(p)
    _add_bound_flags(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("regress", help="mesh sweep and extrapolation")
    _add_common(p)
    p.add_argument("--etas", default=None,
                   help="comma list of meshes to fit (power-of-two multiples of --eta)")
    p.add_argument("--independent", action="store_true",
                   help="independent runs per mesh instead of one shared trace")
    p.add_argument("--from", dest="from_file", default=None,
                   help="fit a precomputed alpha,eta,estimate CSV instead of simulating")
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("identity-check", help="alpha=2 lattice-sum identity")
    p.add_argument("--eta", action="append", default=None,
                   help="mesh (repeatable; default 0.25 0.5 1.0)")
    p.add_argument("--tol", type=float, default=1e-4)
    _add_common(p, with_grid=False)
    p.set_defaults(func=cmd_identity_check)

    p = sub.add_parser("fgn-dump", help="dump sampled paths as CSV")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--T", default="4")
    p.add_argument("--eta", default="2^-4")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p, with_grid=False)
    p.set_defaults(func=cmd_fgn_dump)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "identity-check" and args.eta is None:
        args.eta = ["0.25", "0.5", "1.0"]
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, EmbeddingError, PreconditionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PickandsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
