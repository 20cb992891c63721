"""Command-line surface: estimation runs, simulation studies, diagnostics, plots.

Subcommands
-----------
estimate   frontier point estimates and CIs from a CSV over a grid of x values
simulate   Monte Carlo coverage/length/bias study on a built-in DGP
density    joint limit-density values on a u-grid
limits     draws from the simulated limit law
ev-index   EV-index estimate from a CSV at one query point
plot       scatter + frontier estimates + CI band as a static SVG

Exit codes: 0 success, 2 input error (bad CSV/flags), 3 numerical failure.

Every run writes ``manifest.json`` (command line, configuration, seed,
package version, timestamps).  Timestamps live only in the manifest, so the
report files themselves are byte-reproducible for a fixed seed.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .abc import AbcConfig, posterior_summaries, run_mcmc
from .core import Sample, effective_sample
from .errors import FrontierError
from .evt import default_ev_index, pickands_xi
from .limits import HGrid, density_pool, simulate_limit
from .simlab import MethodSpec, dgp1, dgp2, run_study
from .subsampling import run_subsampling
from .tuning import abc_grid, default_L, preset_grid, sub_config, subsample_size

__all__ = ["main"]


class InputError(Exception):
    """User-facing input problem (malformed CSV, bad flag combination)."""


# ---------------------------------------------------------------- CSV input


def load_csv(path: str, log_y: bool = False) -> Sample:
    """Read a sample from CSV with header x1,...,xp,y (or x,y); UTF-8.

    Rows with the wrong field count or non-finite values are rejected with
    their line number.  ``log_y`` replaces y by log(y) (requires y > 0).
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        ncol = len(header)
        if ncol < 2:
            raise InputError(f"{path}: need at least two columns (inputs..., y)")
        xs, ys = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != ncol:
                raise InputError(f"{path}:{lineno}: expected {ncol} fields, got {len(row)}")
            try:
                vals = [float(v) for v in row]
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in vals):
                raise InputError(f"{path}:{lineno}: non-finite value")
            y = vals[-1]
            if log_y:
                if y <= 0.0:
                    raise InputError(f"{path}:{lineno}: y must be positive for --log-y")
                y = math.log(y)
            xs.append(vals[:-1])
            ys.append(y)
    if not ys:
        raise InputError(f"{path}: no data rows")
    return Sample(x=np.asarray(xs), y=np.asarray(ys))


def _parse_x_grid(args, p: int) -> list[list[float]]:
    """Query points from --x (comma-separated, repeatable) or --x-grid."""
    points: list[list[float]] = []
    if args.x:
        for spec in args.x:
            vals = [float(v) for v in spec.split(",")]
            if len(vals) != p:
                raise InputError(f"--x {spec!r}: expected {p} coordinates")
            points.append(vals)
    if args.x_grid:
        if p != 1:
            raise InputError("--x-grid requires univariate inputs")
        try:
            start, stop, count = args.x_grid.split(":")
            grid = np.linspace(float(start), float(stop), int(count))
        except ValueError as exc:
            raise InputError(f"--x-grid: expected start:stop:count ({exc})") from None
        points.extend([[float(v)] for v in grid])
    if not points:
        raise InputError("no query points: pass --x and/or --x-grid")
    return points


def _parse_grid(spec: str) -> HGrid:
    try:
        vals = [int(v) for v in spec.split(",")]
    except ValueError as exc:
        raise InputError(f"--grid: {exc}") from None
    if len(vals) < 3:
        raise InputError("--grid needs at least h0,hm0,h1")
    return HGrid(h0=vals[0], hm0=vals[1], h_targets=tuple(vals[2:]))


# ------------------------------------------------------------------ outputs


def _fmt(v):
    if isinstance(v, float):
        return repr(float(v))  # plain repr even for numpy scalars
    return v


def _write_csv(path: Path, fields: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(fields)
        for row in rows:
            wr.writerow([_fmt(row.get(f, "")) for f in fields])


def _write_manifest(out_dir: Path, args: argparse.Namespace) -> None:
    now = datetime.datetime.now(datetime.timezone.utc).isoformat()
    manifest = {
        "command": sys.argv,
        "config": {k: v for k, v in vars(args).items() if k != "func"},
        "version": __version__,
        "created": now,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ------------------------------------------------------------- subcommands

_REPORT_FIELDS = [
    "x", "n_eff", "p_hat", "xi_hat", "point", "lower", "upper",
    "level", "method", "status",
]


def cmd_estimate(args) -> int:
    sample = load_csv(args.input, log_y=args.log_y)
    points = _parse_x_grid(args, sample.p)
    grid = preset_grid(args.preset)
    out = _out_dir(args)
    rows, diagnostics = [], []
    for pt in points:
        label = pt[0] if sample.p == 1 else ",".join(repr(v) for v in pt)
        row = {"x": label, "method": args.method, "level": 1.0 - args.alpha}
        diag = {"x": label}
        try:
            es = effective_sample(sample, pt)
            row["n_eff"] = es.n_eff
            row["p_hat"] = es.p_hat
            if args.tail_fraction is None:
                xi = default_ev_index(es).xi_hat
            else:
                xi = pickands_xi(es, tail_fraction=args.tail_fraction).xi_hat
            row["xi_hat"] = xi
            if args.method == "sub":
                b = subsample_size(sample.n, es.p_hat)
                cfg = sub_config(
                    grid, es.p_hat, b, S=args.subsamples, alpha=args.alpha, seed=args.seed
                )
                est = run_subsampling(sample, pt, cfg, xi)
                diag.update(
                    {k: v for k, v in est.diagnostics.items() if k != "z_star"}, b=b
                )
            else:
                L = args.L if args.L else default_L(es.n_eff)
                cfg = AbcConfig(
                    h_grid=abc_grid(grid, L),
                    chain_total=args.chain_total,
                    burn_in=args.burn_in,
                    density_mc_draws=args.mc_draws,
                    seed=args.seed,
                )
                chain = run_mcmc(sample, pt, cfg, xi)
                summ = posterior_summaries(chain)
                est = summ.ci(1.0 - args.alpha)
                diag.update(
                    acceptance_rate=chain.acceptance_rate,
                    sigma_used=chain.sigma_used,
                    posterior_mean=summ.mean,
                    L=L,
                )
            row.update(point=est.point, lower=est.lower, upper=est.upper, status="ok")
        except FrontierError as exc:
            row["status"] = f"SKIPPED:{type(exc).__name__}"
            diag["reason"] = str(exc)
        rows.append(row)
        diagnostics.append(diag)
    if all(str(r["status"]).startswith("SKIPPED") for r in rows):
        raise FrontierError("no valid grid points (all skipped)")
    _write_csv(out / "report.csv", _REPORT_FIELDS, rows)
    with open(out / "report_diagnostics.json", "w") as fh:
        json.dump(diagnostics, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    _write_manifest(out, args)
    return 0


def cmd_simulate(args) -> int:
    spec = {1: dgp1, 2: dgp2}[args.dgp](args.n)
    xs = [float(v) for v in args.x.split(",")]
    methods = []
    wanted = ["sub", "abc"] if args.method == "both" else [args.method]
    for eng in wanted:
        methods.append(
            MethodSpec(
                name=f"{eng}-{args.preset}" + (f"-L{args.L}" if eng == "abc" else ""),
                engine=eng,
                preset=args.preset,
                L=args.L,
                S=args.subsamples,
                chain_total=args.chain_total,
                burn_in=args.burn_in,
                alpha=args.alpha,
            )
        )
    report = run_study(spec, xs, methods, args.reps, seed=args.seed, workers=args.workers)
    out = _out_dir(args)
    report.to_csv(out / "study.csv")
    report.to_json(out / "study.json")
    _write_manifest(out, args)
    return 0


def cmd_density(args) -> int:
    grid = _parse_grid(args.grid)
    if grid.L != 1:
        raise InputError("density u-grids are supported for L=1 grids only")
    if args.u:
        us = np.asarray([float(v) for v in args.u.split(",")])
    else:
        try:
            start, stop, count = args.u_grid.split(":")
            us = np.linspace(float(start), float(stop), int(count))
        except (ValueError, AttributeError) as exc:
            raise InputError(f"--u-grid: expected start:stop:count ({exc})") from None
    if np.any(us <= 0.0):
        raise InputError("u values must be positive")
    pool = density_pool(grid, args.xi, args.mc_draws, args.seed)
    out = _out_dir(args)
    rows = []
    for u in us:
        dv = pool.density([float(u)])
        rows.append({"u": float(u), "value": dv.value, "mc_se": dv.mc_se, "draws": dv.draws})
    _write_csv(out / "density.csv", ["u", "value", "mc_se", "draws"], rows)
    _write_manifest(out, args)
    return 0


def cmd_limits(args) -> int:
    grid = _parse_grid(args.grid)
    draws = simulate_limit(grid, args.xi, args.count, args.seed)
    out = _out_dir(args)
    fields = [f"z{h}" for h in grid.h_targets]
    rows = [dict(zip(fields, map(float, d))) for d in draws]
    _write_csv(out / "limits.csv", fields, rows)
    _write_manifest(out, args)
    return 0


def cmd_ev_index(args) -> int:
    sample = load_csv(args.input, log_y=args.log_y)
    points = _parse_x_grid(args, sample.p)
    out = _out_dir(args)
    rows = []
    for pt in points:
        es = effective_sample(sample, pt)
        if args.tail_fraction is None:
            est = default_ev_index(es)
        else:
            est = pickands_xi(es, tail_fraction=args.tail_fraction)
        rows.append(
            {
                "x": pt[0] if sample.p == 1 else ",".join(repr(v) for v in pt),
                "n_eff": es.n_eff,
                "p_hat": es.p_hat,
                "xi_hat": est.xi_hat,
                "tail_fraction": est.tail_fraction,
                "method": est.method,
            }
        )
        print(f"x={rows[-1]['x']} xi_hat={est.xi_hat!r} (tail_fraction={est.tail_fraction})")
    _write_csv(out / "ev_index.csv", list(rows[0]), rows)
    _write_manifest(out, args)
    return 0


def cmd_plot(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "frontierq"
    import matplotlib.pyplot as plt

    sample = load_csv(args.input, log_y=args.log_y)
    if sample.p != 1:
        raise InputError("plotting requires univariate inputs")
    xs, pts, los, ups = [], [], [], []
    try:
        with open(args.report, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                if not row["status"].startswith("ok"):
                    continue
                xs.append(float(row["x"]))
                pts.append(float(row["point"]))
                los.append(float(row["lower"]))
                ups.append(float(row["upper"]))
    except (OSError, KeyError, ValueError) as exc:
        raise InputError(f"bad report file {args.report}: {exc}") from exc
    if not xs:
        raise InputError(f"{args.report}: no usable rows")
    order = np.argsort(xs)
    xs = np.asarray(xs)[order]
    pts = np.asarray(pts)[order]
    los = np.asarray(los)[order]
    ups = np.asarray(ups)[order]

    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter(sample.x[:, 0], sample.y, s=6, color="0.6", label="observations")
    ax.fill_between(xs, los, ups, alpha=0.3, color="tab:blue", label="95% CI")
    ax.plot(xs, pts, "o-", color="tab:blue", label="frontier estimate")
    ax.set_xlabel("input x")
    ax.set_ylabel("output y")
    ax.legend(loc="lower right")
    fig.savefig(args.out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="frontierq", description=__doc__)
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, seed=True, out=True):
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if out:
            p.add_argument("--out-dir", default=".")

    pe = sub.add_parser("estimate", help="frontier estimates from a CSV")
    pe.add_argument("--input", required=True)
    pe.add_argument("--x", action="append", help="query point (comma-separated if p > 1)")
    pe.add_argument("--x-grid", help="start:stop:count (univariate inputs)")
    pe.add_argument("--method", choices=["sub", "abc"], default="sub")
    pe.add_argument("--preset", choices=["S1", "S2"], default="S1")
    pe.add_argument("--L", type=int, default=0, help="targets for abc (0 = auto)")
    pe.add_argument("--subsamples", type=int, default=5000)
    pe.add_argument("--chain-total", type=int, default=20000)
    pe.add_argument("--burn-in", type=int, default=10000)
    pe.add_argument("--mc-draws", type=int, default=2000)
    pe.add_argument("--alpha", type=float, default=0.05)
    pe.add_argument("--tail-fraction", type=float, default=None)
    pe.add_argument("--log-y", action="store_true")
    common(pe)
    pe.set_defaults(func=cmd_estimate)

    ps = sub.add_parser("simulate", help="Monte Carlo study on a built-in DGP")
    ps.add_argument("--dgp", type=int, choices=[1, 2], default=1)
    ps.add_argument("--n", type=int, default=5000)
    ps.add_argument("--x", default="3.3", help="comma-separated query levels")
    ps.add_argument("--method", choices=["sub", "abc", "both"], default="both")
    ps.add_argument("--preset", choices=["S1", "S2"], default="S1")
    ps.add_argument("--L", type=int, default=2)
    ps.add_argument("--reps", type=int, default=500)
    ps.add_argument("--subsamples", type=int, default=1000)
    ps.add_argument("--chain-total", type=int, default=10000)
    ps.add_argument("--burn-in", type=int, default=5000)
    ps.add_argument("--alpha", type=float, default=0.05)
    ps.add_argument("--workers", type=int, default=1)
    common(ps)
    ps.set_defaults(func=cmd_simulate)

    pd = sub.add_parser("density", help="limit-density values on a u-grid")
    pd.add_argument("--grid", required=True, help="h0,hm0,h1[,...]")
    pd.add_argument("--xi", type=float, required=True)
    pd.add_argument("--u", help="comma-separated u values")
    pd.add_argument("--u-grid", help="start:stop:count")
    pd.add_argument("--mc-draws", type=int, default=2000)
    common(pd)
    pd.set_defaults(func=cmd_density)

    pl = sub.add_parser("limits", help="draws from the simulated limit law")
    pl.add_argument("--grid", required=True, help="h0,hm0,h1[,...]")
    pl.add_argument("--xi", type=float, required=True)
    pl.add_argument("--count", type=int, default=10000)
    common(pl)
    pl.set_defaults(func=cmd_limits)

    pv = sub.add_parser("ev-index", help="EV-index estimate at query points")
    pv.add_argument("--input", required=True)
    pv.add_argument("--x", action="append")
    pv.add_argument("--x-grid")
    pv.add_argument("--tail-fraction", type=float, default=None)
    pv.add_argument("--log-y", action="store_true")
    common(pv)
    pv.set_defaults(func=cmd_ev_index)

    pp = sub.add_parser("plot", help="scatter + frontier + CI band as SVG")
    pp.add_argument("--input", required=True)
    pp.add_argument("--report", required=True)
    pp.add_argument("--out", default="frontier.svg")
    pp.add_argument("--log-y", action="store_true")
    common(pp, seed=False, out=False)
    pp.set_defaults(func=cmd_plot)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags, 0 on --help/--version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FrontierError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
