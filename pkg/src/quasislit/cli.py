"""Command-line front end: ``quasislit {trace,bounds,verify,plot}``."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import bounds
from .driving import load_driver_csv, make_driver
from .flow import SolverOptions, solve_reverse, trace_curve
from .verify import SweepConfig, run_suite


def parse_grid(text: str) -> list[float]:
    """``start:stop:step``, stop included when within half a step."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}, expected start:stop:step")
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    n = int(math.floor((stop - start) / step + 0.5))
    return [start + k * step for k in range(n + 1)]


def _add_driver_args(p):
    p.add_argument("--family", default="sqrt_forward",
                   help="sqrt (=sqrt_forward), sqrt_backward, constant")
    p.add_argument("--driver-csv", help="sampled driver, CSV with header t,lambda")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--y-tip", type=float)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--allow-supercritical", action="store_true",
                   help="permit seminorm >= 4 (curves may not exist)")


def _driver(args):
    if args.driver_csv:
        return load_driver_csv(args.driver_csv)
    return make_driver(args.family, args.sigma, args.t_max)


def _opts(args):
    return SolverOptions(tol=args.tol, y_tip=args.y_tip,
                         allow_supercritical=args.allow_supercritical)


def _times(args, d):
    t_max = min(args.t_max, d.T)
    return t_max * np.arange(1, args.samples + 1) / args.samples


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasislit",
                                     description="Loewner quasislits and their bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("trace", help="trace a Loewner curve")
    _add_driver_args(tr)
    tr.add_argument("--out", default="-")
    tr.add_argument("--format", choices=("csv", "json"), default="csv")
    tr.add_argument("--trajectory", action="store_true",
                    help="write the reverse-flow trajectory at t-max instead of the curve")
    tr.add_argument("--y0", type=float, default=1e-3, help="start height for --trajectory")

    bd = sub.add_parser("bounds", help="tabulate the sigma-dependent bounds")
    bd.add_argument("--sigma-grid", type=parse_grid, default=parse_grid("0.5:3.5:0.5"))
    bd.add_argument("--out", default="-")
    bd.add_argument("--format", choices=("csv", "json"), default="csv")

    vf = sub.add_parser("verify", help="run the verification suite")
    vf.add_argument("--config", default="default", help="'default' or a JSON sweep config")
    vf.add_argument("--seed", type=int)
    vf.add_argument("--out", help="JSON report path")
    vf.add_argument("--summary", help="CSV summary path")
    vf.add_argument("--format", choices=("json",), default="json")
    vf.add_argument("--allow-supercritical", action="store_true")
    vf.add_argument("--no-holder", action="store_true", help="skip the Hölder fits")

    pl = sub.add_parser("plot", help="SVG of the curve and its cone")
    _add_driver_args(pl)
    pl.add_argument("--out", required=True)
    pl.add_argument("--format", choices=("svg",), default="svg")
    return parser


def _open_out(path):
    return sys.stdout if path == "-" else open(path, "w", newline="")


def cmd_trace(args) -> int:
    d = _driver(args)
    opts = _opts(args)
    fh = _open_out(args.out)
    try:
        if args.trajectory:
            traj = solve_reverse(d, min(args.t_max, d.T), args.y0, opts)
            if args.format == "json":
                json.dump([{"s": float(s), "x": float(h.real), "y": float(h.imag),
                            "w": float(h.real / h.imag), "logderiv": float(a),
                            "argderiv": float(b)}
                           for s, h, a, b in zip(traj.s, traj.h, traj.log_abs_deriv,
                                                 traj.arg_deriv)], fh)
            else:
                w = csv.writer(fh)
                w.writerow(["s", "x", "y", "w", "logderiv", "argderiv"])
                for row in zip(traj.s, traj.X, traj.Y, traj.W, traj.log_abs_deriv,
                               traj.arg_deriv):
                    w.writerow([repr(float(v)) for v in row])
            return 0
        curve = trace_curve(d, _times(args, d), opts)
        if args.format == "json":
            json.dump(curve.to_records(), fh, indent=1)
        else:
            w = csv.writer(fh)
            w.writerow(["t", "re", "im", "ratio", "err"])
            for r in curve.to_records():
                w.writerow([repr(r[k]) for k in ("t", "re", "im", "ratio", "err")])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_bounds(args) -> int:
    profiles = [bounds.bound_profile(s) for s in args.sigma_grid]
    fh = _open_out(args.out)
    try:
        if args.format == "json":
            json.dump([p.as_dict() for p in profiles], fh, indent=1)
        else:
            w = csv.writer(fh)
            w.writerow(bounds.CSV_COLUMNS)
            for p in profiles:
                w.writerow(bounds.profile_row(p))
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_verify(args) -> int:
    cfg = SweepConfig() if args.config == "default" else SweepConfig.load(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.allow_supercritical:
        cfg = replace(cfg, allow_supercritical=True)
    rep = run_suite(cfg, holder=not args.no_holder)
    if args.out:
        rep.to_json(args.out)
    if args.summary:
        rep.to_csv(args.summary)
    for name, c in sorted(rep.summary().items()):
        print(f"{name:28s} pass={c['pass']:5d} fail={c['fail']:3d} "
              f"inconclusive={c['inconclusive']:4d}")
    print("PASS" if rep.passed else "FAIL")
    return 0 if rep.passed else 1


def render_svg(curve_points: np.ndarray, m: float | None, size: int = 480,
               margin: int = 20) -> str:
    """Curve polyline with the cone ``|Re z| = m Im z`` as two rays from the origin.

    Origin at the bottom centre, equal scale on both axes.
    """
    pts = np.concatenate([[0j], np.asarray(curve_points)])
    half_w = max(np.abs(pts.real).max(), 1e-12)
    height = max(pts.imag.max(), 1e-12)
    if m is not None:
        half_w = max(half_w, m * height)
    k = (size - 2 * margin) / max(2 * half_w, height)
    cx, by = size / 2, size - margin

    def xy(z):
        return cx + k * z.real, by - k * z.imag

    poly = " ".join(f"{x:.3f},{y:.3f}" for x, y in map(xy, pts))
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<line x1="0" y1="{by}" x2="{size}" y2="{by}" stroke="#888" stroke-width="1"/>']
    if m is not None:
        top = by - margin
        for sgn in (-1, 1):
            # ray (sgn*m, 1) in the plane: screen slope dy/dx = -sgn/m
            x2, y2 = cx + sgn * m * top, by - top
            parts.append(f'<line class="cone" x1="{cx}" y1="{by}" x2="{x2:.6f}" y2="{y2:.6f}" '
                         f'stroke="#c33" stroke-dasharray="4 3" stroke-width="1"/>')
    parts.append(f'<polyline class="curve" points="{poly}" fill="none" stroke="#124" '
                 f'stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def cmd_plot(args) -> int:
    d = _driver(args)
    curve = trace_curve(d, _times(args, d), _opts(args))
    sigma = d.nominal_seminorm
    m = bounds.m_sigma(sigma) if 0 < sigma < 4 else (0.0 if sigma == 0 else None)
    if m is not None and not math.isfinite(m):
        m = None
    with open(args.out, "w") as fh:
        fh.write(render_svg(curve.gamma, m))
    return 0


COMMANDS = {"trace": cmd_trace, "bounds": cmd_bounds, "verify": cmd_verify, "plot": cmd_plot}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except OSError as exc:
        print(f"quasislit: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"quasislit: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
