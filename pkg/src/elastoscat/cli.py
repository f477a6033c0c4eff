"""Command line interface.

    elastoscat forward  --config S.yaml --points pts.csv --out DIR
    elastoscat farfield --config S.yaml --out DIR [--channel ff] [--noise 0.01] [--seed 7]
    elastoscat image    --config S.yaml --data farfield.csv --out DIR
    elastoscat scenario validate --config S.yaml

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import farfield, imaging
from .errors import ConfigError, ElastoscatError, NumericalError
from .scenario import Scenario, assemble_farfield, load_scenario


def _fmt(x: float) -> str:
    return format(x, ".17g")


def cmd_forward(args) -> int:
    scenario = load_scenario(args.config)
    medium = scenario.medium()
    solver = scenario.build_solver()
    incident = scenario.incident_field(medium)
    total = solver.total_field(incident)

    pts, bad_lines = _read_points(args.points)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "field.csv"
    curve = solver.obstacle.curve if solver.obstacle is not None else None
    with open(out_path, "w", encoding="ascii") as f:
        f.write("x1,x2,re_u1,im_u1,re_u2,im_u2\n")
        for x in pts:
            if curve is not None and curve.contains(x):
                f.write(f"# error: point ({_fmt(x[0])}, {_fmt(x[1])}) inside obstacle\n")
                continue
            u = total(x)
            f.write(
                f"{_fmt(x[0])},{_fmt(x[1])},{_fmt(u[0].real)},{_fmt(u[0].imag)},"
                f"{_fmt(u[1].real)},{_fmt(u[1].imag)}\n"
            )
    for ln in bad_lines:
        print(f"warning: skipped malformed line {ln} in {args.points}", file=sys.stderr)
    print(out_path)
    return 0


def _read_points(path):
    pts, bad = [], []
    try:
        with open(path, "r", encoding="ascii") as f:
            for ln, line in enumerate(f, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split(",")
                try:
                    pts.append((float(parts[0]), float(parts[1])))
                except (ValueError, IndexError):
                    if ln == 1:
                        continue  # header
                    bad.append(ln)
    except FileNotFoundError as exc:
        raise ConfigError(f"points file not found: {path}") from exc
    return np.array(pts).reshape(len(pts), 2), bad


def cmd_farfield(args) -> int:
    scenario = load_scenario(args.config)
    channel = args.channel.upper() if args.channel else None
    matrix = assemble_farfield(
        scenario, channel=channel, noise=args.noise, seed=args.seed,
        threads=args.threads,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"farfield_{matrix.channel.lower()}.csv"
    farfield.save_csv(matrix, out_path)
    print(out_path)
    return 0


def cmd_image(args) -> int:
    scenario = load_scenario(args.config)
    matrix = farfield.load_csv(args.data)
    medium = scenario.medium()
    if (matrix.lam, matrix.mu, matrix.omega) != (medium.lam, medium.mu, medium.omega):
        raise ConfigError(
            "far-field file medium parameters do not match the scenario"
        )
    op = imaging.build_fsharp(matrix)
    grid = imaging.indicator(
        op, medium, bounds=scenario.grid_bounds, spacing=scenario.grid_spacing,
        a=scenario.polarization(),
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "indicator.csv"
    pgm_path = out_dir / "indicator.pgm"
    imaging.save_indicator_csv(grid, csv_path)
    imaging.save_indicator_pgm(grid, pgm_path, out_dir / "indicator_scale.txt")

    n_peaks = args.peaks if args.peaks else max(10, scenario.cloud().size)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        peaks, values = imaging.locate_points(grid, n_peaks)
    manifest = {
        "channel": matrix.channel,
        "omega": matrix.omega,
        "lam": matrix.lam,
        "mu": matrix.mu,
        "n_dir": matrix.grid.count,
        "delta": matrix.delta,
        "seed": matrix.seed,
        "grid_bounds": list(scenario.grid_bounds),
        "grid_spacing": scenario.grid_spacing,
        "polarization_beta": scenario.polarization_beta,
        "cutoff_index": op.cutoff_index,
        "eigenvalue_count": int(len(op.eigenvalues)),
        "peaks": [
            {"x": float(p[0]), "y": float(p[1]), "w": float(v)}
            for p, v in zip(peaks, values)
        ],
    }
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w", encoding="ascii") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    digest = hashlib.sha256(manifest_path.read_bytes()).hexdigest()
    print(f"{manifest_path} sha256={digest}")
    return 0


def cmd_scenario(args) -> int:
    if args.action != "validate":
        raise ConfigError(f"unknown scenario action {args.action!r}")
    scenario = load_scenario(args.config)
    cloud = scenario.cloud()
    obstacle = scenario.obstacle_params
    print(
        f"ok: medium(lam={scenario.medium_params['lam']:g}, "
        f"mu={scenario.medium_params['mu']:g}, omega={scenario.medium_params['omega']:g}), "
        f"obstacle={obstacle['curve'] if obstacle else 'none'}, "
        f"points={cloud.size}, channel={scenario.channel}, "
        f"n_dir={scenario.n_dir}, noise={scenario.noise:g}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elastoscat",
        description="Elastic scattering from point-like and extended obstacles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--config", required=True, help="scenario YAML file")
        if out:
            p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override data seed")
        p.add_argument("--threads", type=int, default=1, help="worker cap")

    p_fwd = sub.add_parser("forward", help="evaluate the total field at points")
    common(p_fwd)
    p_fwd.add_argument("--points", required=True, help="CSV file of x1,x2 rows")
    p_fwd.set_defaults(func=cmd_forward)

    p_ff = sub.add_parser("farfield", help="assemble the far-field data matrix")
    common(p_ff)
    p_ff.add_argument("--channel", choices=["pp", "ss", "ff"], default=None)
    p_ff.add_argument("--noise", type=float, default=None, help="override noise level")
    p_ff.set_defaults(func=cmd_farfield)

    p_img = sub.add_parser("image", help="factorization-method imaging")
    common(p_img)
    p_img.add_argument("--data", required=True, help="far-field CSV file")
    p_img.add_argument("--peaks", type=int, default=None, help="peaks in the manifest")
    p_img.set_defaults(func=cmd_image)

    p_sc = sub.add_parser("scenario", help="scenario utilities")
    p_sc.add_argument("action", choices=["validate"])
    common(p_sc, out=False)
    p_sc.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ElastoscatError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
