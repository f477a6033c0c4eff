"""Scenario configuration: one YAML file describes medium, obstacle,
point scatterers, incident wave, sampling grid and data channel.

Schema (spec_version 1)::

    spec_version: 1
    medium:    {lam: 2.0, mu: 1.0, omega: 8.0}
    obstacle:  {curve: kite, scale: 1.0, center: [0, 0], nodes: 256}   # or curve: none
    points:    [{position: [2.0, -2.0], alpha: 0.1}, ...]
    points_random:                       # alternative to points
      count: 20
      alpha: 0.1
      seed: 5
      regions: [[-3, -2, -3, 3], [2, 3, -3, 3]]
    incident:  {kind: p, direction_deg: 0.0}
    grid:      {bounds: [-4, 4, -4, 4], spacing: 0.05}
    data:      {channel: ff, n_dir: 64, noise: 0.01, seed: 11}
    polarization_beta: 0.0
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from . import bie, farfield, foldy, greens, multiscale
from .errors import ConfigError, DomainError
from .medium import ElasticMedium

SPEC_VERSION = 1


@dataclass
class Scenario:
    medium_params: dict
    obstacle_params: Optional[dict]
    point_list: np.ndarray
    alpha_list: np.ndarray
    incident_kind: str
    incident_direction: np.ndarray
    grid_bounds: tuple
    grid_spacing: float
    channel: str
    n_dir: int
    noise: float
    seed: int
    polarization_beta: float
    source: dict = field(default_factory=dict)

    # -- builders ---------------------------------------------------------

    def medium(self) -> ElasticMedium:
        return ElasticMedium(dim=2, **self.medium_params)

    def curve(self) -> Optional[bie.BoundaryCurve]:
        if self.obstacle_params is None:
            return None
        p = self.obstacle_params
        return bie.make_curve(p["curve"], p.get("scale", 1.0), p.get("center", (0.0, 0.0)))

    def obstacle_nodes(self) -> int:
        return 256 if self.obstacle_params is None else int(self.obstacle_params.get("nodes", 256))

    def cloud(self) -> foldy.PointCloud:
        return foldy.PointCloud(points=self.point_list, alphas=self.alpha_list)

    def polarization(self) -> np.ndarray:
        b = self.polarization_beta
        return np.array([np.cos(b), np.sin(b)])

    def build_solver(self) -> multiscale.MultiscaleSolver:
        medium = self.medium()
        curve = self.curve()
        obstacle = None
        if curve is not None:
            obstacle = bie.RigidSolver(medium, curve, n=self.obstacle_nodes())
        return multiscale.build_multiscale(medium, obstacle, self.cloud())

    def incident_field(self, medium: ElasticMedium):
        kind, d = self.incident_kind, self.incident_direction
        return lambda x: greens.plane_wave(medium, kind, d, x)

    def validate(self) -> None:
        """Run every cross-module precondition; raises ConfigError on failure."""
        try:
            medium = self.medium()
            cloud = self.cloud()
            curve = self.curve()
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        if curve is not None and cloud.size:
            if np.any(curve.contains(cloud.points)):
                raise ConfigError("scatterer points must lie outside the obstacle")
            limit = multiscale.MIN_BOUNDARY_CLEARANCE * medium.wavelength_s
            if np.any(curve.distance(cloud.points) < limit):
                raise ConfigError(
                    f"scatterer points must keep a clearance of {limit:g} from the boundary"
                )
        if self.channel not in ("PP", "SS", "FF"):
            raise ConfigError(f"unknown data channel {self.channel!r}")
        if self.n_dir % 2 != 0 or self.n_dir <= 0:
            raise ConfigError("data.n_dir must be a positive even integer")
        if self.noise < 0:
            raise ConfigError("data.noise must be nonnegative")
        if self.grid_spacing <= 0:
            raise ConfigError("grid.spacing must be positive")
        x0, x1, y0, y1 = self.grid_bounds
        if not (x1 > x0 and y1 > y0):
            raise ConfigError("grid.bounds must be (x0, x1, y0, y1) with x1 > x0, y1 > y0")


def _sample_regions(count: int, regions, seed: int, alpha: complex) -> tuple:
    rng = np.random.default_rng(seed)
    regions = [tuple(map(float, r)) for r in regions]
    areas = np.array([(r[1] - r[0]) * (r[3] - r[2]) for r in regions])
    if np.any(areas <= 0):
        raise ConfigError("points_random.regions must have positive area")
    probs = areas / areas.sum()
    pts = np.empty((count, 2))
    which = rng.choice(len(regions), size=count, p=probs)
    for i, ri in enumerate(which):
        x0, x1, y0, y1 = regions[ri]
        pts[i] = (rng.uniform(x0, x1), rng.uniform(y0, y1))
    return pts, np.full(count, alpha, dtype=complex)


def load_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"scenario file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: scenario must be a mapping")
    return scenario_from_dict(raw)


def scenario_from_dict(raw: dict) -> Scenario:
    version = raw.get("spec_version")
    if version != SPEC_VERSION:
        raise ConfigError(f"unsupported spec_version {version!r} (expected {SPEC_VERSION})")

    med = raw.get("medium")
    if not isinstance(med, dict) or not {"lam", "mu", "omega"} <= set(med):
        raise ConfigError("medium must define lam, mu and omega")
    medium_params = {k: float(med[k]) for k in ("lam", "mu", "omega")}

    obstacle = raw.get("obstacle")
    if obstacle is not None:
        if not isinstance(obstacle, dict) or "curve" not in obstacle:
            raise ConfigError("obstacle must define a curve name")
        if obstacle["curve"] in (None, "none"):
            obstacle = None
        elif obstacle["curve"] not in ("kite", "circle"):
            raise ConfigError(f"unknown obstacle curve {obstacle['curve']!r}")

    if "points" in raw and "points_random" in raw:
        raise ConfigError("give either points or points_random, not both")
    if "points_random" in raw:
        pr = raw["points_random"]
        try:
            pts, alphas = _sample_regions(
                int(pr["count"]), pr["regions"], int(pr.get("seed", 0)),
                complex(pr.get("alpha", 0.1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad points_random block: {exc}") from exc
    else:
        entries = raw.get("points", []) or []
        pts = np.array([e["position"] for e in entries], dtype=float).reshape(len(entries), 2)
        alphas = np.array([complex(e.get("alpha", 0.1)) for e in entries])

    inc = raw.get("incident", {}) or {}
    kind = str(inc.get("kind", "p"))
    if kind not in ("p", "s"):
        raise ConfigError(f"incident.kind must be 'p' or 's', got {kind!r}")
    deg = float(inc.get("direction_deg", 0.0))
    direction = np.array([np.cos(np.radians(deg)), np.sin(np.radians(deg))])

    grid = raw.get("grid", {}) or {}
    bounds = tuple(float(v) for v in grid.get("bounds", (-4.0, 4.0, -4.0, 4.0)))
    if len(bounds) != 4:
        raise ConfigError("grid.bounds must have four entries (x0, x1, y0, y1)")
    spacing = float(grid.get("spacing", 0.05))

    data = raw.get("data", {}) or {}
    channel = str(data.get("channel", "ff")).upper()
    n_dir = int(data.get("n_dir", 64))
    noise = float(data.get("noise", 0.0))
    seed = int(data.get("seed", 0))

    scenario = Scenario(
        medium_params=medium_params,
        obstacle_params=obstacle,
        point_list=pts,
        alpha_list=alphas,
        incident_kind=kind,
        incident_direction=direction,
        grid_bounds=bounds,
        grid_spacing=spacing,
        channel=channel,
        n_dir=n_dir,
        noise=noise,
        seed=seed,
        polarization_beta=float(raw.get("polarization_beta", 0.0)),
        source=raw,
    )
    scenario.validate()
    return scenario


def assemble_farfield(scenario: Scenario, *, channel: Optional[str] = None,
                      noise: Optional[float] = None, seed: Optional[int] = None,
                      threads: int = 1) -> farfield.FarFieldMatrix:
    """Forward-solve the scenario and sample its far-field operator."""
    medium = scenario.medium()
    solver = scenario.build_solver()
    grid = farfield.DirectionGrid(scenario.n_dir)
    chan = (channel or scenario.channel).upper()
    matrix = farfield.assemble_operator(
        farfield.multiscale_forward(solver), grid, chan, medium, max_workers=threads
    )
    delta = scenario.noise if noise is None else noise
    used_seed = scenario.seed if seed is None else seed
    if delta > 0:
        matrix = farfield.add_noise(matrix, delta, used_seed)
    return matrix
