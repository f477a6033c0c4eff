"""Discrete far-field operators on an equispaced direction grid.

Channels follow the measurement cases of the imaging protocol:

    PP  u_p-coefficient at d_k for N incident compressional waves d_j,
    SS  u_s-coefficient at d_k for N incident shear waves perp(d_j),
    FF  both output coefficients for both incident types; the 2N x 2N
        matrix is blocked [p-rows; s-rows] x [p-columns; s-columns].

Matrix entries are raw far-field samples; the quadrature weight
2 pi / N_dir that turns the sample matrix into the discrete operator is
applied by the imaging module.
"""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import foldy, greens
from .errors import ConfigError, DomainError
from .medium import ElasticMedium
from .multiscale import MultiscaleSolver

CHANNELS = ("PP", "SS", "FF")


@dataclass(frozen=True)
class DirectionGrid:
    """Equispaced unit directions d_j = (cos, sin)(2 pi j / count)."""

    count: int = 64

    thetas: np.ndarray = field(init=False)
    directions: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.count % 2 != 0 or self.count <= 0:
            raise ConfigError(f"direction count must be even and positive, got {self.count}")
        th = 2 * np.pi * np.arange(self.count) / self.count
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "directions", np.stack([np.cos(th), np.sin(th)], axis=-1))

    @property
    def weight(self) -> float:
        return 2 * np.pi / self.count


@dataclass(frozen=True)
class FarFieldMatrix:
    """Far-field samples for one channel plus the generating parameters."""

    channel: str
    data: np.ndarray
    grid: DirectionGrid
    lam: float
    mu: float
    omega: float
    delta: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ConfigError(f"channel must be one of {CHANNELS}, got {self.channel!r}")
        n = self.grid.count
        want = 2 * n if self.channel == "FF" else n
        if self.data.shape != (want, want):
            raise ConfigError(
                f"channel {self.channel} with {n} directions needs a "
                f"{want}x{want} matrix, got {self.data.shape}"
            )

    def medium(self, dim: int = 2) -> ElasticMedium:
        return ElasticMedium(lam=self.lam, mu=self.mu, omega=self.omega, dim=dim)


def project(g: np.ndarray, directions: np.ndarray, kind: str) -> np.ndarray:
    """P/S projection of a vector field sampled on unit directions."""
    g = np.asarray(g, dtype=complex)
    if kind == "p":
        coeff = np.sum(g * directions, axis=-1)
        return coeff[..., None] * directions
    if kind == "s":
        perp = greens.perp(directions)
        coeff = np.sum(g * perp, axis=-1)
        return coeff[..., None] * perp
    raise DomainError(f"projection kind must be 'p' or 's', got {kind!r}")


def foldy_forward(medium: ElasticMedium, cloud: foldy.PointCloud) -> Callable:
    """Forward map (kind, direction) -> far-field functor for a point cloud."""
    interaction = foldy.build_interaction(medium, cloud)

    def forward(kind: str, d: np.ndarray):
        incident = lambda x: greens.plane_wave(medium, kind, d, x)
        return foldy.farfield_points(medium, cloud, incident, interaction=interaction)

    return forward


def multiscale_forward(solver: MultiscaleSolver) -> Callable:
    def forward(kind: str, d: np.ndarray):
        incident = lambda x: greens.plane_wave(solver.medium, kind, d, x)
        return solver.farfield(incident)

    return forward


def assemble_operator(forward: Callable, grid: DirectionGrid, channel: str,
                      medium: ElasticMedium, max_workers: int = 1) -> FarFieldMatrix:
    """Sample the far-field operator column by column.

    forward(kind, d) must return a functor evaluating the scattered far
    field on arrays of unit directions.  Column assembly is independent
    per incident wave and can be threaded.
    """
    if channel not in CHANNELS:
        raise ConfigError(f"channel must be one of {CHANNELS}, got {channel!r}")
    n = grid.count
    dirs = grid.directions
    perp = greens.perp(dirs)

    def column(kind: str, j: int) -> np.ndarray:
        ff = forward(kind, dirs[j])(dirs)
        p_coeff = np.sum(ff * dirs, axis=-1)
        s_coeff = np.sum(ff * perp, axis=-1)
        return p_coeff, s_coeff

    jobs = []
    if channel in ("PP", "FF"):
        jobs += [("p", j) for j in range(n)]
    if channel in ("SS", "FF"):
        jobs += [("s", j) for j in range(n)]

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(lambda kj: column(*kj), jobs))
    else:
        results = [column(*kj) for kj in jobs]

    if channel == "PP":
        data = np.stack([p for p, _ in results], axis=-1)
    elif channel == "SS":
        data = np.stack([s for _, s in results], axis=-1)
    else:
        data = np.zeros((2 * n, 2 * n), dtype=complex)
        for (kind, j), (p_coeff, s_coeff) in zip(jobs, results):
            col = j if kind == "p" else n + j
            data[:n, col] = p_coeff
            data[n:, col] = s_coeff
    return FarFieldMatrix(
        channel=channel, data=data, grid=grid,
        lam=medium.lam, mu=medium.mu, omega=medium.omega,
    )


def add_noise(matrix: FarFieldMatrix, delta: float, seed: int) -> FarFieldMatrix:
    """Entrywise multiplication by (1 + delta xi), xi iid uniform on [-1, 1]."""
    if delta < 0:
        raise DomainError(f"noise level must be nonnegative, got {delta}")
    rng = np.random.default_rng(seed)
    xi = rng.uniform(-1.0, 1.0, size=matrix.data.shape)
    return replace(matrix, data=matrix.data * (1 + delta * xi), delta=delta, seed=seed)


# -- CSV serialization ----------------------------------------------------

def _fmt(x: float) -> str:
    return format(x, ".17g")


def save_csv(matrix: FarFieldMatrix, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(dumps_csv(matrix))


def _header_line(matrix: FarFieldMatrix) -> str:
    seed = "" if matrix.seed is None else str(matrix.seed)
    return (
        f"channel={matrix.channel},omega={_fmt(matrix.omega)},lam={_fmt(matrix.lam)},"
        f"mu={_fmt(matrix.mu)},n_dir={matrix.grid.count},delta={_fmt(matrix.delta)},"
        f"seed={seed}"
    )


def load_csv(path) -> FarFieldMatrix:
    with open(path, "r", encoding="ascii") as f:
        header = f.readline().strip()
        meta = {}
        for item in header.split(","):
            if "=" not in item:
                raise ConfigError(f"{path}: line 1: malformed header entry {item!r}")
            key, val = item.split("=", 1)
            meta[key] = val
        try:
            channel = meta["channel"]
            grid = DirectionGrid(int(meta["n_dir"]))
            lam, mu, omega = float(meta["lam"]), float(meta["mu"]), float(meta["omega"])
            delta = float(meta["delta"])
            seed = int(meta["seed"]) if meta.get("seed") else None
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"{path}: line 1: bad header ({exc})") from exc
        size = 2 * grid.count if channel == "FF" else grid.count
        data = np.zeros((size, size), dtype=complex)
        seen = 0
        for ln, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            want = 5 if channel == "FF" else 4
            if len(parts) != want:
                raise ConfigError(f"{path}: line {ln}: expected {want} fields, got {len(parts)}")
            try:
                k, j = int(parts[0]), int(parts[1])
                re, im = float(parts[-2]), float(parts[-1])
            except ValueError as exc:
                raise ConfigError(f"{path}: line {ln}: {exc}") from exc
            if not (0 <= k < size and 0 <= j < size):
                raise ConfigError(f"{path}: line {ln}: index ({k},{j}) out of range")
            data[k, j] = complex(re, im)
            seen += 1
        if seen != size * size:
            raise ConfigError(f"{path}: expected {size*size} data rows, found {seen}")
    return FarFieldMatrix(channel=channel, data=data, grid=grid,
                          lam=lam, mu=mu, omega=omega, delta=delta, seed=seed)


def dumps_csv(matrix: FarFieldMatrix) -> str:
    buf = io.StringIO()
    buf.write(_header_line(matrix) + "\n")
    n = matrix.data.shape[0]
    half = matrix.grid.count
    for k in range(n):
        for j in range(n):
            v = matrix.data[k, j]
            if matrix.channel == "FF":
                tag = "p" if k < half else "s"
                buf.write(f"{k},{j},{tag},{_fmt(v.real)},{_fmt(v.imag)}\n")
            else:
                buf.write(f"{k},{j},{_fmt(v.real)},{_fmt(v.imag)}\n")
    return buf.getvalue()
