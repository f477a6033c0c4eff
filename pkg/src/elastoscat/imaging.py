"""Factorization-method inversion from a sampled far-field operator.

From the data matrix F the positive self-adjoint combination

    F_# = |Re F| + |Im F|,    Re F = (F + F*)/2,  Im F = (F - F*)/(2i),

is formed spectrally, and a sampling point y is scored by the reciprocal
Picard series over the eigensystem (zeta_n, g_n) of F_#,

    W(y) = [ sum_n |(g_n, t_y)|^2 / zeta_n ]^{-1},

with the channel test function t_y given by the far-field pattern of a
point source at y (its P or S projection for the one-wave channels).
W is large for y inside the scatterer configuration and small outside.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import greens
from .errors import ConfigError, NumericalError
from .farfield import FarFieldMatrix, DirectionGrid
from .medium import ElasticMedium

# eigenvalues at or below delta^2 * zeta_1 (and exact zeros) are dropped;
# the near-zero tail must stay: it is what makes the Picard series blow up
# at sampling points outside the scatterers



def _spectral_abs(h: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.abs(vals)) @ vecs.conj().T


@dataclass(frozen=True)
class SelfadjointOperator:
    """Eigensystem of F_# together with the data that produced it."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    channel: str
    grid: DirectionGrid
    lam: float
    mu: float
    omega: float
    delta: float
    cutoff_index: int = field(init=False)

    def __post_init__(self):
        zeta1 = self.eigenvalues[0] if len(self.eigenvalues) else 0.0
        floor = max(self.delta**2 * zeta1, 0.0)
        keep = int(np.count_nonzero(self.eigenvalues > floor))
        object.__setattr__(self, "cutoff_index", keep)
        if keep == 0:
            raise NumericalError(
                "all eigenvalues fall below the spectral cutoff; the far-field "
                "data carries no usable information"
            )


def build_fsharp(matrix: FarFieldMatrix) -> SelfadjointOperator:
    """Spectral assembly of F_# from a far-field sample matrix.

    The sample matrix is scaled by the quadrature weight 2 pi / N_dir so
    that it represents the discrete far-field operator.
    """
    a = matrix.data * matrix.grid.weight
    if a.shape[0] != a.shape[1]:
        raise ConfigError("far-field matrix must be square")
    re = (a + a.conj().T) / 2
    im = (a - a.conj().T) / 2j
    fsharp = _spectral_abs(re) + _spectral_abs(im)
    try:
        vals, vecs = np.linalg.eigh(fsharp)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition of F_# failed: {exc}") from exc
    order = np.argsort(vals)[::-1]
    return SelfadjointOperator(
        matrix=fsharp,
        eigenvalues=np.maximum(vals[order], 0.0),
        eigenvectors=vecs[:, order],
        channel=matrix.channel,
        grid=matrix.grid,
        lam=matrix.lam,
        mu=matrix.mu,
        omega=matrix.omega,
        delta=matrix.delta,
    )


def test_vectors(op: SelfadjointOperator, medium: ElasticMedium, points: np.ndarray,
                 a: np.ndarray) -> np.ndarray:
    """Channel test functions t_y sampled on the grid, one column per point."""
    dirs = op.grid.directions
    perp = greens.perp(dirs)
    pts = np.atleast_2d(points)
    phase_p = np.exp(-1j * medium.k_p * dirs @ pts.T)
    phase_s = np.exp(-1j * medium.k_s * dirs @ pts.T)
    p_coeff = (dirs @ a)[:, None] * phase_p
    s_coeff = (perp @ a)[:, None] * phase_s
    if op.channel == "PP":
        return p_coeff
    if op.channel == "SS":
        return s_coeff
    return np.concatenate([p_coeff, s_coeff], axis=0)


@dataclass(frozen=True)
class IndicatorGrid:
    """Sampled indicator W on a rectangle [x0, x1] x [y0, y1]."""

    bounds: tuple
    spacing: float
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # shape (len(ys), len(xs)), values[iy, ix] = W(xs[ix], ys[iy])
    polarization: np.ndarray
    channel: str
    cutoff_index: int


def indicator(op: SelfadjointOperator, medium: ElasticMedium, bounds=(-4.0, 4.0, -4.0, 4.0),
              spacing: float = 0.05, a=(1.0, 0.0)) -> IndicatorGrid:
    """Evaluate the reciprocal Picard series on a rectangular sampling grid."""
    a = np.asarray(a, dtype=float)
    x0, x1, y0, y1 = bounds
    xs = np.arange(x0, x1 + spacing / 2, spacing)
    ys = np.arange(y0, y1 + spacing / 2, spacing)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=-1)
    w = picard_values(op, medium, pts, a)
    return IndicatorGrid(
        bounds=tuple(bounds), spacing=spacing, xs=xs, ys=ys,
        values=w.reshape(len(ys), len(xs)),
        polarization=a, channel=op.channel, cutoff_index=op.cutoff_index,
    )


def picard_values(op: SelfadjointOperator, medium: ElasticMedium, points, a) -> np.ndarray:
    """W at arbitrary sampling points (vectorized over points)."""
    a = np.asarray(a, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    t = test_vectors(op, medium, pts, a)
    keep = op.cutoff_index
    vecs = op.eigenvectors[:, :keep]
    zeta = op.eigenvalues[:keep]
    proj = vecs.conj().T @ t
    series = (np.abs(proj) ** 2 / zeta[:, None]).sum(axis=0) * op.grid.weight
    with np.errstate(divide="ignore"):
        w = 1.0 / series
    return np.where(np.isfinite(w), w, 0.0)


def locate_points(grid: IndicatorGrid, expected_count: int):
    """Top local maxima of W with sub-cell quadratic refinement.

    Returns (points, values); emits a warning and returns what was found
    when fewer than expected_count maxima exist.
    """
    v = grid.values
    interior = v[1:-1, 1:-1]
    neighbors = [
        v[:-2, 1:-1], v[2:, 1:-1], v[1:-1, :-2], v[1:-1, 2:],
        v[:-2, :-2], v[:-2, 2:], v[2:, :-2], v[2:, 2:],
    ]
    is_max = np.ones_like(interior, dtype=bool)
    for nb in neighbors:
        is_max &= interior >= nb
    iy, ix = np.nonzero(is_max)
    iy, ix = iy + 1, ix + 1
    vals = v[iy, ix]
    order = np.argsort(vals)[::-1]
    iy, ix, vals = iy[order], ix[order], vals[order]
    if len(vals) < expected_count:
        warnings.warn(
            f"requested {expected_count} peaks but found only {len(vals)} local maxima",
            stacklevel=2,
        )
    take = min(expected_count, len(vals))
    pts = []
    for m in range(take):
        px = grid.xs[ix[m]] + _parabolic_offset(v[iy[m], ix[m] - 1], v[iy[m], ix[m]],
                                                v[iy[m], ix[m] + 1]) * grid.spacing
        py = grid.ys[iy[m]] + _parabolic_offset(v[iy[m] - 1, ix[m]], v[iy[m], ix[m]],
                                                v[iy[m] + 1, ix[m]]) * grid.spacing
        pts.append((px, py))
    return np.array(pts).reshape(take, 2), vals[:take]


def _parabolic_offset(left: float, mid: float, right: float) -> float:
    denom = left - 2 * mid + right
    if denom == 0:
        return 0.0
    off = 0.5 * (left - right) / denom
    return float(np.clip(off, -0.5, 0.5))


# -- serialization ---------------------------------------------------------

def save_indicator_csv(grid: IndicatorGrid, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write("x,y,w\n")
        for iy, yv in enumerate(grid.ys):
            for ix, xv in enumerate(grid.xs):
                f.write(
                    f"{format(xv, '.17g')},{format(yv, '.17g')},"
                    f"{format(grid.values[iy, ix], '.17g')}\n"
                )


def save_indicator_pgm(grid: IndicatorGrid, path, sidecar_path: Optional[str] = None) -> None:
    """16-bit binary PGM, rows top to bottom (decreasing y), min-max normalized."""
    v = grid.values
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo if hi > lo else 1.0
    pix = np.round((v - lo) / span * 65535).astype(">u2")
    pix = pix[::-1, :]  # top row = largest y
    ny, nx = pix.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{nx} {ny}\n65535\n".encode("ascii"))
        f.write(pix.tobytes())
    if sidecar_path is not None:
        with open(sidecar_path, "w", encoding="ascii") as f:
            f.write(f"w_min={format(lo, '.17g')}\nw_max={format(hi, '.17g')}\n")
