"""2D Nystrom solver for the rigid (Dirichlet) extended obstacle.

The scattered field is sought as an elastic single-layer potential

    u(x) = int_{dD} Gamma(x, y) phi(y) ds(y),

and the first-kind equation S phi = f is collocated at equispaced
parameter nodes.  The kernel splits as

    Gamma(t, tau) = G1(t, tau) * ln(4 sin^2((t - tau)/2)) + G2(t, tau)

with G1, G2 smooth and 2pi-periodic; the logarithmic factor is integrated
with the exact trigonometric (Kussmaul-Martensen) weights, the remainder
with the trapezoid rule, which is spectrally accurate for analytic curves.

The diagonal values of G2 are evaluated from the closed-form limits; the
rank-one part of G1 vanishes on the diagonal, so only the isotropic piece
carries the logarithm there.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla
import scipy.special as sp

from . import greens
from .errors import ConfigError, DomainError, NumericalError
from .medium import ElasticMedium

EULER_GAMMA = np.euler_gamma

INTERIOR_EIGENVALUE_COND = 1e13


class BoundaryCurve:
    """Analytic closed curve p : [0, 2pi) -> R^2 with derivative dp."""

    def __init__(self, name: str, p: Callable, dp: Callable, scale: float = 1.0,
                 center=(0.0, 0.0)):
        self.name = name
        self._p = p
        self._dp = dp
        self.scale = float(scale)
        self.center = np.asarray(center, dtype=float)
        self._polygon = self.points(np.linspace(0, 2 * np.pi, 1024, endpoint=False))
        self._check_regular()

    def points(self, t):
        t = np.asarray(t, dtype=float)
        return self.scale * np.asarray(self._p(t)) .T + self.center

    def tangents(self, t):
        t = np.asarray(t, dtype=float)
        return self.scale * np.asarray(self._dp(t)).T

    def speed(self, t):
        return np.linalg.norm(self.tangents(t), axis=-1)

    def _check_regular(self):
        t = np.linspace(0, 2 * np.pi, 720, endpoint=False)
        if np.any(self.speed(t) <= 1e-12):
            raise ConfigError(f"curve {self.name!r} has a vanishing tangent")
        if self._self_intersects():
            raise ConfigError(f"curve {self.name!r} is not simple")

    def _self_intersects(self) -> bool:
        # segment-pair tests on a moderate polyline; adjacent pairs excluded
        pts = self.points(np.linspace(0, 2 * np.pi, 256, endpoint=False))
        a = pts
        b = np.roll(pts, -1, axis=0)
        m = len(pts)
        for i in range(m):
            d1 = b[i] - a[i]
            js = np.arange(i + 2, m if i > 0 else m - 1)
            if len(js) == 0:
                continue
            d2 = b[js] - a[js]
            diff = a[js] - a[i]
            denom = d1[0] * d2[:, 1] - d1[1] * d2[:, 0]
            ok = np.abs(denom) > 1e-14
            s = np.where(ok, (diff[:, 0] * d2[:, 1] - diff[:, 1] * d2[:, 0]) / np.where(ok, denom, 1), -1)
            u = np.where(ok, (diff[:, 0] * d1[1] - diff[:, 1] * d1[0]) / np.where(ok, denom, 1), -1)
            if np.any((s > 1e-12) & (s < 1 - 1e-12) & (u > 1e-12) & (u < 1 - 1e-12)):
                return True
        return False

    def contains(self, x) -> np.ndarray:
        """Even-odd point-in-curve test against a dense polyline."""
        x = np.asarray(x, dtype=float)
        pts = np.atleast_2d(x)
        a = self._polygon
        b = np.roll(a, -1, axis=0)
        inside = np.zeros(len(pts), dtype=bool)
        for k, q in enumerate(pts):
            cond = (a[:, 1] > q[1]) != (b[:, 1] > q[1])
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = a[:, 0] + (q[1] - a[:, 1]) / (b[:, 1] - a[:, 1]) * (b[:, 0] - a[:, 0])
            inside[k] = np.count_nonzero(cond & (q[0] < xint)) % 2 == 1
        return inside if x.ndim > 1 else inside[0]

    def distance(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = np.linalg.norm(x[..., None, :] - self._polygon, axis=-1)
        return d.min(axis=-1)


def kite(scale: float = 1.0, center=(0.0, 0.0)) -> BoundaryCurve:
    """Kite-shaped curve p(t) = (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)."""
    return BoundaryCurve(
        "kite",
        lambda t: np.array([np.cos(t) + 0.65 * np.cos(2 * t) - 0.65, 1.5 * np.sin(t)]),
        lambda t: np.array([-np.sin(t) - 1.3 * np.sin(2 * t), 1.5 * np.cos(t)]),
        scale,
        center,
    )


def circle(scale: float = 1.0, center=(0.0, 0.0)) -> BoundaryCurve:
    return BoundaryCurve(
        "circle",
        lambda t: np.array([np.cos(t), np.sin(t)]),
        lambda t: np.array([-np.sin(t), np.cos(t)]),
        scale,
        center,
    )


def make_curve(name: str, scale: float = 1.0, center=(0.0, 0.0)) -> BoundaryCurve:
    if name == "kite":
        return kite(scale, center)
    if name == "circle":
        return circle(scale, center)
    raise ConfigError(f"unknown curve {name!r} (choose 'kite' or 'circle')")


@dataclass(frozen=True)
class LayerDensity:
    """Density values (n, 2) at the quadrature nodes plus a role tag."""

    values: np.ndarray
    role: str = ""


def log_weights(n: int, t) -> np.ndarray:
    """Quadrature weights R_j(t) for int ln(4 sin^2((t-tau)/2)) f(tau) dtau.

    Exact for trigonometric polynomials of degree < n/2; t may be any
    array of collocation parameters (nodes or off-node points).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tau = 2 * np.pi * np.arange(n) / n
    diff = t[:, None] - tau[None, :]
    m = np.arange(1, n // 2)
    acc = np.cos(diff[..., None] * m).dot(1.0 / m)
    return -(4 * np.pi / n) * acc - (4 * np.pi / n**2) * np.cos(n * diff / 2)


def _kernel_split(medium: ElasticMedium, rvec, r):
    """(G1, G2_offdiag_part) pieces of the single-layer kernel.

    Returns (psi1_log, psi2_log, psi1, psi2); the smooth part off the
    diagonal is psi_i - psi_i_log * L.
    """
    ks, kp, w2, mu = medium.k_s, medium.k_p, medium.omega**2, medium.mu
    j0s = sp.j0(ks * r)
    j0p = sp.j0(kp * r)
    j1 = (ks * sp.j1(ks * r) - kp * sp.j1(kp * r)) / r
    psi1_log = -j0s / (4 * np.pi * mu) + j1 / (4 * np.pi * w2)
    psi2_log = (ks**2 * j0s - kp**2 * j0p) / (4 * np.pi * w2) - j1 / (2 * np.pi * w2)
    psi1, psi2 = greens._radial_parts_2d(medium, r)
    return psi1_log, psi2_log, psi1, psi2


def _diag_smooth(medium: ElasticMedium, speed):
    """Diagonal limit (psi1_smooth, psi2_smooth) of the split kernel."""
    lam, mu, w2 = medium.lam, medium.mu, medium.omega**2
    ks, kp = medium.k_s, medium.k_p
    dk2 = ks**2 - kp**2
    a_s = np.log(ks / 2) + EULER_GAMMA
    lnj = np.log(speed)
    psi1 = (
        1j * (1 / (4 * mu) - dk2 / (8 * w2))
        - (a_s + lnj) / (2 * np.pi * mu)
        + (dk2 * (lnj + EULER_GAMMA - 0.5) + ks**2 * np.log(ks / 2) - kp**2 * np.log(kp / 2))
        / (4 * np.pi * w2)
    )
    psi2 = (lam + mu) / (4 * np.pi * mu * (lam + 2 * mu)) * np.ones_like(speed)
    return psi1, psi2


def _assemble_rows(medium: ElasticMedium, curve: BoundaryCurve, n: int, t_rows):
    """Nystrom rows for collocation parameters t_rows against the n nodes.

    Returns an array of shape (len(t_rows)*2, n*2) mapping nodal density
    values (with the Jacobian absorbed here) to single-layer values.
    """
    t_rows = np.atleast_1d(np.asarray(t_rows, dtype=float))
    tau = 2 * np.pi * np.arange(n) / n
    x = curve.points(t_rows)
    y = curve.points(tau)
    jac = curve.speed(tau)
    dvec = x[:, None, :] - y[None, :, :]
    r = np.linalg.norm(dvec, axis=-1)
    on_diag = r < 1e-14
    r_safe = np.where(on_diag, 1.0, r)
    rhat = dvec / r_safe[..., None]
    p1l, p2l, p1, p2 = _kernel_split(medium, dvec, r_safe)
    lfac = 4 * np.sin((t_rows[:, None] - tau[None, :]) / 2) ** 2
    lfac = np.where(on_diag, 1.0, lfac)
    logl = np.log(lfac)
    p1s = p1 - p1l * logl
    p2s = p2 - p2l * logl
    if np.any(on_diag):
        d1, d2 = _diag_smooth(medium, curve.speed(t_rows))
        tangent = curve.tangents(t_rows)
        that = tangent / np.linalg.norm(tangent, axis=-1, keepdims=True)
        ii, jj = np.nonzero(on_diag)
        p1s[ii, jj] = d1[ii]
        p2s[ii, jj] = d2[ii]
        p1l[ii, jj] = _diag_log_iso(medium)
        p2l[ii, jj] = 0.0
        rhat[ii, jj] = that[ii]
    eye = np.eye(2)
    outer = rhat[..., :, None] * rhat[..., None, :]
    g1 = p1l[..., None, None] * eye + p2l[..., None, None] * outer
    g2 = p1s[..., None, None] * eye + p2s[..., None, None] * outer
    weights = log_weights(n, t_rows)
    blocks = (weights[..., None, None] * g1 + (2 * np.pi / n) * g2) * jac[None, :, None, None]
    m = len(t_rows)
    return blocks.transpose(0, 2, 1, 3).reshape(2 * m, 2 * n)


def _diag_log_iso(medium: ElasticMedium) -> float:
    lam, mu = medium.lam, medium.mu
    return -(lam + 3 * mu) / (8 * np.pi * mu * (lam + 2 * mu))


class RigidSolver:
    """Assembled first-kind system for one curve, frequency and node count."""

    def __init__(self, medium: ElasticMedium, curve: BoundaryCurve, n: int = 256):
        if n % 2 != 0:
            raise ConfigError(f"node count must be even, got {n}")
        if medium.dim != 2:
            raise ConfigError("the boundary-integral solver is 2D only")
        self.medium = medium
        self.curve = curve
        self.n = n
        self.nodes_t = 2 * np.pi * np.arange(n) / n
        self.nodes = curve.points(self.nodes_t)
        self.jacobian = curve.speed(self.nodes_t)
        self.matrix = _assemble_rows(medium, curve, n, self.nodes_t)
        if not np.all(np.isfinite(self.matrix)):
            raise NumericalError("non-finite entries in the Nystrom matrix")
        self._lu = sla.lu_factor(self.matrix)
        anorm = np.linalg.norm(self.matrix, 1)
        rcond, _ = sla.lapack.zgecon(self._lu[0], anorm)
        self.condition = 1.0 / max(rcond, 1e-300)
        if self.condition > INTERIOR_EIGENVALUE_COND:
            warnings.warn(
                f"single-layer system nearly singular (cond ~ {self.condition:.2e}); "
                f"omega^2 = {medium.omega**2:g} may be close to an interior "
                "Dirichlet eigenvalue",
                stacklevel=2,
            )
        self._source_cache: dict = {}

    # -- solving ---------------------------------------------------------

    def solve_values(self, boundary_values: np.ndarray, role: str = "") -> LayerDensity:
        """Density with single-layer trace equal to boundary_values at nodes."""
        rhs = np.asarray(boundary_values, dtype=complex).reshape(2 * self.n)
        phi = sla.lu_solve(self._lu, rhs).reshape(self.n, 2)
        return LayerDensity(values=phi, role=role)

    def solve_rigid(self, incident_trace, role: str = "plane_wave_rhs") -> LayerDensity:
        """Density of the scattered field for a given incident field functor."""
        vals = np.asarray(incident_trace(self.nodes), dtype=complex).reshape(self.n, 2)
        return self.solve_values(-vals, role=role)

    # -- evaluation ------------------------------------------------------

    def evaluate(self, density: LayerDensity, x, chunk: int = 4096) -> np.ndarray:
        """Single-layer field at exterior points x of shape (..., 2)."""
        x = np.asarray(x, dtype=float)
        pts = x.reshape(-1, 2)
        out = np.empty((len(pts), 2), dtype=complex)
        eff = density.values * (2 * np.pi / self.n * self.jacobian)[:, None]
        for lo in range(0, len(pts), chunk):
            sub = pts[lo : lo + chunk]
            g = greens.gamma_dynamic(self.medium, sub[:, None, :], self.nodes)
            out[lo : lo + chunk] = np.einsum("xkij,kj->xi", g, eff)
        return out.reshape(x.shape)

    def evaluate_boundary(self, density: LayerDensity, t) -> np.ndarray:
        """Single-layer trace at arbitrary boundary parameters t."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        rows = _assemble_rows(self.medium, self.curve, self.n, t)
        vals = rows @ density.values.reshape(2 * self.n)
        return vals.reshape(len(t), 2)

    def farfield(self, density: LayerDensity, xhat) -> np.ndarray:
        """Far field of the single-layer potential over unit directions."""
        xhat = np.asarray(xhat, dtype=float)
        eff = density.values * (2 * np.pi / self.n * self.jacobian)[:, None]
        contrib = greens.gamma_farfield(
            self.medium, eff, self.nodes, xhat[..., None, :]
        )
        return contrib.sum(axis=-2)

    # -- Dirichlet Green tensor ------------------------------------------

    def point_source_densities(self, y) -> np.ndarray:
        """Densities (2, n, 2) cancelling Gamma(., y) e_l on the boundary."""
        y = np.asarray(y, dtype=float)
        key = (round(float(y[0]), 14), round(float(y[1]), 14))
        if key not in self._source_cache:
            if self.curve.contains(y):
                raise DomainError(f"source point {y.tolist()} lies inside the obstacle")
            g = greens.gamma_dynamic(self.medium, self.nodes, y)
            dens = np.stack(
                [self.solve_values(-g[:, :, col], role="point_source_rhs").values
                 for col in range(2)]
            )
            self._source_cache[key] = dens
        return self._source_cache[key]

    def gamma_d(self, x, y) -> np.ndarray:
        """Dirichlet Green tensor Gamma_D(x, y) for x, y outside the obstacle."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.curve.contains(y):
            raise DomainError(f"source point {y.tolist()} lies inside the obstacle")
        if np.any(self.curve.contains(x)):
            raise DomainError("evaluation point lies inside the obstacle")
        dens = self.point_source_densities(y)
        free = greens.gamma_dynamic(self.medium, x, y)
        cols = [self.evaluate(LayerDensity(dens[col]), x) for col in range(2)]
        return free + np.stack(cols, axis=-1)

    def gamma_d_farfield(self, y, xhat) -> np.ndarray:
        """Far field of Gamma_D(., y): shape (..., 2, 2), columns = polarizations."""
        y = np.asarray(y, dtype=float)
        dens = self.point_source_densities(y)
        cols = []
        for col in range(2):
            free = greens.gamma_farfield(self.medium, np.eye(2)[col], y, xhat)
            cols.append(free + self.farfield(LayerDensity(dens[col]), xhat))
        return np.stack(cols, axis=-1)
