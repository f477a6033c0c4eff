"""Combined forward solver for an extended rigid obstacle plus point scatterers.

The total field for an incident wave u_in is

    u(x) = u_D(x) + sum_{k,k'} Gamma_D(x, y^(k)) [Lambda]_{k,k'} u_D(y^(k')),

where u_D is the total field of the obstacle alone and Lambda inverts the
block matrix with diagonal (alpha_k - chi) I and off-diagonal
-Gamma_D(y^(k), y^(k')) built from the Dirichlet Green tensor.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
import scipy.linalg as sla

from . import greens
from .bie import LayerDensity, RigidSolver
from .errors import DomainError, ResonanceError
from .foldy import CONDITION_LIMIT, PointCloud, TauResidual, tau_residual
from .medium import ElasticMedium

# points closer to the boundary than this many shear wavelengths are rejected
MIN_BOUNDARY_CLEARANCE = 0.1


class MultiscaleSolver:
    """Factorized interaction system for obstacle + point cloud."""

    def __init__(self, medium: ElasticMedium, obstacle: Optional[RigidSolver],
                 cloud: PointCloud):
        if obstacle is not None and obstacle.medium is not medium:
            if (obstacle.medium.lam, obstacle.medium.mu, obstacle.medium.omega) != (
                medium.lam, medium.mu, medium.omega,
            ):
                raise DomainError("obstacle solver was built for a different medium")
        self.medium = medium
        self.obstacle = obstacle
        self.cloud = cloud
        self.chi = greens.chi(medium)
        n, dim = cloud.size, medium.dim
        if obstacle is not None and n > 0:
            inside = obstacle.curve.contains(cloud.points)
            if np.any(inside):
                raise DomainError("scatterer points must lie outside the obstacle")
            clearance = obstacle.curve.distance(cloud.points)
            limit = MIN_BOUNDARY_CLEARANCE * medium.wavelength_s
            if np.any(clearance < limit):
                raise DomainError(
                    f"scatterer points closer than {limit:g} to the boundary are "
                    "not resolved by the quadrature"
                )
        m = np.zeros((n * dim, n * dim), dtype=complex)
        for k in range(n):
            sk = slice(k * dim, (k + 1) * dim)
            m[sk, sk] = (cloud.alphas[k] - self.chi) * np.eye(dim)
            for kp in range(n):
                if kp == k:
                    continue
                skp = slice(kp * dim, (kp + 1) * dim)
                m[sk, skp] = -self._gamma_d(cloud.points[k], cloud.points[kp])
        self.inverse_matrix = m
        if n > 0:
            cond = np.linalg.cond(m)
            if not np.isfinite(cond) or cond > CONDITION_LIMIT:
                raise ResonanceError(medium.omega, cond)
            self.condition = cond
            self._lu = sla.lu_factor(m)
        else:
            self.condition = 1.0
            self._lu = None

    def _gamma_d(self, x, y) -> np.ndarray:
        if self.obstacle is None:
            return greens.gamma_dynamic(self.medium, x, y)
        return self.obstacle.gamma_d(x, y)

    def _coefficients(self, incident):
        """Solve for the point coefficients given an incident field functor."""
        n, dim = self.cloud.size, self.medium.dim
        density = None
        if self.obstacle is not None:
            density = self.obstacle.solve_rigid(incident)
        if n == 0:
            return np.zeros((0, dim), dtype=complex), density
        u_d_pts = np.asarray(incident(self.cloud.points), dtype=complex).reshape(n, dim)
        if self.obstacle is not None:
            u_d_pts = u_d_pts + self.obstacle.evaluate(density, self.cloud.points)
        coeff = sla.lu_solve(self._lu, u_d_pts.reshape(n * dim)).reshape(n, dim)
        return coeff, density

    def _combined_density(self, coeff, density):
        """Single layer density of u_D^sc plus all point-source corrections."""
        if self.obstacle is None:
            return None
        total = density.values.copy()
        for k in range(self.cloud.size):
            src = self.obstacle.point_source_densities(self.cloud.points[k])
            total = total + np.einsum("lnj,l->nj", src, coeff[k])
        return LayerDensity(total, role="combined")

    def total_field(self, incident):
        """Evaluator of the total field outside the obstacle and off the points."""
        coeff, density = self._coefficients(incident)
        combined = self._combined_density(coeff, density)
        cloud, medium, obstacle = self.cloud, self.medium, self.obstacle

        def u(x):
            x = np.asarray(x, dtype=float)
            if obstacle is not None and np.any(obstacle.curve.contains(x)):
                raise DomainError("field evaluated inside the obstacle")
            out = np.asarray(incident(x), dtype=complex).copy()
            if combined is not None:
                out += obstacle.evaluate(combined, x)
            if cloud.size:
                g = greens.gamma_dynamic(medium, x[..., None, :], cloud.points)
                out += np.einsum("...kij,kj->...i", g, coeff)
            return out

        return u

    def farfield(self, incident):
        """Far-field evaluator of the scattered field over unit directions."""
        coeff, density = self._coefficients(incident)
        combined = self._combined_density(coeff, density)
        cloud, medium, obstacle = self.cloud, self.medium, self.obstacle

        def u_far(xhat):
            xhat = np.asarray(xhat, dtype=float)
            out = np.zeros(xhat.shape, dtype=complex)
            if combined is not None:
                out += obstacle.farfield(combined, xhat)
            if cloud.size:
                contrib = greens.gamma_farfield(
                    medium, coeff, cloud.points, xhat[..., None, :]
                )
                out += contrib.sum(axis=-2)
            return out

        return u_far

    def impedance_residual(self, incident) -> TauResidual:
        """tau2 - alpha tau1 of the total field at every scatterer point."""
        return tau_residual(self.medium, self.cloud, self.total_field(incident))


def build_multiscale(medium: ElasticMedium, obstacle: Optional[RigidSolver],
                     cloud: PointCloud) -> MultiscaleSolver:
    return MultiscaleSolver(medium, obstacle, cloud)
