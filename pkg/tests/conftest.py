import numpy as np
import pytest

from elastoscat import bie, foldy, multiscale
from elastoscat.medium import ElasticMedium


@pytest.fixture(scope="session")
def medium2():
    return ElasticMedium(lam=2.0, mu=1.0, omega=8.0, dim=2)


@pytest.fixture(scope="session")
def medium3():
    return ElasticMedium(lam=2.0, mu=1.0, omega=8.0, dim=3)


@pytest.fixture(scope="session")
def kite_curve():
    return bie.kite()


@pytest.fixture(scope="session")
def kite_solver(medium2, kite_curve):
    return bie.RigidSolver(medium2, kite_curve, n=256)


@pytest.fixture(scope="session")
def example1_cloud():
    pts = [[2.0, -2.0 + 0.8 * k] for k in range(6)]
    return foldy.PointCloud(points=pts, alphas=[0.1] * 6)


@pytest.fixture(scope="session")
def example1_solver(medium2, kite_solver, example1_cloud):
    return multiscale.build_multiscale(medium2, kite_solver, example1_cloud)


def navier_residual(medium, field, x, h=1e-3):
    """Relative FD residual ||(Delta* + w^2) u|| / (w^2 ||u||), 2nd order."""
    dim = medium.dim
    x = np.asarray(x, dtype=float)
    u0 = np.asarray(field(x), dtype=complex)
    lap = np.zeros(dim, dtype=complex)
    graddiv = np.zeros(dim, dtype=complex)
    eye = np.eye(dim)
    for d in range(dim):
        up = np.asarray(field(x + h * eye[d]), dtype=complex)
        um = np.asarray(field(x - h * eye[d]), dtype=complex)
        lap += (up - 2 * u0 + um) / h**2
        graddiv[d] += (up[d] - 2 * u0[d] + um[d]) / h**2
    for i in range(dim):
        for j in range(dim):
            if i == j:
                continue
            upp = field(x + h * eye[i] + h * eye[j])
            upm = field(x + h * eye[i] - h * eye[j])
            ump = field(x - h * eye[i] + h * eye[j])
            umm = field(x - h * eye[i] - h * eye[j])
            graddiv[i] += (upp[j] - upm[j] - ump[j] + umm[j]) / (4 * h**2)
    res = medium.mu * lap + (medium.lam + medium.mu) * graddiv + medium.omega**2 * u0
    return np.linalg.norm(res) / (medium.omega**2 * np.linalg.norm(u0))
