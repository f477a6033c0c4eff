"""Free-space kernels for the time-harmonic Navier equation.

Everything here is a closed-form evaluation: the outgoing fundamental
tensor (Kupradze tensor), its static limit and the inverse of that limit,
the renormalization constant that appears in the small-argument expansion,
far-field kernels and incident plane waves.

The Kupradze tensor is assembled from the scalar Helmholtz kernels
phi_k at the shear and compressional wavenumbers,

    Gamma(x) = (1/mu) phi_{ks}(|x|) I + (1/omega^2) hess( phi_{ks} - phi_{kp} )(x),

with the Hessian of a radial function f given analytically by

    hess f = (f'(r)/r) I + (f''(r) - f'(r)/r) rhat rhat^T.

No numerical differentiation is used anywhere in this module.

Far-field convention
--------------------
The far field of x -> Gamma(x, y) a is *defined* to be

    ff(xhat) = exp(-i kp xhat.y) (xhat.a) xhat  +  exp(-i ks xhat.y) (a.perp(xhat)) perp(xhat)

(2D; in 3D the shear term is xhat x (a x xhat)).  The physical asymptotics
carry an extra channel constant,

    Gamma(x, y) a ~ c_p e^{i kp |x|} |x|^{-(d-1)/2} ff_p + c_s e^{i ks |x|} |x|^{-(d-1)/2} ff_s,

with c_alpha = farfield_amplitude(medium, alpha).  All far-field operators
in this package use the stripped convention above, on both the data side
and the test-function side.
"""

from __future__ import annotations

import numpy as np
import scipy.special as sp

from .errors import DegenerateRadiusError, DomainError, SingularityError
from .medium import ElasticMedium

EULER_GAMMA = np.euler_gamma


def hankel1(order: int, x):
    """Hankel function of the first kind H^(1)_order(x) for real x > 0.

    Only orders 0 and 1 are needed by the elastic kernels.
    """
    if order not in (0, 1):
        raise DomainError(f"hankel1 supports orders 0 and 1, got {order}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("hankel1 requires a positive real argument")
    return sp.hankel1(order, x)


def _as_points(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim:
        raise DomainError(f"expected points in R^{dim}, got shape {x.shape}")
    return x


def phi(medium: ElasticMedium, k: float, x, y):
    """Outgoing scalar Helmholtz kernel phi_k(x - y).

    2D: (i/4) H0^(1)(k|x-y|);  3D: exp(ik|x-y|) / (4 pi |x-y|).
    """
    x = _as_points(x, medium.dim)
    y = _as_points(y, medium.dim)
    r = np.linalg.norm(x - y, axis=-1)
    if np.any(r == 0):
        raise SingularityError("phi evaluated at x == y")
    if medium.dim == 2:
        return 0.25j * sp.hankel1(0, k * r)
    return np.exp(1j * k * r) / (4 * np.pi * r)


def _radial_parts_2d(medium: ElasticMedium, r):
    """Coefficients (psi1, psi2) with Gamma = psi1 I + psi2 rhat rhat^T in 2D."""
    ks, kp, w2 = medium.k_s, medium.k_p, medium.omega**2
    h0s = sp.hankel1(0, ks * r)
    h0p = sp.hankel1(0, kp * r)
    h1s = sp.hankel1(1, ks * r)
    h1p = sp.hankel1(1, kp * r)
    diff1 = (ks * h1s - kp * h1p) / r
    psi1 = 0.25j * h0s / medium.mu - 0.25j * diff1 / w2
    psi2 = -0.25j * (ks**2 * h0s - kp**2 * h0p) / w2 + 0.5j * diff1 / w2
    return psi1, psi2


def _radial_parts_3d(medium: ElasticMedium, r):
    """Coefficients (psi1, psi2) with Gamma = psi1 I + psi2 rhat rhat^T in 3D."""
    ks, kp, w2 = medium.k_s, medium.k_p, medium.omega**2
    ps = np.exp(1j * ks * r) / (4 * np.pi * r)
    pp = np.exp(1j * kp * r) / (4 * np.pi * r)
    # f'(r)/r and f''(r) for f = phi_k, with phi' = (ik - 1/r) phi
    d1s = (1j * ks - 1 / r) * ps
    d1p = (1j * kp - 1 / r) * pp
    d2s = (-(ks**2) - 2j * ks / r + 2 / r**2) * ps
    d2p = (-(kp**2) - 2j * kp / r + 2 / r**2) * pp
    g1_over_r = (d1s - d1p) / r
    g2 = d2s - d2p
    psi1 = ps / medium.mu + g1_over_r / w2
    psi2 = (g2 - g1_over_r) / w2
    return psi1, psi2


def gamma_dynamic(medium: ElasticMedium, x, y):
    """Outgoing Kupradze tensor Gamma_{omega^2}(x - y), shape (..., dim, dim)."""
    x = _as_points(x, medium.dim)
    y = _as_points(y, medium.dim)
    d = x - y
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0):
        raise SingularityError("gamma_dynamic evaluated at x == y")
    rhat = d / r[..., None]
    if medium.dim == 2:
        psi1, psi2 = _radial_parts_2d(medium, r)
    else:
        psi1, psi2 = _radial_parts_3d(medium, r)
    eye = np.eye(medium.dim)
    outer = rhat[..., :, None] * rhat[..., None, :]
    return psi1[..., None, None] * eye + psi2[..., None, None] * outer


def _static_coeffs(medium: ElasticMedium):
    lam, mu = medium.lam, medium.mu
    denom = mu * (lam + 2 * mu)
    return (lam + 3 * mu) / denom, (lam + mu) / denom


def gamma_static(medium: ElasticMedium, x, y):
    """Static limit Gamma_0(x - y) of the Kupradze tensor."""
    x = _as_points(x, medium.dim)
    y = _as_points(y, medium.dim)
    d = x - y
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0):
        raise SingularityError("gamma_static evaluated at x == y")
    rhat = d / r[..., None]
    c1, c2 = _static_coeffs(medium)
    eye = np.eye(medium.dim)
    outer = rhat[..., :, None] * rhat[..., None, :]
    if medium.dim == 2:
        a = -c1 * np.log(r) / (4 * np.pi)
        b = np.full_like(a, c2 / (4 * np.pi))
    else:
        a = c1 / (8 * np.pi * r)
        b = c2 / (8 * np.pi * r)
    return a[..., None, None] * eye + b[..., None, None] * outer


def gamma_static_inverse(medium: ElasticMedium, x, y, rtol: float = 1e-9):
    """Pointwise matrix inverse of the static tensor Gamma_0(x - y).

    Gamma_0 = a I + b P with P the rank-one projector on rhat, so the
    inverse is (1/a)(I - P) + (1/(a+b)) P.  In 2D both a = 0 (|x-y| = 1)
    and a + b = 0 (|x-y| = exp((lam+mu)/(lam+3mu))) are degenerate radii
    where Gamma_0 is a singular matrix; an error is raised there.
    """
    x = _as_points(x, medium.dim)
    y = _as_points(y, medium.dim)
    d = x - y
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0):
        raise SingularityError("gamma_static_inverse evaluated at x == y")
    rhat = d / r[..., None]
    c1, c2 = _static_coeffs(medium)
    if medium.dim == 2:
        a = -c1 * np.log(r) / (4 * np.pi)
        b = c2 / (4 * np.pi)
    else:
        a = c1 / (8 * np.pi * r)
        b = c2 / (8 * np.pi * r)
    apb = a + b
    scale = c1 / (4 * np.pi) if medium.dim == 2 else c1 / (8 * np.pi * r)
    if np.any(np.abs(a) < rtol * np.abs(scale)) or np.any(np.abs(apb) < rtol * np.abs(scale)):
        raise DegenerateRadiusError(
            "Gamma_0 is singular at this radius (2D degenerate radii are "
            "|x-y| = 1 and |x-y| = exp((lam+mu)/(lam+3mu)))"
        )
    eye = np.eye(medium.dim)
    outer = rhat[..., :, None] * rhat[..., None, :]
    inv_a = 1.0 / a
    return inv_a[..., None, None] * (eye - outer) + (1.0 / apb)[..., None, None] * outer


def chi(medium: ElasticMedium) -> complex:
    """Renormalization constant chi with Gamma_z - Gamma_0 -> chi I as |x| -> 0.

    Evaluated at z = omega^2 + i0 (outgoing branch, sqrt(z) = omega).
    The value is the exact small-argument limit of the dynamic-minus-static
    tensor; see tests for the independent numeric-limit oracle.
    """
    lam, mu, w = medium.lam, medium.mu, medium.omega
    if medium.dim == 2:
        a_s = np.log(medium.k_s / 2) + EULER_GAMMA
        a_p = np.log(medium.k_p / 2) + EULER_GAMMA
        real = (
            -a_s / (4 * np.pi * mu)
            - a_p / (4 * np.pi * (lam + 2 * mu))
            - (lam + mu) / (8 * np.pi * mu * (lam + 2 * mu))
        )
        imag = (lam + 3 * mu) / (8 * mu * (lam + 2 * mu))
        return complex(real, imag)
    return 1j * w * (2 / mu**1.5 + 1 / (lam + 2 * mu) ** 1.5) / (12 * np.pi)


def perp(d):
    """Counter-clockwise rotation by pi/2 of 2D vectors (last axis)."""
    d = np.asarray(d, dtype=float)
    out = np.empty_like(d)
    out[..., 0] = -d[..., 1]
    out[..., 1] = d[..., 0]
    return out


def gamma_farfield(medium: ElasticMedium, a, y, xhat):
    """Far-field pattern of x -> Gamma(x, y) a in the stripped convention.

    Parameters broadcast over leading axes; xhat must hold unit vectors.
    Returns complex vectors of shape (..., dim).
    """
    a = np.asarray(a, dtype=complex)
    y = _as_points(y, medium.dim)
    xhat = np.asarray(xhat, dtype=float)
    phase_p = np.exp(-1j * medium.k_p * np.sum(xhat * y, axis=-1))
    phase_s = np.exp(-1j * medium.k_s * np.sum(xhat * y, axis=-1))
    along = np.sum(xhat * a, axis=-1)
    p_part = phase_p[..., None] * along[..., None] * xhat
    if medium.dim == 2:
        xperp = perp(xhat)
        s_part = phase_s[..., None] * np.sum(xperp * a, axis=-1)[..., None] * xperp
    else:
        # xhat x (a x xhat) = a - (a.xhat) xhat
        s_part = phase_s[..., None] * (a - along[..., None] * xhat)
    return p_part + s_part


def farfield_amplitude(medium: ElasticMedium, kind: str) -> complex:
    """Channel constant c_alpha in the physical far-field asymptotics.

    Gamma(x,y) a ~ c_p e^{i kp r} r^{-(d-1)/2} ff_p + c_s e^{i ks r} r^{-(d-1)/2} ff_s.
    """
    k = medium.k_p if kind == "p" else medium.k_s
    w2 = medium.omega**2
    if medium.dim == 2:
        return k**2 / (4 * w2) * np.sqrt(2 / (np.pi * k)) * np.exp(1j * np.pi / 4)
    return k**2 / (4 * np.pi * w2)


def plane_wave(medium: ElasticMedium, kind: str, d, x):
    """Incident plane wave: p-wave d e^{i kp x.d} or (2D) s-wave perp(d) e^{i ks x.d}."""
    d = np.asarray(d, dtype=float)
    x = _as_points(x, medium.dim)
    if kind == "p":
        phase = np.exp(1j * medium.k_p * np.sum(x * d, axis=-1))
        return phase[..., None] * d
    if kind == "s":
        if medium.dim != 2:
            raise DomainError("shear plane waves are defined here only in 2D")
        phase = np.exp(1j * medium.k_s * np.sum(x * d, axis=-1))
        return phase[..., None] * perp(d)
    raise DomainError(f"plane wave kind must be 'p' or 's', got {kind!r}")
