"""Homogeneous isotropic elastic background medium.

The displacement field is governed by the time-harmonic Navier equation

    mu * Lap(u) + (lam + mu) * grad(div u) + omega^2 * u = 0

with unit background density.  Compressional (P) and shear (S) waves
propagate with wavenumbers k_p = omega / sqrt(lam + 2 mu) and
k_s = omega / sqrt(mu).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ElasticMedium:
    """Lame constants, angular frequency and spatial dimension.

    Parameters
    ----------
    lam : float
        First Lame constant (may be negative).
    mu : float
        Shear modulus, mu > 0.
    omega : float
        Angular frequency, omega > 0.
    dim : int
        Spatial dimension, 2 or 3.
    """

    lam: float
    mu: float
    omega: float
    dim: int = 2

    k_p: float = field(init=False)
    k_s: float = field(init=False)
    wavelength_p: float = field(init=False)
    wavelength_s: float = field(init=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DomainError(f"dim must be 2 or 3, got {self.dim}")
        if not self.mu > 0:
            raise DomainError(f"shear modulus must be positive, got mu={self.mu}")
        if not self.dim * self.lam + 2 * self.mu > 0:
            raise DomainError(
                f"strong ellipticity requires dim*lam + 2*mu > 0, got "
                f"{self.dim}*{self.lam} + 2*{self.mu}"
            )
        if not self.omega > 0:
            raise DomainError(f"angular frequency must be positive, got {self.omega}")
        object.__setattr__(self, "k_p", self.omega / np.sqrt(self.lam + 2 * self.mu))
        object.__setattr__(self, "k_s", self.omega / np.sqrt(self.mu))
        object.__setattr__(self, "wavelength_p", 2 * np.pi / self.k_p)
        object.__setattr__(self, "wavelength_s", 2 * np.pi / self.k_s)

    @property
    def pressure_modulus(self) -> float:
        """lam + 2*mu, the P-wave modulus."""
        return self.lam + 2 * self.mu
