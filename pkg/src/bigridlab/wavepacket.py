"""Truncated Gaussian wave packets defined in Fourier space.

A packet is the Gaussian profile ``sqrt(2 pi/gamma) exp(-xi**2/(2 gamma))``
recentred at the carrier ``eta0/h`` and hard-truncated to the band
``[eta1/h, eta2/h)``.  Untruncated, it synthesizes to
``exp(i eta0 x/h) exp(-gamma x**2/2)``, whose peak modulus is one.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .grid import SpectralField

__all__ = [
    "PacketSpec", "gaussian_profile", "make_packet", "make_special_data",
    "scale_regime_check", "default_gamma", "gaussian_mass",
]

# normalized-unit slack for bin membership at band endpoints
_EDGE_TOL = 1e-12

# regime thresholds: gamma*h^(2/3) <= REGIME_SMALL and gamma >= REGIME_LARGE
REGIME_SMALL = 0.2
REGIME_LARGE = 2.0


def default_gamma(h):
    """Concentration ``gamma = h**(-1/4)``."""
    return h ** -0.25


@dataclass(frozen=True)
class PacketSpec:
    eta0: float
    eta1: float = -np.pi
    eta2: float = np.pi
    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if not self.eta1 < self.eta2:
            raise ValueError(f"empty band [{self.eta1}, {self.eta2}]")
        if self.eta1 < -np.pi - _EDGE_TOL or self.eta2 > np.pi + _EDGE_TOL:
            raise ValueError(f"band [{self.eta1}, {self.eta2}] leaves [-pi, pi]")
        if not -np.pi - _EDGE_TOL < self.eta0 <= np.pi + _EDGE_TOL:
            raise ValueError(f"eta0={self.eta0!r} outside (-pi, pi]")

    @property
    def straddles(self):
        """True when the carrier sits on a band endpoint (half a pick survives)."""
        return (abs(self.eta0 - self.eta1) < _EDGE_TOL
                or abs(self.eta0 - self.eta2) < _EDGE_TOL)


def gaussian_profile(gamma, xi):
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    xi = np.asarray(xi, dtype=float)
    return np.sqrt(2 * np.pi / gamma) * np.exp(-xi * xi / (2 * gamma))


def band_mask(grid, eta1, eta2):
    """Bins whose normalized wavenumber lies in ``[eta1, eta2)``."""
    eta = grid.eta
    return (eta >= eta1 - _EDGE_TOL) & (eta < eta2 - _EDGE_TOL)


def make_packet(spec, grid):
    """Sample the truncated Gaussian of ``spec`` on the wavenumbers of ``grid``."""
    xi = grid.xi
    coeffs = gaussian_profile(spec.gamma, xi - spec.eta0 / grid.h)
    coeffs = np.where(band_mask(grid, spec.eta1, spec.eta2), coeffs, 0.0)
    return SpectralField(grid, coeffs)


def make_special_data(which, gamma, grid, eta0=None):
    """The two reference data.

    ``which="pi"`` gives the datum made of the two half picks at ``-pi/h``
    (band ``[-pi, 0)``) and ``+pi/h`` (band ``[0, pi)``); on the lattice they
    recombine into a single pick at the zone edge.  ``which="centered"``
    gives the full-band packet at ``eta0``, which must lie in ``(-pi, pi)``.
    """
    if which == "pi":
        left = make_packet(PacketSpec(-np.pi, -np.pi, 0.0, gamma), grid)
        right = make_packet(PacketSpec(np.pi, 0.0, np.pi, gamma), grid)
        return left + right
    if which == "centered":
        if eta0 is None or not -np.pi < eta0 < np.pi:
            raise ValueError(f"centered datum needs eta0 in (-pi, pi), got {eta0!r}")
        return make_packet(PacketSpec(eta0, -np.pi, np.pi, gamma), grid)
    raise ValueError(f"unknown special datum {which!r}")


def pi_halves(gamma, grid):
    """The two half-band packets whose sum is the ``"pi"`` datum."""
    return (make_packet(PacketSpec(-np.pi, -np.pi, 0.0, gamma), grid),
            make_packet(PacketSpec(np.pi, 0.0, np.pi, gamma), grid))


def gaussian_mass(gamma, lo, hi):
    """Closed-form ``(1/2pi) int_lo^hi |profile(xi)|^2 dxi``, the squared l2 norm."""
    s = np.sqrt(gamma)
    return 0.5 * np.sqrt(np.pi / gamma) * (erf(hi / s) - erf(lo / s))


def scale_regime_check(h, gamma):
    """Report how well ``(h, gamma)`` satisfies ``gamma h^(2/3) << 1 << gamma``."""
    small = gamma * h ** (2.0 / 3.0)
    return {
        "h": h,
        "gamma": gamma,
        "gamma_h23": small,
        "inv_gamma": 1.0 / gamma,
        "thresholds": {"gamma_h23_max": REGIME_SMALL, "gamma_min": REGIME_LARGE},
        "in_regime": bool(small <= REGIME_SMALL and gamma >= REGIME_LARGE),
    }
