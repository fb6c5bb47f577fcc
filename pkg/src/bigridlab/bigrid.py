"""Two-grid filtering: interpolation from a coarse grid and fine-to-coarse projections.

With ``n = 2**k`` the coarse grid has step ``n h`` and shares every ``n``-th
node with the fine one.  Three operators are provided, each in physical
space and in Fourier space:

* ``extend``            linear interpolation coarse -> fine,
* ``project_restrict``  subsampling fine -> coarse,
* ``project_average``   hat-weighted average fine -> coarse.

All stencils wrap periodically around the window.
"""
from dataclasses import dataclass

import numpy as np

from .grid import Grid, PhysicalField, SpectralField

__all__ = [
    "BigridLevel", "weight", "extend", "project_restrict", "project_average",
    "bigrid_filter", "extend_spectral", "restrict_spectral", "average_spectral",
    "weight_zeros", "PROJECTIONS",
]

PROJECTIONS = ("none", "restrict", "average")


def weight(k, eta):
    """Fourier multiplier of the interpolation, ``prod_{j=1..k} cos^2(2^(j-2) eta)``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    eta = np.asarray(eta, dtype=float)
    out = np.ones_like(eta)
    for j in range(1, k + 1):
        out = out * np.cos(2.0 ** (j - 2) * eta) ** 2
    return out


def weight_zeros(k):
    """Zeros of ``weight(k, .)`` in ``[-pi, pi]``: ``+-j pi / 2^(k-1)``."""
    n = 2 ** (k - 1)
    pos = [j * np.pi / n for j in range(1, n + 1)]
    return sorted([-z for z in pos] + pos)


@dataclass(frozen=True)
class BigridLevel:
    k: int
    fine: Grid

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        kmax = int(np.log2(self.fine.M)) - 2
        if self.k > kmax:
            raise ValueError(
                f"k={self.k} too large for M={self.fine.M}: coarse grid needs >= 4 nodes (k <= {kmax})")
        if self.fine.origin_index % self.n:
            raise ValueError(f"fine origin {self.fine.origin_index} not aligned to 2^k={self.n}")

    @property
    def n(self):
        return 2 ** self.k

    @property
    def coarse(self):
        return Grid(self.fine.h * self.n, self.fine.M // self.n, self.fine.origin_index // self.n)


def _expect(field, grid, what):
    if field.grid != grid:
        raise ValueError(f"{what} expects a field on {grid}, got {field.grid}")


def extend(level, f):
    """Linear interpolation ``(G f)_{n j + r} = ((n - r) f_j + r f_{j+1}) / n``."""
    _expect(f, level.coarse, "extend")
    n = level.n
    c = f.values
    right = np.roll(c, -1)
    r = np.arange(n)[None, :]
    fine = ((n - r) * c[:, None] + r * right[:, None]) / n
    return PhysicalField(level.fine, fine.reshape(-1))


def project_restrict(level, f):
    """Pointwise restriction to the coarse nodes."""
    _expect(f, level.fine, "project_restrict")
    return PhysicalField(level.coarse, f.values[::level.n])


def average_stencil(n):
    """Offsets ``d`` and weights ``(n - |d|)/n^2`` of the averaging projection."""
    d = np.arange(-n + 1, n)
    return d, (n - np.abs(d)) / n ** 2


def project_average(level, f):
    """Hat-weighted average of the ``2n - 1`` fine values around each coarse node."""
    _expect(f, level.fine, "project_average")
    acc = np.zeros(level.coarse.M, dtype=complex)
    for d, w in zip(*average_stencil(level.n)):
        acc += w * np.roll(f.values, -d)[::level.n]
    return PhysicalField(level.coarse, acc)


def project(level, f, projection):
    if projection == "restrict":
        return project_restrict(level, f)
    if projection == "average":
        return project_average(level, f)
    raise ValueError(f"unknown projection {projection!r}")


def bigrid_filter(level, f, projection):
    """Project to the coarse grid, then interpolate back: ``G_k L_k f``."""
    return extend(level, project(level, f, projection))


# Fourier-side representations

def _alias_index(level):
    # fine bin m carries the coarse bin (m - M/2 + Mc/2) mod Mc
    M, Mc = level.fine.M, level.coarse.M
    return np.mod(np.arange(M) - M // 2 + Mc // 2, Mc)


def extend_spectral(level, F):
    """``weight(k, xi h)`` times the periodically extended coarse spectrum."""
    _expect(F, level.coarse, "extend_spectral")
    coeffs = weight(level.k, level.fine.eta) * F.coeffs[_alias_index(level)]
    return SpectralField(level.fine, coeffs)


def _alias_sum(level, values):
    idx = _alias_index(level)
    out = np.zeros(level.coarse.M, dtype=complex)
    np.add.at(out, idx, values)
    return out


def restrict_spectral(level, F):
    """Alias sum ``sum_j F(xi + 2 j pi/(n h))`` over ``j`` in ``[-n/2, n/2)``."""
    _expect(F, level.fine, "restrict_spectral")
    return SpectralField(level.coarse, _alias_sum(level, F.coeffs))


def average_spectral(level, F):
    """Alias sum with each alias weighted by ``weight(k, xi h + 2 j pi/n)``."""
    _expect(F, level.fine, "average_spectral")
    w = weight(level.k, level.fine.eta)
    return SpectralField(level.coarse, _alias_sum(level, w * F.coeffs))
