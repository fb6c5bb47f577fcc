"""Uniform lattices, field containers and the semi-discrete Fourier transform.

Nodes are ``x_j = j*h`` for ``j`` in ``[origin_index, origin_index + M)``.
The spectral view samples the Brillouin zone ``[-pi/h, pi/h)`` at the ``M``
wavenumbers ``xi_m = -pi/h + m * 2*pi/L`` with ``L = M*h``.

The transform pair is defined by quadrature::

    F(xi_m) = h * sum_j f_j exp(-i xi_m x_j)
    f_j     = (1/L) * sum_m F(xi_m) exp(i xi_m x_j)

and evaluated here with FFTs.
"""
import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid", "PhysicalField", "SpectralField", "make_grid",
    "sdft", "isdft", "synthesize", "sdft_direct", "write_field_csv", "read_field_csv",
]


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    h: float
    M: int
    origin_index: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValueError(f"mesh step must be positive, got h={self.h!r}")
        if int(self.M) != self.M or self.M < 2 or not _is_power_of_two(int(self.M)):
            raise ValueError(f"M must be a power of two >= 2, got M={self.M!r}")

    @property
    def L(self):
        return self.M * self.h

    @property
    def dxi(self):
        """Wavenumber spacing ``2*pi/L``."""
        return 2 * np.pi / self.L

    @property
    def indices(self):
        return np.arange(self.origin_index, self.origin_index + self.M)

    @property
    def x(self):
        return self.indices * self.h

    @property
    def xi(self):
        return (np.arange(self.M) - self.M // 2) * self.dxi

    @property
    def eta(self):
        """Wavenumbers in normalized units ``xi*h``, in ``[-pi, pi)``."""
        return (np.arange(self.M) - self.M // 2) * (2 * np.pi / self.M)

    @property
    def centered(self):
        return self.origin_index == -(self.M // 2)

    def norm(self, values, p=2):
        """Discrete ``l^p(hZ)`` norm of node values."""
        a = np.abs(np.asarray(values))
        if np.isinf(p):
            return float(a.max())
        return float((self.h * np.sum(a ** p)) ** (1.0 / p))


def make_grid(h, M, centered=True):
    """Uniform grid of ``M`` nodes with step ``h``.

    A centered grid has ``origin_index = -M/2`` so that ``x = 0`` is a node
    near the middle of the window.
    """
    g = Grid(float(h), int(M), 0)
    if centered:
        g = Grid(g.h, g.M, -(g.M // 2))
    return g


@dataclass(frozen=True, eq=False)
class PhysicalField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.M,):
            raise ValueError(f"expected {self.grid.M} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def norm(self, p=2):
        return self.grid.norm(self.values, p)

    def __add__(self, other):
        _check_same(self.grid, other.grid)
        return PhysicalField(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same(self.grid, other.grid)
        return PhysicalField(self.grid, self.values - other.values)

    def __mul__(self, a):
        return PhysicalField(self.grid, a * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.M,):
            raise ValueError(f"expected {self.grid.M} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("spectrum contains non-finite values")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def norm(self):
        """``l^2(hZ)`` norm of the synthesized field, via Parseval."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2) / self.grid.L))

    def __add__(self, other):
        _check_same(self.grid, other.grid)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_same(self.grid, other.grid)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, a):
        return SpectralField(self.grid, a * self.coeffs)

    __rmul__ = __mul__


def _check_same(g1, g2):
    if g1 != g2:
        raise ValueError(f"grid mismatch: {g1} vs {g2}")


def _origin_phase(grid, sign):
    # exp(sign * 2*pi*i * m * origin / M), reduced mod M for accuracy
    m = np.arange(grid.M)
    r = np.mod(m * grid.origin_index, grid.M)
    return np.exp(sign * 2j * np.pi * r / grid.M)


def _alternating(n):
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


def sdft(f):
    """Semi-discrete Fourier transform ``F(xi_m) = h sum_j f_j exp(-i xi_m x_j)``."""
    g = f.grid
    s_o = -1.0 if g.origin_index % 2 else 1.0
    F = np.fft.fft(f.values * _alternating(g.M))
    F *= g.h * s_o * _origin_phase(g, -1)
    return SpectralField(g, F)


def synthesize(grid, coeffs):
    """Inverse transform of raw coefficients along the last axis.

    Accepts a stack of spectra, e.g. one row per time sample.
    """
    s_o = -1.0 if grid.origin_index % 2 else 1.0
    f = np.fft.ifft(np.asarray(coeffs) * _origin_phase(grid, +1), axis=-1)
    return f * ((s_o / grid.h) * _alternating(grid.M))


def isdft(F):
    """Inverse transform, the Riemann sum of the synthesis integral over the zone."""
    return PhysicalField(F.grid, synthesize(F.grid, F.coeffs))


def sdft_direct(f):
    """O(M^2) direct summation of the forward transform (reference oracle)."""
    g = f.grid
    phase = np.exp(-1j * np.outer(g.xi, g.x))
    return SpectralField(g, g.h * phase @ f.values)


_META_PREFIX = "# "


def write_field_csv(field, path, meta=None):
    """Write a field snapshot as CSV.

    Physical fields use the header ``index,x,re,im``, spectral fields
    ``m,xi,re,im``.  ``meta`` entries are written first as ``# key = value``
    comment lines, which gnuplot skips.
    """
    if isinstance(field, PhysicalField):
        header = ("index", "x", "re", "im")
        keys, pos, vals = field.grid.indices, field.grid.x, field.values
    elif isinstance(field, SpectralField):
        header = ("m", "xi", "re", "im")
        keys, pos, vals = np.arange(field.grid.M), field.grid.xi, field.coeffs
    else:
        raise TypeError(f"cannot serialize {type(field).__name__}")
    with open(path, "w", newline="") as fh:
        for key, value in (meta or {}).items():
            if key in ("h", "origin_index"):
                continue
            fh.write(f"{_META_PREFIX}{key} = {value}\n")
        fh.write(f"{_META_PREFIX}h = {field.grid.h!r}\n")
        fh.write(f"{_META_PREFIX}origin_index = {field.grid.origin_index}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k, p, v in zip(keys, pos, vals):
            w.writerow((int(k), f"{p:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"))


def read_field_csv(path):
    """Read a snapshot written by :func:`write_field_csv`; returns ``(field, meta)``."""
    meta = {}
    rows = []
    header = None
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith(_META_PREFIX.strip()):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = tuple(next(csv.reader([line])))
                continue
            rows.append(next(csv.reader([line])))
    if header not in (("index", "x", "re", "im"), ("m", "xi", "re", "im")):
        raise ValueError(f"unrecognized snapshot header {header!r}")
    h = float(meta["h"])
    grid = Grid(h, len(rows), int(meta["origin_index"]))
    vals = np.array([float(r[2]) + 1j * float(r[3]) for r in rows])
    if header[0] == "index":
        return PhysicalField(grid, vals), meta
    return SpectralField(grid, vals), meta
