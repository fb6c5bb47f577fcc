"""Dispersion symbols of the continuous and finite-difference Laplacians.

``p(xi) = xi**2`` for the continuous equation and
``p_h(xi) = 4 h**-2 sin(xi h / 2)**2`` for the three-point scheme.  Their
first derivative is the group velocity, the second the group acceleration.
"""
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Symbol", "QuadraticModel", "continuous", "semidiscrete",
    "pathology_report", "taylor_split", "wrap_angle",
]

CONTINUOUS = "continuous"
SEMIDISCRETE = "semidiscrete"


def wrap_angle(eta):
    """Reduce normalized wavenumbers to ``[-pi, pi)``."""
    return np.mod(np.asarray(eta, dtype=float) + np.pi, 2 * np.pi) - np.pi


@dataclass(frozen=True)
class Symbol:
    kind: str
    h: float = 1.0

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, SEMIDISCRETE):
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if not self.h > 0:
            raise ValueError(f"mesh step must be positive, got {self.h!r}")

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == CONTINUOUS:
            return xi * xi
        return 4.0 / self.h ** 2 * np.sin(0.5 * xi * self.h) ** 2

    def first_derivative(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == CONTINUOUS:
            return 2.0 * xi
        return 2.0 / self.h * np.sin(xi * self.h)

    def second_derivative(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == CONTINUOUS:
            return np.full_like(xi, 2.0)
        return 2.0 * np.cos(xi * self.h)

    def third_derivative(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == CONTINUOUS:
            return np.zeros_like(xi)
        return -2.0 * self.h * np.sin(xi * self.h)


def continuous(h=1.0):
    return Symbol(CONTINUOUS, h)


def semidiscrete(h):
    return Symbol(SEMIDISCRETE, h)


@dataclass(frozen=True)
class QuadraticModel:
    """Second-order Taylor model of a symbol about ``eta0`` (normalized units).

    ``c0, c1, c2`` are the value and first two derivatives of the normalized
    symbol ``q(eta) = h**2 p(eta/h)`` at ``eta0``.  Evaluation at physical
    wavenumbers uses ``h**-2 q(xi h)``.  For the periodic semidiscrete parent
    the offset ``xi h - eta0`` is taken modulo ``2 pi``.
    """
    eta0: float
    c0: float
    c1: float
    c2: float
    h: float
    kind: str = SEMIDISCRETE

    @property
    def periodic(self):
        return self.kind == SEMIDISCRETE

    def _delta(self, eta):
        d = np.asarray(eta, dtype=float) - self.eta0
        return wrap_angle(d) if self.periodic else d

    def normalized(self, eta):
        d = self._delta(eta)
        return self.c0 + self.c1 * d + 0.5 * self.c2 * d * d

    def remainder(self, eta):
        """Normalized remainder: parent symbol minus the quadratic model."""
        eta = np.asarray(eta, dtype=float)
        if self.kind == CONTINUOUS:
            return np.zeros_like(eta)
        return 4.0 * np.sin(0.5 * eta) ** 2 - self.normalized(eta)

    def value(self, xi):
        return self.normalized(np.asarray(xi, dtype=float) * self.h) / self.h ** 2

    def first_derivative(self, xi):
        return (self.c1 + self.c2 * self._delta(np.asarray(xi, dtype=float) * self.h)) / self.h

    def second_derivative(self, xi):
        return np.full_like(np.asarray(xi, dtype=float), self.c2)


def taylor_split(symbol, eta0):
    """Quadratic Taylor model of ``symbol`` about the normalized wavenumber ``eta0``.

    The continuous symbol is its own expansion, so its model has an
    identically zero remainder.
    """
    h = symbol.h
    if symbol.kind == CONTINUOUS:
        return QuadraticModel(eta0, eta0 * eta0, 2.0 * eta0, 2.0, h, CONTINUOUS)
    return QuadraticModel(
        eta0, 4.0 * np.sin(0.5 * eta0) ** 2, 2.0 * np.sin(eta0), 2.0 * np.cos(eta0), h,
    )


def pathology_report(symbol):
    """Wavenumbers in the zone where the group velocity or acceleration vanish.

    Returns a list of ``(xi, "first" | "second")`` pairs in physical units.
    The zone edges ``+-pi/h`` are listed separately although they are
    identified by periodicity.
    """
    if symbol.kind == CONTINUOUS:
        return [(0.0, "first")]
    h = symbol.h
    return [
        (-np.pi / h, "first"), (0.0, "first"), (np.pi / h, "first"),
        (-np.pi / (2 * h), "second"), (np.pi / (2 * h), "second"),
    ]
