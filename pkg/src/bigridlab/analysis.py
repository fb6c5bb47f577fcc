"""Measurements on computed solutions.

Packet moments, separation of a multi-pick spectrum into its constituent
packets, space-time Strichartz norms and the local-smoothing functional,
and the quadratic-model remainder ratio.
"""
from dataclasses import asdict, dataclass, field

import numpy as np

from .dispersion import Symbol, semidiscrete, wrap_angle
from .evolution import fractional_derivative, remainder_split, snapshots
from .grid import PhysicalField, SpectralField, isdft

__all__ = [
    "PacketMetrics", "NormReport", "packet_metrics", "band_decompose", "find_picks",
    "strichartz_exponent", "strichartz_norm", "local_smoothing", "remainder_trace",
    "track", "default_radii", "mass_fraction",
]


@dataclass(frozen=True)
class PacketMetrics:
    mass: float
    centroid: float
    width: float
    peak_amp: float
    peak_pos: float


def _moments(x, values, h, L=None):
    dens = np.abs(values) ** 2
    mass = h * dens.sum()
    if mass == 0:
        raise ValueError("packet metrics undefined for an identically zero field")
    if L is None:
        c = h * np.sum(x * dens) / mass
        d = x - c
    else:
        # circular mean, then distances wrapped about it
        k = 2 * np.pi / L
        c = np.angle(np.sum(dens * np.exp(1j * k * x))) / k
        d = np.mod(x - c + L / 2, L) - L / 2
    var = h * np.sum(d * d * dens) / mass
    return mass, c, np.sqrt(max(var, 0.0))


def packet_metrics(u, periodic=False):
    """Mass, centroid, width (std of ``|u|^2``) and peak of a physical field.

    With ``periodic=True`` the centroid is the circular mean over the window
    and the width is measured with distances wrapped around it, which keeps
    both meaningful for a packet crossing the window edge.
    """
    g = u.grid
    mass, c, w = _moments(g.x, u.values, g.h, g.L if periodic else None)
    a = np.abs(u.values)
    i = int(np.argmax(a))
    return PacketMetrics(float(mass), float(c), float(w), float(a[i]), float(g.x[i]))


def track(u_rows, grid):
    """Per-row metrics for a stack of snapshots, with the centroid unwrapped in time."""
    rows = [packet_metrics(PhysicalField(grid, r), periodic=True) for r in u_rows]
    k = 2 * np.pi / grid.L
    cen = np.unwrap(np.array([m.centroid for m in rows]) * k) / k
    return [PacketMetrics(m.mass, float(c), m.width, m.peak_amp, m.peak_pos)
            for m, c in zip(rows, cen)]


def _band_distance(eta, pick):
    return np.abs(wrap_angle(eta - pick))


def band_decompose(F, picks, half_width):
    """Split ``F`` into the packets living in ``|eta - pick| <= half_width`` (mod 2 pi).

    Returns ``[(pick, PhysicalField), ...]`` in the order of ``picks``.
    Bands may touch but not overlap.
    """
    picks = [float(p) for p in picks]
    for i, a in enumerate(picks):
        for b in picks[i + 1:]:
            if abs(wrap_angle(a - b)) < 2 * half_width - 1e-12:
                raise ValueError(f"bands around {a:.6g} and {b:.6g} overlap (half width {half_width:.6g})")
    eta = F.grid.eta
    taken = np.zeros(F.grid.M, dtype=bool)
    out = []
    for p in picks:
        mask = (_band_distance(eta, p) <= half_width) & ~taken
        taken |= mask
        out.append((p, isdft(SpectralField(F.grid, np.where(mask, F.coeffs, 0.0)))))
    return out


def mass_fraction(F, picks, half_width):
    """Share of the l2 mass of ``F`` inside the union of the pick bands."""
    eta = F.grid.eta
    inside = np.zeros(F.grid.M, dtype=bool)
    for p in picks:
        inside |= _band_distance(eta, p) <= half_width
    total = np.sum(np.abs(F.coeffs) ** 2)
    return float(np.sum(np.abs(F.coeffs[inside]) ** 2) / total)


def find_picks(F, rel_threshold=1e-3):
    """Normalized wavenumbers of the local maxima of ``|F|`` above ``rel_threshold * max|F|``."""
    a = np.abs(F.coeffs)
    top = a.max()
    if top == 0:
        return []
    left, right = np.roll(a, 1), np.roll(a, -1)
    is_max = (a >= left) & (a > right) & (a >= rel_threshold * top)
    return [float(e) for e in F.grid.eta[is_max]]


def strichartz_exponent(p):
    """Time exponent ``q`` with ``2/q = 1/2 - 1/p``; ``inf`` for ``p = 2``."""
    if not p >= 2:
        raise ValueError(f"inadmissible space exponent p={p!r}, need p >= 2")
    if p == 2:
        return np.inf
    if np.isinf(p):
        return 4.0
    return 4.0 * p / (p - 2.0)


@dataclass
class NormReport:
    p: float
    q: float
    T: float
    n_samples: int
    value: float = float("nan")
    ratio: float = float("nan")
    radii: list = field(default_factory=list)
    smoothing_value: float = float("nan")
    smoothing_ratio: float = float("nan")
    h: float = float("nan")
    gamma: float = float("nan")
    scenario_id: str = ""

    def to_dict(self):
        d = asdict(self)
        for key in ("q", "p"):
            if np.isinf(d[key]):
                d[key] = "inf"
        return d


def _time_samples(T, n_samples):
    if not T > 0:
        raise ValueError(f"time window must be positive, got T={T!r}")
    if n_samples < 16:
        raise ValueError(f"need at least 16 time samples, got {n_samples}")
    dt = T / n_samples
    return np.arange(n_samples) * dt, dt


def strichartz_norm(F0, s, p, T=1.0, n_samples=64, sign=1, **meta):
    """Mixed norm ``||u||_{L^q(0,T; l^p)}`` by the left rectangle rule.

    ``q`` follows from ``p`` through admissibility; ``q = inf`` is a max
    over the samples.  The report's ``ratio`` divides by ``||u(0)||_{l^2}``.
    """
    q = strichartz_exponent(p)
    times, dt = _time_samples(T, n_samples)
    g = F0.grid
    a = np.abs(snapshots(F0, s, times, sign))
    if np.isinf(p):
        space = a.max(axis=1)
    else:
        space = (g.h * np.sum(a ** p, axis=1)) ** (1.0 / p)
    value = space.max() if np.isinf(q) else (dt * np.sum(space ** q)) ** (1.0 / q)
    return NormReport(p=p, q=q, T=T, n_samples=n_samples, value=float(value),
                      ratio=float(value / F0.norm()), h=g.h, **meta)


def default_radii(grid):
    L = grid.L
    return [L / 16, L / 8, L / 4]


def local_smoothing(F0, s, radii=None, T=1.0, n_samples=64, sign=1, **meta):
    """``max_R (1/R) int_0^T h sum_{|x_j| <= R} |D^(1/2) u|^2 dt`` over the given radii.

    The half derivative is the multiplier ``s^(1/4)`` (``p_h^(1/4)`` on the
    lattice).  The sup over all radii is replaced by the finite scan
    ``radii`` (default ``L/16, L/8, L/4``).  ``smoothing_ratio`` divides by ``||u(0)||^2``.
    """
    g = F0.grid
    radii = default_radii(g) if radii is None else [float(r) for r in radii]
    if not radii:
        raise ValueError("radii must be nonempty")
    if min(radii) <= 0 or max(radii) > g.L / 2 + 1e-12:
        raise ValueError(f"radii must lie in (0, L/2], got {radii}")
    times, dt = _time_samples(T, n_samples)
    D = fractional_derivative(F0, 0.5, s if isinstance(s, Symbol) else semidiscrete(g.h))
    dens = np.abs(snapshots(D, s, times, sign)) ** 2
    integrated = dt * g.h * dens.sum(axis=0)
    ax = np.abs(g.x)
    vals = [integrated[ax <= R].sum() / R for R in radii]
    best = float(max(vals))
    return NormReport(p=float("nan"), q=float("nan"), T=T, n_samples=n_samples,
                      radii=radii, smoothing_value=best,
                      smoothing_ratio=best / F0.norm() ** 2, h=g.h, **meta)


def remainder_trace(F0, eta0, times, sign=1, squared=True):
    """Remainder ratios ``(t, ||v||^2/||w||)`` along ``times``.

    ``squared=False`` gives the relative size ``||v||/||w||`` instead.
    """
    times = [float(t) for t in times]
    if any(t < 0 for t in times) or times != sorted(times):
        raise ValueError("times must be sorted and nonnegative")
    out = []
    for t in times:
        w, _, v = remainder_split(F0, eta0, t, sign)
        nv, nw = v.norm(), w.norm()
        out.append((t, nv ** 2 / nw if squared else nv / nw))
    return out
