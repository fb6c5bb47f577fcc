"""A priori predictions for wave packets with and without two-grid filtering.

Filtering a packet concentrated at ``eta0`` through a grid ``2^k`` times
coarser folds it onto the aliases ``eta0 + 2 l pi / 2^k``.  Each alias
becomes a packet of its own, with amplitude set by the interpolation
weights and velocity and spreading set by the lattice symbol at the alias.
"""
import logging
from functools import lru_cache
from dataclasses import asdict, dataclass

import numpy as np

from .bigrid import PROJECTIONS, weight
from .wavepacket import scale_regime_check

__all__ = [
    "CaseLabel", "PacketPrediction", "PredictionError", "classify", "fold",
    "predict_packets", "predict_trajectory", "velocity_order_check", "prediction_report",
    "SURVIVAL_THRESHOLD",
]

log = logging.getLogger(__name__)

# normalized-unit tolerance for case boundaries (eta0* == 0, odd multiples)
CASE_TOL = 1e-12
# packets with a smaller amplitude factor are treated as cancelled
SURVIVAL_THRESHOLD = 1e-3


class PredictionError(RuntimeError):
    """A structural relation among predictions failed (a bug, not a data error)."""


def fold(eta):
    """Reduce normalized wavenumbers to ``(-pi, pi]``."""
    eta = np.asarray(eta, dtype=float)
    out = np.pi - np.mod(np.pi - eta, 2 * np.pi)
    out = np.where(np.abs(out + np.pi) < CASE_TOL, np.pi, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CaseLabel:
    label: str
    eta0: float
    k: int
    projection: str
    eta0_star: float = None
    l_star: int = None
    base: str = None

    def __str__(self):
        if self.label == "D":
            return f"D({self.base})"
        return self.label


def _check_eta0(eta0):
    if not -np.pi + CASE_TOL < eta0 <= np.pi + CASE_TOL:
        raise ValueError(f"eta0={eta0!r} outside (-pi, pi]")


def _restrict_case(eta0, k):
    n = 2 ** k
    if abs(eta0 - np.pi) < CASE_TOL:
        return "A", 0.0, n // 2
    r = eta0 * n / np.pi
    odd = round(r)
    if odd % 2 and abs(r - odd) < CASE_TOL * n:
        l_star = (odd - 1) // 2
        return "C", float(eta0 - 2 * np.pi * l_star / n), l_star
    l_star = int(round(eta0 * n / (2 * np.pi)))
    star = float(eta0 - 2 * np.pi * l_star / n)
    if abs(star) < CASE_TOL:
        return "B_i", 0.0, l_star
    return "B_ii", star, l_star


def classify(eta0, k, projection):
    """Case of the filtered datum: ``none``, ``A``, ``B_i``, ``B_ii``, ``C`` or ``D(base)``.

    ``eta0_star`` is ``eta0`` folded into ``(-pi/2^k, pi/2^k]`` through the
    nearest multiple ``l_star`` of ``2 pi/2^k``; averaging composes D with
    the label the restriction would get.
    """
    _check_eta0(eta0)
    if projection not in PROJECTIONS:
        raise ValueError(f"unknown projection {projection!r}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k == 0 or projection == "none":
        return CaseLabel("none", eta0, k, "none")
    label, star, l_star = _restrict_case(eta0, k)
    if projection == "average":
        return CaseLabel("D", eta0, k, projection, star, l_star, base=label)
    return CaseLabel(label, eta0, k, projection, star, l_star)


@dataclass(frozen=True)
class PacketPrediction:
    pick_eta: float
    velocity: float
    amplitude_factor: float
    gamma_eff: float
    q2: float
    decay_constant: float = 1.0
    case: str = ""

    @property
    def width_law(self):
        return self.gamma_eff, abs(self.q2)

    @property
    def survives(self):
        return self.amplitude_factor >= SURVIVAL_THRESHOLD


@lru_cache(maxsize=64)
def _warn_regime(h, gamma):
    regime = scale_regime_check(h, gamma)
    if not regime["in_regime"]:
        log.warning("(h=%g, gamma=%g) outside the packet regime: gamma*h^(2/3)=%.3g",
                    h, gamma, regime["gamma_h23"])


def _group(pick, h, symbol):
    if symbol == "continuous":
        return -2.0 * pick / h, 2.0
    return -2.0 * np.sin(pick) / h, 2.0 * np.cos(pick)


def predict_packets(eta0, k, projection, gamma, h, symbol="semidiscrete", band=(-np.pi, np.pi)):
    """One :class:`PacketPrediction` per pick of the (filtered) datum.

    ``eta0 = pi`` denotes the datum made of two half picks at the zone
    edges.  On the lattice they form a single pick; under the continuous
    symbol they are two packets with ``decay_constant = 1/2`` moving in
    opposite directions.  Cancelled picks are kept, with factor 0.
    """
    label = classify(eta0, k, projection)
    _warn_regime(h, gamma)
    case = str(label)
    if label.label == "none":
        if abs(eta0 - np.pi) < CASE_TOL and symbol == "continuous":
            picks = [(np.pi, 0.5), (-np.pi, 0.5)]
        else:
            edge = abs(eta0 - band[0]) < CASE_TOL or abs(eta0 - band[1]) < CASE_TOL
            if abs(eta0 - np.pi) < CASE_TOL:
                edge = False
            picks = [(eta0, 0.5 if edge else 1.0)]
        out = []
        for pick, c in picks:
            v, q2 = _group(pick, h, symbol)
            out.append(PacketPrediction(float(pick), float(v), 1.0, gamma, float(q2), c, case))
        return out

    n = 2 ** k
    picks = sorted(fold(eta0 + 2 * np.pi * l / n) for l in range(n))
    b0 = float(weight(k, eta0))
    out = []
    for pick in picks:
        bp = float(weight(k, pick))
        factor = bp if projection == "restrict" else bp * b0
        v, q2 = _group(pick, h, symbol)
        out.append(PacketPrediction(pick, float(v), factor, gamma, float(q2), 1.0, case))
    return out


def predict_trajectory(pred, t, x_star=0.0, base_amplitude=1.0):
    """Predicted ``(centroid, width, amplitude)`` of one packet at time ``t``.

    The width is the Gaussian scale of ``|u|`` (``exp(-x^2/(2 w^2))``),
    ``sqrt(1/gamma + t^2 gamma q2^2)``; the standard deviation of ``|u|^2`` is
    ``w/sqrt(2)``.
    """
    g, q2 = pred.gamma_eff, pred.q2
    centroid = x_star + pred.velocity * t
    width = np.sqrt(1.0 / g + t * t * g * q2 * q2)
    amp = pred.decay_constant * pred.amplitude_factor * base_amplitude
    amp *= (1.0 + t * t * g * g * q2 * q2) ** -0.25
    return float(centroid), float(width), float(amp)


def _find(preds, pick):
    for p in preds:
        if abs(np.sin(0.5 * (p.pick_eta - pick))) < 1e-9:
            return p
    raise PredictionError(f"no predicted packet at pick {pick:.6g}")


def _interleaved(m):
    # 1, m, 2, m-1, ... : the order the positive velocities increase in
    lo, hi, seq = 1, m, []
    while lo <= hi:
        seq.append(lo)
        if lo != hi:
            seq.append(hi)
        lo, hi = lo + 1, hi - 1
    return seq


def velocity_order_check(preds, label):
    """Check the pairing and ordering relations between predicted velocities.

    Velocities below follow the convention ``x(t) = x* - t v``, i.e.
    ``v = -velocity``.  Returns a dict with the checked ``pairs`` and the
    increasing ``chain``; raises :class:`PredictionError` on a violation.
    """
    base = label.base if label.label == "D" else label.label
    result = {"label": str(label), "pairs": [], "chain": []}
    if base == "none":
        return result
    n = 2 ** label.k

    def v(p):
        return -p.velocity

    if base in ("A", "B_i"):
        alive = [p for p in preds if p.survives]
        if label.label == "D" and not alive:
            return result
        if len(alive) != 1 or abs(alive[0].pick_eta) > CASE_TOL or abs(alive[0].velocity) > 1e-9:
            raise PredictionError(f"case {base}: expected a single surviving packet at rest, got {alive}")
        result["chain"] = [0.0]
        return result

    if base == "B_ii":
        star = label.eta0_star
        for p in preds:
            partner = _find(preds, fold(p.pick_eta + np.pi))
            if not np.isclose(v(partner), -v(p), rtol=1e-12, atol=1e-9):
                raise PredictionError(f"velocities at {p.pick_eta:.6g} and its antipode are not opposite")
            if p.pick_eta < partner.pick_eta:
                result["pairs"].append((p.pick_eta, partner.pick_eta, abs(v(p))))
        if len(result["pairs"]) != n // 2:
            raise PredictionError(f"expected {n // 2} antisymmetric pairs, found {len(result['pairs'])}")
        # the chain holds as stated for star > 0; mirror the picks otherwise
        mirror = -1.0 if star < 0 else 1.0
        chain = []
        for l in _interleaved(n // 2):
            pick = fold(mirror * (abs(star) + 2 * np.pi * (l - 1) / n))
            chain.append(mirror * v(_find(preds, pick)))
        if any(b <= a for a, b in zip(chain, chain[1:])):
            raise PredictionError(f"interleaving order violated: {chain}")
        result["chain"] = chain
        return result

    if base == "C":
        # left movers v_l at picks (2l - 1) pi / n, l = 1..n/2, and their mirror images
        for sgn in (1.0, -1.0):
            vel = [v(_find(preds, sgn * (2 * l - 1) * np.pi / n)) for l in range(1, n // 2 + 1)]
            for l in range(1, n // 4 + 1):
                a, b = vel[l - 1], vel[n // 2 - l]
                if not np.isclose(a, b, rtol=1e-12, atol=1e-9):
                    raise PredictionError(f"case C pair {l} <-> {n // 2 + 1 - l} differs: {a} vs {b}")
                result["pairs"].append((sgn * (2 * l - 1) * np.pi / n,
                                        sgn * (n - 2 * l + 1) * np.pi / n, abs(a)))
            head = [sgn * x for x in vel[: max(n // 4, 1)]]
            if any(b <= a for a, b in zip(head, head[1:])):
                raise PredictionError(f"case C order violated: {head}")
            if sgn > 0:
                result["chain"] = head
        return result
    raise PredictionError(f"unknown case {base!r}")


def prediction_report(preds, label):
    """Plain-data form of a prediction list, suitable for JSON."""
    return {
        "case": {k: v for k, v in asdict(label).items()} | {"name": str(label)},
        "packets": [
            {"pick_eta": p.pick_eta, "velocity": p.velocity,
             "amplitude_factor": p.amplitude_factor, "q2": p.q2,
             "decay_constant": p.decay_constant, "gamma_eff": p.gamma_eff,
             "case": p.case}
            for p in preds
        ],
    }
