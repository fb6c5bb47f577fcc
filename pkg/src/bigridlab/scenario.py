"""Scenario configuration: parsing, validation and the built-in presets.

Configuration files are flat ``key = value`` lines with dotted keys::

    scenario_id = evolve-restrict-2pi3
    h = 2*pi/256
    M = 2048
    gamma = h^(-1/4)
    eta0 = 2*pi/3
    bigrid.k = 0, 1, 2
    bigrid.projection = restrict
    time.T = 1

Numeric values may be arithmetic expressions in ``pi``.  A JSON object
with the same (dotted or nested) keys is accepted as well.
"""
import ast
import json
import math
import operator
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .bigrid import PROJECTIONS

__all__ = [
    "Scenario", "ScenarioError", "parse_config", "load_scenario", "PRESETS",
    "preset", "evaluate", "GAMMA_TOKEN", "PI_SPLIT", "OUTPUTS",
]

GAMMA_TOKEN = "h^(-1/4)"
PI_SPLIT = "pi-split"
OUTPUTS = ("timeseries", "snapshots", "norms", "prediction", "comparison")
SYMBOLS = ("semidiscrete", "continuous")


class ScenarioError(ValueError):
    """Invalid configuration; ``problems`` lists every violation found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.problems))


_OPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.Pow: operator.pow,
    ast.USub: operator.neg, ast.UAdd: operator.pos,
}


def evaluate(text):
    """Evaluate a numeric expression built from numbers, ``pi`` and ``+ - * / ** ^``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported expression {text!r}")
    if isinstance(text, (int, float)):
        return text
    return ev(ast.parse(str(text).replace("^", "**").strip(), mode="eval"))


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    h: float = 2 * np.pi / 256
    M: int = 2048
    gamma: object = GAMMA_TOKEN
    eta0: object = np.pi / 2
    band: tuple = (-np.pi, np.pi)
    symbol: str = "semidiscrete"
    k_levels: tuple = (0,)
    projection: str = "none"
    T: float = 1.0
    n_samples: int = 64
    sign: int = 1
    outputs: tuple = OUTPUTS
    p: float = 6.0
    radii: tuple = None
    velocity_tol: float = 0.02
    amplitude_tol: float = 0.07
    width_tol: float = 0.10

    @property
    def gamma_value(self):
        if self.gamma == GAMMA_TOKEN:
            return self.h ** -0.25
        return float(self.gamma)

    @property
    def is_pi_split(self):
        return self.eta0 == PI_SPLIT

    @property
    def eta0_value(self):
        return np.pi if self.is_pi_split else float(self.eta0)

    @property
    def L(self):
        return self.M * self.h

    def with_h(self, h):
        """Same window length on a refined (or coarsened) mesh."""
        M = int(round(self.L / h))
        return replace(self, h=float(h), M=M)

    def meta(self, k=None):
        from . import __version__
        return {
            "scenario_id": self.scenario_id, "h": repr(self.h), "M": self.M,
            "gamma": repr(self.gamma_value), "eta0": str(self.eta0),
            "k": "" if k is None else k, "projection": self.projection if k else "none",
            "symbol": self.symbol, "sign": "+" if self.sign > 0 else "-",
            "tool_version": __version__,
        }

    def validate(self):
        problems = []
        h, M = self.h, self.M
        if not (isinstance(h, (int, float)) and h > 0):
            problems.append(f"h must be positive, got {h!r}")
        if not (isinstance(M, int) and M >= 2 and M & (M - 1) == 0):
            problems.append(f"M must be a power of two >= 2, got {M!r}")
        if self.gamma != GAMMA_TOKEN:
            try:
                if not float(self.gamma) > 0:
                    problems.append(f"gamma must be positive, got {self.gamma!r}")
            except (TypeError, ValueError):
                problems.append(f"gamma must be a number or {GAMMA_TOKEN!r}, got {self.gamma!r}")
        if not self.is_pi_split:
            try:
                e = float(self.eta0)
                if not -np.pi < e <= np.pi + 1e-12:
                    problems.append(f"eta0 must lie in (-pi, pi], got {e!r}")
                elif abs(e - np.pi) < 1e-12:
                    problems.append(f"eta0 = pi is the two-half-pick datum; use eta0 = {PI_SPLIT}")
            except (TypeError, ValueError):
                problems.append(f"eta0 must be a number or {PI_SPLIT!r}, got {self.eta0!r}")
        e1, e2 = self.band
        if not (-np.pi - 1e-12 <= e1 < e2 <= np.pi + 1e-12):
            problems.append(f"band must satisfy -pi <= eta1 < eta2 <= pi, got {self.band!r}")
        if self.symbol not in SYMBOLS:
            problems.append(f"symbol must be one of {SYMBOLS}, got {self.symbol!r}")
        if self.projection not in PROJECTIONS:
            problems.append(f"bigrid.projection must be one of {PROJECTIONS}, got {self.projection!r}")
        kmax = int(math.log2(M)) - 2 if isinstance(M, int) and M >= 2 else -1
        for k in self.k_levels:
            if not isinstance(k, int) or k < 0:
                problems.append(f"bigrid.k entries must be integers >= 0, got {k!r}")
            elif k > kmax:
                problems.append(f"bigrid.k={k} needs M >= {2 ** (k + 2)} (coarse grid of >= 4 nodes), M={M}")
        if self.projection == "none" and any(k for k in self.k_levels if isinstance(k, int)):
            problems.append("bigrid.k > 0 requires bigrid.projection = restrict or average")
        if self.projection != "none" and self.symbol == "continuous":
            problems.append("two-grid filtering applies to the lattice equation; use symbol = semidiscrete")
        if not self.T > 0:
            problems.append(f"time.T must be positive, got {self.T!r}")
        if not (isinstance(self.n_samples, int) and self.n_samples >= 16):
            problems.append(f"time.n_samples must be an integer >= 16, got {self.n_samples!r}")
        if self.sign not in (1, -1):
            problems.append(f"sign must be + or -, got {self.sign!r}")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            problems.append(f"unknown outputs {bad}; choose from {OUTPUTS}")
        if not self.p >= 2:
            problems.append(f"norms.p must be >= 2, got {self.p!r}")
        if self.radii is not None and isinstance(h, (int, float)) and isinstance(M, int):
            if not self.radii or min(self.radii) <= 0 or max(self.radii) > M * h / 2:
                problems.append(f"norms.radii must be nonempty and lie in (0, L/2], got {self.radii!r}")
        if problems:
            raise ScenarioError(problems)
        return self


def _split_list(v):
    if isinstance(v, (list, tuple)):
        return list(v)
    return [s.strip() for s in str(v).split(",") if s.strip()]


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


_KEYS = {
    "scenario_id", "h", "M", "gamma", "eta0", "band", "symbol", "bigrid.k",
    "bigrid.projection", "time.T", "time.n_samples", "sign", "outputs",
    "norms.p", "norms.radii", "compare.velocity_tol", "compare.amplitude_tol",
    "compare.width_tol", "preset",
}


def parse_config(text):
    """Parse ``key = value`` text (or a JSON object) into a raw dict."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _flatten(json.loads(text))
    raw = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ScenarioError([f"line {n}: expected 'key = value', got {line!r}"])
        raw[key.strip()] = value.strip()
    return raw


def from_mapping(raw):
    """Build a validated :class:`Scenario`, reporting every problem at once."""
    problems = [f"unknown key {k!r}" for k in raw if k not in _KEYS]
    base = PRESETS.get(raw["preset"]) if "preset" in raw else Scenario("scenario")
    if "preset" in raw and base is None:
        problems.append(f"unknown preset {raw['preset']!r}; available: {sorted(PRESETS)}")
        base = Scenario("scenario")
    kw = {}

    def num(key, target, cast=float):
        if key in raw:
            try:
                kw[target] = cast(evaluate(raw[key]))
            except (ValueError, SyntaxError, TypeError, ZeroDivisionError) as exc:
                problems.append(f"{key}: cannot read {raw[key]!r} ({exc})")

    if "scenario_id" in raw:
        kw["scenario_id"] = str(raw["scenario_id"])
    num("h", "h")
    num("M", "M", lambda v: int(v) if float(v).is_integer() else v)
    if "gamma" in raw:
        g = str(raw["gamma"]).replace(" ", "")
        if g in (GAMMA_TOKEN, "h**(-1/4)"):
            kw["gamma"] = GAMMA_TOKEN
        else:
            num("gamma", "gamma")
    if "eta0" in raw:
        if str(raw["eta0"]).strip() == PI_SPLIT:
            kw["eta0"] = PI_SPLIT
        else:
            num("eta0", "eta0")
    if "band" in raw:
        try:
            kw["band"] = tuple(float(evaluate(v)) for v in _split_list(raw["band"]))
            if len(kw["band"]) != 2:
                problems.append(f"band needs two endpoints, got {raw['band']!r}")
                del kw["band"]
        except (ValueError, SyntaxError) as exc:
            problems.append(f"band: {exc}")
    if "symbol" in raw:
        kw["symbol"] = str(raw["symbol"]).strip()
    if "bigrid.k" in raw:
        try:
            kw["k_levels"] = tuple(int(evaluate(v)) for v in _split_list(raw["bigrid.k"]))
        except (ValueError, SyntaxError) as exc:
            problems.append(f"bigrid.k: {exc}")
    if "bigrid.projection" in raw:
        kw["projection"] = str(raw["bigrid.projection"]).strip()
    num("time.T", "T")
    num("time.n_samples", "n_samples", lambda v: int(v) if float(v).is_integer() else v)
    if "sign" in raw:
        s = str(raw["sign"]).strip()
        kw["sign"] = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}.get(s, s)
    if "outputs" in raw:
        kw["outputs"] = tuple(_split_list(raw["outputs"]))
    num("norms.p", "p")
    if "norms.radii" in raw:
        try:
            kw["radii"] = tuple(float(evaluate(v)) for v in _split_list(raw["norms.radii"]))
        except (ValueError, SyntaxError) as exc:
            problems.append(f"norms.radii: {exc}")
    num("compare.velocity_tol", "velocity_tol")
    num("compare.amplitude_tol", "amplitude_tol")
    num("compare.width_tol", "width_tol")

    scenario = replace(base, **kw)
    try:
        scenario.validate()
    except ScenarioError as exc:
        problems.extend(exc.problems)
    if problems:
        raise ScenarioError(problems)
    return scenario


def load_scenario(source):
    """Load a scenario from a file path or ``preset:NAME``."""
    source = str(source)
    if source.startswith("preset:"):
        name = source.split(":", 1)[1]
        if name not in PRESETS:
            raise ScenarioError([f"unknown preset {name!r}; available: {sorted(PRESETS)}"])
        return PRESETS[name].validate()
    path = Path(source)
    if not path.is_file():
        raise ScenarioError([f"no such configuration file: {source}"])
    return from_mapping(parse_config(path.read_text()))


def _preset(scenario_id, eta0, projection, outputs=OUTPUTS):
    return Scenario(scenario_id, eta0=eta0, k_levels=(0, 1, 2), projection=projection,
                    outputs=outputs)


_PROJ_OUT = ("snapshots", "prediction")
PRESETS = {
    s.scenario_id: s for s in [
        _preset("restrict-pi", PI_SPLIT, "restrict", _PROJ_OUT),
        _preset("restrict-pi2", np.pi / 2, "restrict", _PROJ_OUT),
        _preset("restrict-2pi3", 2 * np.pi / 3, "restrict", _PROJ_OUT),
        _preset("average-pi", PI_SPLIT, "average", _PROJ_OUT),
        _preset("average-pi2", np.pi / 2, "average", _PROJ_OUT),
        _preset("average-2pi3", 2 * np.pi / 3, "average", _PROJ_OUT),
        _preset("evolve-restrict-pi2", np.pi / 2, "restrict"),
        _preset("evolve-average-pi2", np.pi / 2, "average"),
        _preset("evolve-restrict-pi", PI_SPLIT, "restrict"),
        _preset("evolve-restrict-2pi3", 2 * np.pi / 3, "restrict"),
    ]
}


def preset(name):
    return PRESETS[name]
