"""Spectral laboratory for lattice and continuous 1-D Schrodinger propagation with two-grid filtering."""
__version__ = "0.1.0"

from .grid import Grid, PhysicalField, SpectralField, isdft, make_grid, sdft, sdft_direct
from .dispersion import QuadraticModel, Symbol, continuous, semidiscrete, taylor_split
from .wavepacket import PacketSpec, make_packet, make_special_data
from .bigrid import BigridLevel, bigrid_filter, weight
from .evolution import Propagator, propagate
from .predictor import classify, predict_packets
from .scenario import PRESETS, Scenario, ScenarioError, load_scenario

__all__ = [
    "__version__", "Grid", "PhysicalField", "SpectralField", "isdft", "make_grid", "sdft",
    "sdft_direct", "QuadraticModel", "Symbol", "continuous", "semidiscrete", "taylor_split",
    "PacketSpec", "make_packet", "make_special_data", "BigridLevel", "bigrid_filter", "weight",
    "Propagator", "propagate", "classify", "predict_packets", "PRESETS", "Scenario",
    "ScenarioError", "load_scenario",
]
