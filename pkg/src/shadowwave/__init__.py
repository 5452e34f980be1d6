"""Exact Riemann and shadow-wave solutions for pressureless and Chaplygin-type gases.

Energy-production ranking of admissible solutions, selection of the free
velocity of a point mass in the initial data, front tracking and independent
numerical oracles.
"""

from .backward import DeltaRiemannDatum, SelectionReport, select
from .energy import admissible_selection, delta_production, energy_ledger, local_production
from .errors import *  # noqa: F401,F403
from .models import VACUUM, AffineShift, EnergyPair, GasModel, Kind, State, energy_pair, shift_pair
from .riemann import DeltaShockState, WaveFan, solve
from .tracker import run as track

__all__ = [
    "AffineShift",
    "DeltaRiemannDatum",
    "DeltaShockState",
    "EnergyPair",
    "GasModel",
    "Kind",
    "SelectionReport",
    "State",
    "VACUUM",
    "WaveFan",
    "admissible_selection",
    "delta_production",
    "energy_ledger",
    "energy_pair",
    "local_production",
    "select",
    "shift_pair",
    "solve",
    "track",
]

__version__ = "0.1.0"
