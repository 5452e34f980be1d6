"""Seeded samplers for the sweeps, scripts and property checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import fan_production
from .errors import NoSolutionError
from .models import GasModel, State, energy_pair
from .riemann import (
    _classical_fan,
    above_gamma_ss,
    generalized_shadow_exists,
    shadow_speed,
    two_shock_intermediate,
)


@dataclass(frozen=True)
class Box:
    rho: tuple[float, float] = (0.2, 5.0)
    u: tuple[float, float] = (-3.0, 3.0)


def random_state(rng: np.random.Generator, box: Box = Box()) -> State:
    return State(rng.uniform(*box.rho), rng.uniform(*box.u))


def overlap_pair(rng: np.random.Generator, model: GasModel, max_tries: int = 100_000) -> tuple[State, State]:
    """Rejection-sample data where both the shadow and a two-shock fan solve the Riemann problem."""
    for _ in range(max_tries):
        left = State(rng.uniform(0.2, 5.0), rng.uniform(0.0, 4.0))
        right = State(rng.uniform(0.2, 5.0), rng.uniform(-4.0, 0.0))
        if not (above_gamma_ss(model, left, right) and generalized_shadow_exists(model, left, right)):
            continue
        if _classical_fan(model, left, right).label == "S1S2":
            return left, right
    raise NoSolutionError("no overlap sample found")


def overlap_row(model: GasModel, left: State, right: State) -> dict[str, float]:
    """Shadow minus classical production, and the shadow speed against both shock speeds."""
    from .riemann import _delta_fan

    pair = energy_pair(model)
    d_sdw = fan_production(model, pair, _delta_fan(model, left, right))
    d_cl = fan_production(model, pair, _classical_fan(model, left, right))
    _, _, c1, c2 = two_shock_intermediate(model, left, right)
    c = shadow_speed(model, left, right)[0]
    return {
        "alpha": model.alpha,
        "rho0": left.rho,
        "u0": left.u,
        "rho1": right.rho,
        "u1": right.u,
        "D_sdw": d_sdw,
        "D_cl": d_cl,
        "D_sdw_minus_D_cl": d_sdw - d_cl,
        "c1": c1,
        "c": c,
        "c2": c2,
    }
