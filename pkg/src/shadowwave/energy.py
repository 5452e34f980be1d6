"""Local energy production of waves, total energy in a window, and energy admissibility."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, SingularSystemError, TieError
from .models import AffineShift, EnergyPair, GasModel, Kind, State, energy_pair, flux, shift_pair
from .riemann import (
    ContactDiscontinuity,
    DeltaShock,
    DeltaShockState,
    RarefactionFan,
    Shock,
    VacuumFan,
    WaveFan,
)


def _eta(pair: EnergyPair, s: State) -> float:
    # vacuum carries no energy (pressureless only; pressure models reject rho = 0)
    if s.is_vacuum and not pair.model.has_pressure:
        return 0.0
    return pair.eta(s)


def _q(pair: EnergyPair, s: State) -> float:
    if s.is_vacuum and not pair.model.has_pressure:
        return pair.shift.cbar
    return pair.q(s)


def _sharp_production(pair: EnergyPair, speed: float, left: State, right: State) -> float:
    return -speed * (_eta(pair, right) - _eta(pair, left)) + _q(pair, right) - _q(pair, left)


def _frame_production(pair: EnergyPair, speed: float, left: State, right: State) -> float:
    """[Q(rho, u - speed)]: production of a front that conserves mass and momentum, unshifted pair.

    Avoids the cancellation of ``-s [eta] + [Q]`` next to a huge density.
    """
    def q(s: State) -> float:
        return 0.0 if s.is_vacuum and not pair.model.has_pressure else pair.flux(s.rho, s.u - speed)

    return q(right) - q(left)


def shock_production(pair: EnergyPair, w: Shock) -> float:
    """Shock production in the shock frame: m ([w^2/2] + [h]) with h the enthalpy.

    Affine shifts contribute ``a . (RH residual) = 0``. This form stays accurate
    when one side has an enormous density, where ``-s [eta] + [Q]`` cancels.
    """
    m = pair.model
    a = m.exponent
    thin, thick = (w.left, w.right) if w.left.rho <= w.right.rho else (w.right, w.left)
    flux_m = thin.rho * (thin.u - w.speed)
    w_thin, w_thick = thin.u - w.speed, flux_m / thick.rho

    def h(r):
        return -a / (1.0 + a) * r ** (-1.0 - a)

    jump = 0.5 * (w_thick**2 - w_thin**2) + h(thick.rho) - h(thin.rho)
    if thin is w.right:
        jump = -jump
    return flux_m * jump


def delta_production(pair: EnergyPair, dss: DeltaShockState, t: float) -> float:
    """D(t) = -u_s [eta] + [Q] + d/dt(energy carried by the front).

    For the physical pair this equals ``[Q(rho, u - u_s)]``, the flux jump seen
    from the front. That form is used when there is no shift because it does not
    cancel next to a huge density; shifted pairs use the definition.
    """
    us = float(dss.us(t))
    if pair.shift.is_identity:
        return _frame_production(pair, us, dss.left, dss.right)
    d = _sharp_production(pair, us, dss.left, dss.right)
    return d + pair.strip_rate(float(dss.dxi(t)), us, float(dss.dmom(t)))


def local_production(model: GasModel, pair: EnergyPair, w, t: float = 0.0) -> float:
    """Energy production rate of a single wave at time ``t``.

    Rarefactions and vacuum fans produce nothing; shocks and contacts give
    ``-s [eta] + [Q]``; delta shocks add the rate of change of their own energy.
    """
    if pair.model != model:
        raise DomainError("energy pair belongs to a different model")
    if t < 0:
        raise DomainError("production is defined for t >= 0")
    if isinstance(w, (RarefactionFan, VacuumFan)):
        return 0.0
    if isinstance(w, DeltaShock):
        if w.dss.model != model:
            raise DomainError("wave was built for a different model")
        return delta_production(pair, w.dss, t)
    if isinstance(w, ContactDiscontinuity):
        if pair.shift.is_identity:
            return _frame_production(pair, w.speed, w.left, w.right)
        return _sharp_production(pair, w.speed, w.left, w.right)
    if isinstance(w, Shock):
        if model.kind is Kind.GENERALIZED:
            return shock_production(pair, w)
        return _sharp_production(pair, w.speed, w.left, w.right)
    raise DomainError(f"unknown wave type {type(w).__name__}")


def fan_production(model: GasModel, pair: EnergyPair, fan: WaveFan, t: float = 0.0) -> float:
    return float(sum(local_production(model, pair, w, t) for w in fan.waves))


def two_shock_production(
    model: GasModel, pair: EnergyPair, left: State, mid: State, right: State, c1: float, c2: float
) -> float:
    return shock_production(pair, Shock(c1, left, mid, 1)) + shock_production(pair, Shock(c2, mid, right, 2))


def _signature(fan: WaveFan) -> tuple:
    return (fan.label, tuple(type(w).__name__ for w in fan.waves))


def admissible_selection(model: GasModel, fans: list[WaveFan], pair: EnergyPair | None = None) -> WaveFan:
    """Fan with the most negative total production at t = 0+ (maximal dissipation)."""
    if not fans:
        raise ValueError("no candidate fans")
    pair = pair or energy_pair(model)
    scored = [(fan_production(model, pair, f, 0.0), i) for i, f in enumerate(fans)]
    scored.sort()
    best_d, best = scored[0]
    for d, i in scored[1:]:
        if abs(d - best_d) < 1e-12 and _signature(fans[i]) != _signature(fans[best]):
            raise TieError(f"fans {best} and {i} have equal production {best_d:.17g}")
    return fans[best]


def affine_normalize(
    pair: EnergyPair, model: GasModel, left_boundary: State, right_boundary: State
) -> tuple[EnergyPair, AffineShift]:
    """Shift the pair so that its flux vanishes at both boundary states.

    Needs ``a . (F(UR) - F(UL)) = Q(UL) - Q(UR)``; the minimum-norm ``a`` is used,
    then ``cbar`` cancels what is left at the left boundary.
    """
    fl, fr = flux(model, left_boundary), flux(model, right_boundary)
    ql, qr = _q(pair, left_boundary), _q(pair, right_boundary)
    dF = fr - fl
    dQ = ql - qr
    nrm = float(dF @ dF)
    scale = 1.0 + abs(ql) + abs(qr)
    if nrm <= (1e-14 * (1.0 + float(np.abs(fl).max()))) ** 2:
        if abs(dQ) > 1e-12 * scale:
            raise SingularSystemError("F(UL) = F(UR) but the energy fluxes differ")
        a = np.zeros(2)
    else:
        a = dQ * dF / nrm
    cbar = -ql - float(a @ fl)
    shift = AffineShift((float(a[0]), float(a[1])), cbar)
    return shift_pair(pair, model, shift), shift


def entropy_conditions_check(
    model: GasModel,
    pair: EnergyPair,
    dss: DeltaShockState,
    left: State,
    right: State,
    t: float = 1.0,
    eps_schedule: tuple[float, ...] = (1e-3, 1e-4, 1e-5),
) -> tuple[float, float]:
    """(D(t), extrapolated eps -> 0 residual of the strip flux balance).

    The strip of width ``eps t`` holds density ``xi/(eps t)`` moving at ``u_s``;
    the residual is ``eps t (u_s eta - Q)`` on that strip.
    """
    if dss.left != left or dss.right != right:
        raise DomainError("delta shock does not join the given states")
    d = delta_production(pair, dss, t)
    xi, us = float(dss.xi(t)), float(dss.us(t))
    if xi == 0.0:
        return d, 0.0
    eps = np.asarray(eps_schedule, dtype=float)
    vals = []
    for e in eps:
        w = e * (t - dss.t0)
        rho = xi / w
        vals.append(w * (us * pair.density(rho, us) - pair.flux(rho, us)))
    # Richardson: linear fit in eps, intercept is the limit
    coef = np.polyfit(eps, np.asarray(vals), 1)
    return d, float(coef[-1])


# ---------------------------------------------------------------------------
# energy in a window


def _segment_energy(pair: EnergyPair, fan: WaveFan, t: float, lo: float, hi: float) -> float:
    """Integral of eta(regular part) over [lo, hi] at time t."""
    total = 0.0
    # breakpoints at wave edges
    cuts = [lo]
    for w in fan.waves:
        a, b = w.speed_range(t)
        cuts.extend([a * t, b * t])
    cuts.append(hi)
    cuts = sorted(c for c in cuts if lo <= c <= hi)
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        if x1 <= x0:
            continue
        mid = 0.5 * (x0 + x1)
        rho, u = fan.sample(np.array([mid]), t)
        inside_fan = any(
            isinstance(w, RarefactionFan) and w.speed_range()[0] * t < mid < w.speed_range()[1] * t
            for w in fan.waves
        )
        if inside_fan:
            def g(x):
                r, v = fan.sample(np.array([x]), t)
                return pair.density(r[0], v[0])

            val, _ = quad(g, x0, x1, epsabs=1e-13, epsrel=1e-12, limit=200)
            total += val
        elif rho[0] == 0.0 and not pair.model.has_pressure:
            # vacuum: eta contains only terms proportional to rho
            continue
        else:
            total += (x1 - x0) * pair.density(rho[0], u[0])
    return total


def total_energy(pair: EnergyPair, fan: WaveFan, t: float, L: float) -> float:
    """H over [-L, L]: regular energy plus energy carried by singular fronts."""
    if t <= 0:
        raise DomainError("total energy is evaluated for t > 0")
    h = _segment_energy(pair, fan, t, -L, L)
    for w in fan.waves:
        if isinstance(w, DeltaShock):
            xi, us = float(w.dss.xi(t)), float(w.dss.us(t))
            a1, a2 = pair.shift.a
            h += pair.kinetic * xi * us * us + a1 * xi + a2 * xi * us
    return h


def default_window(fan: WaveFan, t_end: float) -> float:
    return 10.0 * (1.0 + fan.max_speed()) * t_end


@dataclass
class EnergyLedger:
    per_wave_D: list[tuple[int, float]]
    boundary_flux: float
    total_H: float
    L: float
    t: float = field(default=1.0)

    @property
    def dHdt(self) -> float:
        return sum(d for _, d in self.per_wave_D) + self.boundary_flux


def energy_ledger(model: GasModel, pair: EnergyPair, fan: WaveFan, t: float, L: float | None = None) -> EnergyLedger:
    L = default_window(fan, t) if L is None else L
    per = [(i, local_production(model, pair, w, t)) for i, w in enumerate(fan.waves)]
    bflux = _q(pair, fan.left) - _q(pair, fan.right)
    return EnergyLedger(per, bflux, total_energy(pair, fan, t, L), L, t)


def dhdt_consistency(
    model: GasModel, pair: EnergyPair, fan: WaveFan, t: float, dt: float = 1e-5, L: float | None = None
) -> tuple[float, float]:
    """(central-difference dH/dt, ledger dH/dt) at time t."""
    L = default_window(fan, t) if L is None else L
    fd = (total_energy(pair, fan, t + dt, L) - total_energy(pair, fan, t - dt, L)) / (2 * dt)
    return fd, energy_ledger(model, pair, fan, t, L).dHdt


def relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


__all__ = [
    "EnergyLedger",
    "admissible_selection",
    "affine_normalize",
    "delta_production",
    "dhdt_consistency",
    "energy_ledger",
    "entropy_conditions_check",
    "fan_production",
    "local_production",
    "total_energy",
    "shock_production",
    "two_shock_production",
]

