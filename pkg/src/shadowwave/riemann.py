"""Exact Riemann solutions: classical wave fans and shadow waves (delta shocks).

Jumps are taken as ``[f] = f(right) - f(left)`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, ModelError, NoSolutionError, PreconditionError
from .models import (
    VACUUM,
    GasModel,
    Kind,
    State,
    eigenvalues,
    flux,
    rarefaction_potential,
)

# relative tolerance on overcompressibility and curve-membership tests
_EDGE_TOL = 1e-12


def _jumps(model: GasModel, left: State, right: State):
    """([rho], [rho u], [rho u^2 + p]) with vacuum sides contributing zero."""
    def parts(s):
        if s.is_vacuum:
            return 0.0, 0.0, 0.0
        p = float(model.pressure(s.rho))
        return s.rho, s.rho * s.u, s.rho * s.u**2 + p

    r0, m0, f0 = parts(left)
    r1, m1, f1 = parts(right)
    return r1 - r0, m1 - m0, f1 - f0


def deficit_discriminant(model: GasModel, left: State, right: State) -> float:
    """[rho u]^2 - [rho][rho u^2 + p], i.e. the squared Rankine-Hugoniot deficit rate.

    Written as rho0 rho1 (u0-u1)^2 - (rho0-rho1)(p1-p0) to avoid cancellation.
    """
    r0, r1 = left.rho, right.rho
    val = r0 * r1 * (left.u - right.u) ** 2
    if model.has_pressure and r0 > 0 and r1 > 0:
        val -= (r1 - r0) * (float(model.pressure(r1)) - float(model.pressure(r0)))
    elif r0 == 0 or r1 == 0:
        # one side vacuum: deficit rate is zero in the pressureless case
        a, b, e = _jumps(model, left, right)
        val = b * b - a * e
    return val


def shadow_speed(model: GasModel, left: State, right: State) -> tuple[float, float] | None:
    """Constant speed ``s`` and deficit ``kappa`` of the Riemann shadow wave.

    ``s`` solves [rho] s^2 - 2 [rho u] s + [rho u^2 + p] = 0 with
    ``kappa = s [rho] - [rho u] = sqrt(discriminant)``. Returns None when the
    discriminant is negative.
    """
    disc = deficit_discriminant(model, left, right)
    if disc < 0:
        return None
    kappa = math.sqrt(disc)
    a, b, e = _jumps(model, left, right)
    den = b - kappa
    if den != 0.0 and abs(den) >= 1e-12 * (abs(b) + kappa):
        s = e / den
    elif a != 0.0:
        s = (b + kappa) / a
    else:
        s = 0.5 * (left.u + right.u)
    return s + 0.0, kappa


# ---------------------------------------------------------------------------
# delta shocks


@dataclass(frozen=True)
class DeltaShockState:
    """Singular front between two constant states, started at ``(x0, t0)``.

    Strength and speed follow from mass and momentum balance across the
    front; for ``xi0 = 0`` this is the constant-speed Riemann shadow wave.
    With a = [rho], b = [rho u], e = [rho u^2 + p]:

        xi(t)^2 = xi0^2 + 2 xi0 (a u0 - b) tau + kappa^2 tau^2,   tau = t - t0
    """

    model: GasModel
    left: State
    right: State
    xi0: float = 0.0
    u0: float | None = None
    t0: float = 0.0
    x0: float = 0.0
    _jmp: tuple = field(init=False, repr=False, compare=False)
    kappa: float = field(init=False)

    def __post_init__(self):
        if self.xi0 < 0:
            raise PreconditionError(f"initial strength must be non-negative, got {self.xi0}")
        disc = deficit_discriminant(self.model, self.left, self.right)
        if disc < -1e-12 * (1 + abs(disc)):
            raise PreconditionError("negative deficit discriminant: no shadow wave joins these states")
        object.__setattr__(self, "_jmp", _jumps(self.model, self.left, self.right))
        object.__setattr__(self, "kappa", math.sqrt(max(disc, 0.0)))
        if self.xi0 == 0.0:
            sp = shadow_speed(self.model, self.left, self.right)
            object.__setattr__(self, "u0", sp[0])
        elif self.u0 is None:
            raise PreconditionError("a shadow wave with positive initial strength needs an initial speed")
        else:
            a, b, _ = self._jmp
            lin = a * self.u0 - b
            # xi^2 must stay positive for tau > 0
            if lin < 0 and lin * lin > self.kappa**2 * (1 + 1e-12) + 1e-300:
                raise PreconditionError(
                    "initial speed drives the strength to zero: inflow "
                    f"[rho] u_delta - [rho u] = {lin:.6g} < -kappa = {-self.kappa:.6g}"
                )

    @property
    def constant_speed(self) -> bool:
        return self.xi0 == 0.0

    def _tau(self, t):
        tau = np.asarray(t, dtype=float) - self.t0
        return tau

    def xi(self, t):
        tau = self._tau(t)
        a, b, _ = self._jmp
        if self.xi0 == 0.0:
            out = self.kappa * tau
        else:
            sq = self.xi0**2 + 2 * self.xi0 * (a * self.u0 - b) * tau + self.kappa**2 * tau**2
            out = np.sqrt(np.maximum(sq, 0.0))
        return out if np.ndim(out) else float(out)

    def displacement(self, t):
        """Front position relative to ``x0``."""
        tau = self._tau(t)
        a, b, e = self._jmp
        if self.xi0 == 0.0:
            out = self.u0 * tau
            return out if np.ndim(out) else float(out)
        xi = np.asarray(self.xi(t), dtype=float)
        den = xi + self.xi0 - b * tau
        with np.errstate(divide="ignore", invalid="ignore"):
            disp = tau * (2 * self.xi0 * self.u0 - e * tau) / den
            if a != 0.0:
                direct = (xi - self.xi0 + b * tau) / a
                disp = np.where(np.abs(den) > 1e-6 * (self.xi0 + np.abs(b * tau)), disp, direct)
        return disp if np.ndim(disp) else float(disp)

    def c(self, t):
        out = self.x0 + np.asarray(self.displacement(t))
        return out if np.ndim(out) else float(out)

    def us(self, t):
        if self.xi0 == 0.0:
            out = self.u0 + 0.0 * np.asarray(t, dtype=float)
            return out if np.ndim(out) else float(out)
        tau = self._tau(t)
        _, b, e = self._jmp
        xi = np.asarray(self.xi(t), dtype=float)
        disp = np.asarray(self.displacement(t), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.xi0 * self.u0 + b * disp - e * tau) / xi
        out = np.where(tau == 0, self.u0, out)
        return out if np.ndim(out) else float(out)

    def dxi(self, t):
        """Mass inflow rate u_s [rho] - [rho u]."""
        a, b, _ = self._jmp
        out = np.asarray(self.us(t)) * a - b
        return out if np.ndim(out) else float(out)

    def dmom(self, t):
        """Momentum inflow rate u_s [rho u] - [rho u^2 + p]."""
        _, b, e = self._jmp
        out = np.asarray(self.us(t)) * b - e
        return out if np.ndim(out) else float(out)

    def restarted(self, t: float) -> "DeltaShockState":
        """The same front re-expressed as starting at time ``t``."""
        return DeltaShockState(self.model, self.left, self.right, self.xi(t), self.us(t), t, self.c(t))


def is_overcompressive(model: GasModel, left: State, right: State, speed: float) -> bool:
    """lambda_1(left) >= speed >= lambda_2(right); vacuum sides impose nothing."""
    tol = _EDGE_TOL * (1 + abs(speed))
    ok = True
    if not left.is_vacuum:
        ok &= eigenvalues(model, left)[0] >= speed - tol
    if not right.is_vacuum:
        ok &= speed >= eigenvalues(model, right)[1] - tol
    return bool(ok)


# ---------------------------------------------------------------------------
# waves and fans


@dataclass(frozen=True)
class Shock:
    speed: float
    left: State
    right: State
    family: int

    def speed_range(self, t=None):
        return self.speed, self.speed


@dataclass(frozen=True)
class ContactDiscontinuity:
    speed: float
    left: State
    right: State

    def speed_range(self, t=None):
        return self.speed, self.speed


@dataclass(frozen=True)
class RarefactionFan:
    model: GasModel
    left: State
    right: State
    family: int

    @property
    def edge_speeds(self) -> tuple[float, float]:
        k = self.family - 1
        return eigenvalues(self.model, self.left)[k], eigenvalues(self.model, self.right)[k]

    def speed_range(self, t=None):
        return self.edge_speeds

    def state_at(self, slope):
        """Density and velocity inside the fan at ``x/t = slope`` (vectorised)."""
        m = self.model
        a = m.exponent
        phi0 = rarefaction_potential(m, self.left.rho)
        coef = math.sqrt(a) * (1 - a) / (1 + a)
        slope = np.asarray(slope, dtype=float)
        if self.family == 1:
            inv = self.left.u - phi0
            rho = np.power((slope - inv) / coef, -2.0 / (1 + a))
            u = inv + rarefaction_potential(m, rho)
        else:
            inv = self.left.u + phi0
            rho = np.power((inv - slope) / coef, -2.0 / (1 + a))
            u = inv - rarefaction_potential(m, rho)
        return rho, u


@dataclass(frozen=True)
class VacuumFan:
    u_left: float
    u_right: float
    left: State = VACUUM
    right: State = VACUUM

    def speed_range(self, t=None):
        return self.u_left, self.u_right


@dataclass(frozen=True)
class DeltaShock:
    dss: DeltaShockState
    left: State
    right: State
    overcompressive: bool = True

    def speed_range(self, t=0.0):
        s = self.dss.us(t)
        return s, s


Wave = Union[Shock, ContactDiscontinuity, RarefactionFan, VacuumFan, DeltaShock]


@dataclass(frozen=True)
class WaveFan:
    """Self-similar solution: waves ordered left to right."""

    model: GasModel
    left: State
    right: State
    waves: tuple
    label: str

    @property
    def states(self) -> list[State]:
        out = [self.left]
        for w in self.waves:
            out.append(w.right)
        return out

    @property
    def is_singular(self) -> bool:
        return any(isinstance(w, DeltaShock) for w in self.waves)

    def delta(self) -> DeltaShock | None:
        for w in self.waves:
            if isinstance(w, DeltaShock):
                return w
        return None

    def max_speed(self) -> float:
        sp = [abs(v) for w in self.waves for v in w.speed_range(0.0)]
        return max(sp, default=0.0)

    def sample(self, x, t: float):
        """Regular part (rho, u) at points ``x`` and time ``t > 0``.

        Vacuum points carry ``u = x/t``. Returns arrays ``rho, u``.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        slope = x / t
        rho = np.full_like(x, self.left.rho)
        u = np.full_like(x, self.left.u)
        for w in self.waves:
            lo, hi = w.speed_range(t)
            if isinstance(w, RarefactionFan):
                inside = (slope > lo) & (slope < hi)
                if inside.any():
                    r, v = w.state_at(slope[inside])
                    rho[inside], u[inside] = r, v
                beyond = slope >= hi
            elif isinstance(w, VacuumFan):
                inside = (slope > lo) & (slope < hi)
                rho[inside], u[inside] = 0.0, slope[inside]
                beyond = slope >= hi
            else:
                beyond = slope > hi
            rho[beyond], u[beyond] = w.right.rho, w.right.u
        return rho, u


def _constant_fan(model, s):
    return WaveFan(model, s, s, (), "constant")


def _delta_fan(model, left, right, label="shadow"):
    dss = DeltaShockState(model, left, right)
    over = is_overcompressive(model, left, right, dss.u0)
    return WaveFan(model, left, right, (DeltaShock(dss, left, right, over),), label)


def _positive(left: State, right: State, model: GasModel):
    for s in (left, right):
        if not s.rho > 0:
            raise DomainError(f"{model} Riemann data needs positive densities, got {s}")


def solve_pressureless(left: State, right: State) -> WaveFan:
    """Contact + vacuum + contact if ``u0 <= u1``, else one overcompressive delta shock.

    The delta shock moves at ``y = (sqrt(rho0) u0 + sqrt(rho1) u1)/(sqrt(rho0)+sqrt(rho1))``
    with strength ``sqrt(rho0 rho1)(u0 - u1) t``.
    """
    model = GasModel.pressureless()
    _positive(left, right, model)
    return _pressureless_fan(left, right)


def _pressureless_fan(left: State, right: State) -> WaveFan:
    """Pressureless Riemann fan allowing one vacuum side (used by the tracker)."""
    model = GasModel.pressureless()
    if left.is_vacuum and right.is_vacuum:
        return _constant_fan(model, left)
    if left.is_vacuum or right.is_vacuum or left.u <= right.u:
        if left.is_vacuum:
            return WaveFan(model, left, right, (ContactDiscontinuity(right.u, VACUUM, right),), "CD")
        if right.is_vacuum:
            return WaveFan(model, left, right, (ContactDiscontinuity(left.u, left, VACUUM),), "CD")
        if left == right:
            return _constant_fan(model, left)
        waves = (
            ContactDiscontinuity(left.u, left, VACUUM),
            VacuumFan(left.u, right.u),
            ContactDiscontinuity(right.u, VACUUM, right),
        )
        return WaveFan(model, left, right, waves, "CD")
    return _delta_fan(model, left, right)


def solve_chaplygin(left: State, right: State) -> WaveFan:
    """Two contacts through ``(rho_m, u_m)`` when lambda_1(U0) < lambda_2(U1), else a shadow wave."""
    model = GasModel.chaplygin()
    _positive(left, right, model)
    l1 = eigenvalues(model, left)[0]
    l2 = eigenvalues(model, right)[1]
    if l1 < l2:
        mid = State(2.0 / (l2 - l1), 0.5 * (l1 + l2))
        waves = (ContactDiscontinuity(l1, left, mid), ContactDiscontinuity(l2, mid, right))
        return WaveFan(model, left, right, waves, "contacts")
    return _delta_fan(model, left, right)


def chaplygin_sqrt_factorization(left: State, right: State) -> tuple[float, float]:
    """Both sides of [rho u]^2 - [rho][rho u^2 - 1/rho] = rho0 rho1 (dl1)(dl2)."""
    model = GasModel.chaplygin()
    _positive(left, right, model)
    r0, u0, r1, u1 = left.rho, left.u, right.rho, right.u
    lhs = (r1 * u1 - r0 * u0) ** 2 - (r1 - r0) * ((r1 * u1**2 - 1 / r1) - (r0 * u0**2 - 1 / r0))
    a0, b0 = eigenvalues(model, left)
    a1, b1 = eigenvalues(model, right)
    rhs = r0 * r1 * (a0 - a1) * (b0 - b1)
    return lhs, rhs


# ---------------------------------------------------------------------------
# generalized Chaplygin


def _require_generalized(model: GasModel):
    if model.kind is not Kind.GENERALIZED:
        raise ModelError(f"operation defined for the generalized Chaplygin model, got {model}")


def gamma_ss(model: GasModel, left: State, rho: float) -> float:
    """Velocity on the curve u = u0 - rho0^(-(1+a)/2) - rho^(-(1+a)/2)."""
    _require_generalized(model)
    if not (left.rho > 0 and rho > 0):
        raise DomainError("gamma_ss needs positive densities")
    e = -(1.0 + model.alpha) / 2.0
    return left.u - left.rho**e - rho**e


def _pow_diff(ri: float, rj: float, a: float) -> float:
    """ri^-a - rj^-a, accurate when rj is close to ri."""
    return -(ri**-a) * math.expm1(-a * math.log(rj / ri))


def shock_coefficient(model: GasModel, ri: float, rj: float) -> float:
    """A(ri, rj) = sqrt((rj/ri) (ri^-a - rj^-a)/(rj - ri))."""
    a = model.exponent
    if rj == ri:
        return math.sqrt(a * ri ** (-a - 1.0))
    L = math.log(rj / ri)
    ratio = -(ri**-a) * math.expm1(-a * L) / (ri * math.expm1(L))
    return math.sqrt((rj / ri) * ratio)


def _shock_jump(model: GasModel, r0: float, rm: float) -> float:
    """sqrt((rm - r0)/(r0 rm) (r0^-a - rm^-a)) = ((rm-r0)/rm) A(r0, rm)."""
    return (rm - r0) / rm * shock_coefficient(model, r0, rm)


def forward_curve(model: GasModel, left: State, rho: float) -> float:
    """Velocity reached from ``left`` by a 1-wave ending at density ``rho``."""
    if rho <= left.rho:
        return left.u + float(rarefaction_potential(model, rho) - rarefaction_potential(model, left.rho))
    return left.u - _shock_jump(model, left.rho, rho)


def backward_curve(model: GasModel, right: State, rho: float) -> float:
    """Velocity of states at density ``rho`` joined to ``right`` by a 2-wave."""
    if rho <= right.rho:
        return right.u - float(rarefaction_potential(model, rho) - rarefaction_potential(model, right.rho))
    return right.u + _shock_jump(model, right.rho, rho)


def _bracket_log(g, lo: float, hi: float, max_doublings: int = 1000):
    """Expand [lo, hi] (log-density) until g(lo) > 0 > g(hi); g decreasing."""
    step = math.log(2.0)
    n = 0
    while g(lo) <= 0:
        lo -= step
        n += 1
        if n > max_doublings:
            raise ConvergenceError("could not bracket the middle density from below")
    n = 0
    while g(hi) >= 0:
        hi += step
        n += 1
        if n > max_doublings:
            raise PreconditionError("no intersection of wave curves: data is not above the Gamma_ss curve")
    return lo, hi


def classical_intermediate(model: GasModel, left: State, right: State) -> State:
    """Middle state where the 1-wave curve of ``left`` meets the 2-wave curve of ``right``."""
    _require_generalized(model)

    def g(lr):
        r = math.exp(lr)
        return forward_curve(model, left, r) - backward_curve(model, right, r)

    lo, hi = math.log(min(left.rho, right.rho)), math.log(max(left.rho, right.rho))
    lo, hi = lo - 1e-12, hi + 1e-12
    lo, hi = _bracket_log(g, lo, hi)
    try:
        lr = brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    except (RuntimeError, ValueError) as exc:
        raise ConvergenceError(str(exc)) from exc
    rm = math.exp(lr)
    return State(rm, forward_curve(model, left, rm))


def two_shock_intermediate(model: GasModel, left: State, right: State) -> tuple[float, float, float, float]:
    """(rho_m, u_m, c1, c2) of the S1+S2 fan.

    ``rho_m > max(rho0, rho1)`` solves
    u0 - u1 = ((rm - r0)/rm) A(r0, rm) + ((rm - r1)/rm) A(r1, rm).
    """
    _require_generalized(model)
    _positive(left, right, model)
    r0, r1 = left.rho, right.rho
    du = left.u - right.u

    def h(lr):
        rm = math.exp(lr)
        return _shock_jump(model, r0, rm) + _shock_jump(model, r1, rm) - du

    start = math.log(max(r0, r1))
    if h(start) > 0:
        raise PreconditionError("velocity jump too small for two shocks")
    if h(start) == 0:
        rm = max(r0, r1)
    else:
        hi = start + math.log(2.0)
        n = 0
        while h(hi) < 0:
            hi += math.log(2.0)
            n += 1
            if n > 1000:
                raise PreconditionError("no two-shock solution: data lies on or below Gamma_ss")
        try:
            lr = brentq(h, start, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        except (RuntimeError, ValueError) as exc:
            raise ConvergenceError(str(exc)) from exc
        rm = math.exp(lr)
    um = left.u - _shock_jump(model, r0, rm)
    c1 = left.u - shock_coefficient(model, r0, rm)
    c2 = right.u + shock_coefficient(model, r1, rm)
    return rm, um, c1, c2


def generalized_shadow_exists(model: GasModel, left: State, right: State) -> bool:
    sp = shadow_speed(model, left, right)
    if sp is None or sp[1] == 0.0:
        return False
    return is_overcompressive(model, left, right, sp[0])


def _classical_fan(model: GasModel, left: State, right: State) -> WaveFan:
    mid = classical_intermediate(model, left, right)
    rm = mid.rho
    waves = []
    if rm > left.rho:
        waves.append(Shock(left.u - shock_coefficient(model, left.rho, rm), left, mid, 1))
        lab = "S1"
    else:
        if rm < left.rho:
            waves.append(RarefactionFan(model, left, mid, 1))
        lab = "R1"
    if rm > right.rho:
        waves.append(Shock(right.u + shock_coefficient(model, right.rho, rm), mid, right, 2))
        lab += "S2"
    else:
        if rm < right.rho:
            waves.append(RarefactionFan(model, mid, right, 2))
        lab += "R2"
    return WaveFan(model, left, right, tuple(waves), lab)


def above_gamma_ss(model: GasModel, left: State, right: State) -> bool:
    return right.u > gamma_ss(model, left, right.rho)


def solve_generalized(left: State, right: State, model: GasModel) -> list[WaveFan]:
    """Every Riemann solution of the generalized model: classical fan and/or shadow wave.

    Above Gamma_ss the classical fan exists; the overcompressive shadow wave
    exists where rho0 rho1 (u0-u1)^2 > (rho0-rho1)(rho1^-a - rho0^-a). Both
    are returned in the overlap; choose with ``energy.admissible_selection``.
    """
    _require_generalized(model)
    _positive(left, right, model)
    if left == right:
        return [_constant_fan(model, left)]
    fans = []
    classical = above_gamma_ss(model, left, right)
    if classical:
        fans.append(_classical_fan(model, left, right))
    if generalized_shadow_exists(model, left, right):
        fans.append(_delta_fan(model, left, right))
    if not fans:
        raise NoSolutionError(f"no Riemann solution found for {left} | {right} ({model})")
    return fans


def solve(model: GasModel, left: State, right: State) -> list[WaveFan]:
    """Dispatch to the model's solver; always returns a list of candidate fans."""
    if model.kind is Kind.PRESSURELESS:
        return [solve_pressureless(left, right)]
    if model.kind is Kind.CHAPLYGIN:
        return [solve_chaplygin(left, right)]
    return solve_generalized(left, right, model)


def rh_residual(model: GasModel, wave) -> np.ndarray:
    """speed [U] - [F(U)] across a sharp wave (zero for valid shocks and contacts)."""
    if not isinstance(wave, (Shock, ContactDiscontinuity)):
        raise ModelError("Rankine-Hugoniot residual applies to shocks and contacts")
    def fl(s):
        return np.zeros(2) if s.is_vacuum else flux(model, s)
    dU = wave.right.conserved() - wave.left.conserved()
    dF = fl(wave.right) - fl(wave.left)
    return wave.speed * dU - dF
