"""Gas models with non-positive pressure, their fluxes and energy pairs.

Three isentropic systems share the form

    rho_t + (rho u)_x = 0,    (rho u)_t + (rho u^2 + p(rho))_x = 0

with ``p = 0`` (pressureless), ``p = -1/rho`` (Chaplygin) and
``p = -rho**(-alpha)``, ``0 < alpha < 1`` (generalized Chaplygin).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ModelError


class Kind(str, enum.Enum):
    PRESSURELESS = "pressureless"
    CHAPLYGIN = "chaplygin"
    GENERALIZED = "generalized_chaplygin"


@dataclass(frozen=True)
class GasModel:
    kind: Kind
    alpha: float | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Kind.GENERALIZED:
            if self.alpha is None or not (0.0 < self.alpha < 1.0):
                raise ModelError(f"alpha must lie in (0, 1), got {self.alpha!r}")
            object.__setattr__(self, "alpha", float(self.alpha))
        elif self.alpha is not None:
            raise ModelError(f"alpha is only meaningful for the generalized model ({kind.value})")

    @classmethod
    def pressureless(cls) -> "GasModel":
        return cls(Kind.PRESSURELESS)

    @classmethod
    def chaplygin(cls) -> "GasModel":
        return cls(Kind.CHAPLYGIN)

    @classmethod
    def generalized(cls, alpha: float) -> "GasModel":
        return cls(Kind.GENERALIZED, alpha)

    @property
    def exponent(self) -> float:
        """Exponent ``a`` in ``p = -rho**(-a)`` (0 for the pressureless gas)."""
        if self.kind is Kind.PRESSURELESS:
            return 0.0
        if self.kind is Kind.CHAPLYGIN:
            return 1.0
        return self.alpha

    @property
    def has_pressure(self) -> bool:
        return self.kind is not Kind.PRESSURELESS

    def pressure(self, rho):
        if not self.has_pressure:
            return 0.0 * np.asarray(rho, dtype=float) if np.ndim(rho) else 0.0
        return -np.power(rho, -self.exponent)

    def sound_speed(self, rho):
        """sqrt(p'(rho)) = sqrt(a) * rho**(-(1+a)/2)."""
        if not self.has_pressure:
            return 0.0 * np.asarray(rho, dtype=float) if np.ndim(rho) else 0.0
        a = self.exponent
        return math.sqrt(a) * np.power(rho, -(1.0 + a) / 2.0)

    def __str__(self):
        if self.kind is Kind.GENERALIZED:
            return f"{self.kind.value}(alpha={self.alpha:g})"
        return self.kind.value


@dataclass(frozen=True)
class State:
    """Density and velocity. ``rho == 0`` is vacuum."""

    rho: float
    u: float

    def __post_init__(self):
        rho, u = float(self.rho), float(self.u)
        if not (rho >= 0.0) or not math.isfinite(rho):
            raise DomainError(f"density must be finite and non-negative, got {rho!r}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "u", u)

    @property
    def is_vacuum(self) -> bool:
        return self.rho == 0.0

    def conserved(self) -> np.ndarray:
        return np.array([self.rho, self.rho * self.u])

    def __iter__(self):
        yield self.rho
        yield self.u


VACUUM = State(0.0, 0.0)


def _require_density(model: GasModel, rho: float):
    if model.has_pressure and not rho > 0.0:
        raise DomainError(f"{model} requires rho > 0, got rho = {rho!r}")


def flux(model: GasModel, s: State) -> np.ndarray:
    """(rho u, rho u^2 + p(rho))."""
    _require_density(model, s.rho)
    return np.array([s.rho * s.u, s.rho * s.u**2 + model.pressure(s.rho)])


def flux_conserved(model: GasModel, U) -> np.ndarray:
    """Flux as a function of the conserved vector (rho, m); used by derivative checks."""
    rho, m = float(U[0]), float(U[1])
    _require_density(model, rho)
    if rho == 0.0:
        return np.zeros(2)
    return np.array([m, m * m / rho + model.pressure(rho)])


def eigenvalues(model: GasModel, s: State) -> tuple[float, float]:
    """Characteristic speeds ``u -/+ sqrt(p'(rho))``."""
    _require_density(model, s.rho)
    if not model.has_pressure:
        return (s.u, s.u)
    c = float(model.sound_speed(s.rho))
    return (s.u - c, s.u + c)


def rarefaction_potential(model: GasModel, rho):
    """phi(rho) = (2 sqrt(a)/(1+a)) rho**(-(1+a)/2).

    Riemann invariants are ``u - phi`` (constant across 1-rarefactions) and
    ``u + phi`` (constant across 2-rarefactions).
    """
    a = model.exponent
    return 2.0 * math.sqrt(a) / (1.0 + a) * np.power(rho, -(1.0 + a) / 2.0)


def wave_curve_constants(model: GasModel, left: State, right: State) -> tuple[float, float, float, float]:
    """Thresholds (A1, A2, B1, B2) for connecting to a very dense middle state.

    ``u_delta <= A1``: shadow wave from the left state, ``A1 < u_delta <= A2``:
    S1+R2, above A2: R1+R2. Mirrored on the right with B1 < B2.
    """
    if model.kind is not Kind.GENERALIZED:
        raise ModelError("wave-curve constants are defined for the generalized Chaplygin model only")
    _require_density(model, left.rho)
    _require_density(model, right.rho)
    a = model.alpha
    e = -(1.0 + a) / 2.0
    g = 2.0 * math.sqrt(a) / (1.0 + a)
    A1 = left.u - left.rho**e
    A2 = left.u + g * left.rho**e
    B1 = right.u - g * right.rho**e
    B2 = right.u + right.rho**e
    return A1, A2, B1, B2


@dataclass(frozen=True)
class AffineShift:
    a: tuple[float, float] = (0.0, 0.0)
    cbar: float = 0.0

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if len(a) != 2 or not all(map(math.isfinite, a)) or not math.isfinite(self.cbar):
            raise ValueError("affine shift needs two finite coefficients and a finite constant")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "cbar", float(self.cbar))

    @property
    def is_identity(self) -> bool:
        return self.a == (0.0, 0.0) and self.cbar == 0.0


@dataclass(frozen=True)
class EnergyPair:
    """Energy density ``eta`` and energy flux ``q`` for one model.

    ``kinetic`` is the coefficient of rho*u^2 in eta; it fixes the energy
    carried by the singular part of a shadow wave, where the pressure
    potential vanishes in the limit.
    """

    model: GasModel
    kinetic: float
    shift: AffineShift = field(default_factory=AffineShift)

    def density(self, rho, u):
        m = self.model
        rho = np.asarray(rho, dtype=float)
        u = np.asarray(u, dtype=float)
        val = self.kinetic * rho * u**2
        if m.kind is Kind.CHAPLYGIN:
            val = val + 1.0 / rho
        elif m.kind is Kind.GENERALIZED:
            val = val + np.power(rho, -m.alpha) / (1.0 + m.alpha)
        a1, a2 = self.shift.a
        val = val + a1 * rho + a2 * rho * u
        return val if val.ndim else float(val)

    def flux(self, rho, u):
        m = self.model
        rho = np.asarray(rho, dtype=float)
        u = np.asarray(u, dtype=float)
        val = self.kinetic * rho * u**3
        if m.kind is Kind.CHAPLYGIN:
            val = val - u / rho
        elif m.kind is Kind.GENERALIZED:
            a = m.alpha
            val = val - a / (1.0 + a) * np.power(rho, -a) * u
        a1, a2 = self.shift.a
        if a1 or a2:
            p = -np.power(rho, -m.exponent) if m.has_pressure else 0.0
            val = val + a1 * rho * u + a2 * (rho * u**2 + p)
        val = val + self.shift.cbar
        return val if val.ndim else float(val)

    def eta(self, s: State) -> float:
        _require_density(self.model, s.rho)
        return self.density(s.rho, s.u)

    def q(self, s: State) -> float:
        _require_density(self.model, s.rho)
        return self.flux(s.rho, s.u)

    def eta_conserved(self, U) -> float:
        rho, m = float(U[0]), float(U[1])
        return self.density(rho, m / rho)

    def q_conserved(self, U) -> float:
        rho, m = float(U[0]), float(U[1])
        return self.flux(rho, m / rho)

    def strip_rate(self, dxi: float, us: float, dmom: float) -> float:
        """Time derivative of the energy held by a singular front.

        The front carries mass ``xi`` and momentum ``xi*us`` moving at ``us``;
        ``dxi`` and ``dmom`` are their time derivatives.
        """
        # d/dt(k xi us^2) = k (2 us dmom - us^2 dxi)
        a1, a2 = self.shift.a
        return self.kinetic * (2.0 * us * dmom - us * us * dxi) + a1 * dxi + a2 * dmom


def energy_pair(model: GasModel) -> EnergyPair:
    """Physical energy pair of each model.

    Pressureless: (rho u^2/2, rho u^3/2); Chaplygin: (rho u^2 + 1/rho,
    rho u^3 - u/rho); generalized: (rho u^2/2 + rho^-a/(1+a),
    rho u^3/2 - a/(1+a) rho^-a u).
    """
    kinetic = 1.0 if model.kind is Kind.CHAPLYGIN else 0.5
    return EnergyPair(model, kinetic)


def shift_pair(p: EnergyPair, model: GasModel, shift: AffineShift) -> EnergyPair:
    """Add ``a . U`` to eta and ``a . F(U) + cbar`` to q (shifts compose)."""
    if model != p.model:
        raise ModelError("energy pair belongs to a different model")
    a = (p.shift.a[0] + shift.a[0], p.shift.a[1] + shift.a[1])
    return EnergyPair(p.model, p.kinetic, AffineShift(a, p.shift.cbar + shift.cbar))
