"""Front tracking for three-state approximations of delta Riemann data.

The datum ``U0 | (xi_delta/mu, u_delta) | U1`` (middle state on ``|x| < mu/2``)
is evolved exactly: two Riemann fans start at ``x = -mu/2`` and ``x = mu/2``,
fronts are followed in closed form, and every crossing of adjacent fronts is
resolved either by merging singular masses or by a fresh Riemann problem.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .backward import DeltaRiemannDatum, pressureless_case
from .errors import DegenerateError, PreconditionError, UnsupportedInteraction
from .models import VACUUM, GasModel, Kind, State, eigenvalues
from .riemann import (
    ContactDiscontinuity,
    DeltaShock,
    DeltaShockState,
    VacuumFan,
    WaveFan,
    _pressureless_fan,
    solve_chaplygin,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Front:
    """A contact (straight line) or a shadow wave starting at ``(x0, t0)``."""

    id: int
    left: State
    right: State
    t0: float
    x0: float
    speed: float = 0.0
    dss: DeltaShockState | None = None

    @property
    def kind(self) -> str:
        return "contact" if self.dss is None else "shadow"

    def position(self, t):
        if self.dss is None:
            return self.x0 + self.speed * (np.asarray(t, dtype=float) - self.t0)
        return self.dss.c(t)

    def velocity(self, t) -> float:
        return self.speed if self.dss is None else float(self.dss.us(t))

    def strength(self, t) -> float:
        return 0.0 if self.dss is None else float(self.dss.xi(t))


@dataclass(frozen=True)
class Region:
    """Constant state, or a vacuum fan ``u = (x - xo)/(t - to)`` when ``origin`` is set."""

    state: State
    origin: tuple[float, float] | None = None

    @property
    def is_vacuum(self) -> bool:
        return self.state.is_vacuum


@dataclass(frozen=True)
class Event:
    time: float
    position: float
    kind: str  # "merge" or "riemann"
    participants: tuple[int, ...]
    xi_delta: float
    u_delta: float
    outputs: tuple[int, ...]


@dataclass(frozen=True)
class Segment:
    t_start: float
    fronts: tuple[Front, ...]
    regions: tuple[Region, ...]


@dataclass
class TrackerState:
    model: GasModel
    datum: DeltaRiemannDatum
    fronts: list[Front]
    regions: list[Region]
    t: float
    mu: float
    epsilon: float | None = None
    events: list[Event] = field(default_factory=list)
    history: list[Segment] = field(default_factory=list)
    window: float = 1.0

    def segment_at(self, t: float) -> Segment:
        seg = self.history[0]
        for s in self.history:
            if s.t_start <= t:
                seg = s
        return seg

    def singular_fronts(self, t: float) -> list[tuple[float, float]]:
        seg = self.segment_at(t)
        return [(float(f.position(t)), f.strength(t)) for f in seg.fronts if f.dss is not None]

    def mass(self, t: float, L: float | None = None) -> float:
        """Regular plus singular mass in [-L, L] at time t."""
        L = self.window if L is None else L
        seg = self.segment_at(t)
        edges = [-math.inf] + [float(f.position(t)) for f in seg.fronts] + [math.inf]
        m = 0.0
        for reg, a, b in zip(seg.regions, edges[:-1], edges[1:]):
            a, b = max(a, -L), min(b, L)
            if b > a and not reg.is_vacuum:
                m += reg.state.rho * (b - a)
        for f in seg.fronts:
            if f.dss is not None and -L <= f.position(t) <= L:
                m += f.strength(t)
        return m

    def conserved_mass(self, t: float, L: float | None = None) -> float:
        """Window mass corrected by the boundary fluxes; constant in t."""
        d = self.datum
        return self.mass(t, L) + t * (d.right.rho * d.right.u - d.left.rho * d.left.u)


@dataclass
class LimitClassification:
    """``limit`` is the singular part from t = 0; ``phases`` lists (start time, state) when it later merges."""

    label: str
    case: str
    limit: DeltaShockState | None
    states: list[State]
    note: str = ""
    phases: list[tuple[float, DeltaShockState]] = field(default_factory=list)

    def at(self, t: float) -> DeltaShockState | None:
        cur = self.limit
        for t0, dss in self.phases:
            if t0 <= t:
                cur = dss
        return cur


class ProfileRow(NamedTuple):
    x: float
    rho: float
    u: float
    singular_mass: float
    front_x: float | None


# ---------------------------------------------------------------------------
# building blocks


def evolve_shadow(model: GasModel, left: State, right: State, xi0: float, u0_delta: float) -> DeltaShockState:
    """Shadow wave from a point mass ``xi0`` moving at ``u0_delta`` between two constant states."""
    if model.kind is not Kind.PRESSURELESS:
        raise PreconditionError("evolve_shadow implements the pressureless evolution; use DeltaShockState directly")
    tol = 1e-12 * (1 + abs(u0_delta))
    if not (left.is_vacuum or left.u >= u0_delta - tol) or not (right.is_vacuum or u0_delta >= right.u - tol):
        raise PreconditionError(f"need u0 >= u_delta >= u1, got {left.u} >= {u0_delta} >= {right.u}")
    if xi0 == 0.0:
        return DeltaShockState(model, left, right)
    return DeltaShockState(model, left, right, xi0, u0_delta)


def merge(left_wave, right_wave, T: float) -> tuple[float, float]:
    """Total strength and mass-weighted speed of two fronts meeting at time T.

    Accepts ``DeltaShockState`` or ``Front`` objects; contacts carry no mass.
    """
    def parts(w):
        if isinstance(w, Front):
            return w.strength(T), w.velocity(T)
        return float(w.xi(T)), float(w.us(T))

    xl, ul = parts(left_wave)
    xr, ur = parts(right_wave)
    if xl < 0 or xr < 0:
        raise PreconditionError("negative strength")
    tot = xl + xr
    if tot == 0.0:
        raise DegenerateError("both incoming strengths vanish")
    return tot, (ul * xl + ur * xr) / tot


def _overcompressive(model: GasModel, left: State, right: State, u: float) -> bool:
    tol = 1e-10 * (1 + abs(u))
    if model.kind is Kind.PRESSURELESS:
        ok_l = left.is_vacuum or left.u >= u - tol
        ok_r = right.is_vacuum or u >= right.u - tol
    else:
        ok_l = eigenvalues(model, left)[0] >= u - tol
        ok_r = u >= eigenvalues(model, right)[1] - tol
    return ok_l and ok_r


class _Ids:
    def __init__(self):
        self.n = 0

    def __call__(self) -> int:
        self.n += 1
        return self.n - 1


def _fan_to_fronts(model: GasModel, fan: WaveFan, x0: float, t0: float, ids: _Ids):
    """Fronts and inner regions (between consecutive fronts) of a fan centred at (x0, t0)."""
    fronts: list[Front] = []
    inner: list[Region] = []
    pending: Region | None = None
    for w in fan.waves:
        if isinstance(w, VacuumFan):
            pending = Region(VACUUM, (x0, t0))
            continue
        if isinstance(w, ContactDiscontinuity):
            f = Front(ids(), w.left, w.right, t0, x0, speed=w.speed)
        elif isinstance(w, DeltaShock):
            f = Front(ids(), w.left, w.right, t0, x0, dss=DeltaShockState(model, w.left, w.right, 0.0, None, t0, x0))
        else:
            raise UnsupportedInteraction(f"tracking does not handle {type(w).__name__}")
        if fronts:
            inner.append(pending if pending is not None else Region(f.left))
        pending = None
        fronts.append(f)
    return fronts, inner


def _riemann(model: GasModel, left: State, right: State) -> WaveFan:
    if model.kind is Kind.PRESSURELESS:
        return _pressureless_fan(left, right)
    return solve_chaplygin(left, right)


# ---------------------------------------------------------------------------
# event detection


def _crossing(a: Front, b: Front, t_now: float, t_end: float, mu: float) -> float | None:
    """Earliest t in (t_now, t_end] with position(a) = position(b), or None."""
    if a.dss is None and b.dss is None:
        rel = a.speed - b.speed
        if rel <= 0:
            return None
        gap = float(b.position(t_now) - a.position(t_now))
        T = t_now + max(gap, 0.0) / rel
        return T if T <= t_end else None

    def g(t):
        return float(b.position(t) - a.position(t))

    tol = 1e-12 * max(mu, 1e-300)
    if g(t_now) <= tol and a.velocity(t_now) >= b.velocity(t_now):
        return t_now
    span = t_end - t_now
    offsets = np.geomspace(span * 1e-9, span, 2000)
    ts = t_now + offsets
    vals = np.asarray(b.position(ts)) - np.asarray(a.position(ts))
    neg = np.nonzero(vals <= 0)[0]
    if neg.size == 0:
        return None
    k = int(neg[0])
    lo = t_now if k == 0 else float(ts[k - 1])
    hi = float(ts[k])
    if g(hi) == 0.0:
        return hi
    return brentq(g, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)


# ---------------------------------------------------------------------------
# driver


def _initial(d: DeltaRiemannDatum, model: GasModel, ids: _Ids):
    mid = d.middle(d.u_delta)
    h = 0.5 * d.mu
    fl, il = _fan_to_fronts(model, _riemann(model, d.left, mid), -h, 0.0, ids)
    fr, ir = _fan_to_fronts(model, _riemann(model, mid, d.right), h, 0.0, ids)
    regions = [Region(d.left)] + il
    # region between the two fans: either the slab or a vacuum fan of one side
    regions.append(Region(mid))
    regions += ir + [Region(d.right)]
    fronts = fl + fr
    if len(regions) != len(fronts) + 1:
        raise AssertionError("front/region bookkeeping mismatch")
    return fronts, regions


def run(
    d: DeltaRiemannDatum, model: GasModel, t_end: float, epsilon: float | None = None, max_events: int = 100
) -> tuple[TrackerState, LimitClassification]:
    """Track the three-state approximation up to ``t_end`` and classify its mu -> 0 limit."""
    if model.kind is Kind.GENERALIZED:
        raise UnsupportedInteraction("wave interactions of the generalized Chaplygin model are not implemented")
    if d.u_delta is None:
        raise PreconditionError("the datum needs u_delta (run the selector first or set it)")
    if t_end < 0:
        raise PreconditionError("t_end must be non-negative")
    ids = _Ids()
    fronts, regions = _initial(d, model, ids)
    speeds = [abs(d.left.u), abs(d.right.u), abs(d.u_delta)] + [abs(f.velocity(0.0)) for f in fronts]
    window = 10.0 * (1.0 + max(speeds)) * max(t_end, 1.0) + d.mu
    ts = TrackerState(model, d, fronts, regions, 0.0, d.mu, epsilon, window=window)
    ts.history.append(Segment(0.0, tuple(fronts), tuple(regions)))
    if t_end == 0:
        return ts, classify(ts)

    t = 0.0
    for _ in range(max_events):
        best = None
        for i in range(len(fronts) - 1):
            T = _crossing(fronts[i], fronts[i + 1], t, t_end, d.mu)
            if T is not None and (best is None or T < best[0] - 1e-14 * max(T, 1.0)):
                best = (T, i)
        if best is None:
            break
        T, i = best
        a, b = fronts[i], fronts[i + 1]
        X = 0.5 * float(a.position(T) + b.position(T))
        left_reg, right_reg = regions[i], regions[i + 2]
        L, R = left_reg.state, right_reg.state
        xa, xb = a.strength(T), b.strength(T)
        if xa + xb > 0:
            xi, u = merge(a, b, T)
            if not _overcompressive(model, L, R, u):
                raise UnsupportedInteraction(
                    f"merged front at t={T:.6g} is not overcompressive ({L} | u={u:.6g} | {R})"
                )
            nf = Front(ids(), L, R, T, X, dss=DeltaShockState(model, L, R, xi, u, T, X))
            new_fronts, inner, kind = [nf], [], "merge"
        else:
            xi, u = 0.0, 0.5 * (a.velocity(T) + b.velocity(T))
            new_fronts, inner = _fan_to_fronts(model, _riemann(model, L, R), X, T, ids)
            kind = "riemann"
        fronts = fronts[:i] + new_fronts + fronts[i + 2:]
        regions = regions[: i + 1] + inner + regions[i + 2:]
        ev = Event(T, X, kind, (a.id, b.id), xi, u, tuple(f.id for f in new_fronts))
        log.debug("event %s", ev)
        ts.events.append(ev)
        t = T
        ts.history.append(Segment(T, tuple(fronts), tuple(regions)))
    else:
        raise UnsupportedInteraction(f"more than {max_events} interactions before t_end")
    ts.fronts, ts.regions, ts.t = fronts, regions, t_end
    return ts, classify(ts)


def classify(ts: TrackerState) -> LimitClassification:
    """mu -> 0 limit chosen from the case of the datum; parameters from the point-mass evolution."""
    d, model = ts.datum, ts.model
    u0, u1, ud = d.left.u, d.right.u, d.u_delta
    xi = d.xi_delta
    if model.kind is Kind.PRESSURELESS:
        case = pressureless_case(u0, u1, ud)
        if case == "B2":
            return LimitClassification(
                "single-delta-shock", case, DeltaShockState(model, d.left, d.right, xi, ud), [d.left, d.right]
            )
        if case in ("B1", "B3"):
            return _catch_up_limit(model, d, case)
        if case == "A1":
            lim = DeltaShockState(model, d.left, VACUUM, xi, ud)
            return LimitClassification("contact+weighted-delta", case, lim, [d.left, VACUUM, d.right])
        if case == "A3":
            lim = DeltaShockState(model, VACUUM, d.right, xi, ud)
            return LimitClassification("contact+weighted-delta", case, lim, [d.left, VACUUM, d.right])
        lim = DeltaShockState(model, VACUUM, VACUUM, xi, ud)
        if ud == u0 or ud == u1:
            return LimitClassification("delta-contact", case, lim, [d.left, VACUUM, d.right])
        return LimitClassification("CD+vacuum+deltaCD", case, lim, [d.left, VACUUM, d.right])
    l1 = eigenvalues(model, d.left)[0]
    l2 = eigenvalues(model, d.right)[1]
    if l1 >= ud >= l2:
        return LimitClassification(
            "single-delta-shock", "overcompressive", DeltaShockState(model, d.left, d.right, xi, ud), [d.left, d.right]
        )
    if l1 < ud < l2:
        # the slab between the inner contacts loses mass at rate 2 and is gone at t = xi/2
        return LimitClassification(
            "contacts+fading-delta", "classical", None, [d.left, d.right],
            note="point mass decays as xi_delta - 2t and vanishes at t = xi_delta/2",
        )
    side = "left" if ud < l1 else "right"
    return LimitClassification("contact+weighted-delta", f"shadow-{side}", None, [d.left, d.right])


def _catch_up_limit(model: GasModel, d: DeltaRiemannDatum, case: str) -> LimitClassification:
    """The point mass sees vacuum on one side until it reaches the contact of the far state."""
    if case == "B1":
        first = DeltaShockState(model, d.left, VACUUM, d.xi_delta, d.u_delta)
        a = Front(0, d.left, VACUUM, 0.0, 0.0, dss=first)
        b = Front(1, VACUUM, d.right, 0.0, 0.0, speed=d.right.u)
    else:
        first = DeltaShockState(model, VACUUM, d.right, d.xi_delta, d.u_delta)
        a = Front(0, d.left, VACUUM, 0.0, 0.0, speed=d.left.u)
        b = Front(1, VACUUM, d.right, 0.0, 0.0, dss=first)
    horizon = 1.0
    while (T := _crossing(a, b, 0.0, horizon, 1.0)) is None:
        horizon *= 4.0
        if horizon > 1e12:
            raise UnsupportedInteraction("point mass never reaches the contact")
    xi, u = merge(a, b, T)
    final = DeltaShockState(model, d.left, d.right, xi, u, T, float(first.c(T)))
    return LimitClassification(
        "single-delta-shock", case, first, [d.left, VACUUM, d.right],
        note=f"weighted delta against vacuum until t = {T:.6g}, then a single delta shock",
        phases=[(0.0, first), (T, final)],
    )


def sample_profile(ts: TrackerState, t: float, xs) -> list[ProfileRow]:
    """Regular part at ``xs`` plus each singular mass at its nearest grid point (if inside the sampled range)."""
    xs = np.asarray(xs, dtype=float)
    seg = ts.segment_at(t)
    pos = [float(f.position(t)) for f in seg.fronts]
    rows = []
    for x in xs:
        k = int(np.searchsorted(pos, x, side="right"))
        reg = seg.regions[k]
        if reg.origin is not None:
            xo, to = reg.origin
            rows.append([x, 0.0, (x - xo) / (t - to) if t > to else 0.0, 0.0, None])
        else:
            rows.append([x, reg.state.rho, reg.state.u, 0.0, None])
    if len(xs):
        half = 0.5 * float(np.min(np.diff(np.sort(xs)))) if len(xs) > 1 else 0.0
        for f, p in zip(seg.fronts, pos):
            if f.dss is None:
                continue
            # masses outside the sampled range are not reported
            if not xs.min() - half <= p <= xs.max() + half:
                continue
            j = int(np.argmin(np.abs(xs - p)))
            rows[j][3] += f.strength(t)
            rows[j][4] = p
    return [ProfileRow(*r) for r in rows]
