"""Backward energy condition: choose the velocity ``u_delta`` of a point mass.

Delta Riemann data ``U0 | xi_delta delta | U1`` is approximated by the
three-state datum ``U0 | (xi_delta/mu, u_delta) | U1`` on ``|x| < mu/2``. The
selected ``u_delta`` maximizes the local energy production of the resulting
solution at ``t = 0+`` and, among maximizers, minimizes ``|u_delta|``
(the initial energy ``xi_delta u_delta^2/2`` plus terms that do not depend on it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .energy import admissible_selection, fan_production
from .errors import ConvergenceError, DomainError, ModelError, PreconditionError, ReportedAmbiguity
from .models import GasModel, Kind, State, eigenvalues, energy_pair, rarefaction_potential, wave_curve_constants
from .riemann import _shock_jump, shock_coefficient, solve

_TIE = 1e-10


@dataclass(frozen=True)
class DeltaRiemannDatum:
    left: State
    right: State
    xi_delta: float
    mu: float = 1e-6
    u_delta: float | None = None

    def __post_init__(self):
        if not (self.xi_delta > 0 and math.isfinite(self.xi_delta)):
            raise DomainError(f"xi_delta must be positive, got {self.xi_delta!r}")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise DomainError(f"mu must be positive, got {self.mu!r}")
        if not (self.left.rho > 0 and self.right.rho > 0):
            raise DomainError("delta Riemann data needs positive densities on both sides")

    @property
    def middle_density(self) -> float:
        return self.xi_delta / self.mu

    def middle(self, u_delta: float) -> State:
        return State(self.middle_density, u_delta)

    def with_u_delta(self, u_delta: float) -> "DeltaRiemannDatum":
        return replace(self, u_delta=float(u_delta))


@dataclass
class SelectionReport:
    u_delta_star: float
    d_at_star: float
    case_label: str
    candidates: list[tuple[float, float]] = field(default_factory=list)
    tie_break_applied: bool = False
    u_delta_mu: float | None = None
    d_mu: float | None = None


def min_abs_in(lo: float, hi: float) -> float:
    """Point of [lo, hi] closest to zero: minimal initial energy on a plateau."""
    return min(max(0.0, lo), hi) + 0.0


# ---------------------------------------------------------------------------
# pressureless


def effective_density(rho: float, R: float) -> float:
    """r = rho R / (sqrt(R) + sqrt(rho))^2, written to stay accurate for huge R."""
    return rho / (1.0 + math.sqrt(rho / R)) ** 2


def pressureless_case(u0: float, u1: float, u_delta: float) -> str:
    if u0 <= u1:
        if u_delta < u0:
            return "A1"
        return "A3" if u_delta > u1 else "A2"
    if u_delta < u1:
        return "B1"
    return "B3" if u_delta > u0 else "B2"


def pressureless_production(d: DeltaRiemannDatum, u_delta: float, mu: float | None = None) -> float:
    """-r0 (u0 - u_delta)_+^3 / 2 - r1 (u_delta - u1)_+^3 / 2 at finite ``mu`` (``mu=0``: limit)."""
    mu = d.mu if mu is None else mu
    if mu == 0:
        r0, r1 = d.left.rho, d.right.rho
    else:
        R = d.xi_delta / mu
        r0, r1 = effective_density(d.left.rho, R), effective_density(d.right.rho, R)
    return -0.5 * r0 * max(d.left.u - u_delta, 0.0) ** 3 - 0.5 * r1 * max(u_delta - d.right.u, 0.0) ** 3


def y_mu(d: DeltaRiemannDatum, mu: float | None = None) -> float:
    mu = d.mu if mu is None else mu
    if mu == 0:
        r0, r1 = d.left.rho, d.right.rho
    else:
        R = d.xi_delta / mu
        r0, r1 = effective_density(d.left.rho, R), effective_density(d.right.rho, R)
    s0, s1 = math.sqrt(r0), math.sqrt(r1)
    return (d.left.u * s0 + d.right.u * s1) / (s0 + s1)


def d_max(left: State, right: State) -> float:
    r0, r1 = left.rho, right.rho
    return -0.5 * r0 * r1 * (left.u - right.u) ** 3 / (math.sqrt(r0) + math.sqrt(r1)) ** 2


def select_pressureless(d: DeltaRiemannDatum) -> SelectionReport:
    u0, u1 = d.left.u, d.right.u
    if u0 <= u1:
        u = min_abs_in(u0, u1)
        return SelectionReport(u, 0.0, "A2", [(u0, 0.0), (u1, 0.0), (u, 0.0)], u0 < u1, u, 0.0)
    y = y_mu(d, 0.0)
    ym = y_mu(d)
    return SelectionReport(
        y, d_max(d.left, d.right), "B2", [(ym, pressureless_production(d, ym))], False,
        ym, pressureless_production(d, ym),
    )


# ---------------------------------------------------------------------------
# Chaplygin


def chaplygin_one_sided(left: State, right: State, u_delta: float) -> tuple[float, float]:
    """Limit productions of the shadow waves next to a very dense middle state."""
    model = GasModel.chaplygin()
    l1 = eigenvalues(model, left)[0]
    l2 = eigenvalues(model, right)[1]
    r0, u0, r1, u1 = left.rho, left.u, right.rho, right.u
    dl = r0 * (u_delta - u0) ** 3 + (u0 - u_delta) / r0 if u_delta < l1 else 0.0
    dr = r1 * (u1 - u_delta) ** 3 + (u_delta - u1) / r1 if u_delta > l2 else 0.0
    return dl, dr


def _stationary_max(left: State, right: State, c: float) -> float | None:
    """Maximizing root of [rho] x^2 - 2 [rho u] x + [rho u^2] - c = 0, rationalized."""
    r0, u0, r1, u1 = left.rho, left.u, right.rho, right.u
    b = r1 * u1 - r0 * u0
    e = r1 * u1**2 - r0 * u0**2
    disc = r0 * r1 * (u1 - u0) ** 2 + (r1 - r0) * c
    if disc < 0:
        return None
    den = b - math.sqrt(disc)
    if abs(den) <= 1e-14 * (abs(b) + math.sqrt(disc) + 1e-300):
        return None
    return (e - c) / den


def chaplygin_x_star(left: State, right: State) -> float | None:
    """Stationary maximum of the two-shadow production; None if it has none."""
    return _stationary_max(left, right, (1.0 / right.rho - 1.0 / left.rho) / 3.0)


def select_chaplygin(d: DeltaRiemannDatum) -> SelectionReport:
    model = GasModel.chaplygin()
    l1 = eigenvalues(model, d.left)[0]
    l2 = eigenvalues(model, d.right)[1]

    def D(u):
        return sum(chaplygin_one_sided(d.left, d.right, u))

    if l1 <= l2:
        u = min_abs_in(l1, l2)
        rep = SelectionReport(u, 0.0, "contacts", [(l1, 0.0), (l2, 0.0)], l1 < l2)
    else:
        cands = [(l2, D(l2)), (l1, D(l1))]
        xs = chaplygin_x_star(d.left, d.right)
        if xs is not None and l2 < xs < l1:
            cands.append((xs, D(xs)))
        u, best = max(cands, key=lambda p: (p[1], -abs(p[0])))
        label = "x*-interior" if xs is not None and u == xs else ("clamped-l1" if u == l1 else "clamped-l2")
        rep = SelectionReport(u, best, label, cands)
    _attach_finite(rep, d, model)
    return rep


# ---------------------------------------------------------------------------
# generalized Chaplygin


def _phi(model: GasModel, rho: float) -> float:
    return float(rarefaction_potential(model, rho))


def _production_from_mid(model: GasModel, r0: float, rm: float) -> float:
    """A(r0, rm) (a - b) for a shock from r0 to rm followed by a rarefaction into rho = inf."""
    a = model.alpha
    k = a / (1.0 + a)
    frac = (rm - r0) / rm
    diff = -(r0**-a) * math.expm1(-a * math.log(rm / r0))  # r0^-a - rm^-a
    inner = 0.5 * frac * diff - diff / (1.0 + a) + k * rm**-a * frac
    return shock_coefficient(model, r0, rm) * inner


def _mid_density(model: GasModel, side: State, u_delta: float, sign: int) -> float:
    """rho_m > rho_side on the shock curve of ``side`` that meets the rarefaction of the dense state.

    sign = +1: left side, u0 - jump(rm) = u_delta - phi(rm).
    sign = -1: right side, u1 + jump(rm) = u_delta + phi(rm).
    """
    r = side.rho

    def g(lr):
        rm = math.exp(lr)
        return sign * (side.u - u_delta) - _shock_jump(model, r, rm) + _phi(model, rm)

    lo = math.log(r)
    if g(lo) <= 0:
        return r
    hi = lo + 1.0
    n = 0
    while g(hi) > 0:
        hi += 1.0
        n += 1
        if n > 700:
            return math.inf
    try:
        return math.exp(brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500))
    except (RuntimeError, ValueError) as exc:
        raise ConvergenceError(str(exc)) from exc


def s1r2_production(model: GasModel, left: State, u_delta: float) -> tuple[float, float]:
    """(D, rho_m) of S1 + R2 joining ``left`` to a very dense state moving at ``u_delta``."""
    rm = _mid_density(model, left, u_delta, +1)
    if math.isinf(rm):
        return f_shadow(model, left, u_delta, True), rm
    return _production_from_mid(model, left.rho, rm), rm


def r1s2_production(model: GasModel, right: State, u_delta: float) -> tuple[float, float]:
    rm = _mid_density(model, right, u_delta, -1)
    if math.isinf(rm):
        return f_shadow(model, right, u_delta, False), rm
    return _production_from_mid(model, right.rho, rm), rm


def s1r2_derivative(model: GasModel, left: State, u_delta: float) -> float:
    """dD/du_delta of S1 + R2 by implicit differentiation of the matching condition."""
    return _side_derivative(model, left, u_delta, +1)


def r1s2_derivative(model: GasModel, right: State, u_delta: float) -> float:
    return _side_derivative(model, right, u_delta, -1)


def _side_derivative(model: GasModel, side: State, u_delta: float, sign: int) -> float:
    """Chain rule dD/drho_m * drho_m/du_delta with both factors in closed form."""
    al = model.alpha
    r = side.rho
    rm = _mid_density(model, side, u_delta, sign)
    if math.isinf(rm) or rm <= r * (1 + 1e-9):
        # endpoint: one-sided difference keeps the regime fixed
        h = 1e-7 * (1 + abs(u_delta))
        f = s1r2_production if sign > 0 else r1s2_production
        step = sign * h if math.isinf(rm) else -sign * h
        return (f(model, side, u_delta + step)[0] - f(model, side, u_delta)[0]) / step
    A = shock_coefficient(model, r, rm)
    diff = -(r**-al) * math.expm1(-al * math.log(rm / r))
    frac = (rm - r) / rm
    a = 0.5 * frac * diff
    b = diff / (1 + al) - al / (1 + al) * rm**-al * frac
    dD = -0.5 * A * (2 * a - (1 + al) * b) * (a + b) / ((rm - r) * diff)
    drm = -rm * diff / (diff * (math.sqrt(al) * rm ** (-(1 + al) / 2) + r / rm * A) + 0.5 * A * (2 * a - (1 + al) * b))
    return sign * dD * drm


def f_shadow(model: GasModel, side: State, u_delta: float, is_left: bool) -> float:
    """Limit production of the shadow wave between ``side`` and the dense middle state."""
    a = model.alpha
    k = a / (1.0 + a)
    w = u_delta - side.u if is_left else side.u - u_delta
    return 0.5 * side.rho * w**3 - k * side.rho**-a * w


def slope_bounds(model: GasModel, left: State, right: State) -> tuple[float, float]:
    """(m1, m2) = (3/2 - a/(1+a)) rho^-a for the left and right densities."""
    a = model.alpha
    c = 1.5 - a / (1.0 + a)
    return c * left.rho**-a, c * right.rho**-a


def generalized_one_sided(model: GasModel, left: State, right: State, u_delta: float) -> tuple[float, float, str, str]:
    """Limit productions and regime names of the left and right wave groups."""
    A1, A2, B1, B2 = wave_curve_constants(model, left, right)
    if u_delta <= A1:
        dl, ll = f_shadow(model, left, u_delta, True), "shadow"
    elif u_delta <= A2:
        dl, ll = s1r2_production(model, left, u_delta)[0], "S1R2"
    else:
        dl, ll = 0.0, "R1R2"
    if u_delta < B1:
        dr, lr = 0.0, "R1R2"
    elif u_delta < B2:
        dr, lr = r1s2_production(model, right, u_delta)[0], "R1S2"
    else:
        dr, lr = f_shadow(model, right, u_delta, False), "shadow"
    return dl, dr, ll, lr


def generalized_x0(model: GasModel, left: State, right: State) -> float | None:
    a = model.alpha
    c = 2.0 / 3.0 * a / (1.0 + a) * (right.rho**-a - left.rho**-a)
    return _stationary_max(left, right, c)


def select_generalized(d: DeltaRiemannDatum, model: GasModel) -> SelectionReport:
    if model.kind is not Kind.GENERALIZED:
        raise ModelError("select_generalized needs the generalized Chaplygin model")
    left, right = d.left, d.right
    A1, A2, B1, B2 = wave_curve_constants(model, left, right)

    def D(u):
        dl, dr, _, _ = generalized_one_sided(model, left, right, u)
        return dl + dr

    # the profile increases below min(A1, B1) and decreases above max(A2, B2)
    bps = sorted({A1, A2, B1, B2})
    cands: list[tuple[float, float]] = [(b, D(b)) for b in bps]
    x0 = generalized_x0(model, left, right)
    if x0 is not None and B2 <= x0 <= A1:
        cands.append((x0, D(x0)))
    for lo, hi in zip(bps[:-1], bps[1:]):
        if hi - lo < 1e-14:
            continue
        res = minimize_scalar(lambda u: -D(u), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        cands.append((float(res.x), -float(res.fun)))
    best = max(v for _, v in cands)
    tied = sorted({round(u, 12): u for u, v in cands if best - v <= _TIE * (1 + abs(best))}.values())
    plateau = None
    if A2 < B1 and abs(best) <= _TIE:
        plateau = (A2, B1)
        u_star = min_abs_in(A2, B1)
    else:
        if tied[-1] - tied[0] > 1e-6:
            # genuinely separate maximizers (the plateau case is handled above)
            mid = 0.5 * (tied[0] + tied[-1])
            if best - D(mid) > _TIE * (1 + abs(best)):
                raise ReportedAmbiguity(f"separate maxima of equal production at {tied}")
        if tied[-1] - tied[0] > 1e-6:
            u_star = min(tied, key=abs)
        else:
            # closed-form candidates come first in cands; prefer them over optimizer output
            u_star = next(u for u, v in cands if best - v <= _TIE * (1 + abs(best)))
    u_star += 0.0
    _, _, ll, lr = generalized_one_sided(model, left, right, u_star)
    tag = ""
    if ll == "shadow" and lr == "shadow":
        tag = ":x0" if x0 is not None and abs(u_star - x0) < 1e-9 else ":clamped"
    rep = SelectionReport(u_star, D(u_star), f"{ll}/{lr}{tag}", cands, plateau is not None)
    _attach_finite(rep, d, model)
    return rep


# ---------------------------------------------------------------------------
# profiles


def finite_production(d: DeltaRiemannDatum, model: GasModel, u_delta: float) -> tuple[float, str]:
    """Production at t = 0+ of the two Riemann problems of the three-state datum."""
    mid = d.middle(u_delta)
    pair = energy_pair(model)
    total, labels = 0.0, []
    for a, b in ((d.left, mid), (mid, d.right)):
        fans = solve(model, a, b)
        fan = fans[0] if len(fans) == 1 else admissible_selection(model, fans, pair)
        total += fan_production(model, pair, fan, 0.0)
        labels.append(fan.label)
    if model.kind is Kind.PRESSURELESS:
        return total, pressureless_case(d.left.u, d.right.u, u_delta)
    return total, "/".join(labels)


def limit_production(d: DeltaRiemannDatum, model: GasModel, u_delta: float) -> tuple[float, str]:
    """mu -> 0 limit of the production."""
    if model.kind is Kind.PRESSURELESS:
        return pressureless_production(d, u_delta, 0.0), pressureless_case(d.left.u, d.right.u, u_delta)
    if model.kind is Kind.CHAPLYGIN:
        dl, dr = chaplygin_one_sided(d.left, d.right, u_delta)
        l1 = eigenvalues(model, d.left)[0]
        l2 = eigenvalues(model, d.right)[1]
        lab = ("shadow" if u_delta < l1 else "contacts") + "/" + ("shadow" if u_delta > l2 else "contacts")
        return dl + dr, lab
    dl, dr, ll, lr = generalized_one_sided(model, d.left, d.right, u_delta)
    return dl + dr, f"{ll}/{lr}"


def production_profile(d: DeltaRiemannDatum, model: GasModel, u_delta_grid, mode: str = "finite") -> list[tuple[float, float, str]]:
    """(u_delta, D, regime) per grid point; failures are recorded as (u, nan, 'error: ...')."""
    if mode not in ("finite", "limit"):
        raise ValueError(f"mode must be 'finite' or 'limit', got {mode!r}")
    fn = finite_production if mode == "finite" else limit_production
    out = []
    for u in u_delta_grid:
        try:
            D, lab = fn(d, model, float(u))
        except (ArithmeticError, ValueError) as exc:
            D, lab = math.nan, f"error: {exc}"
        out.append((float(u), float(D), lab))
    return out


def _attach_finite(rep: SelectionReport, d: DeltaRiemannDatum, model: GasModel) -> None:
    """Finite-mu maximizer near the limit answer (window ~ sqrt(mu))."""
    from .oracles import grid_argmax

    w = max(50.0 * math.sqrt(d.mu / d.xi_delta) * (1 + abs(rep.u_delta_star)), 1e-6)

    def f(u):
        return finite_production(d, model, u)[0]

    try:
        x, fx = grid_argmax(f, rep.u_delta_star - w, rep.u_delta_star + w, n=201, refinements=2)
    except (ArithmeticError, ValueError, PreconditionError):
        return
    rep.u_delta_mu, rep.d_mu = x, fx


def select(d: DeltaRiemannDatum, model: GasModel) -> SelectionReport:
    if model.kind is Kind.PRESSURELESS:
        return select_pressureless(d)
    if model.kind is Kind.CHAPLYGIN:
        return select_chaplygin(d)
    return select_generalized(d, model)
