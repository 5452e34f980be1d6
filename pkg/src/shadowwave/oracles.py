"""Independent numerical checks: weak-form residuals, brute-force maximization, finite differences.

These routines never use the closed forms they are meant to verify. Weak-form
residuals integrate the conservation laws against smooth bumps for a solution
whose singular part is smeared over a strip of width ``eps t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureError
from .models import EnergyPair, GasModel, State
from .riemann import (
    ContactDiscontinuity,
    DeltaShock,
    RarefactionFan,
    Shock,
    VacuumFan,
    WaveFan,
)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


# ---------------------------------------------------------------------------
# test functions


def _bump(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1.0
    out[m] = np.exp(-1.0 / (1.0 - s[m] ** 2))
    return out


def _dbump(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1.0
    sm = s[m]
    out[m] = np.exp(-1.0 / (1.0 - sm**2)) * (-2.0 * sm / (1.0 - sm**2) ** 2)
    return out


@dataclass(frozen=True)
class TestFunctionFamily:
    """Products of C-infinity bumps ``(1 + p s_x) b(s_x) b(s_t)``.

    ``s_x = (x - xc)/wx`` and ``s_t = (t - tc)/wt`` with ``b(s) = exp(-1/(1 - s^2))``.
    """

    __test__ = False  # not a pytest class

    centers: tuple[tuple[float, float], ...]
    widths: tuple[tuple[float, float], ...]
    tilts: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.centers) != len(self.widths):
            raise ValueError("centers and widths differ in length")
        if not self.tilts:
            object.__setattr__(self, "tilts", tuple(0.0 for _ in self.centers))
        for (xc, tc), (wx, wt) in zip(self.centers, self.widths):
            if wx <= 0 or wt <= 0 or tc - wt <= 0:
                raise ValueError("bump supports must have positive widths and lie in t > 0")

    @property
    def count(self) -> int:
        return len(self.centers)

    def support(self, k: int) -> tuple[float, float, float, float]:
        (xc, tc), (wx, wt) = self.centers[k], self.widths[k]
        return xc - wx, xc + wx, tc - wt, tc + wt

    def evaluate(self, k: int, x, t):
        """(phi, phi_t, phi_x) of function ``k``."""
        (xc, tc), (wx, wt) = self.centers[k], self.widths[k]
        p = self.tilts[k]
        sx = (np.asarray(x) - xc) / wx
        st = (np.asarray(t) - tc) / wt
        bx, bt = _bump(sx), _bump(st)
        dbx, dbt = _dbump(sx), _dbump(st)
        poly = 1.0 + p * sx
        phi = poly * bx * bt
        phi_t = poly * bx * dbt / wt
        phi_x = (p * bx + poly * dbx) * bt / wx
        return phi, phi_t, phi_x

    @classmethod
    def around_fan(cls, fan: WaveFan, t: float = 1.0, width: float = 0.5) -> "TestFunctionFamily":
        """Bumps centred on each wave at time ``t`` plus tilted variants."""
        centers, widths, tilts = [], [], []
        for w in fan.waves:
            lo, hi = w.speed_range(t)
            for sp in {lo, hi}:
                for dx, p in ((0.0, 0.0), (0.2 * width, 0.7), (-0.3 * width, -0.4)):
                    centers.append((sp * t + dx, t))
                    widths.append((width * (1 + abs(sp)), 0.5 * t))
                    tilts.append(p)
        if not centers:
            centers, widths, tilts = [(0.0, t)], [(width, 0.5 * t)], [0.0]
        return cls(tuple(centers), tuple(widths), tuple(tilts))


# ---------------------------------------------------------------------------
# smeared solutions


@dataclass(frozen=True)
class SmearedFan:
    """A wave fan whose delta shock is spread over ``[c - eps t/2, c + eps t/2]``.

    ``speed_offset`` moves the strip off its correct trajectory (negative control).
    """

    fan: WaveFan
    eps: float
    speed_offset: float = 0.0

    @property
    def model(self) -> GasModel:
        return self.fan.model

    def pieces(self, ts: np.ndarray):
        """Ordered pieces ``(xa, xb, kind, data)`` at the times ``ts``; edges are arrays over ``ts``."""
        ts = np.asarray(ts, dtype=float)
        edges = []
        for w in self.fan.waves:
            if isinstance(w, DeltaShock):
                tau = ts - w.dss.t0
                c = np.asarray(w.dss.c(ts)) + self.speed_offset * tau
                half = 0.5 * self.eps * tau
                width = 2 * half
                strip = (np.asarray(w.dss.xi(ts)) / width, np.asarray(w.dss.us(ts)))
                edges.append((c - half, c + half, "strip", strip, w))
            else:
                lo, hi = w.speed_range(0.0)
                kind = "fan" if isinstance(w, RarefactionFan) else "vacuum" if isinstance(w, VacuumFan) else None
                edges.append((lo * ts, hi * ts, kind, w, w))
        out = []
        x = np.full_like(ts, -np.inf)
        state = self.fan.left
        for xa, xb, kind, data, w in edges:
            out.append((x, xa, "const", state))
            if kind is not None:
                out.append((xa, xb, kind, data))
            x = xb
            state = w.right
        out.append((x, np.full_like(ts, np.inf), "const", state))
        return out

    @staticmethod
    def state_on(kind, data, x, t):
        """(rho, u) on a piece; ``x`` has shape (n_t, n_x) and ``t`` shape (n_t, 1)."""
        if kind == "const":
            return np.full_like(x, data.rho), np.full_like(x, data.u)
        if kind == "strip":
            rho, u = data
            return np.broadcast_to(rho[:, None], x.shape), np.broadcast_to(u[:, None], x.shape)
        if kind == "fan":
            return data.state_at(x / t)
        return np.zeros_like(x), x / t


def _conserved_and_flux(model: GasModel, rho, u):
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    if model.has_pressure:
        with np.errstate(divide="ignore"):
            p = -np.power(rho, -model.exponent)
    else:
        p = 0.0 * rho
    return (rho, rho * u), (rho * u, rho * u * u + p)


def _gl_panels(a: float, b: float, n: int):
    """Nodes and weights of composite order-8 Gauss-Legendre on [a, b]."""
    edges = np.linspace(a, b, n + 1)
    h = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + h[:, None] * _GL_X[None, :]).ravel()
    w = (h[:, None] * _GL_W[None, :]).ravel()
    return x, w


def _integrate(sol: SmearedFan, fam: TestFunctionFamily, k: int, n_t: int, n_x: int, integrand):
    x0, x1, t0, t1 = fam.support(k)
    ts, wts = _gl_panels(t0, t1, n_t)
    tcol = ts[:, None]
    total = 0.0
    for xa, xb, kind, data in sol.pieces(ts):
        a, b = np.maximum(xa, x0), np.minimum(xb, x1)
        live = b > a
        if not live.any():
            continue
        a, b = np.where(live, a, 0.0), np.where(live, b, 0.0)
        # panels in proportion to the longest piece length
        m = max(1, int(math.ceil(n_x * float(np.max(b - a)) / (x1 - x0))))
        u01, w01 = _gl_panels(0.0, 1.0, m)
        xs = a[:, None] + (b - a)[:, None] * u01[None, :]
        wx = (b - a)[:, None] * w01[None, :]
        with np.errstate(all="ignore"):
            rho, u = sol.state_on(kind, data, xs, tcol)
            _, phi_t, phi_x = fam.evaluate(k, xs, tcol)
            vals = integrand(rho, u, phi_t, phi_x)  # (n_eq, n_t, n_x)
        vals = np.where(wx[None] > 0, vals, 0.0)
        total = total + np.einsum("etx,tx,t->e", vals, wx, wts)
    return np.atleast_1d(np.asarray(total, dtype=float))


def _converged(fn, n: int = 24, rtol: float = 1e-7, atol: float = 1e-10, max_n: int = 384):
    prev = fn(n)
    while True:
        n *= 2
        cur = fn(n)
        if np.all(np.abs(cur - prev) <= atol + rtol * np.abs(cur)):
            return cur
        if n >= max_n:
            raise QuadratureError(f"quadrature did not settle: {prev} vs {cur}")
        prev = cur


@dataclass
class ResidualReport:
    eps: list[float]
    residuals: np.ndarray  # shape (n_eps, n_functions, 2)
    order: float
    order_per_equation: list[float] = field(default_factory=list)

    @property
    def max_residual(self) -> list[float]:
        return [float(np.max(np.abs(r))) for r in self.residuals]


def _fit_order(eps: Sequence[float], vals: Sequence[float]) -> float:
    vals = np.maximum(np.asarray(vals, dtype=float), 1e-300)
    return float(np.polyfit(np.log(eps), np.log(vals), 1)[0])


def weak_residual(
    model: GasModel,
    fan: WaveFan,
    eps_schedule: Sequence[float] = (1e-3, 1e-4, 1e-5),
    fam: TestFunctionFamily | None = None,
    speed_offset: float = 0.0,
) -> ResidualReport:
    """Residuals of both conservation laws for the smeared solution, per eps and test function."""
    eps = [float(e) for e in eps_schedule]
    if len(eps) < 3 or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps schedule must be strictly decreasing with at least three entries")
    if fan.model != model:
        raise ValueError("fan belongs to a different model")
    fam = fam or TestFunctionFamily.around_fan(fan)

    def integrand(rho, u, phi_t, phi_x):
        (U1, U2), (F1, F2) = _conserved_and_flux(model, rho, u)
        return np.stack([U1 * phi_t + F1 * phi_x, U2 * phi_t + F2 * phi_x])

    res = np.zeros((len(eps), fam.count, 2))
    for i, e in enumerate(eps):
        sol = SmearedFan(fan, e, speed_offset)
        for k in range(fam.count):
            res[i, k] = _converged(lambda n: _integrate(sol, fam, k, n, n, integrand))
    worst = np.max(np.abs(res), axis=(1, 2))
    per_eq = [_fit_order(eps, np.max(np.abs(res[:, :, j]), axis=1)) for j in range(2)]
    return ResidualReport(eps, res, _fit_order(eps, worst), per_eq)


def weak_energy_balance(pair: EnergyPair, fan: WaveFan, eps: float, fam: TestFunctionFamily, k: int = 0) -> float:
    """<d_t eta + d_x Q, phi_k> = -integral of (eta phi_t + Q phi_x) for the smeared fan.

    The strip carries energy; comparing with ``integral D(t) phi(c(t), t) dt`` checks
    the production formula without using it.
    """
    sol = SmearedFan(fan, eps)

    def integrand(rho, u, phi_t, phi_x):
        vac = rho == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            eta = np.where(vac, 0.0, pair.density(np.where(vac, 1.0, rho), u))
            q = np.where(vac, pair.shift.cbar, pair.flux(np.where(vac, 1.0, rho), u))
        return (eta * phi_t + q * phi_x)[None]

    val = _converged(lambda n: _integrate(sol, fam, k, n, n, integrand))
    return -float(val[0])


# ---------------------------------------------------------------------------
# maximization and derivatives


def grid_argmax(
    f: Callable[[float], float], lo: float, hi: float, n: int = 2001, refinements: int = 3, zoom: float = 10.0
) -> tuple[float, float]:
    """Coarse-to-fine grid maximization; ties (equal up to a few ulps) go to the point of smallest |x|."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    if n < 3:
        raise ValueError("need at least three grid points")
    a, b = lo, hi
    best_x, best_f = None, -math.inf
    for _ in range(refinements + 1):
        xs = np.linspace(a, b, n)
        fs = np.array([f(float(x)) for x in xs])
        top = np.nanmax(fs)
        # equal up to rounding; a looser tolerance blurs plateaus with cubic contact
        tol = 8 * np.finfo(float).eps * (1.0 + abs(top))
        tied = xs[fs >= top - tol]
        x = float(tied[np.argmin(np.abs(tied))])
        if top > best_f + tol or (abs(top - best_f) <= tol and abs(x) < abs(best_x)):
            best_x, best_f = x, float(top)
        h = (b - a) / (n - 1)
        half = max(h * n / (2 * zoom), 2 * h)
        a, b = max(lo, best_x - half), min(hi, best_x + half)
        if b <= a:
            break
    return best_x, best_f


def fd_check(g: Callable[[float], float], dg: Callable[[float], float], points: Sequence[float], scale: float = 1.0) -> float:
    """Max over ``points`` of |finite difference - dg| / (1 + |dg|).

    Fourth-order central stencil with step ``1e-3 * scale``: exact for cubics,
    and rounding stays near 1e-13 for O(1) functions.
    """
    err = 0.0
    h = 1e-3 * scale
    for x in points:
        fd = (8.0 * (g(x + h) - g(x - h)) - (g(x + 2 * h) - g(x - 2 * h))) / (12.0 * h)
        d = dg(x)
        err = max(err, abs(fd - d) / (1.0 + abs(d)))
    return err


def jacobian_eigenvalues(model: GasModel, s: State, h: float = 1e-20) -> tuple[float, float]:
    """Eigenvalues of the flux Jacobian in conserved variables, by complex-step differentiation.

    Complex steps avoid cancellation, which matters at the double eigenvalue of
    the pressureless system where eigenvalue errors scale like sqrt(Jacobian error).
    """
    a = model.exponent

    def F(rho, m):
        p = -(rho ** (-a)) if model.has_pressure else 0.0
        return np.array([m, m * m / rho + p])

    rho, m = s.conserved()
    J = np.zeros((2, 2))
    J[:, 0] = F(rho + 1j * h, m + 0j).imag / h
    J[:, 1] = F(rho + 0j, m + 1j * h).imag / h
    tr, det = np.trace(J), np.linalg.det(J)
    disc = math.sqrt(max(tr * tr / 4 - det, 0.0))
    return tr / 2 - disc, tr / 2 + disc


def rh_oracle(model: GasModel, wave) -> float:
    """Max |speed [U] - [F]| computed from scratch for a shock or contact."""
    if not isinstance(wave, (Shock, ContactDiscontinuity)):
        raise ValueError("only sharp waves")
    res = []
    for s in (wave.left, wave.right):
        (a, b), (c, d) = _conserved_and_flux(model, np.array([s.rho]), np.array([s.u]))
        if s.is_vacuum:
            c, d = np.zeros(1), np.zeros(1)
        res.append((a[0], b[0], c[0], d[0]))
    (r0, m0, f0, g0), (r1, m1, f1, g1) = res
    return max(abs(wave.speed * (r1 - r0) - (f1 - f0)), abs(wave.speed * (m1 - m0) - (g1 - g0)))
