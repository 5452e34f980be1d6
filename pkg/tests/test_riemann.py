import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.integrate import quad, solve_ivp

from conftest import alphas, states
from shadowwave.errors import DomainError, ModelError, NoSolutionError
from shadowwave.models import GasModel, State, eigenvalues, rarefaction_potential
from shadowwave.oracles import rh_oracle
from shadowwave.riemann import (
    ContactDiscontinuity,
    DeltaShock,
    DeltaShockState,
    RarefactionFan,
    Shock,
    VacuumFan,
    backward_curve,
    chaplygin_sqrt_factorization,
    classical_intermediate,
    deficit_discriminant,
    forward_curve,
    gamma_ss,
    rh_residual,
    shock_coefficient,
    solve,
    solve_chaplygin,
    solve_generalized,
    solve_pressureless,
    two_shock_intermediate,
)

P, C, G = GasModel.pressureless(), GasModel.chaplygin(), GasModel.generalized(0.5)


def test_pressureless_symmetric_delta():
    fan = solve_pressureless(State(1, 1), State(1, -1))
    (w,) = fan.waves
    assert isinstance(w, DeltaShock) and w.overcompressive
    assert w.dss.us(0.0) == 0.0
    assert w.dss.xi(3.0) == pytest.approx(6.0)


def test_pressureless_vacuum():
    fan = solve_pressureless(State(1, 0), State(1, 1))
    kinds = [type(w) for w in fan.waves]
    assert kinds == [ContactDiscontinuity, VacuumFan, ContactDiscontinuity]
    assert fan.waves[0].speed == 0 and fan.waves[2].speed == 1
    rho, u = fan.sample([0.5], 1.0)
    assert rho[0] == 0 and u[0] == 0.5


def test_pressureless_weighted_speed():
    w = solve_pressureless(State(4, 2), State(1, -1)).waves[0]
    assert w.dss.us(0.0) == pytest.approx(1.0, rel=1e-15)
    assert w.dss.xi(1.0) == pytest.approx(6.0, rel=1e-15)


def test_chaplygin_examples():
    fan = solve_chaplygin(State(1, 0), State(1, 0))
    mid = fan.states[1] if fan.waves else fan.left
    assert (mid.rho, mid.u) == (1.0, 0.0)
    (w,) = solve_chaplygin(State(1, 2), State(1, -2)).waves
    assert w.dss.us(0) == 0.0 and w.dss.kappa == pytest.approx(4.0)
    fan = solve_chaplygin(State(2, 1), State(1, 0))
    mid = fan.states[1]
    assert mid.rho == pytest.approx(4.0) and mid.u == pytest.approx(0.75)
    for c in fan.waves:
        assert rh_oracle(C, c) <= 1e-12


def test_factorization_examples():
    assert chaplygin_sqrt_factorization(State(1, 1), State(1, 1)) == (0.0, 0.0)
    lhs, rhs = chaplygin_sqrt_factorization(State(1, 2), State(1, -2))
    assert lhs == pytest.approx(16) and rhs == pytest.approx(16)


@given(states, states)
def test_factorization_identity(left, right):
    lhs, rhs = chaplygin_sqrt_factorization(left, right)
    assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))


def test_gamma_ss_examples():
    assert gamma_ss(G, State(1, 0), 1.0) == pytest.approx(-2.0)
    assert gamma_ss(G, State(4, 1), 1.0) == pytest.approx(-(4**-0.75))
    assert gamma_ss(G, State(1, 0.3), 1e16) == pytest.approx(0.3 - 1.0, abs=1e-10)
    with pytest.raises(ModelError):
        gamma_ss(C, State(1, 0), 1.0)


def test_generalized_examples():
    fans = solve_generalized(State(1, 1), State(1, -1), G)
    shadow = [f for f in fans if f.is_singular][0]
    w = shadow.delta()
    assert w.dss.us(0) == 0.0 and w.dss.kappa == pytest.approx(2.0)
    assert forward_curve(G, State(1, 0), 4.0) == pytest.approx(-math.sqrt(3 / 8), rel=1e-14)
    (fan,) = solve_generalized(State(2, 0.5), State(2, 0.5), G)
    assert fan.waves == ()


def test_two_shock_example():
    jump = 0.75 * math.sqrt(2 / 3)
    rm, um, c1, c2 = two_shock_intermediate(G, State(1, jump), State(1, -jump))
    assert rm == pytest.approx(4.0, rel=1e-12) and um == pytest.approx(0.0, abs=1e-14)
    assert c1 < c2
    rm, _, _, _ = two_shock_intermediate(G, State(1, 1e-7), State(1, -1e-7))
    assert rm == pytest.approx(1.0, rel=1e-5)


@given(alphas, states, st.floats(0.1, 10.0), st.floats(1.01, 1e3))
def test_two_shock_recovers_constructed_state(alpha, left, rho1, factor):
    # build the right state from a chosen intermediate density, then invert
    m = GasModel.generalized(alpha)
    rm = max(left.rho, rho1) * factor
    um = forward_curve(m, left, rm)
    right = State(rho1, um - (backward_curve(m, State(rho1, 0.0), rm)))
    got_rm, got_um, c1, c2 = two_shock_intermediate(m, left, right)
    assert got_rm == pytest.approx(rm, rel=1e-8)
    assert got_um == pytest.approx(um, abs=1e-9 * (1 + abs(um)))
    assert got_rm > max(left.rho, right.rho) and c1 < c2


@given(alphas, states, states)
def test_kappa_identity(alpha, left, right):
    m = GasModel.generalized(alpha)
    a = alpha
    disc = deficit_discriminant(m, left, right)
    rhs = left.rho * right.rho * (left.u - right.u) ** 2
    lhs = disc + (left.rho - right.rho) * (right.rho**-a - left.rho**-a)
    assert abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs))


def _check_fan(model, fan):
    assert fan.states[0] == fan.left and fan.states[-1] == fan.right
    edges = [w.speed_range(0.0) for w in fan.waves]
    for (lo, hi) in edges:
        assert lo <= hi + 1e-12
    for (_, hi), (lo, _) in zip(edges, edges[1:]):
        assert hi <= lo + 1e-9 * (1 + abs(lo))
    for w in fan.waves:
        if isinstance(w, (Shock, ContactDiscontinuity)):
            assert np.abs(rh_residual(model, w)).max() <= 1e-10 * (1 + abs(w.speed) * w.right.rho + w.left.rho)
        if isinstance(w, RarefactionFan):
            lo, hi = w.edge_speeds
            assert lo <= hi
        if isinstance(w, DeltaShock) and w.overcompressive:
            s = w.dss.us(0.0)
            tol = 1e-12 * (1 + abs(s))
            assert eigenvalues(model, w.left)[0] >= s - tol and s >= eigenvalues(model, w.right)[1] - tol


@given(st.one_of(st.just(P), st.just(C), alphas.map(GasModel.generalized)), states, states)
def test_fans_well_formed(model, left, right):
    try:
        fans = solve(model, left, right)
    except NoSolutionError:
        assert model.kind.value == "generalized_chaplygin"
        return
    for fan in fans:
        _check_fan(model, fan)


@given(states, states)
def test_pressureless_speed_between(left, right):
    assume(left.u > right.u)
    y = solve_pressureless(left, right).delta().dss.us(0.0)
    assert right.u - 1e-12 <= y <= left.u + 1e-12


@given(states, states)
def test_chaplygin_branches_exclusive(left, right):
    fan = solve_chaplygin(left, right)
    shadow = eigenvalues(C, left)[0] >= eigenvalues(C, right)[1]
    assert fan.is_singular == shadow


@given(alphas, states, st.floats(0.1, 10.0))
def test_gamma_ss_boundary_goes_to_shadow(alpha, left, rho1):
    m = GasModel.generalized(alpha)
    right = State(rho1, gamma_ss(m, left, rho1))
    fans = solve_generalized(left, right, m)
    assert any(f.is_singular for f in fans)
    assert all(f.is_singular for f in fans) or right.u > gamma_ss(m, left, rho1)


@pytest.mark.parametrize("family", [1, 2])
@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_rarefaction_matches_characteristic_ode(family, alpha):
    # integrate the integral curve of the k-th eigenvector, parametrised by lambda_k
    m = GasModel.generalized(alpha)
    if family == 1:
        left = State(1.0, 0.0)
        right = State(0.3, forward_curve(m, left, 0.3))
    else:
        right = State(1.0, 0.0)
        left = State(0.3, backward_curve(m, right, 0.3))
    fan = RarefactionFan(m, left, right, family)
    lo, hi = fan.edge_speeds
    assert lo < hi
    sign = -1.0 if family == 1 else 1.0

    def rhs(_lam, y):
        rho = y[0]
        c = float(m.sound_speed(rho))
        dlam = sign * c / rho * (1 - alpha) / 2
        return [1.0 / dlam, sign * c / rho / dlam]

    sol = solve_ivp(rhs, (lo, hi), [left.rho, left.u], rtol=1e-12, atol=1e-14, dense_output=True)
    for s in np.linspace(lo, hi, 7):
        r, u = fan.state_at(s)
        assert r == pytest.approx(sol.sol(s)[0], rel=1e-7)
        assert u == pytest.approx(sol.sol(s)[1], abs=1e-7)
        assert eigenvalues(m, State(float(r), float(u)))[family - 1] == pytest.approx(s, abs=1e-10)
    r_end, u_end = fan.state_at(hi)
    assert r_end == pytest.approx(right.rho, rel=1e-10) and u_end == pytest.approx(right.u, abs=1e-10)


def test_shock_coefficient_limit():
    for a in (0.2, 0.5, 1.0):
        m = GasModel.generalized(a) if a < 1 else C
        assert shock_coefficient(m, 2.0, 2.0 * (1 + 1e-9)) == pytest.approx(math.sqrt(a * 2.0 ** (-a - 1)), rel=1e-7)


def test_delta_state_constant_speed():
    dss = DeltaShockState(P, State(1, 1), State(2, -1))
    a = 1.0
    kappa = dss.u0 * a - (-2 - 1)
    assert dss.kappa == pytest.approx(kappa)
    for t in (0.5, 1.0, 7.0):
        assert dss.xi(t) == pytest.approx(dss.kappa * t)


@given(states, states, st.floats(0.1, 5.0), st.floats(-1, 1), st.floats(0.1, 20.0))
def test_delta_position_is_integral_of_speed(left, right, xi0, frac, t):
    assume(left.u > right.u + 1e-3)
    ud = right.u + (left.u - right.u) * (0.5 + 0.5 * frac)
    dss = DeltaShockState(P, left, right, xi0, ud)
    val, _ = quad(lambda s: dss.us(s), 0, t, epsabs=1e-12, epsrel=1e-11, limit=200)
    assert dss.c(t) == pytest.approx(val, abs=1e-9 * (1 + abs(val)))
    assert dss.xi(t) >= 0


def test_classical_requires_positive_density():
    with pytest.raises(DomainError):
        solve_chaplygin(State(0, 1), State(1, 0))


def test_no_solution_region():
    # below Gamma_ss with too weak a deficit there is neither structure
    m = GasModel.generalized(0.5)
    left, right = State(1.0, 0.0), State(1.0, 0.0)
    assert solve(m, left, right)[0].waves == ()
    assert classical_intermediate(m, State(1.0, 0.5), State(1.0, -0.5)).rho > 1.0
