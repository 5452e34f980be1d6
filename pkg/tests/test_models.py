import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import models, pressure_models, states
from shadowwave.errors import DomainError, ModelError
from shadowwave.models import (
    AffineShift,
    GasModel,
    State,
    eigenvalues,
    energy_pair,
    flux,
    flux_conserved,
    shift_pair,
    wave_curve_constants,
)
from shadowwave.oracles import jacobian_eigenvalues

P, C, G = GasModel.pressureless(), GasModel.chaplygin(), GasModel.generalized(0.5)


def test_flux_examples():
    assert np.array_equal(flux(P, State(1, 0)), [0, 0])
    assert np.allclose(flux(C, State(1, 2)), [2, 3], atol=1e-15)
    assert np.allclose(flux(G, State(4, 1)), [4, 3.5], atol=1e-15)


def test_eigenvalue_examples():
    assert eigenvalues(C, State(1, 0)) == (-1.0, 1.0)
    assert eigenvalues(P, State(5, 3)) == (3.0, 3.0)
    l1, l2 = eigenvalues(G, State(1, 0))
    assert l1 == pytest.approx(-math.sqrt(0.5), abs=1e-15) and l2 == pytest.approx(math.sqrt(0.5), abs=1e-15)


def test_wave_curve_constant_examples():
    A1, A2, _, _ = wave_curve_constants(G, State(1, 0), State(1, 0))
    assert A1 == pytest.approx(-1.0) and A2 == pytest.approx(2 * math.sqrt(0.5) / 1.5)
    _, _, B1, B2 = wave_curve_constants(G, State(1, 0), State(1, 0))
    assert B1 == pytest.approx(-2 * math.sqrt(0.5) / 1.5) and B2 == pytest.approx(1.0)
    A1, A2, _, _ = wave_curve_constants(G, State(1e12, 0.3), State(1, 0))
    assert A1 == pytest.approx(0.3, abs=1e-8) and A2 == pytest.approx(0.3, abs=1e-8)


def test_energy_examples():
    assert energy_pair(P).eta(State(2, 3)) == 9.0
    assert energy_pair(C).eta(State(1, 0)) == 1.0
    assert energy_pair(G).eta(State(1, 0)) == pytest.approx(2 / 3, rel=1e-15)


def test_model_validation():
    with pytest.raises(ModelError):
        GasModel.generalized(1.0)
    with pytest.raises(ModelError):
        GasModel.generalized(0.0)
    with pytest.raises(ModelError):
        GasModel(GasModel.chaplygin().kind, 0.5)
    with pytest.raises(DomainError):
        State(-1.0, 0.0)
    with pytest.raises(DomainError):
        flux(C, State(0.0, 1.0))
    with pytest.raises(ModelError):
        wave_curve_constants(C, State(1, 0), State(1, 0))


@given(models, st.floats(0.01, 50.0))
def test_pressure_non_positive(model, rho):
    assert model.pressure(rho) <= 0.0


@given(models, states)
def test_eigenvalues_ordered_and_match_jacobian(model, s):
    l1, l2 = eigenvalues(model, s)
    assert l1 <= l2
    if model.has_pressure:
        assert l1 < l2
    j1, j2 = jacobian_eigenvalues(model, s)
    scale = 1 + abs(l1) + abs(l2)
    assert abs(j1 - l1) <= 1e-6 * scale and abs(j2 - l2) <= 1e-6 * scale


def test_jacobian_eigenvalues_on_random_grid():
    rng = np.random.default_rng(7)
    for model in (P, C, G, GasModel.generalized(0.2)):
        for _ in range(250):
            s = State(rng.uniform(0.1, 10), rng.uniform(-5, 5))
            l1, l2 = eigenvalues(model, s)
            j1, j2 = jacobian_eigenvalues(model, s)
            assert max(abs(j1 - l1), abs(j2 - l2)) <= 1e-6 * (1 + abs(l1) + abs(l2))


def _grad(f, U, h=1e-6):
    g = np.zeros(2)
    for j in range(2):
        dU = np.zeros(2)
        dU[j] = h * max(1.0, abs(U[j]))
        g[j] = (f(U + dU) - f(U - dU)) / (2 * dU[j])
    return g


def _jac(model, U, h=1e-6):
    J = np.zeros((2, 2))
    for j in range(2):
        dU = np.zeros(2)
        dU[j] = h * max(1.0, abs(U[j]))
        J[:, j] = (flux_conserved(model, U + dU) - flux_conserved(model, U - dU)) / (2 * dU[j])
    return J


@given(models, states)
def test_entropy_pair_compatibility(model, s):
    # grad Q = grad eta . DF
    pair = energy_pair(model)
    U = s.conserved()
    gq = _grad(pair.q_conserved, U)
    ge = _grad(pair.eta_conserved, U)
    rhs = ge @ _jac(model, U)
    assert np.allclose(gq, rhs, rtol=1e-6, atol=1e-6 * (1 + np.abs(rhs).max()))


def _hessian(f, U, h=1e-4):
    H = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            ei, ej = np.eye(2)[i] * h, np.eye(2)[j] * h
            H[i, j] = (f(U + ei + ej) - f(U + ei - ej) - f(U - ei + ej) + f(U - ei - ej)) / (4 * h * h)
    return H


@given(models, st.builds(State, st.floats(0.5, 5.0), st.floats(-3.0, 3.0)))
def test_energy_convex(model, s):
    H = _hessian(energy_pair(model).eta_conserved, s.conserved())
    assert np.linalg.eigvalsh(0.5 * (H + H.T)).min() >= -1e-5 * (1 + np.abs(H).max())


@given(models, states, st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_shift_keeps_hessian(model, s, a1, a2, c):
    p = energy_pair(model)
    q = shift_pair(p, model, AffineShift((a1, a2), c))
    U = s.conserved()
    diff = _hessian(q.eta_conserved, U, 1e-3) - _hessian(p.eta_conserved, U, 1e-3)
    scale = 1 + abs(a1) + abs(a2) + np.abs(_hessian(p.eta_conserved, U, 1e-3)).max()
    assert np.abs(diff).max() <= 1e-6 * scale


def test_identity_shift():
    for model in (P, C, G):
        p = energy_pair(model)
        assert shift_pair(p, model, AffineShift()) == p


@given(pressure_models, states, states)
def test_shift_vanishing_boundary_fluxes(model, left, right):
    from shadowwave.energy import affine_normalize

    q, _ = affine_normalize(energy_pair(model), model, left, right)
    scale = 1 + abs(energy_pair(model).q(left)) + abs(energy_pair(model).q(right))
    assert abs(q.q(left)) <= 1e-10 * scale and abs(q.q(right)) <= 1e-10 * scale
