import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from keynescross.equilibrium import (EquilibriumSource, critical_g0, critical_k, equilibria, newton_refine,
                                     quadratic_discriminant, thresholds)
from keynescross.errors import ConvergenceError, DegeneratePolicyError, ParameterError, SingularJacobianError
from keynescross.model import Constant, EconState, Linear, ModelParams, Quadratic, vector_field


def coords(points):
    return [(p.state.i, p.state.c) for p in points]


def test_constant():
    points = equilibria(ModelParams(2.0, 4.0), Constant(1.0))
    assert coords(points) == [(2.0, 1.0)]
    assert points[0].economically_sensible
    assert points[0].source is EquilibriumSource.CLOSED_FORM


def test_linear_saddle_is_not_sensible(scenario):
    points = equilibria(*scenario('linear-saddle'))
    assert coords(points) == [pytest.approx((-4.0, -2.0))]
    assert not points[0].economically_sensible


def test_linear_sensible():
    (p,) = equilibria(ModelParams(2.0, 4.0), Linear(1.0, 0.25))
    assert (p.state.i, p.state.c) == pytest.approx((4.0, 2.0))
    assert p.economically_sensible


def test_linear_degenerate():
    with pytest.raises(DegeneratePolicyError):
        equilibria(ModelParams(2.0, 4.0), Linear(1.0, 0.5))


def test_quadratic_two(scenario):
    points = equilibria(*scenario('quadratic-two'))
    assert coords(points) == [pytest.approx((2.0, 1.0)), pytest.approx((6.0, 3.0))]


def test_quadratic_fold(scenario):
    assert coords(equilibria(*scenario('quadratic-fold'))) == [pytest.approx((4.0, 2.0))]


def test_quadratic_none(scenario):
    assert equilibria(*scenario('quadratic-none')) == []


def test_quadratic_zero_base_spending():
    points = equilibria(ModelParams(2.0, 4.0), Quadratic(0.0, 0.0625))
    assert coords(points) == [pytest.approx((0.0, 0.0)), pytest.approx((8.0, 4.0))]


def test_thresholds():
    params = ModelParams(2.0, 4.0)
    assert critical_k(params) == 0.5
    assert critical_g0(params, 0.0625) == pytest.approx(1.0)
    assert thresholds(params, Linear(1.0, 0.75)).k_c == 0.5
    assert thresholds(params, Quadratic(1.0, 0.0625)).g0_crit == pytest.approx(1.0)
    t = thresholds(params, Constant(1.0))
    assert t.k_c is None and t.g0_crit is None
    with pytest.raises(ParameterError):
        critical_g0(params, 0.0)


@given(st.floats(1.05, 10.0), st.floats(0.01, 1.0), st.floats(0.0, 0.95))
@settings(max_examples=200, deadline=None)
def test_quadratic_roots_satisfy_vieta(alpha, k, fraction):
    params = ModelParams(alpha, 4.0)
    g0 = fraction * critical_g0(params, k)
    points = equilibria(params, Quadratic(g0, k))
    assert len(points) == 2
    lo, hi = (p.state.i for p in points)
    assert lo <= hi
    assert lo + hi == pytest.approx((1.0 - 1.0 / alpha) / k, rel=1e-10)
    assert lo * hi == pytest.approx(g0 / k, rel=1e-9, abs=1e-12)
    for p in points:
        assert p.state.c == pytest.approx(p.state.i / alpha)


def test_discriminant_sign_sets_count():
    params = ModelParams(2.0, 4.0)
    for g0, n in ((0.75, 2), (1.0, 1), (1.25, 0)):
        policy = Quadratic(g0, 0.0625)
        assert len(equilibria(params, policy)) == n
        assert np.sign(quadratic_discriminant(params, policy)) == {2: 1, 1: 0, 0: -1}[n]


def test_newton_refines_to_closed_form(scenario):
    params, policy = scenario('quadratic-two')
    p = newton_refine(params, policy, EconState(5.0, 2.0))
    assert (p.state.i, p.state.c) == pytest.approx((6.0, 3.0), abs=1e-10)
    assert p.source is EquilibriumSource.NEWTON_REFINED
    assert vector_field(params, policy, p.state).norm_inf <= 1e-12


def test_newton_without_root(scenario):
    with pytest.raises(ConvergenceError):
        newton_refine(*scenario('quadratic-none'), EconState(1.0, 1.0))


def test_newton_singular_jacobian(scenario):
    with pytest.raises(SingularJacobianError):
        newton_refine(*scenario('quadratic-fold'), EconState(4.0, 0.0))


def test_newton_rejects_bad_tolerance(scenario):
    with pytest.raises(ParameterError):
        newton_refine(*scenario('quadratic-two'), EconState(5.0, 2.0), tol=0.0)


def _random_scenario(rng):
    alpha, beta = rng.uniform(1.05, 10.0), rng.uniform(1.0, 10.0)
    params = ModelParams(alpha, beta)
    kind = rng.integers(3)
    if kind == 0:
        return params, Constant(rng.uniform(0.0, 5.0))
    if kind == 1:
        while True:
            k = rng.uniform(0.01, 0.99)
            if abs(alpha * (1.0 - k) - 1.0) > 0.05:
                return params, Linear(rng.uniform(0.0, 5.0), k)
    k = rng.uniform(0.01, 1.0)
    g0 = rng.uniform(0.0, 0.95) * critical_g0(params, k)
    return params, Quadratic(g0, k)


def test_newton_agrees_with_closed_form():
    rng = np.random.default_rng(20240601)
    for _ in range(1000):
        params, policy = _random_scenario(rng)
        for p in equilibria(params, policy):
            scale = max(1.0, p.state.norm_inf)
            guess = EconState(p.state.i + 1e-4 * scale, p.state.c - 1e-4 * scale)
            tol = 1e-12 * (1.0 + params.alpha + params.beta) * scale
            q = newton_refine(params, policy, guess, tol=tol)
            assert abs(q.state.i - p.state.i) <= 1e-9 * scale
            assert abs(q.state.c - p.state.c) <= 1e-9 * scale


def test_newton_on_affine_system_takes_one_step():
    params, policy = ModelParams(2.0, 4.0), Constant(1.0)
    p = newton_refine(params, policy, EconState(1.5, 0.5), tol=1e-12, max_iter=1)
    assert (p.state.i, p.state.c) == pytest.approx((2.0, 1.0), abs=1e-10)


@given(st.floats(1.01, 10.0), st.floats(1.0, 10.0), st.floats(0.0, 10.0), st.floats(0.0, 10.0))
@settings(max_examples=200, deadline=None)
def test_constant_equilibrium_scales_with_spending(alpha, beta, g, s):
    params = ModelParams(alpha, beta)
    (base,) = equilibria(params, Constant(g))
    (scaled,) = equilibria(params, Constant(s * g))
    assert scaled.state.i == pytest.approx(s * base.state.i, rel=1e-12, abs=1e-300)
    assert scaled.state.c == pytest.approx(s * base.state.c, rel=1e-12, abs=1e-300)
