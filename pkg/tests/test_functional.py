import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linking_saddle import (
    DomainSpec,
    EnergyOverflowError,
    GridMismatchError,
    InvalidSpecError,
    ProblemSpec,
    StatePair,
    directional_derivative,
    discretize,
    evaluate_J,
    linear_nonlinearity,
    lower_bound_constant,
    power_nonlinearity,
    riesz_gradient,
    small_t_constants,
    validate_hypotheses,
    zero_nonlinearity,
)

from conftest import random_state


def test_toy_energy_at_ones(toy_problem):
    x = StatePair(np.array([1.0]), np.array([1.0]))
    bd = evaluate_J(toy_problem, x)
    # cross = 4, each potential = (1/2)*(1/4)
    assert bd.cross == 4.0
    assert bd.potential_u == 0.125
    assert bd.total == 3.75


def test_toy_energy_at_crest(toy_problem):
    s = 2.0 * np.sqrt(2.0)
    x = StatePair(np.array([s]), np.array([s]))
    assert evaluate_J(toy_problem, x).total == pytest.approx(16.0, abs=1e-12)


def test_breakdown_total_identity(rect_problem):
    for seed in range(8):
        x = random_state(rect_problem, seed)
        bd = evaluate_J(rect_problem, x)
        regrouped = bd.cross - ((bd.quad_u + bd.quad_v) + (bd.potential_u + bd.potential_v))
        assert bd.total == regrouped


def test_swap_symmetry_is_exact(rect_problem):
    # same nonlinearity on both components, lam == delta == 0
    for seed in range(10):
        x = random_state(rect_problem, seed)
        a = evaluate_J(rect_problem, x).total
        b = evaluate_J(rect_problem, StatePair(x.v.copy(), x.u.copy())).total
        assert a == b


def test_directional_derivative_second_order(square_problem):
    rng = np.random.default_rng(11)
    orders = []
    for seed in range(6):
        x = random_state(square_problem, seed)
        d = StatePair(rng.standard_normal(square_problem.n), rng.standard_normal(square_problem.n))
        exact = directional_derivative(square_problem, x, d)
        errs = []
        for eps in (1e-3, 5e-4):
            plus = evaluate_J(square_problem, x + eps * d).total
            minus = evaluate_J(square_problem, x - eps * d).total
            errs.append(abs((plus - minus) / (2.0 * eps) - exact))
        if errs[1] > 1e-12:  # below that, roundoff hides the order
            orders.append(np.log(errs[0] / errs[1]) / np.log(2.0))
    assert orders and min(orders) > 1.9


def test_riesz_gradient_represents_derivative(square_problem):
    rng = np.random.default_rng(13)
    for seed in range(5):
        x = random_state(square_problem, seed)
        g = riesz_gradient(square_problem, x)
        for _ in range(3):
            d = StatePair(rng.standard_normal(square_problem.n), rng.standard_normal(square_problem.n))
            lhs = directional_derivative(square_problem, x, d)
            rhs = square_problem.pair_dot(g, d)
            assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-8)


def test_energy_overflow_names_the_term(toy_problem):
    x = StatePair(np.array([1e80]), np.array([1.0]))
    with pytest.raises(EnergyOverflowError, match="potential-u"):
        evaluate_J(toy_problem, x)


def test_shape_guard(toy_problem):
    with pytest.raises((GridMismatchError, ValueError)):
        evaluate_J(toy_problem, StatePair(np.ones(2), np.ones(2)))


def test_hypotheses_power_all_pass():
    report = validate_hypotheses(power_nonlinearity())
    assert report.growth_ok and report.small_amplitude_ok and report.superquadratic_ok
    assert report.all_ok


def test_hypotheses_zero_fails_superquadratic():
    report = validate_hypotheses(zero_nonlinearity())
    assert not report.superquadratic_ok
    assert not report.all_ok
    assert any("superquadratic" in key for key in report.witnesses)


def test_hypotheses_linear_fails_small_amplitude():
    report = validate_hypotheses(linear_nonlinearity())
    assert not report.small_amplitude_ok
    witness_keys = [k for k in report.witnesses if "small-amplitude" in k]
    assert witness_keys
    # the witness records a sample point where |f(t)/t| stays order one
    t, ratio = report.witnesses[witness_keys[0]]
    assert abs(ratio) > 0.5


@pytest.mark.parametrize("p", [3.0, 4.0, 6.0])
def test_power_growth_bound_resampled(p):
    nl = power_nonlinearity(p=p)
    rng = np.random.default_rng(17)
    t = np.concatenate([rng.uniform(-50, 50, 400), rng.uniform(-1e-3, 1e-3, 100)])
    bound = nl.scale * (1.0 + np.abs(t) ** (p - 1.0))
    assert np.all(np.abs(nl.f(None, t)) <= bound * (1.0 + 1e-12))


def test_lower_bound_constant_power():
    c = lower_bound_constant(power_nonlinearity())
    assert c == pytest.approx(0.25, abs=1e-6)


def test_lower_bound_constant_resampled():
    nl = power_nonlinearity()
    c = lower_bound_constant(nl)
    rng = np.random.default_rng(19)
    t = rng.uniform(1.0, 90.0, 500)  # inside the sampled envelope window
    floor = c * (np.abs(t) ** nl.mu - 1.0)
    lower = np.minimum(nl.F(None, t), nl.G(None, t))
    assert np.all(lower >= floor - 1e-9 * (1.0 + np.abs(floor)))


def test_lower_bound_constant_zero_warns():
    with pytest.warns(UserWarning):
        c = lower_bound_constant(zero_nonlinearity())
    assert c == 0.0


def test_small_t_constants_power():
    c_eps = small_t_constants(power_nonlinearity(), eps=1.0)
    assert c_eps == pytest.approx(0.25, abs=1e-6)


def test_small_t_constants_resampled():
    nl = power_nonlinearity()
    eps = 0.5
    c_eps = small_t_constants(nl, eps=eps)
    rng = np.random.default_rng(23)
    t = rng.uniform(-900.0, 900.0, 800)
    t = t[np.abs(t) > 1e-6]
    cap = 0.5 * eps * t**2 + c_eps * np.abs(t) ** nl.p
    top = np.maximum(np.abs(nl.F(None, t)), np.abs(nl.G(None, t)))
    assert np.all(top <= cap * (1.0 + 1e-9))


def test_small_t_constants_needs_positive_margin():
    with pytest.raises(InvalidSpecError):
        small_t_constants(power_nonlinearity(), eps=0.0)


def test_nonlinearity_validation():
    with pytest.raises(InvalidSpecError):
        power_nonlinearity(p=2.0)
    with pytest.raises(InvalidSpecError):
        power_nonlinearity(scale=0.0)


def test_problem_spec_rejects_nonfinite():
    with pytest.raises(InvalidSpecError):
        ProblemSpec(
            domain=DomainSpec.interval(3),
            nonlinearity=power_nonlinearity(),
            lam=float("nan"),
        )


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-30.0, max_value=30.0, allow_nan=False))
def test_power_derivative_matches_slope(t):
    nl = power_nonlinearity()
    h = 1e-6 * (1.0 + abs(t))
    fd = (nl.f(None, t + h) - nl.f(None, t - h)) / (2.0 * h)
    assert nl.df(None, t) == pytest.approx(fd, rel=1e-5, abs=1e-4)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=2.5, max_value=6.0, allow_nan=False),
    st.floats(min_value=0.1, max_value=3.0, allow_nan=False),
)
def test_power_potential_is_antiderivative(p, scale):
    nl = power_nonlinearity(p=p, scale=scale)
    t = np.linspace(-4.0, 4.0, 401)
    mid = 0.5 * (t[1:] + t[:-1])
    increments = nl.f(None, mid) * np.diff(t)
    rebuilt = nl.F(None, t[0]) + np.concatenate([[0.0], np.cumsum(increments)])
    have = nl.F(None, t)
    assert np.max(np.abs(rebuilt - have)) <= 1e-3 * (1.0 + np.max(np.abs(have)))
