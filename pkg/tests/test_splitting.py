import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linking_saddle import (
    DiagonalSplitting,
    DomainMembershipError,
    StatePair,
    build_modal_basis,
    mixed_weak_norm,
    weighted_modal_norm,
)

from conftest import random_state


@pytest.fixture(scope="module")
def split31(line_problem):
    return DiagonalSplitting(line_problem.grid, line_problem.op)


@pytest.fixture(scope="module")
def basis31(split31):
    return build_modal_basis(split31)


def test_projection_formulas(split31, line_problem):
    x = random_state(line_problem, 0)
    p = split31.antidiagonal_part(x)
    q = split31.diagonal_part(x)
    assert np.array_equal(p.u, 0.5 * (x.u - x.v))
    assert np.array_equal(p.v, 0.5 * (x.v - x.u))
    assert np.array_equal(q.u, q.v)
    assert np.array_equal(q.u, 0.5 * (x.u + x.v))


def test_projections_sum_to_identity(split31, line_problem):
    for seed in range(20):
        x = random_state(line_problem, seed)
        back = split31.antidiagonal_part(x) + split31.diagonal_part(x)
        assert np.max(np.abs(back.u - x.u)) <= 1e-10 * max(1.0, np.max(np.abs(x.u)))
        assert np.max(np.abs(back.v - x.v)) <= 1e-10 * max(1.0, np.max(np.abs(x.v)))


def test_projections_are_idempotent(split31, line_problem):
    x = random_state(line_problem, 3)
    p = split31.antidiagonal_part(x)
    q = split31.diagonal_part(x)
    pp = split31.antidiagonal_part(p)
    qq = split31.diagonal_part(q)
    assert np.max(np.abs(pp.u - p.u)) <= 1e-12
    assert np.max(np.abs(qq.u - q.u)) <= 1e-12
    # and each annihilates the other's range
    assert split31.pair_norm(split31.diagonal_part(p)) <= 1e-12
    assert split31.pair_norm(split31.antidiagonal_part(q)) <= 1e-12


def test_energy_orthogonality_and_pythagoras(split31, line_problem):
    for seed in range(20):
        x = random_state(line_problem, 100 + seed)
        p = split31.antidiagonal_part(x)
        q = split31.diagonal_part(x)
        total = split31.pair_norm(x) ** 2
        assert abs(split31.pair_dot(p, q)) <= 1e-10 * max(1.0, total)
        parts = split31.pair_norm(p) ** 2 + split31.pair_norm(q) ** 2
        assert parts == pytest.approx(total, rel=1e-10)


def test_cross_term_is_difference_of_squares(split31, line_problem):
    for seed in range(20):
        x = random_state(line_problem, 200 + seed)
        direct = float(x.u @ line_problem.op.apply(x.v))
        p = split31.antidiagonal_part(x)
        q = split31.diagonal_part(x)
        via_split = 0.5 * split31.pair_norm(q) ** 2 - 0.5 * split31.pair_norm(p) ** 2
        assert direct == pytest.approx(via_split, rel=1e-10, abs=1e-10)
        assert split31.cross_form(x) == pytest.approx(direct, rel=1e-10, abs=1e-10)


def test_modal_basis_shape(basis31):
    assert basis31.count == 31
    assert np.array_equal(basis31.weights, 0.5 ** (1.0 + np.arange(31)))


def test_directions_are_unit_and_antidiagonal(split31, basis31):
    for k in (0, 1, 5, 30):
        y = basis31.direction(k)
        assert np.array_equal(y.u, -y.v)
        assert split31.pair_norm(y) == pytest.approx(1.0, rel=1e-10)
        back = split31.antidiagonal_part(y)
        assert np.max(np.abs(back.u - y.u)) <= 1e-12


def test_coefficients_pick_out_modes(basis31):
    coeffs = basis31.coefficients(basis31.direction(2))
    want = np.zeros(31)
    want[2] = 1.0
    assert coeffs == pytest.approx(want, abs=1e-10)


def test_weighted_norm_of_first_modes(basis31):
    assert weighted_modal_norm(basis31, basis31.direction(0)) == pytest.approx(0.5, rel=1e-12)
    assert weighted_modal_norm(basis31, basis31.direction(1)) == pytest.approx(0.25, rel=1e-12)
    zero = StatePair.zeros(31)
    assert weighted_modal_norm(basis31, zero) == 0.0


def test_weighted_norm_rejects_diagonal_component(basis31):
    with pytest.raises(DomainMembershipError):
        weighted_modal_norm(basis31, basis31.diagonal_direction(0))


def test_weighted_norm_is_weaker_than_energy_norm(split31, basis31, line_problem):
    for seed in range(30):
        x = random_state(line_problem, 300 + seed)
        y = split31.antidiagonal_part(x)
        assert weighted_modal_norm(basis31, y) <= split31.pair_norm(y) * (1.0 + 1e-12)


def test_weak_sequence_with_constant_strong_norm(basis31, split31):
    # later and later modes at fixed amplitude: the weighted norm halves
    # every step while the energy norm stays put
    for k in range(8):
        y = 0.5 * basis31.direction(k)
        assert weighted_modal_norm(basis31, y) == pytest.approx(2.0 ** (-k - 2), rel=1e-10)
        assert split31.pair_norm(y) == pytest.approx(0.5, rel=1e-12)


def test_mixed_norm_combines_both_parts(split31, basis31):
    x = basis31.direction(0) + basis31.diagonal_direction(0)
    # weak part contributes 1/2, diagonal part contributes 1
    assert mixed_weak_norm(basis31, x) == pytest.approx(1.0, rel=1e-10)
    y = 3.0 * basis31.direction(0)
    assert mixed_weak_norm(basis31, y) == pytest.approx(1.5, rel=1e-10)


def test_mixed_norm_bounded_by_energy_norm(split31, basis31, line_problem):
    for seed in range(30):
        x = random_state(line_problem, 400 + seed)
        assert mixed_weak_norm(basis31, x) <= split31.pair_norm(x) * (1.0 + 1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.floats(min_value=-5.0, max_value=5.0))
def test_projections_are_linear(seed, a):
    from linking_saddle import DomainSpec, ProblemSpec, discretize, power_nonlinearity

    prob = discretize(ProblemSpec(domain=DomainSpec.interval(9), nonlinearity=power_nonlinearity()))
    split = DiagonalSplitting(prob.grid, prob.op)
    rng = np.random.default_rng(seed)
    x = StatePair(rng.standard_normal(9), rng.standard_normal(9))
    y = StatePair(rng.standard_normal(9), rng.standard_normal(9))
    lhs = split.antidiagonal_part(x + a * y)
    rhs = split.antidiagonal_part(x) + a * split.antidiagonal_part(y)
    assert np.max(np.abs(lhs.u - rhs.u)) <= 1e-10 * (1.0 + np.max(np.abs(rhs.u)))
