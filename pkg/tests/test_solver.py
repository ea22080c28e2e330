import numpy as np
import pytest

from linking_saddle import (
    DomainSpec,
    InvalidSpecError,
    ProblemSpec,
    SolverConfig,
    StatePair,
    build_frame,
    choose_radii,
    discretize,
    euler_lagrange_residual,
    evaluate_J,
    flow_deformation,
    flow_map,
    minimax_consistency,
    newton_solve,
    power_nonlinearity,
    ps_monitor,
    residual_dual_norm,
    riesz_gradient,
    signflow_solve,
    solve_saddle,
    witness_predicate,
    zero_nonlinearity,
    deformation_witness_search,
)
from linking_saddle.solver import IterateTrace

from conftest import random_state

CREST = 2.0 * np.sqrt(2.0)


@pytest.fixture(scope="module")
def zero_problem():
    spec = ProblemSpec(domain=DomainSpec.interval(15), nonlinearity=zero_nonlinearity())
    return discretize(spec)


@pytest.fixture(scope="module")
def solved_line(line_problem):
    report = solve_saddle(line_problem)
    assert report.converged and report.nontrivial
    return report


def test_residual_zero_at_toy_crest(toy_problem):
    x = StatePair(np.array([CREST]), np.array([CREST]))
    res = euler_lagrange_residual(toy_problem, x)
    assert np.max(np.abs(res.u)) <= 1e-12
    assert np.max(np.abs(res.v)) <= 1e-12
    assert euler_lagrange_residual(toy_problem, StatePair.zeros(1)).u == 0.0


def test_dual_norm_matches_gradient_norm(square_problem):
    for seed in range(6):
        x = random_state(square_problem, seed)
        res = euler_lagrange_residual(square_problem, x)
        g = riesz_gradient(square_problem, x)
        assert residual_dual_norm(square_problem, res) == pytest.approx(
            square_problem.pair_norm(g), rel=1e-9
        )


def test_newton_from_near_crest(toy_problem):
    x0 = StatePair(np.array([2.5]), np.array([2.5]))
    report = newton_solve(toy_problem, x0=x0)
    assert report.converged and report.nontrivial
    assert report.state.u[0] == pytest.approx(CREST, abs=1e-10)
    assert report.critical_value == pytest.approx(16.0, abs=1e-10)
    assert report.gradient_norm <= 1e-10


def test_newton_from_low_ground_reports_trivial(toy_problem):
    # (1, 1) sits in the basin of the zero solution; the solver must say so
    report = newton_solve(toy_problem, x0=StatePair(np.array([1.0]), np.array([1.0])))
    assert report.converged
    assert not report.nontrivial
    assert np.max(np.abs(report.state.u)) <= 1e-8


def test_newton_keeps_swap_symmetry_bitwise(line_problem):
    w = np.sin(np.linspace(0.1, 3.0, line_problem.n))
    report = newton_solve(line_problem, x0=StatePair(w.copy(), w.copy()))
    for state in report.trace.states:
        assert np.array_equal(state.u, state.v)


def test_signflow_zero_preset_contracts_exactly(zero_problem):
    rng = np.random.default_rng(3)
    w = rng.standard_normal(zero_problem.n)
    x0 = StatePair(w.copy(), w.copy())
    cfg = SolverConfig(method="signflow", flow_step=0.25, flow_max_iter=60)
    report = signflow_solve(zero_problem, cfg, x0=x0, grad_tol=1e-12)
    norms = report.trace.state_norms
    assert norms[0] > 0.0
    for a, b in zip(norms, norms[1:]):
        if a <= 1e-12:
            break
        assert b / a == pytest.approx(0.75, abs=1e-12)
    assert norms[-1] < 1e-6 * norms[0]


def test_signflow_toy_reaches_crest_level(toy_problem):
    x0 = StatePair(np.array([2.0]), np.array([2.0]))
    cfg = SolverConfig(method="signflow", flow_max_iter=400)
    report = signflow_solve(toy_problem, cfg, x0=x0, grad_tol=1e-8)
    assert report.converged
    assert report.critical_value == pytest.approx(16.0, abs=1e-6)


def test_default_pipeline_toy(toy_problem):
    report = solve_saddle(toy_problem)
    assert report.method == "flow-then-newton"
    assert report.converged and report.nontrivial
    assert report.critical_value == pytest.approx(16.0, abs=1e-10)
    assert report.state.u[0] == pytest.approx(CREST, abs=1e-10)


def test_line_solution_solves_equations(line_problem, solved_line):
    res = euler_lagrange_residual(line_problem, solved_line.state)
    assert residual_dual_norm(line_problem, res) <= 1e-9
    # symmetric data: both components are the same positive bump
    assert np.array_equal(solved_line.state.u, solved_line.state.v)
    assert np.all(solved_line.state.u > 0.0)


def test_zero_preset_converges_to_trivial(zero_problem):
    report = solve_saddle(zero_problem)
    assert report.converged
    assert not report.nontrivial
    relaxed = solve_saddle(zero_problem, SolverConfig(eta=0.0))
    assert relaxed.nontrivial  # eta = 0 disables the triviality screen


def test_solver_config_validation():
    with pytest.raises(InvalidSpecError):
        SolverConfig(method="trust-region")
    with pytest.raises(InvalidSpecError):
        SolverConfig(init="warm")
    with pytest.raises(InvalidSpecError):
        SolverConfig(flow_step=1.0)
    with pytest.raises(InvalidSpecError):
        SolverConfig(grad_tol=0.0)
    with pytest.raises(InvalidSpecError):
        SolverConfig(eta=-0.5)


def test_trace_bookkeeping():
    trace = IterateTrace()
    assert len(trace) == 0
    trace.append(1.0, 0.5, 0.1, 2.0, StatePair.zeros(3))
    trace.append(1.1, 0.4, 0.1, 2.1, StatePair.zeros(3))
    assert len(trace) == 2
    assert trace.energies == [1.0, 1.1]


def test_ps_monitor_healthy_trace(line_problem, solved_line):
    report = ps_monitor(line_problem, solved_line.trace, grad_tol=1e-10)
    assert report.bounded
    assert report.grad_converged
    assert report.tail_cauchy
    assert report.fit_ok
    assert report.fit_slack >= -1e-9 * max(1.0, report.fit_c2)
    assert report.ok


def test_ps_monitor_constant_trace(toy_problem):
    trace = IterateTrace()
    x = StatePair(np.array([CREST]), np.array([CREST]))
    for _ in range(5):
        trace.append(16.0, 1e-12, 0.0, 8.0, x.copy())
    report = ps_monitor(toy_problem, trace, grad_tol=1e-10)
    assert report.tail_diameter == 0.0
    assert report.ok


def test_ps_monitor_empty_trace(toy_problem):
    with pytest.raises(InvalidSpecError):
        ps_monitor(toy_problem, IterateTrace(), grad_tol=1e-10)


def test_ps_monitor_flags_unbounded(toy_problem):
    trace = IterateTrace()
    x = StatePair(np.array([1.0]), np.array([1.0]))
    trace.append(float("inf"), 1.0, 0.1, 1.0, x)
    report = ps_monitor(toy_problem, trace, grad_tol=1e-10)
    assert not report.bounded
    assert not report.ok


def test_minimax_consistency_edges():
    assert minimax_consistency(1.0, 0.5)
    assert not minimax_consistency(0.4, 0.5)
    assert minimax_consistency(0.5 - 1e-12, 0.5)  # equality up to tolerance


def test_witness_predicate_strictness():
    level, eps, prox = 10.0, 0.1, 1.0
    ok = witness_predicate(10.05, 0.1, 0.5, level, eps, prox)
    assert ok
    # gradient bound is strict
    assert not witness_predicate(10.05, 8.0 * eps / prox, 0.5, level, eps, prox)
    assert witness_predicate(10.05, 8.0 * eps / prox - 1e-9, 0.5, level, eps, prox)
    # energy window is closed
    assert witness_predicate(level + 2.0 * eps, 0.1, 0.5, level, eps, prox)
    assert not witness_predicate(level + 2.0 * eps + 1e-9, 0.1, 0.5, level, eps, prox)
    # proximity cap
    assert not witness_predicate(10.0, 0.1, 2.0 * prox + 1e-9, level, eps, prox)


@pytest.fixture(scope="module")
def witness_setup(line_problem, solved_line):
    choice = choose_radii(line_problem)
    frame = build_frame(line_problem, choice.r, choice.rho, anchor_direction=solved_line.state)
    from linking_saddle import estimate_geometry, sample_sets

    geo = estimate_geometry(frame, sample_sets(frame, seed=0))
    return frame, geo


def test_witness_search_finds_near_critical_point(line_problem, solved_line, witness_setup):
    frame, geo = witness_setup
    gamma = flow_deformation(line_problem, frame, steps=12, step=0.2)
    level = solved_line.critical_value
    eps = 0.1 * abs(level)
    report = deformation_witness_search(
        line_problem, frame, gamma, level, geo.boundary_max, eps=eps, prox=1.0
    )
    assert report.precondition_ok
    assert report.found
    assert abs(report.energy - level) <= 2.0 * eps
    assert report.gradient_norm < 8.0 * eps / 1.0
    assert report.distance <= 2.0


def test_witness_search_budget_exhaustion(line_problem, solved_line, witness_setup):
    frame, geo = witness_setup
    gamma = flow_deformation(line_problem, frame, steps=2, step=1e-4)
    level = solved_line.critical_value
    eps = 0.1 * abs(level)
    # a huge proximity radius makes the gradient clause nearly unreachable
    # for a flow this slow, so the budget runs out
    report = deformation_witness_search(
        line_problem, frame, gamma, level, geo.boundary_max,
        eps=eps, prox=1e6, flow_steps=2, flow_step=1e-4,
    )
    assert not report.found
    assert "budget" in report.reason


def test_witness_search_validates_inputs(line_problem, witness_setup):
    frame, geo = witness_setup
    gamma = flow_deformation(line_problem, frame, steps=2, step=0.1)
    with pytest.raises(InvalidSpecError):
        deformation_witness_search(line_problem, frame, gamma, 10.0, 0.0, eps=-1.0, prox=1.0)
    with pytest.raises(InvalidSpecError):
        deformation_witness_search(line_problem, frame, gamma, 10.0, 9.99, eps=5.0, prox=1.0)
    with pytest.raises(InvalidSpecError):
        deformation_witness_search(line_problem, frame, gamma, 10.0, 0.0, eps=1.0, prox=0.0)


def test_flow_map_keeps_crest_fixed(toy_problem):
    x = StatePair(np.array([CREST]), np.array([CREST]))
    moved = flow_map(toy_problem, x, steps=5, step=0.2)
    assert moved.u == pytest.approx(x.u, rel=1e-8)


def test_flow_deformation_fixes_boundary(line_problem, witness_setup):
    frame, _ = witness_setup
    from linking_saddle import sample_sets

    gamma = flow_deformation(line_problem, frame, steps=4, step=0.1)
    samples = sample_sets(frame, boundary_count=24, seed=8)
    for row in samples.boundary_chart:
        x = frame.state_from_chart(row)
        gx = gamma(x)
        assert np.array_equal(gx.u, x.u) and np.array_equal(gx.v, x.v)
