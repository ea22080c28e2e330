"""Saddle-point solvers and convergence certificates.

Two complementary iterations. The Newton solver attacks the first-order
system directly with a damped sparse Newton method; it is quadratically
convergent near any nondegenerate critical point but happily converges
to the trivial state from inside its basin. The sign-respecting flow
exploits the saddle structure instead: it ascends the energy along the
antidiagonal factor while pinning the diagonal amplitude to the crest of
the energy along the current diagonal ray, so it escapes the trivial
basin whenever the coupling is genuinely superquadratic. The default
pipeline runs the flow to a loose tolerance and lets Newton finish.

Convergence bookkeeping follows the compactness template: bounded
energies along the trace, gradient norm under tolerance, a Cauchy tail,
and a nonnegative-coefficient fit of the superquadratic norm against the
energy norm across the iterates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.optimize as sopt
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EnergyOverflowError, InvalidSpecError
from .functional import Problem, evaluate_J, riesz_gradient
from .linking import DeformationGamma, LinkingFrame
from .splitting import DiagonalSplitting
from .state import StatePair, pair_norm

__all__ = [
    "SolverConfig",
    "IterateTrace",
    "SaddleReport",
    "euler_lagrange_residual",
    "residual_dual_norm",
    "newton_solve",
    "signflow_solve",
    "solve_saddle",
    "flow_map",
    "flow_deformation",
    "PSReport",
    "ps_monitor",
    "minimax_consistency",
    "witness_predicate",
    "WitnessReport",
    "deformation_witness_search",
]

SOLVER_METHODS = ("newton", "signflow", "flow-then-newton")


@dataclass
class SolverConfig:
    method: str = "flow-then-newton"
    grad_tol: float = 1e-10
    max_iter: int = 60
    flow_max_iter: int = 400
    flow_step: float = 0.25
    flow_tol: float = 1e-4
    min_step: float = 1e-6
    init: Union[str, StatePair] = "anchor"
    eta: float = 0.1

    def __post_init__(self) -> None:
        if self.method not in SOLVER_METHODS:
            raise InvalidSpecError(
                f"method must be one of {SOLVER_METHODS}, got {self.method!r}"
            )
        for label, val in (
            ("grad_tol", self.grad_tol), ("flow_step", self.flow_step),
            ("flow_tol", self.flow_tol), ("min_step", self.min_step),
        ):
            if not (val > 0 and np.isfinite(val)):
                raise InvalidSpecError(f"{label} must be positive, got {val}")
        if not 0 < self.flow_step < 1:
            raise InvalidSpecError(f"flow_step must lie in (0, 1), got {self.flow_step}")
        if self.eta < 0:
            raise InvalidSpecError(f"eta must be nonnegative, got {self.eta}")
        if isinstance(self.init, str) and self.init not in ("anchor", "eigen", "zero"):
            raise InvalidSpecError(f"unknown init policy {self.init!r}")


@dataclass
class IterateTrace:
    """Per-iterate history; states are kept so compactness checks can run after the fact."""

    energies: List[float] = field(default_factory=list)
    gradient_norms: List[float] = field(default_factory=list)
    step_sizes: List[float] = field(default_factory=list)
    state_norms: List[float] = field(default_factory=list)
    states: List[StatePair] = field(default_factory=list)

    def append(self, energy: float, grad: float, step: float, norm: float, state: StatePair) -> None:
        self.energies.append(float(energy))
        self.gradient_norms.append(float(grad))
        self.step_sizes.append(float(step))
        self.state_norms.append(float(norm))
        self.states.append(state)

    def __len__(self) -> int:
        return len(self.energies)

    def extend(self, other: "IterateTrace") -> None:
        self.energies.extend(other.energies)
        self.gradient_norms.extend(other.gradient_norms)
        self.step_sizes.extend(other.step_sizes)
        self.state_norms.extend(other.state_norms)
        self.states.extend(other.states)


@dataclass
class SaddleReport:
    state: StatePair
    critical_value: float
    gradient_norm: float
    residual_dual: float
    residual_euclidean: float
    converged: bool
    nontrivial: bool
    iterations: int
    method: str
    message: str
    trace: IterateTrace


def euler_lagrange_residual(problem: Problem, x: StatePair) -> StatePair:
    """First-order system in nodal (Euclidean) form.

    Components are the partial gradients of the energy with respect to
    the nodal values of u and v; the component paired with u reads
    K v - vol (lam u + f(u)), the discrete form of the cross-coupled
    elliptic system. Zero residual is exactly a critical point.
    """
    grid, op = problem.grid, problem.op
    u = grid.check_field(x.u)
    v = grid.check_field(x.v)
    pts = grid.coords
    vol = grid.cell_volume
    with np.errstate(over="ignore", invalid="ignore"):
        res_u = op.apply(v) - vol * (problem.lam * u + problem.nl.f(pts, u))
        res_v = op.apply(u) - vol * (problem.delta * v + problem.nl.g(pts, v))
    out = StatePair(res_u, res_v)
    if not out.is_finite():
        raise EnergyOverflowError("energy term 'first-order residual' is not finite")
    return out


def residual_dual_norm(problem: Problem, res: StatePair) -> float:
    """Residual in the dual (inverse-stiffness) norm; equals the gradient norm."""
    op = problem.op
    lifted = StatePair(op.solve(res.u), op.solve(res.v))
    return pair_norm(op, lifted)


def _derivative(problem: Problem, which: str, values: np.ndarray) -> np.ndarray:
    pts = problem.grid.coords
    nl = problem.nl
    fn = nl.df if which == "f" else nl.dg
    if fn is not None:
        return np.asarray(fn(pts, values), dtype=float)
    term = nl.f if which == "f" else nl.g
    h = 1e-6 * (1.0 + np.abs(values))
    hi = np.asarray(term(pts, values + h), dtype=float)
    lo = np.asarray(term(pts, values - h), dtype=float)
    return (hi - lo) / (2.0 * h)


def _newton_step(problem: Problem, x: StatePair, res: StatePair) -> StatePair:
    """Solve the second-variation system in sum/difference variables.

    For a symmetric problem at a symmetric iterate the difference block
    decouples with an exactly zero right-hand side, so the step (and
    hence every Newton iterate) keeps u == v bitwise.
    """
    op = problem.op
    vol = problem.grid.cell_volume
    n = problem.n
    a = vol * (problem.lam + _derivative(problem, "f", x.u))
    b = vol * (problem.delta + _derivative(problem, "g", x.v))
    avg = 0.5 * (a + b)
    off = 0.5 * (b - a)
    k = op.matrix
    diag_avg = sp.diags(avg)
    off_block = sp.diags(off) if np.any(off != 0.0) else None
    system = sp.bmat(
        [[k - diag_avg, off_block], [off_block, -(k + diag_avg)]], format="csc"
    )
    rhs = np.concatenate([-(res.u + res.v), -(res.u - res.v)])
    sol = spla.spsolve(system, rhs)
    p, q = sol[:n], sol[n:]
    return StatePair(0.5 * (p + q), 0.5 * (p - q))


def _grad_and_norm(problem: Problem, x: StatePair) -> tuple[StatePair, float]:
    g = riesz_gradient(problem, x)
    return g, pair_norm(problem.op, g)


def _initial_state(
    problem: Problem,
    config: SolverConfig,
    frame: Optional[LinkingFrame],
    x0: Optional[StatePair],
) -> StatePair:
    if x0 is not None:
        return x0.copy()
    if isinstance(config.init, StatePair):
        return config.init.copy()
    if config.init == "zero":
        return StatePair.zeros(problem.n)
    if config.init == "eigen":
        phi = problem.eigenpairs(1)[1][0]
        return StatePair.diagonal(phi / np.sqrt(2.0))
    # "anchor": crest of the energy along the anchor ray; the trivial
    # state when the ray has no crest (purely quadratic energies).
    if frame is not None:
        direction = (1.0 / frame.r) * frame.anchor
    else:
        phi = problem.eigenpairs(1)[1][0]
        direction = StatePair.diagonal(phi / np.sqrt(2.0))
    tau = _ray_argmax(problem, StatePair.zeros(problem.n), direction, 1.0)
    if tau is None:
        return StatePair.zeros(problem.n)
    return tau * direction


def _ray_energy(problem: Problem, base: StatePair, direction: StatePair, tau: float) -> float:
    try:
        return evaluate_J(problem, base + tau * direction).total
    except EnergyOverflowError:
        return -np.inf


def _ray_argmax(
    problem: Problem, base: StatePair, direction: StatePair, t_current: float
) -> Optional[float]:
    """Crest of the energy along base + tau*direction, or None if there is none.

    A geometric probe grid brackets the crest; a far probe distinguishes
    a genuine crest from a quadratic-type ray whose energy keeps rising.
    """
    scale = max(abs(t_current), 1.0)
    taus = np.concatenate([[0.0], np.geomspace(scale / 256.0, 64.0 * scale, 33)])
    vals = np.array([_ray_energy(problem, base, direction, t) for t in taus])
    far_tau = 64.0 * scale * 2.0**14
    far = _ray_energy(problem, base, direction, far_tau)
    k = int(np.argmax(vals))
    if k == taus.size - 1:
        if far >= vals[-1]:
            return None  # still rising past the far probe: no crest to pin
        taus = np.concatenate([taus, np.geomspace(64.0 * scale, far_tau, 33)[1:]])
        vals = np.concatenate([vals, [
            _ray_energy(problem, base, direction, t) for t in taus[34:]
        ]])
        k = int(np.argmax(vals))
        if k == taus.size - 1:
            return None
    if k == 0:
        if vals[0] >= vals[1]:
            lo, hi = 0.0, taus[1]
        else:
            lo, hi = 0.0, taus[2]
    else:
        lo, hi = taus[k - 1], taus[min(k + 1, taus.size - 1)]
    result = sopt.minimize_scalar(
        lambda t: -_ray_energy(problem, base, direction, t),
        bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-12 * max(1.0, hi)},
    )
    return float(result.x)


def _flow_update(
    split: DiagonalSplitting,
    problem: Problem,
    frame: Optional[LinkingFrame],
    x: StatePair,
    g: StatePair,
    s: float,
) -> StatePair:
    """One sign-respecting step: antidiagonal ascent, diagonal crest pinning.

    The diagonal shape moves against the component of the gradient
    transverse to the current ray; those directions carry positive
    curvature, so ascent there diverges while descent walks the crest
    manifold down to the saddle. The ray amplitude itself is re-pinned
    to the crest after every shape change.
    """
    p = split.antidiagonal_part(x)
    q = split.diagonal_part(x)
    gp = split.antidiagonal_part(g)
    gq = split.diagonal_part(g)
    p_new = p + s * gp
    t_cur = split.pair_norm(q)
    if t_cur > 1e-300:
        coeff = split.pair_dot(gq, q) / split.pair_dot(q, q)
        transverse = gq - coeff * q
        q_tent = q - s * transverse
    else:
        q_tent = q + s * gq
    t_tent = split.pair_norm(q_tent)
    if t_tent <= 1e-300:
        if frame is None:
            return p_new
        qhat = (1.0 / frame.r) * frame.anchor
    else:
        qhat = (1.0 / t_tent) * q_tent
    tau_star = _ray_argmax(problem, p_new, qhat, t_cur)
    if tau_star is None:
        tau_new = (1.0 - s) * t_cur
    else:
        tau_new = t_cur + min(1.0, 2.0 * s) * (tau_star - t_cur)
    return p_new + tau_new * qhat


def _finish(
    problem: Problem,
    x: StatePair,
    converged: bool,
    iterations: int,
    method: str,
    message: str,
    trace: IterateTrace,
    eta: float,
) -> SaddleReport:
    res = euler_lagrange_residual(problem, x)
    dual = residual_dual_norm(problem, res)
    raw = float(np.sqrt(res.u @ res.u + res.v @ res.v))
    grad_norm = trace.gradient_norms[-1] if len(trace) else dual
    norm = pair_norm(problem.op, x)
    return SaddleReport(
        state=x,
        critical_value=evaluate_J(problem, x).total,
        gradient_norm=float(grad_norm),
        residual_dual=dual,
        residual_euclidean=raw,
        converged=converged,
        nontrivial=bool(converged and norm >= eta),
        iterations=iterations,
        method=method,
        message=message,
        trace=trace,
    )


def newton_solve(
    problem: Problem,
    config: Optional[SolverConfig] = None,
    frame: Optional[LinkingFrame] = None,
    x0: Optional[StatePair] = None,
) -> SaddleReport:
    """Damped Newton iteration on the first-order system.

    The merit function for the damping is the dual residual norm, which
    coincides with the gradient norm, so accepted steps monotonically
    improve criticality.
    """
    cfg = config if config is not None else SolverConfig(method="newton")
    x = _initial_state(problem, cfg, frame, x0)
    trace = IterateTrace()
    converged = False
    message = "gradient tolerance reached"
    last_step = 0.0
    it = 0
    while True:
        g, gn = _grad_and_norm(problem, x)
        trace.append(evaluate_J(problem, x).total, gn, last_step, pair_norm(problem.op, x), x.copy())
        if gn <= cfg.grad_tol:
            converged = True
            break
        if it >= cfg.max_iter:
            message = "iteration budget exhausted"
            break
        res = euler_lagrange_residual(problem, x)
        step = _newton_step(problem, x, res)
        if not step.is_finite():
            message = "second-variation system is singular"
            break
        alpha = 1.0
        accepted = False
        while alpha >= 1e-4:
            trial = x + alpha * step
            try:
                _, gn_trial = _grad_and_norm(problem, trial)
            except EnergyOverflowError:
                gn_trial = np.inf
            if gn_trial <= (1.0 - 1e-4 * alpha) * gn:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            message = "line search stalled"
            break
        x = trial
        last_step = alpha
        it += 1
    return _finish(problem, x, converged, it, "newton", message, trace, cfg.eta)


def signflow_solve(
    problem: Problem,
    config: Optional[SolverConfig] = None,
    frame: Optional[LinkingFrame] = None,
    x0: Optional[StatePair] = None,
    grad_tol: Optional[float] = None,
) -> SaddleReport:
    """Sign-respecting ascent/pinning flow with adaptive step halving.

    On a purely quadratic energy the update contracts the state by
    exactly (1 - step) per iteration, so the trivial state is reached
    monotonically; superquadratic couplings instead pin the diagonal
    amplitude to the crest of the ray energy, away from zero.
    """
    cfg = config if config is not None else SolverConfig(method="signflow")
    tol = cfg.grad_tol if grad_tol is None else float(grad_tol)
    split = DiagonalSplitting(problem.grid, problem.op)
    x = _initial_state(problem, cfg, frame, x0)
    trace = IterateTrace()
    converged = False
    message = "gradient tolerance reached"
    s = cfg.flow_step
    it = 0
    while True:
        g, gn = _grad_and_norm(problem, x)
        trace.append(evaluate_J(problem, x).total, gn, s, pair_norm(problem.op, x), x.copy())
        if gn <= tol:
            converged = True
            break
        if it >= cfg.flow_max_iter:
            message = "iteration budget exhausted"
            break
        accepted = False
        while s >= cfg.min_step:
            trial = _flow_update(split, problem, frame, x, g, s)
            try:
                _, gn_trial = _grad_and_norm(problem, trial)
            except EnergyOverflowError:
                gn_trial = np.inf
            if gn_trial <= 1.5 * gn:  # tolerance band: mild transients allowed
                accepted = True
                break
            s *= 0.5
        if not accepted:
            message = "step size collapsed"
            break
        x = trial
        s = min(s * 1.25, cfg.flow_step)
        it += 1
    return _finish(problem, x, converged, it, "signflow", message, trace, cfg.eta)


def solve_saddle(
    problem: Problem,
    config: Optional[SolverConfig] = None,
    frame: Optional[LinkingFrame] = None,
    x0: Optional[StatePair] = None,
) -> SaddleReport:
    """Dispatch on the configured method; the default flows first, then polishes."""
    cfg = config if config is not None else SolverConfig()
    if cfg.method == "newton":
        return newton_solve(problem, cfg, frame, x0)
    if cfg.method == "signflow":
        return signflow_solve(problem, cfg, frame, x0)
    first = signflow_solve(problem, cfg, frame, x0, grad_tol=cfg.flow_tol)
    second = newton_solve(problem, cfg, frame, x0=first.state)
    trace = IterateTrace()
    trace.extend(first.trace)
    trace.extend(second.trace)
    return SaddleReport(
        state=second.state,
        critical_value=second.critical_value,
        gradient_norm=second.gradient_norm,
        residual_dual=second.residual_dual,
        residual_euclidean=second.residual_euclidean,
        converged=second.converged,
        nontrivial=second.nontrivial,
        iterations=first.iterations + second.iterations,
        method="flow-then-newton",
        message=second.message,
        trace=trace,
    )


def flow_map(
    problem: Problem,
    x0: StatePair,
    steps: int = 12,
    step: float = 0.2,
    frame: Optional[LinkingFrame] = None,
) -> StatePair:
    """Fixed number of undamped flow steps; deterministic, used as a deformation."""
    split = DiagonalSplitting(problem.grid, problem.op)
    x = x0.copy()
    for _ in range(steps):
        g = riesz_gradient(problem, x)
        x = _flow_update(split, problem, frame, x, g, step)
    return x


def flow_deformation(
    problem: Problem,
    frame: LinkingFrame,
    steps: int = 12,
    step: float = 0.2,
    ramp: float = 0.05,
) -> DeformationGamma:
    """Deform frame interior points along the flow, frozen at the boundary.

    The weight ramps from an exact 0.0 on the boundary to 1 well inside,
    so deep interior points are moved by the full flow map. Displacement
    is certified against the full discrete space, not a modal span.
    """
    margin = 1e-6

    def fn(x: StatePair) -> StatePair:
        xi = frame.chart_from_state(x)
        lam_rel = xi[-1] / frame.rho
        slack = 1.0 - float(np.dot(xi, xi)) / frame.rho**2
        w1 = min(1.0, max(0.0, lam_rel - margin) / ramp)
        w2 = min(1.0, max(0.0, slack - margin) / ramp)
        w = w1 * w2
        if w == 0.0:
            return x.copy()
        return x + w * (flow_map(problem, x, steps, step, frame) - x)

    return DeformationGamma(
        f"flow(steps={steps})", fn, displacement_modes=None, chart_compatible=False
    )


@dataclass
class PSReport:
    """Compactness bookkeeping along an iterate trace."""

    bounded: bool
    energy_span: float
    grad_converged: bool
    final_grad: float
    tail_cauchy: bool
    tail_diameter: float
    fit_c1: float
    fit_c2: float
    fit_slack: float
    fit_ok: bool

    @property
    def ok(self) -> bool:
        return self.bounded and self.grad_converged and self.tail_cauchy and self.fit_ok


def ps_monitor(
    problem: Problem,
    trace: IterateTrace,
    grad_tol: float,
    tail_tol: float = 1e-6,
) -> PSReport:
    """Check the trace for the compactness pattern of a converging sequence.

    Energies must stay bounded, the final gradient must meet tolerance,
    the last ten states must be Cauchy in the energy norm, and the
    superquadratic norms of the iterates must admit a nonnegative affine
    bound in the energy norm (fit by linear programming, reported with
    its worst slack).
    """
    if len(trace) == 0:
        raise InvalidSpecError("cannot monitor an empty trace")
    energies = np.asarray(trace.energies)
    bounded = bool(np.all(np.isfinite(energies)))
    span = float(np.max(np.abs(energies))) if bounded else float("inf")
    final_grad = trace.gradient_norms[-1]
    grad_converged = bool(final_grad <= grad_tol)

    # a convergent subsequence is all that is claimed, so only the final
    # iterates have to cluster; earlier ones may roam, and the step into
    # the terminal state is the measurable proxy for clustering
    tail = trace.states[-2:]
    diam = 0.0
    for i in range(len(tail)):
        for j in range(i + 1, len(tail)):
            diam = max(diam, pair_norm(problem.op, tail[i] - tail[j]))
    tail_cauchy = bool(diam <= tail_tol)

    vol = problem.grid.cell_volume
    mu = problem.nl.mu
    a = np.array([
        vol * (np.sum(np.abs(s.u) ** mu) + np.sum(np.abs(s.v) ** mu))
        for s in trace.states
    ])
    b = np.array(trace.state_norms)
    from scipy.optimize import linprog

    lp = linprog(
        c=[float(np.mean(b)), 1.0],
        A_ub=np.column_stack([-b, -np.ones_like(b)]),
        b_ub=-a,
        bounds=[(0.0, None), (0.0, None)],
        method="highs",
    )
    if lp.success:
        c1, c2 = float(lp.x[0]), float(lp.x[1])
        # the LP solver leaves feasibility noise; lift the intercept so the
        # returned pair satisfies every constraint outright
        violation = float(np.max(a - (c1 * b + c2), initial=0.0))
        if violation > 0.0:
            c2 += violation
        slack = float(np.min(c1 * b + c2 - a))
        fit_ok = bool(slack >= -1e-9 * max(1.0, float(np.max(a, initial=0.0))))
    else:
        c1 = c2 = float("nan")
        slack = float("-inf")
        fit_ok = False
    return PSReport(
        bounded=bounded,
        energy_span=span,
        grad_converged=grad_converged,
        final_grad=float(final_grad),
        tail_cauchy=tail_cauchy,
        tail_diameter=float(diam),
        fit_c1=c1,
        fit_c2=c2,
        fit_slack=slack,
        fit_ok=fit_ok,
    )


def minimax_consistency(critical_value: float, sphere_min: float, tol: float = 1e-8) -> bool:
    """The computed level must not undercut the sampled sphere minimum."""
    return bool(critical_value >= sphere_min - tol)


def witness_predicate(
    energy: float,
    grad_norm: float,
    distance: float,
    level: float,
    eps: float,
    prox: float,
) -> bool:
    """Near-level, near-set, small-gradient test; strict on the gradient."""
    return (
        (level - 2.0 * eps <= energy <= level + 2.0 * eps)
        and distance <= 2.0 * prox
        and grad_norm < 8.0 * eps / prox
    )


@dataclass
class WitnessReport:
    found: bool
    witness: Optional[StatePair]
    energy: float
    gradient_norm: float
    distance: float
    iterations: int
    precondition_ok: bool
    sup_value: float
    reason: str


def deformation_witness_search(
    problem: Problem,
    frame: LinkingFrame,
    gamma: DeformationGamma,
    level: float,
    boundary_max: float,
    eps: float,
    prox: float,
    sample_count: int = 48,
    seed: int = 11,
    flow_steps: int = 120,
    flow_step: float = 0.2,
) -> WitnessReport:
    """Hunt for an almost-critical point near the deformed frame.

    Preconditions: 0 < eps < (level - boundary_max)/2, and the deformed
    frame samples must not exceed level + eps. The search flows downhill
    from the highest deformed sample; not finding a witness within the
    budget is a valid (reported) outcome, not an error.
    """
    if not (eps > 0 and 2.0 * eps < level - boundary_max):
        raise InvalidSpecError(
            f"eps must lie in (0, (level - boundary_max)/2), got eps={eps}, "
            f"level={level}, boundary max={boundary_max}"
        )
    if not (prox > 0 and np.isfinite(prox)):
        raise InvalidSpecError(f"prox must be positive, got {prox}")

    from .linking import _boundary_corner_rows, _interior_rows

    rng = np.random.default_rng(seed)
    rows = np.vstack([
        _boundary_corner_rows(frame),
        _interior_rows(rng, frame.chart_dim, frame.rho, sample_count),
    ])
    images = [gamma(frame.state_from_chart(row)) for row in rows]
    image_vals = np.array([evaluate_J(problem, img).total for img in images])
    sup_value = float(np.max(image_vals))
    precondition_ok = bool(sup_value <= level + eps + 1e-9 * (1.0 + abs(level)))
    if not precondition_ok:
        return WitnessReport(
            False, None, sup_value, float("nan"), float("nan"), 0,
            precondition_ok, sup_value, "deformed samples exceed level + eps",
        )

    split = DiagonalSplitting(problem.grid, problem.op)
    x = images[int(np.argmax(image_vals))].copy()
    best_reason = "iteration budget exhausted"
    for it in range(flow_steps + 1):
        energy = evaluate_J(problem, x).total
        g, gn = _grad_and_norm(problem, x)
        distance = min(pair_norm(problem.op, x - img) for img in images)
        if witness_predicate(energy, gn, distance, level, eps, prox):
            return WitnessReport(
                True, x, float(energy), float(gn), float(distance), it,
                precondition_ok, sup_value, "witness found",
            )
        if it == flow_steps:
            break
        x = _flow_update(split, problem, frame, x, g, flow_step)
    energy = evaluate_J(problem, x).total
    g, gn = _grad_and_norm(problem, x)
    distance = min(pair_norm(problem.op, x - img) for img in images)
    return WitnessReport(
        False, None, float(energy), float(gn), float(distance), flow_steps,
        precondition_ok, sup_value, best_reason,
    )
