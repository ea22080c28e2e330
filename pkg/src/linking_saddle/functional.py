"""The indefinite energy of the coupled system and its first variation.

For a pair x = (u, v) on a grid with Dirichlet form ``<.,.>`` and nodal
quadrature ``integrate``, the energy is

    J(x) = <u, v>  -  lam/2 |u|_2^2  -  delta/2 |v|_2^2
           - integral F(., u) - integral G(., v),

where F, G are the primitives of the coupling nonlinearities f, g. The
cross term <u, v> is indefinite: it is a difference of squares along the
diagonal/antidiagonal splitting, which is what makes saddle geometry the
natural notion of criticality here.

Gradients are returned as Riesz representatives in the product Dirichlet
inner product, so their norms are mesh-consistent and comparable across
refinement levels.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import EnergyOverflowError, InvalidSpecError
from .grid import DomainSpec, Grid, StiffnessOperator, build_grid, eigenpairs
from .state import StatePair, pair_dot, pair_norm

__all__ = [
    "NonlinearitySpec",
    "power_nonlinearity",
    "zero_nonlinearity",
    "linear_nonlinearity",
    "ProblemSpec",
    "Problem",
    "discretize",
    "EnergyBreakdown",
    "evaluate_J",
    "directional_derivative",
    "riesz_gradient",
    "HypothesisReport",
    "validate_hypotheses",
    "lower_bound_constant",
    "small_t_constants",
]

TermFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class NonlinearitySpec:
    """Coupling terms f, g with primitives F, G and growth metadata.

    Evaluators take (points, values) and broadcast over values; the
    point argument lets spatially varying couplings share the interface
    even though the shipped presets are autonomous. ``p`` is the growth
    exponent, ``mu`` the superquadraticity exponent, ``radius`` the
    threshold beyond which the superquadratic inequality is required,
    and ``scale`` the growth constant.
    """

    name: str
    f: TermFn
    F: TermFn
    g: TermFn
    G: TermFn
    p: float
    mu: float
    radius: float = 1.0
    scale: float = 1.0
    df: Optional[TermFn] = None
    dg: Optional[TermFn] = None

    def __post_init__(self) -> None:
        if not (self.p > 2.0 and np.isfinite(self.p)):
            raise InvalidSpecError(f"growth exponent requires p > 2, got {self.p}")
        if not (self.mu > 2.0 and np.isfinite(self.mu)):
            raise InvalidSpecError(f"superquadratic exponent requires mu > 2, got {self.mu}")
        if not (self.radius > 0 and np.isfinite(self.radius)):
            raise InvalidSpecError(f"radius must be positive, got {self.radius}")
        if not (self.scale > 0 and np.isfinite(self.scale)):
            raise InvalidSpecError(f"scale must be positive, got {self.scale}")


def power_nonlinearity(
    p: float = 4.0, scale: float = 1.0, mu: Optional[float] = None
) -> NonlinearitySpec:
    """Odd power coupling |t|^(p-2) t, the canonical superquadratic case."""
    p = float(p)
    if not p > 2.0:
        raise InvalidSpecError(f"power preset requires p > 2, got {p}")
    s = float(scale)
    if not (s > 0.0 and np.isfinite(s)):
        raise InvalidSpecError(f"power preset requires a positive scale, got {s}")

    def f(pts, t):
        t = np.asarray(t, dtype=float)
        return s * np.abs(t) ** (p - 2.0) * t

    def F(pts, t):
        t = np.asarray(t, dtype=float)
        return (s / p) * np.abs(t) ** p

    def df(pts, t):
        t = np.asarray(t, dtype=float)
        return s * (p - 1.0) * np.abs(t) ** (p - 2.0)

    return NonlinearitySpec(
        name=f"power(p={p:g})",
        f=f, F=F, g=f, G=F, df=df, dg=df,
        p=p, mu=p if mu is None else float(mu), radius=1.0, scale=max(s, 1.0),
    )


def zero_nonlinearity() -> NonlinearitySpec:
    """No coupling: the energy is purely quadratic and has only the trivial critical point."""

    def f(pts, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    return NonlinearitySpec(
        name="zero", f=f, F=f, g=f, G=f, df=f, dg=f,
        p=4.0, mu=4.0, radius=1.0, scale=1.0,
    )


def linear_nonlinearity(slope: float = 1.0) -> NonlinearitySpec:
    """Linear coupling slope*t; fails the small-amplitude hypothesis by design."""
    s = float(slope)

    def f(pts, t):
        return s * np.asarray(t, dtype=float)

    def F(pts, t):
        t = np.asarray(t, dtype=float)
        return 0.5 * s * t * t

    def df(pts, t):
        return np.full_like(np.asarray(t, dtype=float), s)

    return NonlinearitySpec(
        name=f"linear(slope={s:g})", f=f, F=F, g=f, G=F, df=df, dg=df,
        p=3.0, mu=3.0, radius=1.0, scale=max(abs(s), 1.0),
    )


@dataclass(frozen=True)
class ProblemSpec:
    """Continuous problem data: domain, linear shifts, coupling terms."""

    domain: DomainSpec
    nonlinearity: NonlinearitySpec
    lam: float = 0.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        for label, val in (("lam", self.lam), ("delta", self.delta)):
            if not np.isfinite(val):
                raise InvalidSpecError(f"{label} must be finite, got {val}")


class Problem:
    """A discretized :class:`ProblemSpec`: grid, stiffness operator, eigen cache."""

    def __init__(self, spec: ProblemSpec, method: str = "direct") -> None:
        self.spec = spec
        self.grid, self.op = build_grid(spec.domain, method=method)
        self.lam = float(spec.lam)
        self.delta = float(spec.delta)
        self.nl = spec.nonlinearity
        self._eigen_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    @property
    def n(self) -> int:
        return self.grid.n_interior

    def eigenpairs(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        if count not in self._eigen_cache:
            self._eigen_cache[count] = eigenpairs(self.grid, self.op, count)
        return self._eigen_cache[count]

    def principal_eigenvalue(self) -> float:
        return float(self.eigenpairs(1)[0][0])

    def pair_dot(self, a: StatePair, b: StatePair) -> float:
        return pair_dot(self.op, a, b)

    def pair_norm(self, x: StatePair) -> float:
        return pair_norm(self.op, x)


def discretize(spec: ProblemSpec, method: str = "direct") -> Problem:
    return Problem(spec, method=method)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy value with its constituent terms.

    ``total`` is computed as
    ``cross - ((quad_u + quad_v) + (potential_u + potential_v))``; the
    grouping is part of the contract because it makes the value exactly
    symmetric under swapping components of a symmetric problem.
    """

    cross: float
    quad_u: float
    quad_v: float
    potential_u: float
    potential_v: float
    total: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "total",
            self.cross - ((self.quad_u + self.quad_v) + (self.potential_u + self.potential_v)),
        )


def _check_term(value: float, label: str) -> float:
    if not np.isfinite(value):
        raise EnergyOverflowError(f"energy term '{label}' is not finite: {value}")
    return float(value)


def evaluate_J(problem: Problem, x: StatePair) -> EnergyBreakdown:
    """Evaluate the indefinite energy, term by term.

    Raises :class:`EnergyOverflowError` naming the first non-finite term.
    """
    grid, op = problem.grid, problem.op
    u = grid.check_field(x.u)
    v = grid.check_field(x.v)
    pts = grid.coords
    vol = grid.cell_volume
    with np.errstate(over="ignore", invalid="ignore"):
        Ku = op.apply(u)
        Kv = op.apply(v)
        cross = _check_term(0.5 * (u @ Kv + v @ Ku), "cross")
        quad_u = _check_term(0.5 * problem.lam * vol * float(u @ u), "quadratic-u")
        quad_v = _check_term(0.5 * problem.delta * vol * float(v @ v), "quadratic-v")
        potential_u = _check_term(vol * float(np.sum(problem.nl.F(pts, u))), "potential-u")
        potential_v = _check_term(vol * float(np.sum(problem.nl.G(pts, v))), "potential-v")
    return EnergyBreakdown(cross, quad_u, quad_v, potential_u, potential_v)


def directional_derivative(problem: Problem, x: StatePair, d: StatePair) -> float:
    """First variation of the energy at x in direction d."""
    grid, op = problem.grid, problem.op
    u = grid.check_field(x.u)
    v = grid.check_field(x.v)
    w = grid.check_field(d.u)
    z = grid.check_field(d.v)
    pts = grid.coords
    vol = grid.cell_volume
    with np.errstate(over="ignore", invalid="ignore"):
        value = (
            op.product(u, z)
            + op.product(v, w)
            - problem.lam * vol * float(u @ w)
            - problem.delta * vol * float(v @ z)
            - vol * float(problem.nl.f(pts, u) @ w)
            - vol * float(problem.nl.g(pts, v) @ z)
        )
    return _check_term(value, "directional-derivative")


def riesz_gradient(problem: Problem, x: StatePair) -> StatePair:
    """Gradient of the energy in the product Dirichlet inner product.

    The components solve  K g_u = K v - vol (lam u + f(u))  and
    K g_v = K u - vol (delta v + g(v)), so <grad, d> recovers the first
    variation for every direction d.
    """
    grid, op = problem.grid, problem.op
    u = grid.check_field(x.u)
    v = grid.check_field(x.v)
    pts = grid.coords
    vol = grid.cell_volume
    with np.errstate(over="ignore", invalid="ignore"):
        rhs_u = op.apply(v) - vol * (problem.lam * u + problem.nl.f(pts, u))
        rhs_v = op.apply(u) - vol * (problem.delta * v + problem.nl.g(pts, v))
    if not (np.all(np.isfinite(rhs_u)) and np.all(np.isfinite(rhs_v))):
        raise EnergyOverflowError("energy term 'gradient right-hand side' is not finite")
    return StatePair(op.solve(rhs_u), op.solve(rhs_v))


@dataclass(frozen=True)
class HypothesisReport:
    """Sampled verdicts for the three structural growth hypotheses.

    ``growth_ok``: |f|, |g| dominated by scale*(1 + |t|^(p-1)).
    ``small_amplitude_ok``: f(t)/t and g(t)/t vanish as t -> 0.
    ``superquadratic_ok``: 0 < mu*F(t) <= t f(t) (and likewise G, g)
    for |t| beyond the radius.
    Witnesses map a failed check to the offending (t, measured) sample.
    """

    growth_ok: bool
    small_amplitude_ok: bool
    superquadratic_ok: bool
    witnesses: dict

    @property
    def all_ok(self) -> bool:
        return self.growth_ok and self.small_amplitude_ok and self.superquadratic_ok


def _symmetric_log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    half = np.geomspace(lo, hi, count)
    return np.concatenate([-half[::-1], half])


def validate_hypotheses(
    nl: NonlinearitySpec,
    t_max: Optional[float] = None,
    n_samples: int = 2001,
    small_t_window: float = 1e-4,
    small_t_tol: float = 1e-2,
) -> HypothesisReport:
    """Check the growth hypotheses on symmetric log-spaced sample grids.

    Sampled, not proved: a pass certifies the inequalities on the grid
    only, which is the honest notion of verification for black-box
    coupling terms.
    """
    if t_max is None:
        t_max = max(10.0 * nl.radius, 100.0)
    pts = np.zeros((1, 1))
    main = _symmetric_log_grid(1e-6, float(t_max), n_samples)
    small = _symmetric_log_grid(1e-10, float(small_t_window), n_samples)
    slack = 1.0 + 1e-12
    witnesses: dict = {}

    growth_ok = True
    bound = nl.scale * (1.0 + np.abs(main) ** (nl.p - 1.0))
    for label, term in (("f", nl.f), ("g", nl.g)):
        vals = np.abs(np.asarray(term(pts, main), dtype=float))
        excess = vals - slack * bound
        k = int(np.argmax(excess))
        if excess[k] > 0:
            growth_ok = False
            witnesses[f"growth-{label}"] = (float(main[k]), float(vals[k]))

    small_ok = True
    for label, term in (("f", nl.f), ("g", nl.g)):
        ratios = np.abs(np.asarray(term(pts, small), dtype=float) / small)
        k = int(np.argmax(ratios))
        if ratios[k] > small_t_tol:
            small_ok = False
            witnesses[f"small-amplitude-{label}"] = (float(small[k]), float(ratios[k]))

    super_ok = True
    far = main[np.abs(main) >= nl.radius]
    for label, term, prim in (("f", nl.f, nl.F), ("g", nl.g, nl.G)):
        primitive = nl.mu * np.asarray(prim(pts, far), dtype=float)
        paired = far * np.asarray(term(pts, far), dtype=float)
        bad_pos = primitive <= 0
        bad_dom = primitive > slack * paired
        bad = bad_pos | bad_dom
        if np.any(bad):
            super_ok = False
            k = int(np.argmax(bad))
            witnesses[f"superquadratic-{label}"] = (float(far[k]), float(primitive[k]))

    return HypothesisReport(growth_ok, small_ok, super_ok, witnesses)


def lower_bound_constant(
    nl: NonlinearitySpec, t_max: float = 100.0, n_samples: int = 2001
) -> float:
    """Largest sampled constant k with F, G >= k (|t|^mu - 1) everywhere.

    Positive for genuinely superquadratic terms; returns 0.0 with a
    warning when no positive constant fits the samples.
    """
    pts = np.zeros((1, 1))
    t = _symmetric_log_grid(1e-6, float(t_max), n_samples)
    t = np.concatenate([t, [-1.0, 1.0, -t_max, t_max]])
    envelope = np.abs(t) ** nl.mu - 1.0
    fu = np.asarray(nl.F(pts, t), dtype=float)
    gv = np.asarray(nl.G(pts, t), dtype=float)
    low = np.minimum(fu, gv)

    grow = envelope > 1e-9
    if not np.any(grow):
        warnings.warn("sample window too small to fit a superquadratic floor")
        return 0.0
    candidate = float(np.min(low[grow] / envelope[grow]))
    if candidate <= 0:
        warnings.warn("no positive superquadratic floor fits the sampled primitives")
        return 0.0
    # Feasibility on the full grid, including the flat region |t| <= 1.
    margin = low - candidate * envelope
    if np.min(margin + 1e-12 * (1.0 + np.abs(candidate * envelope))) < 0:
        warnings.warn("no positive superquadratic floor fits the sampled primitives")
        return 0.0
    return candidate


def small_t_constants(
    nl: NonlinearitySpec, eps: float, t_max: float = 1e3, n_samples: int = 4001
) -> float:
    """Smallest sampled constant k with |F|, |G| <= eps/2 t^2 + k |t|^p.

    Used to certify that the energy stays positive on small spheres of
    the diagonal subspace: the quadratic part absorbs eps/2 t^2 and the
    power tail is controlled by k.
    """
    if not (eps > 0 and np.isfinite(eps)):
        raise InvalidSpecError(f"eps must be positive, got {eps}")
    pts = np.zeros((1, 1))
    t = _symmetric_log_grid(1e-8, float(t_max), n_samples)
    fu = np.abs(np.asarray(nl.F(pts, t), dtype=float))
    gv = np.abs(np.asarray(nl.G(pts, t), dtype=float))
    top = np.maximum(fu, gv) - 0.5 * eps * t * t
    ratios = top / np.abs(t) ** nl.p
    return float(max(np.max(ratios), 0.0))
