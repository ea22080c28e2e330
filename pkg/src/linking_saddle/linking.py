"""Linking frames: the sets whose energies separate, and their certificates.

The linking construction takes a small sphere N inside the diagonal
subspace and a half-ball frame M spanned by finitely many antidiagonal
modes plus the anchor direction. Saddle geometry means the energy on N
stays strictly above its maximum on the frame boundary. The frame is
finite dimensional, so every claim here is checked in an explicit chart
whose Euclidean norm agrees with the energy norm.

Intersection and degree certificates work on the chart homotopy

    H_t(u) = [t P gamma(u) + (1 - t) y] + [(t/r) |Q gamma(u)| + (1 - t) l - 1] z,

which at t = 0 is the affine map u - z and at t = 1 vanishes exactly
when gamma(u) hits the sphere N. Roots are located by a multistart
sweep; degrees are sums of Jacobian determinant signs at the roots, so
they are exact provided the sweep finds every root, which the lattice is
sized for in the shipped frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
import scipy.optimize as sopt

from .errors import (
    BoundaryZeroError,
    DegenerateRootError,
    DomainMembershipError,
    GeometryCertificationError,
    IntersectionNotFoundError,
    InvalidSpecError,
)
from .functional import Problem, evaluate_J, small_t_constants
from .splitting import DiagonalSplitting, ModalBasis, build_modal_basis
from .state import StatePair

__all__ = [
    "LinkingFrame",
    "build_frame",
    "SampleSets",
    "sample_sets",
    "GeometryReport",
    "estimate_geometry",
    "RadiiChoice",
    "choose_radii",
    "DeformationGamma",
    "identity_deformation",
    "modal_shift_deformation",
    "anchor_shear_deformation",
    "shipped_deformations",
    "displacement_residual",
    "linking_homotopy",
    "homotopy_chart_map",
    "IntersectionCertificate",
    "intersection_point",
    "DegreeReport",
    "brouwer_degree_small",
]

MAX_DEGREE_DIMENSION = 4


@dataclass
class LinkingFrame:
    """Chart data for one linking configuration.

    The chart coordinate is xi in R^(d_y + 1): the first d_y entries are
    coefficients along antidiagonal mode directions, the last entry is
    the anchor coefficient scaled so that the Euclidean norm of xi
    equals the energy norm of the state. The frame set M is the chart
    half-ball {|xi| <= rho, xi_last >= 0}; the small sphere N is the
    radius-r sphere of the full diagonal subspace.
    """

    problem: Problem
    splitting: DiagonalSplitting
    basis: ModalBasis
    anchor: StatePair
    r: float
    rho: float
    d_y: int = 1

    def __post_init__(self) -> None:
        if not (0 < self.r < self.rho and np.isfinite(self.rho)):
            raise InvalidSpecError(
                f"radii must satisfy 0 < r < rho, got r={self.r}, rho={self.rho}"
            )
        if not 1 <= self.d_y <= self.basis.count:
            raise InvalidSpecError(
                f"d_y must lie in [1, {self.basis.count}], got {self.d_y}"
            )
        split = self.splitting
        stray = split.pair_norm(split.antidiagonal_part(self.anchor))
        if stray > 1e-10 * self.r:
            raise InvalidSpecError("anchor must lie in the diagonal subspace")
        if abs(split.pair_norm(self.anchor) - self.r) > 1e-8 * self.r:
            raise InvalidSpecError("anchor norm must equal r")

    @property
    def chart_dim(self) -> int:
        return self.d_y + 1

    def state_from_chart(self, xi: np.ndarray) -> StatePair:
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (self.chart_dim,):
            raise InvalidSpecError(f"chart point must have shape ({self.chart_dim},)")
        out = (xi[-1] / self.r) * self.anchor
        for k in range(self.d_y):
            out = out + xi[k] * self.basis.direction(k)
        return out

    def chart_from_state(self, x: StatePair) -> np.ndarray:
        coeffs = self.basis.coefficients(x)[: self.d_y]
        last = self.splitting.pair_dot(x, self.anchor) / self.r
        return np.concatenate([coeffs, [last]])

    def antidiagonal_from_chart(self, xi: np.ndarray) -> StatePair:
        """The pure antidiagonal part y encoded by the chart point."""
        flat = np.asarray(xi, dtype=float).copy()
        flat[-1] = 0.0
        return self.state_from_chart(flat)

    def contains(self, xi: np.ndarray, tol: float = 1e-9) -> bool:
        xi = np.asarray(xi, dtype=float)
        return bool(
            xi.shape == (self.chart_dim,)
            and xi[-1] >= -tol * self.rho
            and np.linalg.norm(xi) <= self.rho * (1.0 + tol)
        )

    def require_member(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if not self.contains(xi):
            raise DomainMembershipError(
                f"chart point outside the frame half-ball: |xi|={np.linalg.norm(xi):.6g}, "
                f"last={xi[-1] if xi.size else float('nan'):.6g}, rho={self.rho:.6g}"
            )
        return xi


def build_frame(
    problem: Problem,
    r: float,
    rho: float,
    d_y: int = 1,
    mode_count: Optional[int] = None,
    anchor_direction: Optional[StatePair] = None,
) -> LinkingFrame:
    """Assemble a frame on the problem's grid.

    The default anchor points along the principal mode; an explicit
    direction is projected onto the diagonal subspace and normalized, so
    re-anchoring along a computed solution is a one-liner.
    """
    split = DiagonalSplitting(problem.grid, problem.op)
    if mode_count is None:
        mode_count = min(32, problem.n)
    mode_count = max(mode_count, d_y)
    basis = build_modal_basis(split, mode_count)
    if anchor_direction is None:
        anchor = float(r) * basis.diagonal_direction(0)
    else:
        diag = split.diagonal_part(anchor_direction)
        norm = split.pair_norm(diag)
        if norm <= 0 or not np.isfinite(norm):
            raise InvalidSpecError("anchor direction has no diagonal component")
        anchor = (float(r) / norm) * diag
    return LinkingFrame(problem, split, basis, anchor, float(r), float(rho), int(d_y))


@dataclass
class SampleSets:
    """Seeded sample families for geometry estimates.

    ``sphere_states`` lie on the small diagonal sphere N (the two signed
    anchor points always lead). ``boundary_chart`` rows cover the frame
    boundary: base rows carry an exact 0.0 last coordinate, cap rows
    have Euclidean norm exactly scaled to rho. ``interior_chart`` rows
    are strictly inside the half-ball.
    """

    sphere_states: List[StatePair]
    boundary_chart: np.ndarray
    interior_chart: np.ndarray


def _cap_rows(rng: np.random.Generator, dim: int, rho: float, count: int) -> np.ndarray:
    rows = np.empty((count, dim))
    made = 0
    while made < count:
        g = rng.standard_normal(dim)
        g[-1] = abs(g[-1])
        norm = np.linalg.norm(g)
        if norm < 1e-12:
            continue
        rows[made] = (rho / norm) * g
        made += 1
    return rows


def _base_rows(rng: np.random.Generator, dim: int, rho: float, count: int) -> np.ndarray:
    rows = np.zeros((count, dim))
    made = 0
    while made < count:
        g = rng.standard_normal(dim - 1)
        norm = np.linalg.norm(g)
        if norm < 1e-12:
            continue
        radius = rho * rng.uniform() ** (1.0 / (dim - 1))
        rows[made, :-1] = (radius / norm) * g
        made += 1
    return rows


def _interior_rows(rng: np.random.Generator, dim: int, rho: float, count: int) -> np.ndarray:
    rows = np.empty((count, dim))
    made = 0
    while made < count:
        g = rng.standard_normal(dim)
        g[-1] = abs(g[-1])
        norm = np.linalg.norm(g)
        if norm < 1e-12 or g[-1] < 1e-6 * norm:
            continue
        radius = rho * (1.0 - 1e-6) * rng.uniform() ** (1.0 / dim)
        if radius <= 0:
            continue
        rows[made] = (radius / norm) * g
        made += 1
    return rows


def _boundary_corner_rows(frame: LinkingFrame) -> np.ndarray:
    """Deterministic boundary probes: cap top, base center, base edge points."""
    d = frame.chart_dim
    rows = [np.zeros(d)]
    top = np.zeros(d)
    top[-1] = frame.rho
    rows.append(top)
    for k in range(frame.d_y):
        for sign in (1.0, -1.0):
            edge = np.zeros(d)
            edge[k] = sign * frame.rho
            rows.append(edge)
    return np.array(rows)


def sample_sets(
    frame: LinkingFrame,
    sphere_count: int = 64,
    boundary_count: int = 128,
    interior_count: int = 64,
    seed: int = 0,
) -> SampleSets:
    rng = np.random.default_rng(seed)
    split = frame.splitting
    n = frame.problem.n

    sphere: List[StatePair] = [frame.anchor.copy(), -frame.anchor]
    if n > 1:
        while len(sphere) < max(sphere_count, 2):
            w = rng.standard_normal(n)
            cand = StatePair.diagonal(w)
            norm = split.pair_norm(cand)
            if norm < 1e-12:
                continue
            cand = (frame.r / norm) * cand
            sphere.append(cand)
            if len(sphere) < sphere_count:
                sphere.append(-cand)
    # n == 1: the diagonal sphere is exactly the two signed anchor points.

    corners = _boundary_corner_rows(frame)
    fill = max(boundary_count - corners.shape[0], 0)
    cap = _cap_rows(rng, frame.chart_dim, frame.rho, (fill + 1) // 2)
    base = _base_rows(rng, frame.chart_dim, frame.rho, fill // 2)
    boundary = np.vstack([corners, cap, base])
    interior = _interior_rows(rng, frame.chart_dim, frame.rho, interior_count)
    return SampleSets(sphere, boundary, interior)


@dataclass
class GeometryReport:
    """Sampled saddle-geometry certificate: min over N vs max over the frame boundary."""

    sphere_min: float
    boundary_max: float
    margin: float
    certified: bool
    base_max: float
    cap_max: float
    sphere_count: int
    boundary_count: int
    r: float
    rho: float


def estimate_geometry(
    frame: LinkingFrame, samples: Optional[SampleSets] = None, seed: int = 0
) -> GeometryReport:
    """Estimate the linking separation from seeded samples.

    On a one-node grid the diagonal sphere is just the signed anchor
    pair, so the sphere minimum is exact rather than sampled.
    """
    if samples is None:
        samples = sample_sets(frame, seed=seed)
    problem = frame.problem
    sphere_vals = [evaluate_J(problem, s).total for s in samples.sphere_states]
    boundary_vals = np.array(
        [evaluate_J(problem, frame.state_from_chart(row)).total for row in samples.boundary_chart]
    )
    base_mask = samples.boundary_chart[:, -1] == 0.0
    sphere_min = float(np.min(sphere_vals))
    boundary_max = float(np.max(boundary_vals))
    base_max = float(np.max(boundary_vals[base_mask])) if np.any(base_mask) else -np.inf
    cap_max = float(np.max(boundary_vals[~base_mask])) if np.any(~base_mask) else -np.inf
    margin = sphere_min - boundary_max
    return GeometryReport(
        sphere_min=sphere_min,
        boundary_max=boundary_max,
        margin=margin,
        certified=bool(margin > 0),
        base_max=base_max,
        cap_max=cap_max,
        sphere_count=len(samples.sphere_states),
        boundary_count=int(samples.boundary_chart.shape[0]),
        r=frame.r,
        rho=frame.rho,
    )


@dataclass
class RadiiChoice:
    """Radii certified by the sampled small-sphere lower bound."""

    r: float
    rho: float
    doublings: int
    floor_value: float
    embedding_constant: float
    small_constant: float
    eps: float
    boundary_pilot_max: float
    note: str = ""


def _looks_identically_zero(problem: Problem) -> bool:
    pts = problem.grid.coords
    probe = np.array([-10.0, -1.0, -1e-3, 1e-3, 1.0, 10.0])
    nl = problem.nl
    vals = [nl.f(pts[:1], probe), nl.F(pts[:1], probe), nl.g(pts[:1], probe), nl.G(pts[:1], probe)]
    return all(float(np.max(np.abs(v))) == 0.0 for v in vals)


def _sampled_embedding_constant(problem: Problem, seed: int, count: int) -> float:
    """Sampled sup of vol*sum|w|^p over |w|_K^p on the grid.

    Candidates: the principal mode (the smooth extremizer), smoothed
    random fields (one stiffness solve), and raw random fields.
    """
    rng = np.random.default_rng(seed)
    grid, op = problem.grid, problem.op
    p = problem.nl.p
    vol = grid.cell_volume

    def ratio(w: np.ndarray) -> float:
        energy = op.product(w, w)
        if energy <= 0:
            return 0.0
        return float(vol * np.sum(np.abs(w) ** p) / energy ** (p / 2.0))

    best = ratio(problem.eigenpairs(1)[1][0])
    for _ in range(count):
        w = rng.standard_normal(problem.n)
        best = max(best, ratio(w), ratio(op.solve(w)))
    return best


def choose_radii(
    problem: Problem,
    d_y: int = 1,
    seed: int = 0,
    field_samples: int = 64,
    max_doublings: int = 40,
    pilot_boundary: int = 96,
) -> RadiiChoice:
    """Pick (r, rho) that the sampled bound certifies.

    The small-sphere floor is  s^2/2 - 2 k c0 s^p  in the diagonal
    factor norm s, where c0 is the sampled embedding constant and k the
    small-amplitude constant at eps equal to half the spectral gap. The
    returned r halves the maximizing s for safety; rho doubles r until a
    pilot boundary sweep is nonpositive.
    """
    if _looks_identically_zero(problem):
        return RadiiChoice(
            r=1.0, rho=2.0, doublings=1, floor_value=0.5,
            embedding_constant=0.0, small_constant=0.0,
            eps=problem.principal_eigenvalue() / 2.0,
            boundary_pilot_max=0.0,
            note="no coupling: any radius certifies; defaults returned",
        )
    if problem.lam < 0 or problem.delta < 0:
        raise GeometryCertificationError(
            "sampled certification assumes nonnegative linear shifts"
        )
    lam1 = problem.principal_eigenvalue()
    eps = 0.5 * lam1 - 0.5 * (problem.lam + problem.delta)
    if eps <= 0:
        raise GeometryCertificationError(
            f"linear shifts resonate with the principal eigenvalue {lam1:.6g}; "
            "no small-sphere floor exists"
        )
    c0 = _sampled_embedding_constant(problem, seed, field_samples)
    k_small = small_t_constants(problem.nl, eps)
    amp = 2.0 * k_small * c0
    p = problem.nl.p

    if amp <= 1e-300:
        s_best = 1.0
    else:
        s_best = (1.0 / (p * amp)) ** (1.0 / (p - 2.0))
    grid_s = np.geomspace(1e-4, 1e4, 400)
    floors = 0.5 * grid_s**2 - amp * grid_s**p
    if floors.max() > 0.5 * s_best**2 - amp * s_best**p:
        s_best = float(grid_s[np.argmax(floors)])
    s_chosen = 0.5 * s_best
    floor_value = 0.5 * s_chosen**2 - amp * s_chosen**p
    if floor_value <= 0:
        raise GeometryCertificationError(
            f"sampled small-sphere floor is nonpositive (best {floor_value:.6g})"
        )
    r = float(np.sqrt(2.0) * s_chosen)

    for k in range(1, max_doublings + 1):
        rho = r * 2.0**k
        pilot = build_frame(problem, r, rho, d_y=d_y)
        samples = sample_sets(
            pilot, sphere_count=2, boundary_count=pilot_boundary,
            interior_count=2, seed=seed + 1,
        )
        boundary_max = max(
            evaluate_J(problem, pilot.state_from_chart(row)).total
            for row in samples.boundary_chart
        )
        if boundary_max <= 0:
            return RadiiChoice(
                r=r, rho=rho, doublings=k, floor_value=floor_value,
                embedding_constant=c0, small_constant=k_small, eps=eps,
                boundary_pilot_max=float(boundary_max),
            )
    raise GeometryCertificationError(
        f"no doubling of r={r:.6g} gave a nonpositive boundary within {max_doublings} tries"
    )


@dataclass
class DeformationGamma:
    """A continuous map of the frame that fixes its boundary pointwise.

    ``displacement_modes`` lists the antidiagonal mode indices spanning
    gamma(u) - u; ``None`` means the displacement is only certified
    against the full discrete space (flow-based maps). Maps with all
    modes below the frame's d_y stay inside the chart, which the
    intersection solver requires.
    """

    name: str
    fn: Callable[[StatePair], StatePair]
    displacement_modes: Optional[Sequence[int]] = ()
    chart_compatible: bool = True

    def __call__(self, x: StatePair) -> StatePair:
        return self.fn(x)


def _interior_taper(frame: LinkingFrame, xi: np.ndarray, margin: float = 1e-6) -> float:
    """Continuous weight in [0, ~1/4], exactly zero on the frame boundary.

    The margin clamps boundary-sample float noise to an exact 0.0, so
    boundary identity holds bitwise, not just to rounding.
    """
    lam_rel = xi[-1] / frame.rho
    slack = 1.0 - float(np.dot(xi, xi)) / frame.rho**2
    q1 = max(0.0, lam_rel - margin)
    q2 = max(0.0, slack - margin)
    return q1 * q2


def identity_deformation(frame: LinkingFrame) -> DeformationGamma:
    return DeformationGamma("identity", lambda x: x.copy(), displacement_modes=())


def modal_shift_deformation(
    frame: LinkingFrame, mode: int = 0, scale: float = 0.25
) -> DeformationGamma:
    """Push interior points along one antidiagonal mode, tapered to zero at the boundary."""
    direction = frame.basis.direction(mode)
    amplitude = scale * frame.r

    def fn(x: StatePair) -> StatePair:
        w = _interior_taper(frame, frame.chart_from_state(x))
        if w == 0.0:
            return x.copy()
        return x + (amplitude * w) * direction

    return DeformationGamma(
        f"shift(mode={mode})", fn,
        displacement_modes=(mode,), chart_compatible=mode < frame.d_y,
    )


def anchor_shear_deformation(
    frame: LinkingFrame, mode: int = 0, scale: float = 0.25
) -> DeformationGamma:
    """Shear: the modal push grows with the anchor coordinate."""
    direction = frame.basis.direction(mode)
    amplitude = scale * frame.r

    def fn(x: StatePair) -> StatePair:
        xi = frame.chart_from_state(x)
        w = _interior_taper(frame, xi) * (xi[-1] / frame.rho)
        if w == 0.0:
            return x.copy()
        return x + (amplitude * w) * direction

    return DeformationGamma(
        f"shear(mode={mode})", fn,
        displacement_modes=(mode,), chart_compatible=mode < frame.d_y,
    )


def shipped_deformations(frame: LinkingFrame, scale: float = 0.25) -> List[DeformationGamma]:
    """Identity, modal shift, and anchor shear, all chart compatible."""
    return [
        identity_deformation(frame),
        modal_shift_deformation(frame, mode=0, scale=scale),
        anchor_shear_deformation(frame, mode=0, scale=scale),
    ]


def displacement_residual(
    frame: LinkingFrame, gamma: DeformationGamma, states: Sequence[StatePair]
) -> float:
    """Worst reconstruction error of gamma(u) - u from its declared mode span.

    A ``None`` span certifies against the whole discrete space, where
    reconstruction is trivially exact.
    """
    if gamma.displacement_modes is None:
        return 0.0
    split = frame.splitting
    worst = 0.0
    for s in states:
        disp = gamma(s) - s
        recon = StatePair.zeros(s.size)
        coeffs = frame.basis.coefficients(disp)
        for k in gamma.displacement_modes:
            recon = recon + coeffs[k] * frame.basis.direction(k)
        worst = max(worst, split.pair_norm(disp - recon))
    return worst


def linking_homotopy(
    frame: LinkingFrame, gamma: DeformationGamma, t: float, xi: np.ndarray
) -> tuple[StatePair, float]:
    """Evaluate the boundary homotopy at chart point xi.

    Returns the antidiagonal part as a state and the anchor coefficient
    as a scalar; the pair is zero exactly at an intersection witness
    when t = 1, and at the known affine root when t = 0.
    """
    if not (0.0 <= t <= 1.0):
        raise InvalidSpecError(f"homotopy time must lie in [0, 1], got {t}")
    xi = frame.require_member(xi)
    split = frame.splitting
    u = frame.state_from_chart(xi)
    gu = gamma(u)
    p_part = split.antidiagonal_part(gu)
    q_norm = split.pair_norm(split.diagonal_part(gu))
    y = frame.antidiagonal_from_chart(xi)
    lam0 = xi[-1] / frame.r
    y_out = t * p_part + (1.0 - t) * y
    coeff = (t / frame.r) * q_norm + (1.0 - t) * lam0 - 1.0
    return y_out, coeff


def homotopy_chart_map(
    frame: LinkingFrame, gamma: DeformationGamma, t: float
) -> Callable[[np.ndarray], np.ndarray]:
    """Chart representation of the homotopy, valued in R^(d_y + 1).

    Componentwise this is (modal coefficients of the antidiagonal part,
    anchor coefficient times r), so its Euclidean norm equals the energy
    norm of the homotopy value whenever the antidiagonal part stays in
    the chart span.
    """

    def chart_map(xi: np.ndarray) -> np.ndarray:
        y_out, coeff = linking_homotopy(frame, gamma, t, xi)
        head = frame.basis.coefficients(y_out)[: frame.d_y]
        return np.concatenate([head, [coeff * frame.r]])

    return chart_map


def _verify_chart_span(
    frame: LinkingFrame, gamma: DeformationGamma, probes: np.ndarray, tol: float = 1e-8
) -> None:
    split = frame.splitting
    for row in probes:
        gu = gamma(frame.state_from_chart(row))
        p_part = split.antidiagonal_part(gu)
        coeffs = frame.basis.coefficients(p_part)[: frame.d_y]
        recon = StatePair.zeros(gu.size)
        for k in range(frame.d_y):
            recon = recon + coeffs[k] * frame.basis.direction(k)
        err = split.pair_norm(p_part - recon)
        if err > tol * max(1.0, split.pair_norm(gu)):
            raise DomainMembershipError(
                f"deformation '{gamma.name}' leaves the chart span "
                f"(antidiagonal residual {err:.3e})"
            )


def _start_lattice(frame: LinkingFrame, per_axis: int) -> np.ndarray:
    """Deterministic multistart grid over the open half-ball."""
    d = frame.chart_dim
    side = np.linspace(-0.6 * frame.rho, 0.6 * frame.rho, per_axis)
    last = np.unique(np.concatenate([
        np.geomspace(0.25 * frame.r, 0.9 * frame.rho, per_axis),
        [0.5 * frame.r, frame.r, 2.0 * frame.r],
    ]))
    grids = np.meshgrid(*([side] * (d - 1) + [last]), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    keep = np.linalg.norm(pts, axis=1) <= 0.95 * frame.rho
    return pts[keep]


def _dedupe_rows(rows: List[np.ndarray], tol: float) -> List[np.ndarray]:
    out: List[np.ndarray] = []
    for row in rows:
        if all(np.linalg.norm(row - kept) > tol for kept in out):
            out.append(row)
    return out


@dataclass
class IntersectionCertificate:
    """A verified point of gamma(M) on the small sphere N."""

    chart: np.ndarray
    state: StatePair
    image: StatePair
    antidiagonal_residual: float
    radius_residual: float
    energy: float


def intersection_point(
    frame: LinkingFrame,
    gamma: DeformationGamma,
    starts_per_axis: int = 4,
    residual_tol: float = 1e-10,
    certificate_tol: float = 1e-8,
) -> IntersectionCertificate:
    """Find and certify a chart point whose image under gamma lies on N.

    The certificate is computed on the state itself, independently of
    the chart algebra used to locate the root: the antidiagonal part of
    the image must vanish and its norm must equal r, both to within
    ``certificate_tol``.
    """
    if not gamma.chart_compatible:
        raise DomainMembershipError(
            f"deformation '{gamma.name}' is not chart compatible"
        )
    probes = _interior_rows(np.random.default_rng(3), frame.chart_dim, frame.rho, 8)
    _verify_chart_span(frame, gamma, probes)

    chart_map = homotopy_chart_map(frame, gamma, 1.0)
    scale = max(1.0, frame.r)
    roots: List[np.ndarray] = []
    for start in _start_lattice(frame, starts_per_axis):
        sol = sopt.root(chart_map, start, method="hybr", tol=1e-13)
        root = sol.x
        if not np.all(np.isfinite(root)):
            continue
        if np.max(np.abs(chart_map(root))) > residual_tol * scale:
            continue
        if root[-1] < 1e-9 * frame.r or np.linalg.norm(root) > frame.rho * (1 - 1e-9):
            continue
        roots.append(root)
    roots = _dedupe_rows(roots, tol=max(1e-6, 1e-5 * frame.rho))
    roots.sort(key=lambda row: tuple(np.round(row, 9)))

    split = frame.splitting
    for root in roots:
        state = frame.state_from_chart(root)
        image = gamma(state)
        anti = split.pair_norm(split.antidiagonal_part(image))
        rad = abs(split.pair_norm(image) - frame.r)
        if anti <= certificate_tol and rad <= certificate_tol:
            return IntersectionCertificate(
                chart=root,
                state=state,
                image=image,
                antidiagonal_residual=anti,
                radius_residual=rad,
                energy=evaluate_J(frame.problem, image).total,
            )
    raise IntersectionNotFoundError(
        f"no certified intersection for deformation '{gamma.name}' "
        f"({len(roots)} candidate roots)"
    )


@dataclass
class DegreeReport:
    """Brouwer degree as a signed count of nondegenerate roots."""

    degree: int
    roots: np.ndarray
    determinants: np.ndarray
    boundary_min: float


def _fd_jacobian(map_fn, xi: np.ndarray, step: float) -> np.ndarray:
    d = xi.size
    jac = np.empty((d, d))
    for j in range(d):
        h = step * max(1.0, abs(xi[j]))
        e = np.zeros(d)
        e[j] = h
        jac[:, j] = (map_fn(xi + e) - map_fn(xi - e)) / (2.0 * h)
    return jac


def brouwer_degree_small(
    map_fn: Callable[[np.ndarray], np.ndarray],
    frame: LinkingFrame,
    starts_per_axis: int = 4,
    residual_tol: float = 1e-10,
    det_tol: float = 1e-8,
    boundary_tol: float = 1e-6,
    boundary_count: int = 300,
    seed: int = 7,
    fd_step: float = 1e-6,
) -> DegreeReport:
    """Degree of a chart map on the open half-ball, by root counting.

    Requires chart dimension at most 4 so the multistart sweep can be
    dense enough to be treated as exhaustive. The map must be bounded
    away from zero on the sampled boundary; roots must have Jacobian
    determinants bounded away from zero.
    """
    if frame.chart_dim > MAX_DEGREE_DIMENSION:
        raise InvalidSpecError(
            f"degree counting supports chart dimension <= {MAX_DEGREE_DIMENSION}, "
            f"got {frame.chart_dim}"
        )
    rng = np.random.default_rng(seed)
    corners = _boundary_corner_rows(frame)
    cap = _cap_rows(rng, frame.chart_dim, frame.rho, boundary_count // 2)
    base = _base_rows(rng, frame.chart_dim, frame.rho, boundary_count // 2)
    boundary = np.vstack([corners, cap, base])
    boundary_vals = np.array([np.linalg.norm(map_fn(row)) for row in boundary])
    boundary_min = float(np.min(boundary_vals))
    if boundary_min < boundary_tol:
        raise BoundaryZeroError(
            f"map vanishes on the frame boundary (min {boundary_min:.3e} "
            f"at sample {int(np.argmin(boundary_vals))})"
        )

    scale = max(1.0, frame.r)
    roots: List[np.ndarray] = []
    for start in _start_lattice(frame, starts_per_axis):
        sol = sopt.root(map_fn, start, method="hybr", tol=1e-13)
        root = sol.x
        if not np.all(np.isfinite(root)):
            continue
        if np.max(np.abs(map_fn(root))) > residual_tol * scale:
            continue
        if root[-1] < 1e-9 * frame.r or np.linalg.norm(root) > frame.rho * (1 - 1e-9):
            continue
        roots.append(root)
    roots = _dedupe_rows(roots, tol=max(1e-6, 1e-5 * frame.rho))
    roots.sort(key=lambda row: tuple(np.round(row, 9)))

    dets = []
    for root in roots:
        det = float(np.linalg.det(_fd_jacobian(map_fn, root, fd_step)))
        if abs(det) < det_tol:
            raise DegenerateRootError(
                f"root {np.round(root, 6)} has near-singular Jacobian (|det|={abs(det):.3e})"
            )
        dets.append(det)
    dets_arr = np.array(dets) if dets else np.empty(0)
    degree = int(np.sum(np.sign(dets_arr))) if dets else 0
    roots_arr = np.array(roots) if roots else np.empty((0, frame.chart_dim))
    return DegreeReport(degree, roots_arr, dets_arr, boundary_min)
