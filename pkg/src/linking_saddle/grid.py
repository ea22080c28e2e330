"""Tensor-product Dirichlet grids and the discrete Dirichlet energy form.

Second-order finite differences on an interval or axis-aligned rectangle
with homogeneous Dirichlet boundary. Only interior nodes are stored; a
scalar field is a flat float array in lexicographic order (C order of
shape ``(nx, ny)`` in 2D). The stiffness operator realizes the edge-sum
Dirichlet form

    1D:  <u, v> = (1/h) * sum_i (u[i+1]-u[i]) (v[i+1]-v[i])
    2D:  the analogous sum over x- and y-edges, each weighted by the
         transverse mesh width,

which approximates the integral of grad(u).grad(v). Nodal quadrature is
the cell-volume weighted sum over interior nodes. Eigenpairs of the
discrete Laplacian are assembled from the 1D tensor factors, so they
agree with the closed form (2 - 2 cos(k pi h / L)) / h^2 to LAPACK
precision and are bitwise deterministic.

All operations are pure; reductions use numpy's fixed evaluation order,
so repeated calls on the same inputs give identical floats.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import GridMismatchError, InvalidSpecError, LinearSolveError

logger = logging.getLogger(__name__)

__all__ = [
    "DomainSpec",
    "Grid",
    "StiffnessOperator",
    "build_grid",
    "eigenpairs",
    "principal_eigenpair",
]


@dataclass(frozen=True)
class DomainSpec:
    """Interval or rectangle with homogeneous Dirichlet boundary.

    Parameters
    ----------
    dimension : int
        1 or 2.
    extents : tuple of float
        Side length per axis, positive and finite.
    interior_counts : tuple of int
        Interior nodes per axis; the mesh width on an axis is
        ``extent / (count + 1)``.
    """

    dimension: int = 1
    extents: tuple[float, ...] = (1.0,)
    interior_counts: tuple[int, ...] = (31,)

    def __post_init__(self) -> None:
        if self.dimension not in (1, 2):
            raise InvalidSpecError(f"dimension must be 1 or 2, got {self.dimension!r}")
        object.__setattr__(self, "extents", tuple(float(L) for L in self.extents))
        object.__setattr__(self, "interior_counts", tuple(int(n) for n in self.interior_counts))
        if len(self.extents) != self.dimension:
            raise InvalidSpecError(
                f"expected {self.dimension} extents, got {len(self.extents)}"
            )
        if len(self.interior_counts) != self.dimension:
            raise InvalidSpecError(
                f"expected {self.dimension} interior counts, got {len(self.interior_counts)}"
            )
        for L in self.extents:
            if not np.isfinite(L) or L <= 0.0:
                raise InvalidSpecError(f"extents must be positive and finite, got {L}")
        for n in self.interior_counts:
            if n < 1:
                raise InvalidSpecError(f"interior counts must be >= 1, got {n}")

    @classmethod
    def interval(cls, n: int, length: float = 1.0) -> "DomainSpec":
        return cls(1, (length,), (n,))

    @classmethod
    def square(cls, n: int, length: float = 1.0) -> "DomainSpec":
        return cls(2, (length, length), (n, n))

    @classmethod
    def rectangle(cls, nx: int, ny: int, lx: float = 1.0, ly: float = 1.0) -> "DomainSpec":
        return cls(2, (lx, ly), (nx, ny))

    @property
    def mesh_widths(self) -> tuple[float, ...]:
        return tuple(L / (n + 1) for L, n in zip(self.extents, self.interior_counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.mesh_widths))

    @property
    def n_interior(self) -> int:
        return int(np.prod(self.interior_counts))


class Grid:
    """Interior nodes of a :class:`DomainSpec` in lexicographic order."""

    def __init__(self, spec: DomainSpec):
        self.spec = spec
        self.shape: tuple[int, ...] = spec.interior_counts
        self.n_interior: int = spec.n_interior
        self.h: tuple[float, ...] = spec.mesh_widths
        self.cell_volume: float = spec.cell_volume
        axes = [
            np.arange(1, n + 1, dtype=float) * w
            for n, w in zip(spec.interior_counts, self.h)
        ]
        if spec.dimension == 1:
            self.coords = axes[0].reshape(-1, 1)
        else:
            xs, ys = np.meshgrid(axes[0], axes[1], indexing="ij")
            self.coords = np.column_stack([xs.ravel(), ys.ravel()])

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    def check_field(self, values, require_finite: bool = False) -> np.ndarray:
        """Coerce ``values`` to a flat float field on this grid."""
        out = np.asarray(values, dtype=float).reshape(-1)
        if out.shape != (self.n_interior,):
            raise GridMismatchError(
                f"field has {out.size} entries, grid has {self.n_interior} interior nodes"
            )
        if require_finite and not np.all(np.isfinite(out)):
            raise GridMismatchError("field contains non-finite entries")
        return out

    def integrate(self, values) -> float:
        """Nodal quadrature: cell volume times the sum over interior nodes."""
        vals = self.check_field(values, require_finite=True)
        return float(self.cell_volume * vals.sum())

    def as_mesh(self, values) -> np.ndarray:
        """Reshape a flat field to the (nx,) or (nx, ny) interior mesh."""
        return self.check_field(values).reshape(self.shape)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Grid(shape={self.shape}, h={self.h})"


def _stiffness_1d(n: int, h: float) -> sp.csr_matrix:
    # (1/h) tridiag(-1, 2, -1): the 1D Dirichlet edge sum in matrix form.
    main = np.full(n, 2.0 / h)
    off = np.full(n - 1, -1.0 / h)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


class StiffnessOperator:
    """Sparse SPD matrix realizing the Dirichlet form on a grid.

    ``product`` evaluates the form, ``apply`` the matrix-vector product,
    and ``solve`` inverts it. Solves use a cached direct factorization by
    default; ``method="cg"`` switches to conjugate gradients with a budget
    of ``budget_factor * n_interior`` iterations at relative tolerance
    ``rtol``. Either way the returned solution is rejected with
    :class:`LinearSolveError` if its relative residual exceeds ``rtol``.
    """

    def __init__(self, grid: Grid, method: str = "direct",
                 rtol: float = 1e-10, budget_factor: int = 10):
        if method not in ("direct", "cg"):
            raise InvalidSpecError(f"unknown solve method {method!r}")
        self.grid = grid
        self.method = method
        self.rtol = float(rtol)
        self.budget_factor = int(budget_factor)
        spec = grid.spec
        if spec.dimension == 1:
            self.matrix = _stiffness_1d(spec.interior_counts[0], grid.h[0])
        else:
            hx, hy = grid.h
            nx, ny = spec.interior_counts
            kx = _stiffness_1d(nx, hx)
            ky = _stiffness_1d(ny, hy)
            self.matrix = (
                hy * sp.kron(kx, sp.identity(ny, format="csr"))
                + hx * sp.kron(sp.identity(nx, format="csr"), ky)
            ).tocsr()

    @cached_property
    def _factor(self):
        return spla.factorized(self.matrix.tocsc())

    def apply(self, u) -> np.ndarray:
        u = self.grid.check_field(u)
        return self.matrix @ u

    def product(self, u, v) -> float:
        """Dirichlet form <u, v>, symmetric and positive definite."""
        u = self.grid.check_field(u)
        v = self.grid.check_field(v)
        return float(u @ (self.matrix @ v))

    def solve(self, rhs) -> np.ndarray:
        """Solve K w = rhs to relative residual <= rtol."""
        rhs = self.grid.check_field(rhs, require_finite=True)
        if self.method == "direct":
            w = self._factor(rhs)
        else:
            budget = self.budget_factor * self.grid.n_interior
            w, info = spla.cg(self.matrix, rhs, rtol=self.rtol, atol=0.0, maxiter=budget)
            if info != 0:
                raise LinearSolveError(
                    f"cg failed to reach rtol={self.rtol} within {budget} iterations"
                )
        scale = float(np.linalg.norm(rhs))
        if scale > 0.0:
            resid = float(np.linalg.norm(self.matrix @ w - rhs))
            if resid > self.rtol * scale:
                raise LinearSolveError(
                    f"linear solve residual {resid:.3e} exceeds {self.rtol:.1e} * |rhs|"
                )
        return w


def build_grid(spec: DomainSpec, method: str = "direct") -> tuple[Grid, StiffnessOperator]:
    """Construct the grid and its stiffness operator for a domain."""
    grid = Grid(spec)
    return grid, StiffnessOperator(grid, method=method)


def _eigen_factors_1d(n: int, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of the 1D factor problem K1 phi = lam h phi.

    Equivalent standard problem: tridiag(-1, 2, -1) / h^2. Returns
    ascending eigenvalues and Euclidean-orthonormal columns with a
    deterministic sign convention (largest-magnitude entry positive).
    """
    d = np.full(n, 2.0) / (h * h)
    e = np.full(n - 1, -1.0) / (h * h)
    try:
        w, v = scipy.linalg.eigh_tridiagonal(d, e)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise LinearSolveError(f"1D eigen factorization failed: {exc}") from exc
    for j in range(v.shape[1]):
        i = int(np.argmax(np.abs(v[:, j])))
        if v[i, j] < 0.0:
            v[:, j] = -v[:, j]
    return w, v


def eigenpairs(grid: Grid, op: StiffnessOperator, count: int) -> tuple[np.ndarray, np.ndarray]:
    """First ``count`` eigenpairs of K phi = lam * h^d * phi.

    Eigenvalues ascend; ties in 2D resolve by axis mode order, so the
    result is deterministic even on symmetric squares. Each returned
    eigenvector is normalized against the Dirichlet form,
    ``op.product(phi, phi) == 1``.

    Returns
    -------
    (evals, vecs) : evals ``(count,)``, vecs ``(count, n_interior)``.
    """
    if not 1 <= count <= grid.n_interior:
        raise InvalidSpecError(
            f"eigenpair count must be in [1, {grid.n_interior}], got {count}"
        )
    vol = grid.cell_volume
    if grid.dimension == 1:
        w, v = _eigen_factors_1d(grid.shape[0], grid.h[0])
        evals = w[:count].copy()
        vecs = v[:, :count].T.copy()
    else:
        nx, ny = grid.shape
        wx, vx = _eigen_factors_1d(nx, grid.h[0])
        wy, vy = _eigen_factors_1d(ny, grid.h[1])
        lam = wx[:, None] + wy[None, :]
        order = np.lexsort((np.tile(np.arange(ny), nx),
                            np.repeat(np.arange(nx), ny),
                            lam.ravel()))
        sel = order[:count]
        evals = lam.ravel()[sel].copy()
        vecs = np.empty((count, grid.n_interior))
        for row, flat in enumerate(sel):
            i, j = divmod(int(flat), ny)
            vecs[row] = np.outer(vx[:, i], vy[:, j]).ravel()
    # Dirichlet-form normalization: phi^T K phi = lam * vol for unit phi.
    vecs /= np.sqrt(evals * vol)[:, None]
    for k in range(count):
        resid = np.linalg.norm(op.apply(vecs[k]) - evals[k] * vol * vecs[k])
        scale = np.linalg.norm(op.apply(vecs[k]))
        if resid > 1e-10 * scale:
            raise LinearSolveError(
                f"eigenpair {k} residual {resid:.3e} exceeds 1e-10 relative"
            )
    return evals, vecs


def principal_eigenpair(grid: Grid, op: StiffnessOperator) -> tuple[float, np.ndarray]:
    """Smallest Dirichlet eigenvalue and its form-normalized eigenvector."""
    evals, vecs = eigenpairs(grid, op, 1)
    return float(evals[0]), vecs[0]
