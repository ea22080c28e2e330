"""Certified saddle points of strongly indefinite coupled Poisson energies.

The package discretizes a pair of Poisson equations coupled through a
difference-of-squares cross term, certifies the linking geometry of the
associated energy on sampled sphere and cylinder-boundary sets, checks
the intersection and degree properties that make the linking argument
work at a fixed truncation, and computes the saddle point the minimax
level predicts.
"""

from .config import RunConfig, load_config, parse_config, to_problem_spec
from .errors import (
    BoundaryZeroError,
    ConfigError,
    DegenerateRootError,
    DomainMembershipError,
    EnergyOverflowError,
    GeometryCertificationError,
    GridMismatchError,
    IntersectionNotFoundError,
    InvalidSpecError,
    LinearSolveError,
    LinkingSaddleError,
)
from .functional import (
    EnergyBreakdown,
    HypothesisReport,
    NonlinearitySpec,
    Problem,
    ProblemSpec,
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
from .grid import (
    DomainSpec,
    Grid,
    StiffnessOperator,
    build_grid,
    eigenpairs,
    principal_eigenpair,
)
from .linking import (
    DeformationGamma,
    GeometryReport,
    IntersectionCertificate,
    LinkingFrame,
    RadiiChoice,
    SampleSets,
    anchor_shear_deformation,
    brouwer_degree_small,
    build_frame,
    choose_radii,
    displacement_residual,
    estimate_geometry,
    homotopy_chart_map,
    identity_deformation,
    intersection_point,
    linking_homotopy,
    modal_shift_deformation,
    sample_sets,
    shipped_deformations,
)
from .solver import (
    SaddleReport,
    SolverConfig,
    WitnessReport,
    deformation_witness_search,
    euler_lagrange_residual,
    flow_deformation,
    flow_map,
    minimax_consistency,
    newton_solve,
    ps_monitor,
    residual_dual_norm,
    signflow_solve,
    solve_saddle,
    witness_predicate,
)
from .splitting import (
    DiagonalSplitting,
    ModalBasis,
    build_modal_basis,
    mixed_weak_norm,
    weighted_modal_norm,
)
from .state import StatePair, pair_dot, pair_norm

__version__ = "0.1.0"

__all__ = [
    "BoundaryZeroError",
    "ConfigError",
    "DeformationGamma",
    "DegenerateRootError",
    "DiagonalSplitting",
    "DomainMembershipError",
    "DomainSpec",
    "EnergyBreakdown",
    "EnergyOverflowError",
    "GeometryCertificationError",
    "GeometryReport",
    "Grid",
    "GridMismatchError",
    "HypothesisReport",
    "IntersectionCertificate",
    "IntersectionNotFoundError",
    "InvalidSpecError",
    "LinearSolveError",
    "LinkingFrame",
    "LinkingSaddleError",
    "ModalBasis",
    "NonlinearitySpec",
    "Problem",
    "ProblemSpec",
    "RadiiChoice",
    "RunConfig",
    "SaddleReport",
    "SampleSets",
    "SolverConfig",
    "StatePair",
    "StiffnessOperator",
    "WitnessReport",
    "anchor_shear_deformation",
    "brouwer_degree_small",
    "build_frame",
    "build_grid",
    "build_modal_basis",
    "choose_radii",
    "deformation_witness_search",
    "directional_derivative",
    "discretize",
    "displacement_residual",
    "eigenpairs",
    "estimate_geometry",
    "euler_lagrange_residual",
    "evaluate_J",
    "flow_deformation",
    "flow_map",
    "homotopy_chart_map",
    "identity_deformation",
    "intersection_point",
    "linear_nonlinearity",
    "linking_homotopy",
    "load_config",
    "lower_bound_constant",
    "minimax_consistency",
    "mixed_weak_norm",
    "modal_shift_deformation",
    "newton_solve",
    "pair_dot",
    "pair_norm",
    "parse_config",
    "power_nonlinearity",
    "principal_eigenpair",
    "ps_monitor",
    "residual_dual_norm",
    "riesz_gradient",
    "sample_sets",
    "shipped_deformations",
    "signflow_solve",
    "small_t_constants",
    "solve_saddle",
    "to_problem_spec",
    "validate_hypotheses",
    "weighted_modal_norm",
    "witness_predicate",
    "zero_nonlinearity",
]
