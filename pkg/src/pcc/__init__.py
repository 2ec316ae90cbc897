"""Consistent approximation of pairwise-comparison matrices.

Orthogonal projection of log-ratio matrices onto the consistent subspace
under selectable inner products (Frobenius, weighted Frobenius, trace-form,
coefficient-form), priority vectors, a triad inconsistency index, closed-form
weighted projections, and a nonlinear metric-projection Newton solver.
"""

from .closed_form import (
    WeightVector,
    check_idempotence,
    closed_form_sigma,
    normal_equations_residual,
    sigma1_row_mean,
    weighted_gm_priority,
)
from .core import (
    ADDITIVE,
    FIRST_COORDINATE_ONE,
    GEOMETRIC_MEAN_ONE,
    MULTIPLICATIVE,
    SUM_ONE,
    TAU_CONS,
    TAU_REC,
    AdditiveMatrix,
    PCMatrix,
    PriorityVector,
    Triad,
    exp_transform,
    gmm_priority,
    is_additively_consistent,
    is_consistent,
    log_transform,
    make_reciprocal,
    max_consistency_defect,
    priority_from_consistent,
    reconstruct_consistent,
    triads,
)
from .errors import (
    DegenerateBasisError,
    DimensionMismatchError,
    DimensionTooSmallError,
    FormNotDefiniteError,
    NonPositiveCoordinateError,
    NonPositiveEntryError,
    NonSquareError,
    NotConsistentError,
    NotPSDError,
    NotReciprocalError,
    NotSymmetricError,
    PCError,
    RangeOverflowError,
    SpecNotValidatedError,
)
from .inconsistency import NoTriadsWarning, TriadReport, kii, kii_invariance_check, triad_reports
from .nonlinear import NonlinearSolveReport, SolverOptions, gradient, newton_solve, objective, rank_one_grid
from .products import (
    EPS_PD,
    CoefficientForm,
    Frobenius,
    TraceForm,
    ValidatedSpec,
    WeightedFrobenius,
    apply_operator,
    distance,
    evaluate,
    norm,
    validate,
)
from .subspace import (
    OrthogonalBasis,
    ProjectionResult,
    SubspaceBasis,
    approximate,
    canonical_basis,
    gram_schmidt,
    project,
)

__version__ = "0.1.0"
