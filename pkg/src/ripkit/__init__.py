"""Sparse recovery and restricted-isometry certification toolkit.

Greedy solvers (orthogonal matching pursuit, subspace pursuit), exact and
Monte Carlo isometry-constant computation with recovery-guarantee
certification, noisy-recovery thresholds, projection-based interference
cancellation, and a CLI for reproducible CSV experiments.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateColumn,
    EnumerationTooLarge,
    GuaranteeInapplicable,
    InvalidDelta,
    InvalidDimensions,
    InvalidSparsity,
    InvalidSupport,
    NonFiniteInput,
    RankDeficient,
    RipkitError,
    UnknownBound,
    UnsupportedShape,
    ZeroVector,
)
from .numerics import angle_between, least_squares, matvec, orthogonal_projector, singular_values
from .sensing import (
    GeneratorConfig,
    L2Ball,
    LinfCorrelation,
    Measurement,
    SensingMatrix,
    SparseSignal,
    SupportSet,
    generate_gaussian_matrix,
    generate_near_orthonormal_matrix,
    generate_sparse_signal,
    measure,
    submatrix,
)
from .ric import (
    ConditionAngleReport,
    GuaranteeCertificate,
    RicEstimate,
    angle_bound,
    check_recovery_guarantee,
    condition_angle,
    exact_ric,
    min_angle_grid,
    monte_carlo_ric_lower,
    ric_bound,
    verify_near_orthogonality,
)
from .omp import OmpConfig, SolverResult, omp, omp_threshold
from .sp import SP_RIC_BOUND, SpConfig, SpConstants, SpTrace, sp_constants, sp_guarantee, subspace_pursuit
from .interference import (
    EffectiveRicReport,
    InterferenceScenario,
    cancel,
    effective_ric_estimate,
    effective_ric_report,
    empirical_effective_frame,
    interference_projector,
    projection_energy_split,
    recover_after_cancellation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
