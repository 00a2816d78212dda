"""Frame-covariance analysis of Kraus channel representations.

Apply operator-sum channels to density matrices, move descriptions between
unitarily related frames, decide whether two frame accounts describe the
same physical map, enumerate the mixing family of equivalent Kraus sets,
and test the single-operator rigidity that pins the frame-transformed
operator down to a global phase.
"""

from .channels import (
    CHANNEL_EQUALITY_TOL,
    COMPLETENESS_TOL,
    ChoiMatrix,
    DensityMatrix,
    KrausSet,
    apply_channel,
    apply_kraus,
    apply_to_matrix_units,
    channels_equal,
    choi_distance,
    choi_matrix,
    completeness_defect,
    kraus_gram,
    matrix_units,
    random_kraus_set,
    vec,
)
from .covariance import (
    CovarianceReport,
    FrameTransform,
    MixingUnitary,
    N1CheckResult,
    N1SearchReport,
    PhaseEquivalence,
    Verdict,
    analyze,
    compatibility_residual,
    conjugate_kraus,
    covariant_distance,
    extract_mixing,
    make_noncovariant_solution,
    mix_kraus,
    n1_covariance_search,
    n1_uniqueness_check,
    phase_aligned_distance,
    phase_permutation_distance,
    transform_state,
)
from .linalg import (
    as_cmatrix,
    dagger,
    frobenius_distance,
    matmul,
    random_density,
    random_unitary,
    spawn_rng,
    unitarity_defect,
)
from .scenario import (
    BranchRecord,
    Intervention,
    InterventionRecord,
    ScenarioConfig,
    ScenarioResult,
    Target,
    embed_local,
    run_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "CHANNEL_EQUALITY_TOL",
    "COMPLETENESS_TOL",
    "BranchRecord",
    "ChoiMatrix",
    "CovarianceReport",
    "DensityMatrix",
    "FrameTransform",
    "Intervention",
    "InterventionRecord",
    "KrausSet",
    "MixingUnitary",
    "N1CheckResult",
    "N1SearchReport",
    "PhaseEquivalence",
    "ScenarioConfig",
    "ScenarioResult",
    "Target",
    "Verdict",
    "__version__",
    "analyze",
    "apply_channel",
    "apply_kraus",
    "apply_to_matrix_units",
    "as_cmatrix",
    "channels_equal",
    "choi_distance",
    "choi_matrix",
    "compatibility_residual",
    "completeness_defect",
    "conjugate_kraus",
    "covariant_distance",
    "dagger",
    "embed_local",
    "extract_mixing",
    "frobenius_distance",
    "kraus_gram",
    "make_noncovariant_solution",
    "matmul",
    "matrix_units",
    "mix_kraus",
    "n1_covariance_search",
    "n1_uniqueness_check",
    "phase_aligned_distance",
    "phase_permutation_distance",
    "random_density",
    "random_kraus_set",
    "random_unitary",
    "run_scenario",
    "spawn_rng",
    "transform_state",
    "unitarity_defect",
    "vec",
]
