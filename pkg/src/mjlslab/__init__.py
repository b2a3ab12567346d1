"""Stability analysis for Markovian jump and switched linear systems.

The state convention is row vectors acted on from the right: a switching
word (i_1, ..., i_n) sends x to x S_{i_1} ... S_{i_n}. Symbols and Markov
states are 1-indexed in every public interface.
"""

__version__ = "0.1.0"

from .linalg import (
    AmbiguousRankError,
    AmbiguousSplitError,
    EigenSolverError,
    SpectralSplit,
    Subspace,
    grassmann_distance,
    idempotency_defect,
    induced_norm2,
    principal_angles,
    spectral_radius,
    spectral_split,
)
from .markov import (
    ErgodicDecomposition,
    MarkovChain,
    ValidationReport,
    cylinder_measure,
    ergodic_decomposition,
    is_irreducible,
    sample_trajectory,
    shift_invariance_defect,
    validate_chain,
)
from .products import (
    BoundednessReport,
    BudgetExceededError,
    ContractionCheck,
    JsrBounds,
    MatrixSet,
    boundedness_probe,
    jsr_bounds,
    preextremal_contraction_check,
    preextremal_norm,
    preextremal_profile,
    word_from_index,
    word_product,
)
from .rng import philox_stream, unit_vectors
from .sequences import (
    RecurrenceVerdict,
    ReturnTimes,
    SwitchingSequence,
    birkhoff_frequency,
    classify_recurrence,
    quadratic_gap_lengths,
    return_times,
)
from .splitting import (
    IdempotentNotFoundError,
    LimitPointSet,
    LyapunovEstimate,
    Splitting,
    SplittingEvidence,
    UniformDecayReport,
    cocycle_products_at,
    find_idempotent,
    limit_points,
    matrix_log_norm_history,
    periodic_split,
    sequence_split,
    split_from_idempotent,
    tail_slope,
    uniform_decay_on_subspace,
    vector_log_norm_history,
    vector_lyapunov_exponent,
    verify_splitting,
)
from .stability import (
    MJLS,
    AlmostSureReport,
    ConvergenceReport,
    DiagonalShortcutReport,
    EquivalenceReport,
    FinitenessReport,
    GreedySearchResult,
    WordProbeResult,
    almost_sure_exponential_estimate,
    consistent_convergence_estimate,
    consistent_convergence_probe,
    diagonal_shortcut_check,
    greedy_pointwise_search,
    periodic_stability_probe,
    pointwise_convergence_estimate,
    pointwise_equivalence_harness,
    pointwise_exponential_estimate,
    spectral_finiteness_probe,
)

__all__ = [
    "__version__",
    "AmbiguousRankError",
    "AmbiguousSplitError",
    "EigenSolverError",
    "SpectralSplit",
    "Subspace",
    "grassmann_distance",
    "idempotency_defect",
    "induced_norm2",
    "principal_angles",
    "spectral_radius",
    "spectral_split",
    "ErgodicDecomposition",
    "MarkovChain",
    "ValidationReport",
    "cylinder_measure",
    "ergodic_decomposition",
    "is_irreducible",
    "sample_trajectory",
    "shift_invariance_defect",
    "validate_chain",
    "BoundednessReport",
    "BudgetExceededError",
    "ContractionCheck",
    "JsrBounds",
    "MatrixSet",
    "boundedness_probe",
    "jsr_bounds",
    "preextremal_contraction_check",
    "preextremal_norm",
    "preextremal_profile",
    "word_from_index",
    "word_product",
    "philox_stream",
    "unit_vectors",
    "RecurrenceVerdict",
    "ReturnTimes",
    "SwitchingSequence",
    "birkhoff_frequency",
    "classify_recurrence",
    "quadratic_gap_lengths",
    "return_times",
    "IdempotentNotFoundError",
    "LimitPointSet",
    "LyapunovEstimate",
    "Splitting",
    "SplittingEvidence",
    "UniformDecayReport",
    "cocycle_products_at",
    "find_idempotent",
    "limit_points",
    "matrix_log_norm_history",
    "periodic_split",
    "sequence_split",
    "split_from_idempotent",
    "tail_slope",
    "uniform_decay_on_subspace",
    "vector_log_norm_history",
    "vector_lyapunov_exponent",
    "verify_splitting",
    "MJLS",
    "AlmostSureReport",
    "ConvergenceReport",
    "DiagonalShortcutReport",
    "EquivalenceReport",
    "FinitenessReport",
    "GreedySearchResult",
    "WordProbeResult",
    "almost_sure_exponential_estimate",
    "consistent_convergence_estimate",
    "consistent_convergence_probe",
    "diagonal_shortcut_check",
    "greedy_pointwise_search",
    "periodic_stability_probe",
    "pointwise_convergence_estimate",
    "pointwise_equivalence_harness",
    "pointwise_exponential_estimate",
    "spectral_finiteness_probe",
]
