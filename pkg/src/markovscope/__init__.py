"""Conditional mutual information of tripartite quantum states, the operator
M = rho_AB^{1/2} rho_B^{-1/2} rho_BC^{1/2} and its self-commutator, checkers
for vanishing CMI, and randomized tests of trace-norm lower bounds.
"""

__version__ = "0.1.0"

from .checkers import (
    DEFAULT_T_GRID,
    ClassLabel,
    MarkovBlock,
    MarkovBlockSpec,
    StateClass,
    build_markov_state,
    check_petz_t,
    check_ruskai,
    classify,
    ruskai_support_degraded,
)
from .entropy import (
    TripartiteState,
    conditional_mutual_information,
    relative_entropy,
    von_neumann_entropy,
)
from .errors import (
    CapacityError,
    DomainError,
    MarkovScopeError,
    NumericError,
    ShapeError,
    StateValidationError,
)
from .kernels import BACKEND
from .lab import (
    DeficitRecord,
    evaluate_deficits,
    monotonicity_gap,
    pinsker_identity_check,
    run_scan,
    search_min_deficit,
)
from .linalg import (
    SpectralDecomposition,
    SupportPolicy,
    lie_trotter,
    matrix_function,
    partial_trace,
    spectral,
    tensor,
    trace_norm,
)
from .markov import (
    KrausChannel,
    MOperatorBundle,
    build_m_bundle,
    petz_map,
    saturation_residuals,
)
from .sampling import SampleConfig, sample_state

__all__ = [
    "__version__",
    "DEFAULT_T_GRID",
    "ClassLabel",
    "MarkovBlock",
    "MarkovBlockSpec",
    "StateClass",
    "build_markov_state",
    "check_petz_t",
    "check_ruskai",
    "classify",
    "ruskai_support_degraded",
    "TripartiteState",
    "conditional_mutual_information",
    "relative_entropy",
    "von_neumann_entropy",
    "CapacityError",
    "DomainError",
    "MarkovScopeError",
    "NumericError",
    "ShapeError",
    "StateValidationError",
    "DeficitRecord",
    "evaluate_deficits",
    "monotonicity_gap",
    "pinsker_identity_check",
    "run_scan",
    "search_min_deficit",
    "SpectralDecomposition",
    "SupportPolicy",
    "lie_trotter",
    "matrix_function",
    "partial_trace",
    "spectral",
    "tensor",
    "trace_norm",
    "KrausChannel",
    "MOperatorBundle",
    "build_m_bundle",
    "petz_map",
    "saturation_residuals",
    "BACKEND",
    "SampleConfig",
    "sample_state",
]
