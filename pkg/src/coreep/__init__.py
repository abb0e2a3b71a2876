"""Core-EP, Drazin, core and Moore-Penrose inverses of dense complex matrices,
with perturbation bounds, continuity tests and semistable integral
representations."""
from .errors import CoreEPError
from .geninv import (
    CoreEPDecomposition,
    InverseResult,
    core_ep_decompose,
    core_ep_inverse,
    core_inverse,
    drazin_inverse,
    index_of,
    lemma11_check,
    moore_penrose,
    verify_core_ep,
)
from .linalg import matrix_exponential, numerical_rank, ordered_schur, spectral_norm, svd
from .perturbation import (
    BoundReport,
    ConditionProfile,
    bound_case1,
    bound_case2,
    bound_case3,
    classify,
    exact_relative_error,
    lower_bound_rank_jump,
    perturbation_report,
)
from .continuity import MatrixSequence, rank_criterion, residual_certificate
from .semistable import (
    QuadratureConfig,
    classify_stability,
    integral_core_ep_perturbed,
    integral_inverse_stable,
)

__version__ = "0.1.0"
