"""Coherent-error analysis of the ZXZXZ single-qubit decomposition."""

from .su2 import (
    DomainError,
    GateParams,
    canonicalize_params,
    is_unitary,
    mat_from_params,
    params_from_matrix,
    phase_invariant_distance,
)
from .decomposition import (
    CaseKind,
    EffectiveParams,
    XErrorModel,
    classify_case,
    closed_form_decomposition,
    effective_params,
    erroneous_decomposition,
    ideal_decomposition,
)
from .fidelity import (
    average_best_fidelity,
    average_original_fidelity,
    best_fidelity_analytic,
    original_fidelity_analytic,
    original_fidelity_numeric,
    process_fidelity,
)
from .mitigation import (
    MitigationResult,
    SearchConfig,
    mitigate_closed_form,
    mitigate_numeric,
)
from .universality import (
    AxisAngle,
    axis_angle_from_unitary,
    is_coverable,
    uncoverable_in_sphere,
    universality_analytic,
    universality_monte_carlo,
)

__version__ = "0.1.0"

__all__ = [
    "AxisAngle",
    "CaseKind",
    "DomainError",
    "EffectiveParams",
    "GateParams",
    "MitigationResult",
    "SearchConfig",
    "XErrorModel",
    "average_best_fidelity",
    "average_original_fidelity",
    "axis_angle_from_unitary",
    "best_fidelity_analytic",
    "canonicalize_params",
    "classify_case",
    "closed_form_decomposition",
    "effective_params",
    "erroneous_decomposition",
    "ideal_decomposition",
    "is_coverable",
    "is_unitary",
    "mat_from_params",
    "mitigate_closed_form",
    "mitigate_numeric",
    "original_fidelity_analytic",
    "original_fidelity_numeric",
    "params_from_matrix",
    "phase_invariant_distance",
    "process_fidelity",
    "uncoverable_in_sphere",
    "universality_analytic",
    "universality_monte_carlo",
]
