"""Generalized bipartite d-outcome Bell functionals.

A functional is held as a pair of Fourier-dual coefficient tables: one over
higher-order correlation functions, one over joint outcome-difference
probabilities. The submodules compute local-realistic bounds, quantum maxima,
white-noise thresholds and polytope tightness for such functionals.
"""

__version__ = "0.1.0"

from bellstruct.errors import (  # noqa: E402
    AppendixBoundViolation,
    BellStructError,
    InputError,
    InvalidInequalityError,
    InvariantViolation,
)
from bellstruct.coefficients import (  # noqa: E402
    BellCoefficients,
    CorrelationWeight,
    SLKParams,
    build_cglmp,
    build_chsh,
    build_named,
    build_slk,
    fourier_to_correlation,
    fourier_to_probability,
    validate_weight,
)
from bellstruct.localrealism import (  # noqa: E402
    DeterministicStrategy,
    LRBoundResult,
    enumerate_strategies,
    lr_bound,
    optimal_slk_bound_closed_form,
    strategy_value,
)

__all__ = [
    "AppendixBoundViolation",
    "BellCoefficients",
    "BellStructError",
    "CorrelationWeight",
    "DeterministicStrategy",
    "InputError",
    "InvalidInequalityError",
    "InvariantViolation",
    "LRBoundResult",
    "SLKParams",
    "build_cglmp",
    "build_chsh",
    "build_named",
    "build_slk",
    "enumerate_strategies",
    "fourier_to_correlation",
    "fourier_to_probability",
    "lr_bound",
    "optimal_slk_bound_closed_form",
    "strategy_value",
    "validate_weight",
]
