"""Best constants for embeddings between weighted Cesaro spaces, with a step-function oracle."""

from . import weights
from .embedding import (ConstantReport, Parameters, ReducedProblem, check_admissibility,
                        classify_regime, copson_to_cesaro, embedding_constant, functional_A,
                        reduce_embedding)
from .errors import AdmissibilityError, DegenerateWeightError, UnsupportedRegimeError
from .hardy import (HardyParams, hardy_constant, hardy_sup_constant, iterated_copson_constant,
                    iterated_sup_copson_constant, reverse_hardy_constant)
from .oracle import (StepFunction, best_constant_lower_bound, ces_norm, ratio,
                     triviality_probe)

__all__ = [
    "weights", "Parameters", "ReducedProblem", "ConstantReport", "classify_regime",
    "check_admissibility", "embedding_constant", "functional_A", "reduce_embedding",
    "copson_to_cesaro", "HardyParams", "hardy_constant", "hardy_sup_constant",
    "reverse_hardy_constant", "iterated_copson_constant", "iterated_sup_copson_constant",
    "StepFunction", "ces_norm", "ratio", "best_constant_lower_bound", "triviality_probe",
    "AdmissibilityError", "DegenerateWeightError", "UnsupportedRegimeError",
]
