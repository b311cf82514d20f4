"""Moments, evaluation and error bounds for Phillips-type operators.

An operator here is a mixture: a discrete power-series weight b_{n,k}(x)
selects a continuous kernel h_{n,k}(t), and P_n(f, x) is the expectation of
f under the mixture.
"""
from .bounds import BoundReport, bound_check, preset_bound, specialized_bound, theorem2_bound
from .errors import (
    ConvergenceError,
    DomainError,
    InadmissibleTriple,
    MixexpError,
    ParameterError,
    QuadratureError,
    SamplerError,
    TruncationError,
    UnknownFamily,
    UnknownPreset,
)
from .functions import ModulusOfContinuity, TestFunction, parse_function
from .moments import beta_moments, mu_moments, nu_moments
from .phillips import DEFAULT_CONFIG, EvalConfig, Operator, PRESET_NAMES, evaluate, evaluate_grid, make_preset
from .ratpoly import RatPoly
from .structure_b import FAMILY_NAMES, builtin_family, custom_family
from .structure_h import ADMISSIBLE_TRIPLES, builtin_h

__version__ = "0.1.0"

__all__ = [
    "ADMISSIBLE_TRIPLES", "BoundReport", "ConvergenceError", "DEFAULT_CONFIG", "DomainError", "EvalConfig",
    "FAMILY_NAMES", "InadmissibleTriple", "MixexpError", "ModulusOfContinuity", "Operator", "PRESET_NAMES",
    "ParameterError", "QuadratureError", "RatPoly", "SamplerError", "TestFunction", "TruncationError",
    "UnknownFamily", "UnknownPreset", "beta_moments", "bound_check", "builtin_family", "builtin_h",
    "custom_family", "evaluate", "evaluate_grid", "make_preset", "mu_moments", "nu_moments",
    "parse_function", "preset_bound", "specialized_bound", "theorem2_bound",
]
