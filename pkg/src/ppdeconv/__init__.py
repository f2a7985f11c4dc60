"""Janossy-density point processes: superposition and deconvolution."""

from .combinatorics import (
    Multiset,
    bell_number,
    canonicalize,
    enumerate_partitions,
    enumerate_subsets,
)
from .deconvolution import (
    DeconvolutionReport,
    deconvolve,
    pointwise_quotient_check,
    superpose,
)
from .errors import (
    ConfigurationError,
    DivisionByZeroConstantTerm,
    ModeMismatch,
    OrderError,
    SpaceMismatch,
    ZeroConstantTerm,
)
from .process import (
    JanossyProcess,
    StateSpace,
    TestFunction,
    janossy_consistency_check,
    normalization_mass,
    pgfl_eval,
    poisson_process,
    random_process,
)
from .series import (
    PowerSeries,
    faadibruno_nth,
    finite_difference_differential,
    leibniz_nth,
    quotient_nth,
    reciprocal_nth,
    series_div,
    series_mul,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DeconvolutionReport",
    "DivisionByZeroConstantTerm",
    "JanossyProcess",
    "ModeMismatch",
    "Multiset",
    "OrderError",
    "PowerSeries",
    "SpaceMismatch",
    "StateSpace",
    "TestFunction",
    "ZeroConstantTerm",
    "bell_number",
    "canonicalize",
    "deconvolve",
    "enumerate_partitions",
    "enumerate_subsets",
    "faadibruno_nth",
    "finite_difference_differential",
    "janossy_consistency_check",
    "leibniz_nth",
    "normalization_mass",
    "pgfl_eval",
    "pointwise_quotient_check",
    "poisson_process",
    "quotient_nth",
    "random_process",
    "reciprocal_nth",
    "series_div",
    "series_mul",
    "superpose",
]
