"""Compute-and-forward rate machinery, coefficient search, degeneracy bounds
and Monte Carlo scheduling experiments."""

__version__ = "0.1.0"

from .core import PowerConfig, RngStream, derive_trial_stream, sample_channel
from .rate import alpha_mmse, computation_rate, computation_rate_alpha, quadratic_form, rate_from_f, search_radius
from .search import SearchResult, best_unit_vector, candidate_search, exhaustive_search, find_optimal, is_unit_vector

__all__ = [
    "PowerConfig",
    "RngStream",
    "SearchResult",
    "alpha_mmse",
    "best_unit_vector",
    "candidate_search",
    "computation_rate",
    "computation_rate_alpha",
    "derive_trial_stream",
    "exhaustive_search",
    "find_optimal",
    "is_unit_vector",
    "quadratic_form",
    "rate_from_f",
    "sample_channel",
    "search_radius",
]
