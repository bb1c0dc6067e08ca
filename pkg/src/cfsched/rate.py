"""Computation rates for real-valued compute-and-forward.

Rates are in bits per real channel use (log base 2). Hot paths use the scalar
form ``||a||^2``, ``||h||^2``, ``h.a``; the Gram matrix is only built on request.
"""

from __future__ import annotations

import math

import numpy as np

from .core import DomainError, as_channel, as_coefficients, as_power

__all__ = [
    "alpha_mmse",
    "computation_rate",
    "computation_rate_alpha",
    "gram_matrix",
    "log2_plus",
    "quadratic_form",
    "quadratic_form_gram",
    "quadratic_form_pairwise",
    "rate_from_f",
    "search_radius",
]


def log2_plus(x: float) -> float:
    """max(log2(x), 0), with log2(0) treated as -inf."""
    if x <= 0.0:
        return 0.0
    return max(math.log2(x), 0.0)


def _pair(h, a):
    h = as_channel(h)
    a = as_coefficients(a, length=h.size)
    return h, a


def _require_nonzero_channel(h):
    if not np.any(h):
        raise DomainError("channel vector must not be all-zero")


def alpha_mmse(h, a, P) -> float:
    """MMSE scaling ``P h.a / (1 + P ||h||^2)``."""
    h, a = _pair(h, a)
    P = as_power(P)
    _require_nonzero_channel(h)
    return P * float(h @ a) / (1.0 + P * float(h @ h))


def computation_rate_alpha(h, a, P, alpha: float) -> float:
    """Computation rate for an arbitrary scaling ``alpha``."""
    h, a = _pair(h, a)
    P = as_power(P)
    err = alpha * h - a
    denom = alpha * alpha + P * float(err @ err)
    if denom == 0.0:
        # only reachable with alpha == 0 and a == 0, which as_coefficients rejects
        raise ArithmeticError("zero effective noise in computation rate")
    return 0.5 * log2_plus(P / denom)


def computation_rate(h, a, P) -> float:
    """Computation rate at the MMSE scaling."""
    h, a = _pair(h, a)
    P = as_power(P)
    _require_nonzero_channel(h)
    ha = float(h @ a)
    inner = float(a @ a) - P * ha * ha / (1.0 + P * float(h @ h))
    return 0.5 * log2_plus(1.0 / inner)


def quadratic_form(h, a, P) -> float:
    """``f(a) = ||a||^2 + P (||a||^2 ||h||^2 - (a.h)^2)``."""
    h, a = _pair(h, a)
    P = as_power(P)
    return _f_scalar(h, a, P)


def _f_scalar(h: np.ndarray, a: np.ndarray, P: float) -> float:
    nn = float(a @ a)
    ha = float(h @ a)
    return nn + P * (nn * float(h @ h) - ha * ha)


def quadratic_form_pairwise(h, a, P) -> float:
    """``||a||^2 + P * sum_{i<j} (h_i a_j - h_j a_i)^2``; O(L^2)."""
    h, a = _pair(h, a)
    P = as_power(P)
    cross = np.outer(h, a) - np.outer(a, h)
    return float(a @ a) + P * 0.5 * float(np.sum(cross * cross))


def gram_matrix(h, P) -> np.ndarray:
    """``G = (1 + P ||h||^2) I - P h h^T``."""
    h = as_channel(h)
    P = as_power(P)
    return (1.0 + P * float(h @ h)) * np.eye(h.size) - P * np.outer(h, h)


def quadratic_form_gram(h, a, P) -> float:
    h, a = _pair(h, a)
    G = gram_matrix(h, P)
    af = a.astype(np.float64)
    return float(af @ G @ af)


def rate_from_f(f_value: float, h, P) -> float:
    """Rate implied by a quadratic-form value: ``0.5 log2+((1 + P||h||^2) / f)``."""
    h = as_channel(h)
    P = as_power(P)
    if not f_value >= 1.0:
        raise DomainError(f"quadratic form value must be >= 1, got {f_value!r}")
    return 0.5 * log2_plus((1.0 + P * float(h @ h)) / f_value)


def search_radius(h, P) -> float:
    """Norm at and beyond which a coefficient vector has zero rate."""
    h = as_channel(h)
    P = float(P)
    if not (math.isfinite(P) and P >= 0):
        raise DomainError(f"power must be non-negative and finite, got {P!r}")
    return math.sqrt(1.0 + P * float(h @ h))
