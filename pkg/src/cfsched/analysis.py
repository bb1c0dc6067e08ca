"""Closed-form bounds on unit-vector degeneracy and on the scheduled sum-rate.

Probability bounds are returned as :class:`BoundValue` with the value clamped
to [0, 1] and the unclamped value kept in ``raw`` (useful for plotting, since
several bounds exceed 1 at small L). Rate bounds use log base 2 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConvergenceError, DimensionError, DomainError, as_channel, as_power

__all__ = [
    "BoundValue",
    "bound_corollary1",
    "bound_lemma3",
    "bound_theorem3",
    "cardinality_bound",
    "decay_exponent_e3",
    "phi_of_a",
    "reg_inc_beta",
    "sum_rate_lower_bound",
    "sum_rate_upper_bound",
    "union_bound_asymptotic",
    "union_bound_nonunit",
]

_CF_MAX_ITER = 300
_CF_EPS = 1e-15
_TINY = 1e-300


@dataclass(frozen=True)
class BoundValue:
    value: float
    kind: str
    raw: float

    def __float__(self):
        return self.value


def _prob(raw: float, kind: str) -> BoundValue:
    return BoundValue(min(1.0, max(0.0, raw)), kind, raw)


def _beta_cf(x: float, a: float, b: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ConvergenceError(f"incomplete beta continued fraction did not converge for x={x}, a={a}, b={b}")


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularised incomplete beta function I_x(a, b) (the Beta(a, b) CDF).

    Uses the continued fraction directly below the pivot ``(a + 1) / (a + b + 2)``
    and the reflection ``I_x(a, b) = 1 - I_{1-x}(b, a)`` above it.
    """
    x, a, b = float(x), float(a), float(b)
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if not (a > 0.0 and b > 0.0 and math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"shape parameters must be positive and finite, got a={a}, b={b}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b) / a
    return 1.0 - front * _beta_cf(1.0 - x, b, a) / b


def phi_of_a(a_norm_sq: float) -> float:
    """``1 - 1/||a||^2`` for a non-unit coefficient vector (``||a||^2 >= 2``)."""
    s = float(a_norm_sq)
    if not s >= 2.0:
        raise DomainError(f"squared norm must be >= 2 for a non-unit vector, got {a_norm_sq}")
    return 1.0 - 1.0 / s


def _check_L(L, minimum):
    if isinstance(L, bool) or not isinstance(L, (int, np.integer)) or L < minimum:
        raise DomainError(f"L must be an integer >= {minimum}, got {L!r}")
    return int(L)


def bound_theorem3(a_norm_sq: float, L: int) -> BoundValue:
    """Upper bound on Pr(f(a) <= f(e_i)) via the Beta(1/2, (L-1)/2) tail."""
    L = _check_L(L, 2)
    raw = 1.0 - reg_inc_beta(phi_of_a(a_norm_sq), 0.5, (L - 1) / 2.0)
    return _prob(raw, "theorem3")


def bound_corollary1(a_norm_sq: float, L: int) -> BoundValue:
    """Exponential bound ``exp(-L (1 - 3/L) ln||a||)`` for L >= 4."""
    L = _check_L(L, 4)
    phi_of_a(a_norm_sq)
    exponent = (1.0 - 3.0 / L) * 0.5 * math.log(float(a_norm_sq))
    return _prob(math.exp(-L * exponent), "corollary1")


def bound_lemma3(alpha: float, L: int) -> float:
    """``1 - (1 - alpha)^(floor(L/2) - 1)``; lower-bounds the squared-cosine CDF."""
    L = _check_L(L, 4)
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return 1.0 - (1.0 - alpha) ** (L // 2 - 1)


def union_bound_nonunit(L: int, P, h_norm_sq: float) -> BoundValue:
    """Union bound on the probability that the optimum is not a unit vector."""
    L = _check_L(L, 4)
    P = as_power(P)
    raw = 2.0 * L * (P * float(h_norm_sq) + 3.0) * 0.5 ** ((L - 1) / 2.0 - 1.0)
    return _prob(raw, "union")


def union_bound_asymptotic(L: int, P) -> float:
    """``4 P L^2 exp(-L E2(L))`` with ``E2(L) = (1/2)(1 - 1/L) ln 2``."""
    L = _check_L(L, 4)
    P = as_power(P)
    e2 = 0.5 * (1.0 - 1.0 / L) * math.log(2.0)
    return 4.0 * P * L * L * math.exp(-L * e2)


def decay_exponent_e3(L: int) -> float:
    """``(1/4)(1 - 1/L) ln 2``; decay rate of the non-unit sum-rate term. Not used elsewhere."""
    return 0.25 * (1.0 - 1.0 / L) * math.log(2.0)


def cardinality_bound(L: int, P, h_norm_sq: float) -> int:
    """``2 L (ceil(sqrt(1 + P ||h||^2)) + 1)``; P may be 0 here."""
    L = _check_L(L, 1)
    P = float(P)
    if not (math.isfinite(P) and P >= 0):
        raise DomainError(f"power must be non-negative, got {P}")
    return 2 * L * (math.ceil(math.sqrt(1.0 + P * float(h_norm_sq))) + 1)


def sum_rate_upper_bound(M: int, P) -> BoundValue:
    """``log2(P) / (1 + 1/M) + log2(log2(P))`` bits, for M >= 2 and P >= 3."""
    M = _check_L(M, 2)
    P = as_power(P)
    if P < 3.0:
        raise DomainError(f"sum-rate upper bound needs P >= 3, got {P}")
    lp = math.log2(P)
    value = lp / (1.0 + 1.0 / M) + math.log2(lp)
    return BoundValue(value, "sum_rate_upper", value)


def sum_rate_lower_bound(channels, P) -> BoundValue:
    """Sum-rate when relay m is forced to decode user m, others treated as noise.

    ``channels`` is an M x M array whose row m is relay m's channel.
    """
    H = np.asarray(channels, dtype=np.float64)
    if H.ndim == 1 and H.size == 1:
        H = H.reshape(1, 1)
    if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] == 0:
        raise DimensionError(f"need a square M x M channel matrix, got shape {H.shape}")
    for row in H:
        as_channel(row)
    P = as_power(P)
    sq = H * H
    own = np.diag(sq)
    interference = sq.sum(axis=1) - own
    total = float(np.sum(0.5 * np.log2(1.0 + P * own / (1.0 + P * interference))))
    return BoundValue(total, "sum_rate_lower", total)
