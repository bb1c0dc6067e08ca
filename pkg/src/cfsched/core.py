"""Channel model, seeded random streams and shared validation helpers.

Random numbers come from numpy's counter-based Philox bit generator. Each
Monte Carlo trial gets its own stream keyed by ``(master_seed, stream_index)``
through :class:`numpy.random.SeedSequence` spawn keys, so trial outputs do not
depend on the order (or process) in which trials run. Standard normals are
drawn with ``Generator.standard_normal`` (numpy's ziggurat method); results are
reproducible for a fixed numpy release, not across languages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CFError",
    "DimensionError",
    "InvalidCoefficientError",
    "DegenerateChannelError",
    "DomainError",
    "BudgetExceededError",
    "ConvergenceError",
    "PowerConfig",
    "RngStream",
    "as_channel",
    "as_coefficients",
    "as_power",
    "derive_trial_stream",
    "sample_channel",
    "sub_seed",
]

_U64 = 2**64


class CFError(ValueError):
    """Base class for invalid-input errors raised by this package."""


class DimensionError(CFError):
    pass


class InvalidCoefficientError(CFError):
    pass


class DegenerateChannelError(CFError):
    pass


class DomainError(CFError):
    pass


class BudgetExceededError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed its node budget."""

    def __init__(self, message, visited=None, budget=None):
        super().__init__(message)
        self.visited = visited
        self.budget = budget


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class PowerConfig:
    """Linear-scale transmit power (not dB)."""

    P: float

    def __post_init__(self):
        p = float(self.P)
        if not (math.isfinite(p) and p > 0):
            raise DomainError(f"power must be positive and finite, got {self.P!r}")
        object.__setattr__(self, "P", p)

    def __float__(self):
        return self.P


def as_power(P) -> float:
    if isinstance(P, PowerConfig):
        return P.P
    return PowerConfig(P).P


def as_channel(h) -> np.ndarray:
    """Return ``h`` as a finite 1-D float64 array of length >= 1."""
    arr = np.asarray(h, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"channel must be a non-empty vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("channel entries must be finite")
    return arr


def as_coefficients(a, length=None) -> np.ndarray:
    """Return ``a`` as a nonzero 1-D int64 array, optionally of a given length."""
    arr = np.asarray(a)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"coefficient vector must be a non-empty vector, got shape {arr.shape}")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise InvalidCoefficientError("coefficient entries must be integers")
    elif arr.dtype.kind not in "iub":
        raise InvalidCoefficientError("coefficient entries must be integers")
    arr = arr.astype(np.int64)
    if length is not None and arr.size != length:
        raise DimensionError(f"coefficient vector has length {arr.size}, channel has length {length}")
    if not np.any(arr):
        raise InvalidCoefficientError("coefficient vector must not be all-zero")
    return arr


@dataclass(frozen=True)
class RngStream:
    """One independent random stream, identified by ``(master_seed, stream_index)``.

    The identity is immutable; the wrapped generator advances as samples are
    drawn. Two streams built from the same pair produce the same sequence.
    """

    master_seed: int
    stream_index: int
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or not 0 <= int(v) < _U64:
                raise DomainError(f"{name} must be a 64-bit unsigned integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_index,))
        object.__setattr__(self, "_gen", np.random.Generator(np.random.Philox(seq)))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def standard_normal(self, size) -> np.ndarray:
        return self._gen.standard_normal(size)


def derive_trial_stream(master_seed: int, trial_index: int) -> RngStream:
    """Child stream for one trial; pure function of its two arguments."""
    return RngStream(master_seed, trial_index)


def sample_channel(L: int, rng) -> np.ndarray:
    """Draw ``L`` i.i.d. N(0, 1) real channel gains from ``rng``.

    ``rng`` may be an :class:`RngStream` or a :class:`numpy.random.Generator`.
    """
    if isinstance(L, bool) or not isinstance(L, (int, np.integer)) or L < 1:
        raise DimensionError(f"number of transmitters must be a positive integer, got {L!r}")
    return rng.standard_normal(int(L))


def sub_seed(master_seed: int, *key: int) -> int:
    """Derive a 64-bit seed for a sub-campaign (e.g. one table row)."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, dtype=np.uint64)[0])
