"""Monte Carlo campaigns over channel draws.

Every table row gets its own seed derived from the master seed and the row's
structural parameters (users, relays, group size). Power is deliberately left
out of the key, so curves for different P share channel draws (common random
numbers) and compare pointwise. Every trial within a row draws from
``derive_trial_stream(row_seed, trial_index)``. Trials are executed in chunks,
optionally in worker processes, and aggregated in trial order, so tables are
identical for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .analysis import (
    bound_corollary1,
    bound_theorem3,
    reg_inc_beta,
    sum_rate_lower_bound,
    sum_rate_upper_bound,
    union_bound_nonunit,
)
from .core import DomainError, as_coefficients, as_power, derive_trial_stream, sample_channel, sub_seed
from .rate import _f_scalar
from .search import SOLVERS, best_unit_vector, find_optimal, is_unit_vector

__all__ = [
    "ExperimentConfig",
    "SumRateSample",
    "SummaryRow",
    "balanced_vector",
    "ks_test_cos2",
    "resolve_workers",
    "round_robin_schedule",
    "run_bounds_vs_power",
    "run_scheduled_sum_rate",
    "run_sum_rate_vs_users",
    "run_unit_vector_probability",
    "sum_rate_from_choices",
    "trial_sum_rate",
]

THREADS_ENV = "CF_SIM_THREADS"


@dataclass
class ExperimentConfig:
    users: list = field(default_factory=lambda: [4, 8, 16, 32])
    relays: int = 4
    power: list = field(default_factory=lambda: [10.0])
    trials: int = 1000
    seed: int = 1
    solver: str = "auto"
    group_size: int = 3
    slots: int = 10000
    norm_sq: list = field(default_factory=lambda: [2, 4, 9])

    def __post_init__(self):
        self.users = [int(x) for x in _as_list(self.users)]
        self.power = [float(x) for x in _as_list(self.power)]
        self.norm_sq = [int(x) for x in _as_list(self.norm_sq)]
        self.relays = int(self.relays)
        self.trials = int(self.trials)
        self.seed = int(self.seed)
        self.group_size = int(self.group_size)
        self.slots = int(self.slots)
        if not self.users or any(L < 1 for L in self.users):
            raise DomainError("users must be a non-empty list of positive integers")
        if self.relays < 1:
            raise DomainError("relays must be >= 1")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.slots < 1:
            raise DomainError("slots must be >= 1")
        if self.group_size < 1:
            raise DomainError("group_size must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.solver not in SOLVERS:
            raise DomainError(f"solver must be one of {SOLVERS}")
        if not self.power:
            raise DomainError("power must be a non-empty list")
        for P in self.power:
            as_power(P)
        if any(s < 2 for s in self.norm_sq):
            raise DomainError("norm_sq entries must be >= 2")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _as_list(value):
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, str):
        return [v for v in value.split(",") if v.strip()]
    return [value]


@dataclass(frozen=True)
class SummaryRow:
    statistic: str
    L: int | None
    M: int | None
    P: float | None
    k: int | None
    norm_sq: int | None
    mean: float
    stderr: float
    trials: int
    solver: str

    COLUMNS = ("statistic", "L", "M", "P", "k", "norm_sq", "mean", "stderr", "trials", "solver")

    def values(self):
        return tuple(getattr(self, c) for c in self.COLUMNS)


@dataclass
class SumRateSample:
    user_rates: np.ndarray
    total: float
    coefficients: list
    unit_flags: list
    relay_rates: list
    channels: np.ndarray
    solvers: list
    full_rank: bool


def _mean_se(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    n = arr.size
    mean = float(arr.mean())
    if n < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / math.sqrt(n))


def _row_seed(master: int, experiment: int, *params: int) -> int:
    return sub_seed(master, experiment, *params)


def _solver_label(used) -> str:
    return "+".join(sorted(set(used)))


def resolve_workers(workers=None) -> int:
    """Worker-process count. ``None`` reads CF_SIM_THREADS; 0 (or unset) means one per CPU."""
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            workers = int(raw)
        except ValueError as exc:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    workers = int(workers)
    if workers < 0:
        raise DomainError("worker count must be >= 0")
    if workers == 0:
        workers = os.cpu_count() or 1
    return workers


# --- sum-rate semantics ---------------------------------------------------


def sum_rate_from_choices(coefficients, relay_rates, n_users) -> np.ndarray:
    """Per-user rates: min over relays whose vector involves the user, else 0."""
    user_rates = np.zeros(n_users)
    for l in range(n_users):
        covering = [r for a, r in zip(coefficients, relay_rates) if a[l] != 0]
        if covering:
            user_rates[l] = min(covering)
    return user_rates


def trial_sum_rate(L: int, M: int, P, rng, solver: str = "auto") -> SumRateSample:
    """One channel realisation: M relays each pick their optimal vector independently."""
    P = as_power(P)
    H = np.empty((M, L))
    for m in range(M):
        H[m] = sample_channel(L, rng)
    return _sum_rate_for_channels(H, P, solver)


def _sum_rate_for_channels(H, P, solver) -> SumRateSample:
    M, L = H.shape
    results = [find_optimal(H[m], P, solver=solver) for m in range(M)]
    coefficients = [r.a_opt for r in results]
    rates = [r.rate for r in results]
    user_rates = sum_rate_from_choices(coefficients, rates, L)
    full_rank = bool(np.linalg.matrix_rank(np.array(coefficients, dtype=np.float64)) == L)
    return SumRateSample(
        user_rates=user_rates,
        total=float(user_rates.sum()),
        coefficients=coefficients,
        unit_flags=[r.is_unit for r in results],
        relay_rates=rates,
        channels=H,
        solvers=[r.solver for r in results],
        full_rank=full_rank,
    )


# --- parallel execution ---------------------------------------------------


def _trial_prob_unit(params, rng):
    L, P, solver, vectors = params
    h = sample_channel(L, rng)
    res = find_optimal(h, P, solver=solver)
    f_unit = best_unit_vector(h, P).f_value
    beats = [_f_scalar(h, a, P) <= f_unit for a in vectors]
    return (not res.is_unit, beats, res.solver)


def _trial_sum_rate(params, rng):
    L, M, P, solver = params
    s = trial_sum_rate(L, M, P, rng, solver)
    return (s.total, float(np.mean(s.unit_flags)), s.solvers)


def _trial_scheduled(params, rng):
    L, M, k, P, solver, slot = params
    s = trial_sum_rate(k, M, P, rng, solver)
    users = round_robin_schedule(L, k, slot)
    return (s.total, float(np.mean(s.unit_flags)), s.solvers, users, s.user_rates.tolist())


def _trial_bounds(params, rng):
    M, P, solver = params
    s = trial_sum_rate(M, M, P, rng, solver)
    lower = sum_rate_lower_bound(s.channels, P).value
    return (s.total, lower, s.solvers)


_TRIALS = {
    "prob_unit": _trial_prob_unit,
    "sum_rate": _trial_sum_rate,
    "bounds": _trial_bounds,
}


def _run_chunk(task):
    kind, params, seed, start, stop = task
    fn = _TRIALS[kind]
    return [fn(params, derive_trial_stream(seed, t)) for t in range(start, stop)]


def _run_sched_chunk(task):
    params, seed, start, stop = task
    return [_trial_scheduled(params + (t,), derive_trial_stream(seed, t)) for t in range(start, stop)]


def _chunks(n, workers):
    size = max(1, math.ceil(n / (workers * 4))) if workers > 1 else n
    return [(s, min(n, s + size)) for s in range(0, n, size)]


def _execute(chunk_fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        out = []
        for t in tasks:
            out.extend(chunk_fn(t))
        return out
    out = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(chunk_fn, tasks):
            out.extend(part)
    return out


def _run_trials(kind, params, seed, n, workers):
    tasks = [(kind, params, seed, a, b) for a, b in _chunks(n, workers)]
    return _execute(_run_chunk, tasks, workers)


def _note(progress, msg):
    if progress is not None:
        progress(msg)


# --- campaigns ------------------------------------------------------------


def balanced_vector(norm_sq: int, L: int) -> np.ndarray:
    """Integer vector of length L with the given squared norm and the smallest
    possible entries (lexicographically smallest descending magnitude profile)."""
    norm_sq = int(norm_sq)

    def rec(remaining, slots, cap):
        if remaining == 0:
            return []
        if slots == 0:
            return None
        for v in range(1, min(cap, math.isqrt(remaining)) + 1):
            # entries are non-increasing; try the smallest leading value first
            rest = rec(remaining - v * v, slots - 1, v)
            if rest is not None:
                return [v] + rest
        return None

    profile = rec(norm_sq, L, math.isqrt(norm_sq))
    if profile is None:
        raise DomainError(f"squared norm {norm_sq} is not a sum of {L} squares")
    a = np.zeros(L, dtype=np.int64)
    a[: len(profile)] = profile
    return a


def run_unit_vector_probability(cfg: ExperimentConfig, workers=1, progress=None) -> list[SummaryRow]:
    """Probability that a relay's optimal vector is not a unit vector, with bounds."""
    rows = []
    for L in cfg.users:
        for P in cfg.power:
            vecs = []
            for s in cfg.norm_sq:
                try:
                    vecs.append((s, balanced_vector(s, L)))
                except DomainError:
                    pass
            seed = _row_seed(cfg.seed, 1, L)
            _note(progress, f"prob-unit L={L} P={P}")
            out = _run_trials("prob_unit", (L, P, cfg.solver, [v for _, v in vecs]), seed, cfg.trials, workers)
            label = _solver_label(o[2] for o in out)
            m, se = _mean_se([o[0] for o in out])
            rows.append(SummaryRow("nonunit_fraction", L, 1, P, None, None, m, se, cfg.trials, label))
            for j, (s, _) in enumerate(vecs):
                m, se = _mean_se([o[1][j] for o in out])
                rows.append(SummaryRow("pr_f_a_le_f_unit", L, 1, P, None, s, m, se, cfg.trials, label))
                if L >= 2:
                    b = bound_theorem3(s, L)
                    rows.append(SummaryRow("bound_theorem3", L, None, None, None, s, b.value, 0.0, 0, "analytic"))
                if L >= 4:
                    b = bound_corollary1(s, L)
                    rows.append(SummaryRow("bound_corollary1", L, None, None, None, s, b.value, 0.0, 0, "analytic"))
            if L >= 4:
                # evaluated at the typical squared channel norm E||h||^2 = L
                b = union_bound_nonunit(L, P, float(L))
                rows.append(SummaryRow("union_bound", L, None, P, None, None, b.value, 0.0, 0, "analytic"))
                rows.append(SummaryRow("union_bound_raw", L, None, P, None, None, b.raw, 0.0, 0, "analytic"))
    return rows


def run_sum_rate_vs_users(cfg: ExperimentConfig, workers=1, progress=None) -> list[SummaryRow]:
    """Mean sum-rate of unscheduled compute-and-forward versus number of users."""
    rows = []
    M = cfg.relays
    for P in cfg.power:
        for L in cfg.users:
            seed = _row_seed(cfg.seed, 2, L, M)
            _note(progress, f"sumrate L={L} M={M} P={P}")
            out = _run_trials("sum_rate", (L, M, P, cfg.solver), seed, cfg.trials, workers)
            label = _solver_label(s for o in out for s in o[2])
            m, se = _mean_se([o[0] for o in out])
            rows.append(SummaryRow("sum_rate", L, M, P, None, None, m, se, cfg.trials, label))
            m, se = _mean_se([o[1] for o in out])
            rows.append(SummaryRow("unit_fraction", L, M, P, None, None, m, se, cfg.trials, label))
    return rows


def round_robin_schedule(L: int, k: int, slot: int) -> tuple:
    """Users ``(slot*k + j) mod L`` for ``j = 0..k-1``."""
    if not 1 <= k <= L:
        raise DomainError(f"group size must satisfy 1 <= k <= L, got k={k}, L={L}")
    if slot < 0:
        raise DomainError("slot must be non-negative")
    return tuple((slot * k + j) % L for j in range(k))


def run_scheduled_sum_rate(cfg: ExperimentConfig, workers=1, progress=None) -> list[SummaryRow]:
    """Per-slot sum-rate under Round-Robin scheduling of ``group_size`` users.

    Each slot draws a fresh M x k channel for the scheduled group.
    """
    rows = []
    M, k = cfg.relays, cfg.group_size
    for P in cfg.power:
        for L in cfg.users:
            if k > L:
                raise DomainError(f"group size {k} exceeds population {L}")
            seed = _row_seed(cfg.seed, 3, L, M, k)
            _note(progress, f"schedule L={L} M={M} k={k} P={P}")
            tasks = [((L, M, k, P, cfg.solver), seed, a, b) for a, b in _chunks(cfg.slots, workers)]
            out = _execute(_run_sched_chunk, tasks, workers)
            label = _solver_label(s for o in out for s in o[2])
            m, se = _mean_se([o[0] for o in out])
            rows.append(SummaryRow("scheduled_sum_rate", L, M, P, k, None, m, se, cfg.slots, label))
            m, se = _mean_se([o[1] for o in out])
            rows.append(SummaryRow("unit_fraction", L, M, P, k, None, m, se, cfg.slots, label))
            throughput = np.zeros(L)
            for o in out:
                for u, r in zip(o[3], o[4]):
                    throughput[u] += r
            throughput /= cfg.slots
            rows.append(SummaryRow("user_throughput_min", L, M, P, k, None, float(throughput.min()), 0.0, cfg.slots, label))
            rows.append(SummaryRow("user_throughput_max", L, M, P, k, None, float(throughput.max()), 0.0, cfg.slots, label))
    return rows


def run_bounds_vs_power(cfg: ExperimentConfig, workers=1, progress=None) -> list[SummaryRow]:
    """Optimal sum-rate of an M x M system against its lower and upper bounds."""
    M = cfg.relays
    if M < 2:
        raise DomainError("bounds campaign needs at least 2 relays")
    rows = []
    for P in cfg.power:
        if P < 3:
            raise DomainError(f"bounds campaign needs P >= 3, got {P}")
        seed = _row_seed(cfg.seed, 4, M)
        _note(progress, f"bounds M={M} P={P}")
        out = _run_trials("bounds", (M, P, cfg.solver), seed, cfg.trials, workers)
        label = _solver_label(s for o in out for s in o[2])
        m, se = _mean_se([o[1] for o in out])
        rows.append(SummaryRow("lower_bound", M, M, P, None, None, m, se, cfg.trials, label))
        m, se = _mean_se([o[0] for o in out])
        rows.append(SummaryRow("cf_sum_rate", M, M, P, None, None, m, se, cfg.trials, label))
        ub = sum_rate_upper_bound(M, P).value
        rows.append(SummaryRow("upper_bound", M, M, P, None, None, ub, 0.0, 0, "analytic"))
        viol = [o[1] > o[0] + 1e-12 for o in out]
        m, se = _mean_se(viol)
        rows.append(SummaryRow("lower_bound_violation_rate", M, M, P, None, None, m, se, cfg.trials, label))
    return rows


def ks_test_cos2(L: int, n: int, a, rng) -> float:
    """KS distance between sampled squared cosines of (a, h) and Beta(1/2, (L-1)/2)."""
    if n < 100:
        raise DomainError("need at least 100 samples")
    if L < 2:
        raise DomainError("squared-cosine test needs L >= 2")
    a = as_coefficients(a, length=L).astype(np.float64)
    H = np.empty((n, L))
    for i in range(n):
        H[i] = sample_channel(L, rng)
    proj = H @ a
    cos2 = np.sort(proj * proj / (float(a @ a) * np.einsum("ij,ij->i", H, H)))
    b = (L - 1) / 2.0
    cdf = np.array([reg_inc_beta(min(1.0, x), 0.5, b) for x in cos2])
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


def unit_vector_consistent(sample: SumRateSample) -> bool:
    """Every unit-vector choice sits on the relay's strongest channel entry."""
    for a, h in zip(sample.coefficients, sample.channels):
        if is_unit_vector(a) and int(np.argmax(np.abs(a))) != int(np.argmax(np.abs(h))):
            return False
    return True
