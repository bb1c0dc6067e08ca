"""Self-check suite behind ``cfsim validate``: algebraic identities, solver
agreement and the squared-cosine distribution check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import bound_corollary1, reg_inc_beta
from .core import derive_trial_stream, sample_channel, sub_seed
from .experiments import ks_test_cos2
from .rate import computation_rate, quadratic_form, quadratic_form_gram, quadratic_form_pairwise, rate_from_f
from .search import candidate_search, exhaustive_search

__all__ = ["Check", "run_validation"]

KS_CRITICAL = 1.63


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    passed: bool


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _random_instance(stream, max_L=8):
    g = stream.generator
    L = int(g.integers(2, max_L + 1))
    P = float(g.choice([1.0, 10.0, 100.0]))
    h = sample_channel(L, stream)
    a = g.integers(-3, 4, size=L)
    if not a.any():
        a[0] = 1
    return h, a, P


def check_identities(seed, n):
    worst_f = worst_r = 0.0
    for t in range(n):
        h, a, P = _random_instance(derive_trial_stream(seed, t))
        f = quadratic_form(h, a, P)
        worst_f = max(worst_f, _rel(f, quadratic_form_pairwise(h, a, P)), _rel(f, quadratic_form_gram(h, a, P)))
        worst_r = max(worst_r, abs(computation_rate(h, a, P) - rate_from_f(f, h, P)))
    return [
        Check("f_forms_max_rel_err", worst_f, 1e-9, worst_f <= 1e-9),
        Check("rate_from_f_max_abs_err", worst_r, 1e-9, worst_r <= 1e-9),
    ]


def check_corollary_identity():
    worst = 0.0
    for s in (2, 3, 4, 9):
        for L in range(4, 65):
            worst = max(worst, _rel(bound_corollary1(s, L).value, (1.0 / s) ** ((L - 1) / 2 - 1)))
    return [Check("corollary1_identity_max_rel_err", worst, 1e-12, worst <= 1e-12)]


def check_arcsine():
    xs = np.linspace(0.0, 1.0, 1000)
    worst = max(abs(reg_inc_beta(x, 0.5, 0.5) - 2.0 / math.pi * math.asin(math.sqrt(x))) for x in xs)
    return [Check("reg_inc_beta_arcsine_max_abs_err", worst, 1e-9, worst <= 1e-9)]


def check_solvers(seed, n):
    worst = 0.0
    lemma4 = 0
    for t in range(n):
        stream = derive_trial_stream(seed, t)
        L = 2 + t % 5
        P = (1.0, 10.0, 100.0)[t % 3]
        h = sample_channel(L, stream)
        ex = exhaustive_search(h, P)
        ca = candidate_search(h, P)
        worst = max(worst, abs(ex.rate - ca.rate))
        m = int(np.argmax(np.abs(h)))
        if abs(ex.a_opt[m]) != np.max(np.abs(ex.a_opt)):
            lemma4 += 1
    return [
        Check("solver_rate_max_abs_diff", worst, 1e-9, worst <= 1e-9),
        Check("argmax_alignment_violations", float(lemma4), 0.0, lemma4 == 0),
    ]


def check_ks(seed, n=10_000):
    out = []
    crit = KS_CRITICAL / math.sqrt(n)
    cases = [(4, [1, 1, 0, 0]), (4, [2, 1, -1, 0]), (16, [1, 1] + [0] * 14), (16, [3, 0, 1, 1] + [0] * 12)]
    for idx, (L, a) in enumerate(cases):
        stat = ks_test_cos2(L, n, a, derive_trial_stream(seed, 10_000 + idx))
        out.append(Check(f"ks_cos2_L{L}_a{idx % 2}", stat, crit, stat < crit))
    return out


def run_validation(seed: int = 1, instances: int = 2000) -> list[Check]:
    checks = []
    checks += check_identities(sub_seed(seed, 1), instances)
    checks += check_corollary_identity()
    checks += check_arcsine()
    checks += check_solvers(sub_seed(seed, 2), max(15, instances // 10))
    checks += check_ks(sub_seed(seed, 3))
    return checks
