import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfsched.core import DimensionError, DomainError, InvalidCoefficientError
from cfsched.rate import (
    alpha_mmse,
    computation_rate,
    computation_rate_alpha,
    gram_matrix,
    quadratic_form,
    quadratic_form_gram,
    quadratic_form_pairwise,
    rate_from_f,
    search_radius,
)

from oracles import gram_f, rate_by_alpha_scan


@st.composite
def instances(draw, max_L=8):
    L = draw(st.integers(2, max_L))
    h = draw(st.lists(st.floats(-4, 4, allow_nan=False), min_size=L, max_size=L).filter(lambda v: any(abs(x) > 1e-3 for x in v)))
    a = draw(st.lists(st.integers(-5, 5), min_size=L, max_size=L).filter(any))
    P = draw(st.sampled_from([0.5, 1.0, 10.0, 100.0]))
    return np.array(h), np.array(a), P


class TestAlphaMMSE:
    def test_unit_case(self):
        assert alpha_mmse([1, 0], [1, 0], 1) == pytest.approx(0.5)

    def test_orthogonal(self):
        assert alpha_mmse([1, 0], [0, 1], 7) == 0.0

    def test_all_ones(self):
        # 10 * 2 / (1 + 10 * 2)
        assert alpha_mmse([1, 1], [1, 1], 10) == pytest.approx(20 / 21, rel=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            alpha_mmse([1, 1], [1, 1, 1], 1)


class TestComputationRate:
    def test_point_to_point(self):
        assert computation_rate([1, 0], [1, 0], 3) == pytest.approx(1.0, abs=1e-15)
        for P in (0.1, 1, 10, 1000):
            assert computation_rate([1], [1], P) == pytest.approx(0.5 * math.log2(1 + P))

    def test_all_ones(self):
        assert computation_rate([1, 1], [1, 1], 10) == pytest.approx(0.5 * math.log2(10.5), abs=1e-12)

    def test_alpha_form_at_mmse(self):
        assert computation_rate_alpha([1], [1], 3, 0.75) == pytest.approx(1.0, abs=1e-15)

    def test_alpha_clamp(self):
        # alpha = 0, a = e1: P / (P * 1) = 1 -> 0 bits
        assert computation_rate_alpha([1, 0], [1, 0], 5, 0.0) == 0.0

    def test_zero_coefficients_rejected(self):
        with pytest.raises(InvalidCoefficientError):
            computation_rate([1, 1], [0, 0], 1)

    def test_non_integer_coefficients_rejected(self):
        with pytest.raises(InvalidCoefficientError):
            computation_rate([1, 1], [0.5, 1], 1)

    def test_lemma1_boundary(self):
        h = [0.3, 0.4]
        P = 3.0
        r2 = 1 + P * 0.25
        a = [2, 0]  # ||a||^2 = 4 >= 1.75
        assert 4 >= r2
        assert computation_rate(h, a, P) == 0.0

    def test_matches_alpha_scan_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            L = int(rng.integers(2, 6))
            h = rng.standard_normal(L)
            a = rng.integers(-2, 3, size=L)
            if not a.any():
                continue
            P = float(rng.choice([1.0, 10.0]))
            assert computation_rate(h, a, P) == pytest.approx(rate_by_alpha_scan(h, a, P), abs=1e-5)


class TestQuadraticForm:
    def test_unit_vectors(self):
        h = np.array([0.3, -1.2, 2.0])
        P = 4.0
        for i in range(3):
            e = np.eye(3, dtype=int)[i]
            assert quadratic_form(h, e, P) == pytest.approx(1 + P * (h @ h - h[i] ** 2))

    def test_all_ones(self):
        assert quadratic_form([1, 1], [1, 1], 10) == 2.0

    def test_aligned_unit(self):
        assert quadratic_form([1, 0], [1, 0], 9) == 1.0

    def test_gram_matrix_definition(self):
        h = np.array([1.0, 2.0])
        G = gram_matrix(h, 2.0)
        np.testing.assert_allclose(G, [[1 + 2 * 5 - 2, -4], [-4, 1 + 10 - 8]])
        assert np.allclose(G, G.T)
        assert np.all(np.linalg.eigvalsh(G) >= 1 - 1e-12)


class TestRateFromF:
    def test_clamp_boundary(self):
        h = [1.0, 2.0]
        assert rate_from_f(1 + 3 * 5, h, 3) == 0.0

    def test_matches_rate(self):
        assert rate_from_f(2, [1, 1], 10) == pytest.approx(0.5 * math.log2(10.5))

    def test_unit(self):
        assert rate_from_f(1, [1, 0], 7) == pytest.approx(0.5 * math.log2(8))

    def test_rejects_below_one(self):
        with pytest.raises(DomainError):
            rate_from_f(0.9, [1, 0], 1)


class TestSearchRadius:
    def test_zero_channel(self):
        assert search_radius([0, 0, 0], 10) == 1.0

    def test_value(self):
        assert search_radius([1, 1], 10) == pytest.approx(math.sqrt(21))

    def test_small_power(self):
        assert search_radius([3, 4], 1e-12) == pytest.approx(1.0)


@settings(max_examples=300, deadline=None)
@given(instances())
def test_form_equivalence(inst):
    h, a, P = inst
    f = quadratic_form(h, a, P)
    assert quadratic_form_pairwise(h, a, P) == pytest.approx(f, rel=1e-9)
    assert quadratic_form_gram(h, a, P) == pytest.approx(f, rel=1e-9)
    assert gram_f(h, a, P) == pytest.approx(f, rel=1e-9)
    assert f >= float(a @ a) - 1e-9 * f


@settings(max_examples=300, deadline=None)
@given(instances())
def test_rate_equivalence(inst):
    h, a, P = inst
    f = quadratic_form(h, a, P)
    assert computation_rate(h, a, P) == pytest.approx(rate_from_f(f, h, P), abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(instances())
def test_sign_flip(inst):
    h, a, P = inst
    assert computation_rate(h, a, P) == computation_rate(h, -a, P)


@settings(max_examples=300, deadline=None)
@given(instances())
def test_mmse_is_optimal(inst):
    h, a, P = inst
    r = computation_rate(h, a, P)
    alpha = alpha_mmse(h, a, P)
    at_mmse = computation_rate_alpha(h, a, P, alpha)
    assert at_mmse == pytest.approx(r, abs=1e-9)
    if r > 0:
        for eps in (1e-3, -1e-3):
            assert computation_rate_alpha(h, a, P, alpha * (1 + eps)) <= at_mmse + 1e-12


@settings(max_examples=300, deadline=None)
@given(instances())
def test_lemma1_zero_rate(inst):
    h, a, P = inst
    if float(a @ a) >= 1 + P * float(h @ h):
        assert computation_rate(h, a, P) == 0.0
