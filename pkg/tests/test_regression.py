"""Simple linear regression kernel."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import t_cdf_one
from statbench.errors import DomainError
from statbench.kernels.regression import ols_fit


class TestOlsFixtures:
    def test_exact_linear_data(self):
        fit = ols_fit(x=[0.0, 1.0, 2.0], y=[1.0, 3.0, 5.0])
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        assert fit.intercept == pytest.approx(1.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert all(abs(r) < 1e-12 for r in fit.residuals)

    def test_hand_derived_quartet(self):
        # Sxy=3, Sxx=5, Syy=5 by hand
        fit = ols_fit(x=[1.0, 2.0, 3.0, 4.0], y=[2.0, 1.0, 4.0, 3.0])
        assert fit.slope == pytest.approx(0.6, abs=1e-12)
        assert fit.intercept == pytest.approx(1.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(0.36, abs=1e-12)
        assert fit.n == 4

    def test_quartet_inference_numbers(self):
        fit = ols_fit(x=[1.0, 2.0, 3.0, 4.0], y=[2.0, 1.0, 4.0, 3.0])
        # SSE = Syy - slope*Sxy = 5 - 1.8 = 3.2; slope_se = sqrt(3.2/2/5)
        assert fit.slope_se == pytest.approx(math.sqrt(0.32), abs=1e-12)
        assert fit.t_slope == pytest.approx(0.6 / math.sqrt(0.32), abs=1e-12)
        ref_p = 2.0 * t_cdf_one(-abs(fit.t_slope), fit.n - 2)
        assert fit.p_slope == pytest.approx(ref_p, abs=1e-10)
        assert fit.residual_sd == pytest.approx(math.sqrt(3.2 / 2.0), abs=1e-12)

    def test_affine_shift_of_y(self):
        x = [1.0, 2.0, 4.0, 7.0]
        fit = ols_fit(x=x, y=[v + 3.25 for v in x])
        assert fit.slope == pytest.approx(1.0, abs=1e-12)
        assert fit.intercept == pytest.approx(3.25, abs=1e-12)

    def test_x_range_recorded(self):
        fit = ols_fit(x=[3.0, 1.0, 2.0], y=[1.0, 2.0, 4.0])
        assert fit.x_min == 1.0
        assert fit.x_max == 3.0


class TestOlsErrors:
    def test_constant_x_rejected(self):
        with pytest.raises(DomainError, match="requires x to vary"):
            ols_fit(x=[2.0, 2.0, 2.0], y=[1.0, 2.0, 3.0])

    def test_too_few_pairs_rejected(self):
        with pytest.raises(DomainError):
            ols_fit(x=[1.0, 2.0], y=[1.0, 2.0])

    def test_unequal_lengths_rejected(self):
        with pytest.raises(DomainError):
            ols_fit(x=[1.0, 2.0, 3.0], y=[1.0, 2.0])


class TestOlsProperties:
    @given(
        n=st.integers(min_value=3, max_value=25),
        seed=st.integers(min_value=0, max_value=10 ** 6),
    )
    @settings(max_examples=60, deadline=None)
    def test_residuals_orthogonal_to_x(self, n, seed):
        import random

        rng = random.Random(seed)
        x = [rng.uniform(-5, 5) for _ in range(n)]
        if max(x) - min(x) < 1e-6:
            x[0] += 1.0
        y = [2.0 * v + rng.gauss(0, 1) for v in x]
        fit = ols_fit(x=x, y=y)
        assert sum(fit.residuals) == pytest.approx(0.0, abs=1e-8)
        assert sum(r * v for r, v in zip(fit.residuals, x)) == pytest.approx(
            0.0, abs=1e-7
        )
        assert 0.0 <= fit.r_squared <= 1.0 + 1e-12
