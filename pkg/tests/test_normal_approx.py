import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import nb_tail_mp, phi_mp
from rlstop.normal_approx import (NormalParams, approximation_error, normal_params,
                                  std_normal_cdf, tail_normal)
from rlstop.prob_core import RewardModel, WaitingTimeSpec


def args(p, r):
    return RewardModel(p), WaitingTimeSpec(r)


@pytest.mark.parametrize("p,r,mu,sigma2", [
    (0.5, 20, 20.0, 40.0),
    (0.5, 50, 50.0, 100.0),
    (0.9, 50, 5.5556, 6.1728),
])
def test_params(p, r, mu, sigma2):
    got = normal_params(*args(p, r))
    assert got.mu == pytest.approx(mu, abs=1e-4)
    assert got.sigma2 == pytest.approx(sigma2, abs=1e-4)


def test_params_need_positive_variance():
    with pytest.raises(ValueError):
        NormalParams(1.0, 0.0)


class TestPhi:
    def test_centre(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_one(self):
        assert std_normal_cdf(1.0) == pytest.approx(0.841345, abs=1e-6)

    def test_five_percent_quantile(self):
        assert std_normal_cdf(-1.6449) == pytest.approx(0.05, abs=1e-4)

    @pytest.mark.parametrize("x", np.linspace(-38, 9, 471))
    def test_against_high_precision(self, x):
        assert std_normal_cdf(float(x)) == pytest.approx(float(phi_mp(x)), abs=1e-9, rel=1e-12)

    @given(st.floats(-8, 8))
    def test_symmetry(self, x):
        assert std_normal_cdf(-x) + std_normal_cdf(x) == pytest.approx(1.0, abs=1e-12)

    def test_monotone_and_tails(self):
        grid = np.linspace(-8, 8, 1601)
        vals = [std_normal_cdf(float(x)) for x in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]) if a < 1 - 1e-15 and b < 1)
        assert std_normal_cdf(-8.0) < 1e-15
        assert std_normal_cdf(8.0) > 1 - 1e-15

    @pytest.mark.parametrize("x", [math.inf, -math.inf, math.nan])
    def test_non_finite(self, x):
        with pytest.raises(ValueError):
            std_normal_cdf(x)


class TestTail:
    @pytest.mark.parametrize("p,r,b,printed", [
        (0.5, 20, 25, 0.215),
        (0.5, 50, 60, 0.159),
        (0.9, 20, 2, 0.556),
    ])
    def test_table_values(self, p, r, b, printed):
        assert tail_normal(*args(p, r), b) == pytest.approx(printed, abs=5e-4)

    def test_uncorrected_standardisation(self):
        model, spec = args(0.3, 7)
        b = 12
        z = (b * 0.3 - 7 * 0.7) / math.sqrt(7 * 0.7)
        assert tail_normal(model, spec, b) == pytest.approx(float(1 - phi_mp(z)), rel=1e-12)

    @pytest.mark.parametrize("r", [1, 4, 20, 50])
    def test_half_at_mean_for_fair_rewards(self, r):
        assert tail_normal(*args(0.5, r), r) == 0.5

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_strictly_decreasing(self, p):
        vals = [tail_normal(*args(p, 20), b) for b in range(0, 60)]
        assert all(b < a for a, b in zip(vals, vals[1:]) if b > 0)


class TestError:
    @pytest.mark.parametrize("p,r,b,printed", [
        (0.5, 20, 25, 0.029),
        (0.9, 20, 2, 0.176),
    ])
    def test_listed_examples(self, p, r, b, printed):
        assert approximation_error(*args(p, r), b) == pytest.approx(printed, abs=5e-4)

    def test_printed_error_comes_from_rounded_columns(self):
        # printed 0.001 is |0.000 - 0.001|; the unrounded gap is 0.00049
        model, spec = args(0.8, 20)
        err = approximation_error(model, spec, 15)
        assert err == pytest.approx(4.93e-4, abs=1e-6)
        approx = tail_normal(model, spec, 15)
        exact = float(nb_tail_mp(0.8, 20, 15))
        assert round(abs(round(approx, 3) - round(exact, 3)), 3) == 0.001

    @pytest.mark.parametrize("p,r,b", [(0.5, 20, 25), (0.8, 50, 17), (0.3, 9, 4)])
    def test_against_incomplete_beta(self, p, r, b):
        exact = float(nb_tail_mp(p, r, b))
        expected = abs(tail_normal(*args(p, r), b) - exact)
        assert approximation_error(*args(p, r), b) == pytest.approx(expected, abs=1e-13)
