"""Unit tests for the fifteen measures and the Lorenz curve."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsemetrics import (
    CoefficientVector,
    DegenerateInput,
    InvalidParams,
    Measure,
    MeasureSpec,
    evaluate,
    gini,
    lorenz_curve,
)


def ev(measure, values, **params):
    return evaluate(MeasureSpec(measure, **params), CoefficientVector(values))


class TestCoefficientVector:
    def test_magnitudes_applied(self):
        v = CoefficientVector([-2, 3])
        assert v.values.tolist() == [2.0, 3.0]

    def test_complex_reduced_to_magnitudes(self):
        v = CoefficientVector(np.array([3 + 4j]))
        assert v.values.tolist() == [5.0]

    def test_empty_rejected(self):
        with pytest.raises(InvalidParams):
            CoefficientVector([])

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidParams):
            CoefficientVector([1.0, float("nan")])

    def test_values_immutable(self):
        v = CoefficientVector([1, 2])
        with pytest.raises(ValueError):
            v.values[0] = 9.0


class TestCountMeasures:
    def test_l0_counts_zeros(self):
        assert ev(Measure.L0, [0, 1, 3, 5]) == 1.0
        assert ev(Measure.L0, [0, 0, 0, 1, 3, 5]) == 3.0

    def test_l0_eps_counts_below_threshold(self):
        assert ev(Measure.L0_EPS, [0, 1, 3, 5], epsilon=1.0) == 2.0

    def test_l0_eps_requires_positive_epsilon(self):
        with pytest.raises(InvalidParams):
            MeasureSpec(Measure.L0_EPS, epsilon=0.0)


class TestNormMeasures:
    def test_neg_l1_fixed_value(self):
        assert ev(Measure.NEG_L1, [0, 1, 3, 5]) == -9.0

    def test_neg_lp_half(self):
        # (sqrt(4) + sqrt(9))^2 = 25
        assert ev(Measure.NEG_LP, [4, 9], p_frac=0.5) == pytest.approx(-25.0, rel=1e-12)

    def test_neg_lp_neg(self):
        # 1/1 + 1/2 + 1/4, negated
        assert ev(Measure.NEG_LP_NEG, [1, 2, 4], p_neg=-1.0) == pytest.approx(-1.75)

    def test_neg_lp_neg_skips_zeros(self):
        assert ev(Measure.NEG_LP_NEG, [0, 1, 2, 4]) == ev(Measure.NEG_LP_NEG, [1, 2, 4])

    def test_neg_lp_neg_all_zero_degenerate(self):
        with pytest.raises(DegenerateInput):
            ev(Measure.NEG_LP_NEG, [0, 0])

    def test_neg_lp_param_range(self):
        with pytest.raises(InvalidParams):
            MeasureSpec(Measure.NEG_LP, p_frac=1.0)
        with pytest.raises(InvalidParams):
            MeasureSpec(Measure.NEG_LP_NEG, p_neg=0.5)


class TestRatioMeasures:
    def test_l2_over_l1(self):
        assert ev(Measure.L2_OVER_L1, [0, 1, 3, 5]) == pytest.approx(
            math.sqrt(35) / 9, rel=1e-12
        )

    def test_kappa4_one_hot(self):
        assert ev(Measure.KAPPA4, [0, 0, 0, 7]) == pytest.approx(1.0, rel=1e-12)

    def test_kappa4_constant(self):
        assert ev(Measure.KAPPA4, [2, 2, 2, 2]) == pytest.approx(0.25, rel=1e-12)

    def test_hoyer_one_hot_and_constant(self):
        assert ev(Measure.HOYER, [0, 0, 0, 7]) == 1.0
        assert ev(Measure.HOYER, [3, 3, 3, 3]) == pytest.approx(0.0, abs=1e-12)

    def test_all_zero_degenerate(self):
        for m in (Measure.L2_OVER_L1, Measure.KAPPA4, Measure.HOYER):
            with pytest.raises(DegenerateInput):
                ev(m, [0, 0, 0])

    def test_hoyer_single_coefficient_degenerate(self):
        with pytest.raises(DegenerateInput):
            ev(Measure.HOYER, [5])


class TestSeparableMeasures:
    def test_neg_log(self):
        expected = -(math.log(2) + math.log(10) + math.log(26))
        assert ev(Measure.NEG_LOG, [1, 3, 5]) == pytest.approx(expected, rel=1e-12)

    def test_neg_tanh_range(self):
        v = ev(Measure.NEG_TANH, [0.5, 1, 2], a=1.0, b=1.0)
        assert -3 < v <= 0

    def test_hg(self):
        expected = -(2 * math.log(3) + 2 * math.log(5))
        assert ev(Measure.HG, [1, 3, 5]) == pytest.approx(expected, rel=1e-12)

    def test_hg_excludes_zeros(self):
        assert ev(Measure.HG, [0, 1, 3, 5]) == ev(Measure.HG, [1, 3, 5])

    def test_hs_one_hot_is_zero(self):
        assert ev(Measure.HS, [0, 0, 1]) == 0.0

    def test_hs_prime_value(self):
        # -(3 ln 9 + 5 ln 25); the coefficient 1 contributes log(1) = 0
        expected = -(3 * math.log(9) + 5 * math.log(25))
        assert ev(Measure.HS_PRIME, [0, 1, 3, 5]) == pytest.approx(expected, rel=1e-12)

    def test_entropies_degenerate_on_zero_vector(self):
        for m in (Measure.HG, Measure.HS):
            with pytest.raises(DegenerateInput):
                ev(m, [0, 0])

    def test_tanh_params(self):
        with pytest.raises(InvalidParams):
            MeasureSpec(Measure.NEG_TANH, a=0.0)


class TestUTheta:
    def test_window_formula(self):
        assert ev(Measure.U_THETA, [1, 2, 4, 9], theta=0.5) == pytest.approx(0.875)
        assert ev(Measure.U_THETA, [1.1, 1.9, 4, 9], theta=0.5) == pytest.approx(
            1 - 0.8 / 7.9, rel=1e-12
        )

    def test_robin_hood_direction(self):
        # the reference derivation quotes 0.6667/0.7333 for these inputs, which
        # the window formula does not reproduce; the violation direction is the
        # same either way (the transfer increases the measure)
        assert ev(Measure.U_THETA, [1.1, 1.9, 4, 9], theta=0.5) > ev(
            Measure.U_THETA, [1, 2, 4, 9], theta=0.5
        )

    def test_constant_vector_degenerate(self):
        with pytest.raises(DegenerateInput):
            ev(Measure.U_THETA, [2, 2, 2])

    def test_full_window_degenerate(self):
        with pytest.raises(DegenerateInput):
            ev(Measure.U_THETA, [1, 2], theta=0.9)  # ceil(1.8) == N

    def test_theta_range(self):
        with pytest.raises(InvalidParams):
            MeasureSpec(Measure.U_THETA, theta=1.0)


class TestGini:
    def test_fixed_values(self):
        assert gini(CoefficientVector([1, 1, 1, 1])) == 0.0
        assert gini(CoefficientVector([0, 0, 0, 0, 1])) == pytest.approx(0.8, abs=1e-15)
        assert gini(CoefficientVector([0, 1, 3, 5])) == pytest.approx(17 / 36, abs=1e-15)

    def test_constant_exactly_zero_any_value(self):
        for c in (0.1, 0.3, 7.77, 1e-4):
            for n in (2, 3, 5, 17):
                assert gini(CoefficientVector([c] * n)) == 0.0

    def test_one_hot_is_max(self):
        for n in range(2, 65):
            v = np.zeros(n)
            v[0] = 3.5
            assert gini(CoefficientVector(v)) == pytest.approx(1 - 1 / n, abs=1e-12)

    def test_all_zero_degenerate(self):
        with pytest.raises(DegenerateInput):
            gini(CoefficientVector([0, 0]))

    @given(
        st.lists(st.floats(min_value=0, max_value=100), min_size=2, max_size=40).filter(
            lambda xs: sum(xs) > 0
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_bounds(self, xs):
        g = gini(CoefficientVector(xs))
        assert -1e-12 <= g <= 1 - 1 / len(xs) + 1e-12


class TestLorenzCurve:
    def test_one_hot_points(self):
        curve = lorenz_curve(CoefficientVector([0, 0, 0, 0, 1]))
        assert curve.points.shape == (6, 2)
        np.testing.assert_allclose(curve.x, [0, 0.2, 0.4, 0.6, 0.8, 1.0])
        np.testing.assert_allclose(curve.y, [0, 0, 0, 0, 0, 1.0])

    def test_diagonal_for_constant(self):
        curve = lorenz_curve(CoefficientVector([1, 1]))
        np.testing.assert_allclose(curve.points, [[0, 0], [0.5, 0.5], [1, 1]])
        assert curve.twice_area_above() == pytest.approx(0.0, abs=1e-15)

    def test_below_diagonal(self):
        curve = lorenz_curve(CoefficientVector([1, 1, 2, 3, 10]))
        assert np.all(curve.y[1:-1] < curve.x[1:-1])

    def test_endpoints_and_monotone(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            v = rng.random(int(rng.integers(2, 30))) * 10
            curve = lorenz_curve(CoefficientVector(v))
            assert curve.points[0].tolist() == [0.0, 0.0]
            assert curve.points[-1].tolist() == [1.0, 1.0]
            assert np.all(np.diff(curve.y) >= 0)
            assert np.all(curve.y <= curve.x + 1e-15)

    def test_twice_area_matches_gini(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            v = rng.random(int(rng.integers(2, 64))) * 10
            v[rng.random(v.size) < 0.2] = 0
            if not v.any():
                continue
            c = CoefficientVector(v)
            g = gini(c)
            assert lorenz_curve(c).twice_area_above() == pytest.approx(
                g, rel=1e-12, abs=1e-12
            )


class TestPermutationAndDispatch:
    def test_sort_first_makes_permutation_bit_exact(self):
        rng = np.random.default_rng(3)
        vals = rng.random(20) * 10
        vals[3] = 0
        base = CoefficientVector(vals)
        perm = CoefficientVector(rng.permutation(vals))
        for m in Measure:
            spec = MeasureSpec(m)
            assert evaluate(spec, base) == evaluate(spec, perm)

    def test_dispatch_covers_all_ids(self):
        c = CoefficientVector([0.5, 1, 2, 4])
        for m in Measure:
            assert isinstance(evaluate(MeasureSpec(m), c), float)


class TestBounds:
    def test_documented_ranges_on_random_vectors(self):
        rng = np.random.default_rng(17)
        for _ in range(500):
            v = rng.random(int(rng.integers(2, 64))) * 10
            v[rng.random(v.size) < 0.2] = 0
            if not v.any() or v.max() == v.min():
                continue
            c = CoefficientVector(v)
            n = len(c)
            assert 0 <= gini(c) <= 1 - 1 / n + 1e-12
            assert -1e-12 <= ev(Measure.HOYER, v) <= 1 + 1e-12
            assert 1 / n - 1e-12 <= ev(Measure.KAPPA4, v) <= 1 + 1e-12
            assert 0 <= ev(Measure.U_THETA, v) <= 1
            assert -n < ev(Measure.NEG_TANH, v) <= 0


class TestOverflow:
    def test_kappa4_overflow_raises_cleanly(self):
        with pytest.raises(DegenerateInput, match="overflow"):
            ev(Measure.KAPPA4, [1e300, 1.0])

    def test_huge_but_finite_values_fine(self):
        assert ev(Measure.NEG_L1, [1e200, 1e200]) == -2e200
        assert gini(CoefficientVector([1e300, 1e300])) == 0.0
