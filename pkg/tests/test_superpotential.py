# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wcanon.modeling.superpotential import (
    classical_momentum,
    derivative,
    evaluate,
    from_descriptor,
    invert,
    k_axis,
    MONOTONE_WITH_CRITICAL_POINTS,
    second_derivative,
    STRICTLY_MONOTONE,
    susy_ground_state,
    susy_potential,
    validate,
)
from wcanon.utils.errors import (
    BracketFailure,
    RejectEmptyCoefficients,
    RejectEvenDominance,
    RejectEvenLeadingPower,
    RejectEvenLowestPower,
    RejectNegativeCoefficient,
    RejectNonMonotone,
    SingularJacobian,
    ValidationRejection,
)


class TestValidate:
    def test_cube_has_critical_point_at_origin(self):
        W = validate([0, 0, 1])
        assert W.monotonicity.tag == MONOTONE_WITH_CRITICAL_POINTS
        assert_allclose(W.critical_points, [0.0], atol=1e-12)
        assert not W.strictly_monotone

    def test_identity_is_strictly_monotone(self):
        W = validate([1])
        assert W.monotonicity.tag == STRICTLY_MONOTONE
        assert W.critical_points == ()
        assert W.is_identity

    def test_cubic_sum(self, W_cubic_sum):
        assert W_cubic_sum.strictly_monotone
        assert W_cubic_sum.degree == 3
        assert W_cubic_sum.is_odd

    def test_trailing_zeros_are_dropped(self):
        W = validate([1.0, 0.0, 1.0, 0.0, 0.0])
        assert W.coeffs == (1.0, 0.0, 1.0)

    def test_even_terms_below_odd_neighbours_are_accepted(self):
        W = validate([1.0, 0.5, 1.0])
        assert W.strictly_monotone
        assert not W.is_odd

    @pytest.mark.parametrize(
        "coeffs, error",
        [
            ([], RejectEmptyCoefficients),
            ([0.0, 0.0], RejectEmptyCoefficients),
            ([1.0, -0.5, 1.0], RejectNegativeCoefficient),
            ([0, 1], RejectEvenLeadingPower),
            ([0, 1, 1], RejectEvenLowestPower),
            ([1, 2, 1], RejectEvenDominance),
            ([1.0, 1.0, 0.01], RejectNonMonotone),
        ],
    )
    def test_rejections(self, coeffs, error):
        with pytest.raises(error) as excinfo:
            validate(coeffs)
        assert excinfo.value.reason == error.__name__

    @pytest.mark.parametrize(
        "coeffs",
        [[1.0], [1.0, 0.5, 1.0], [1.0, 1.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0, 1.0]],
    )
    def test_accepted_superpotentials_are_monotone_on_a_dense_sample(self, coeffs):
        W = validate(coeffs)
        steps = np.diff(evaluate(W, np.linspace(-10.0, 10.0, 20001)))
        assert np.all(steps >= 0.0)
        if W.strictly_monotone:
            assert np.all(steps > 0.0)

    def test_rejected_superpotential_decreases_on_a_dense_sample(self):
        coeffs = [1.0, 1.0, 0.01]
        x = np.linspace(-100.0, 100.0, 200001)
        values = sum(a * x**power for power, a in enumerate(coeffs, start=1))
        assert np.any(np.diff(values) < 0.0)
        with pytest.raises(RejectNonMonotone):
            validate(coeffs)

    def test_rejections_are_value_errors(self):
        with pytest.raises(ValueError):
            validate([0, 1])

    def test_non_finite_coefficients(self):
        with pytest.raises(ValidationRejection):
            validate([1.0, float("nan"), 1.0])

    def test_descriptor_round_trip(self, W_cubic_sum):
        assert from_descriptor(W_cubic_sum.to_descriptor()) == W_cubic_sum

    def test_descriptor_needs_coeffs(self):
        with pytest.raises(ValueError):
            from_descriptor({"a": [1.0]})


class TestEvaluation:
    def test_values(self, W_cube, W_identity, W_cubic_sum):
        assert evaluate(W_cube, 2.0) == 8.0
        assert evaluate(W_identity, -3.5) == -3.5
        assert evaluate(W_cubic_sum, 1.0) == 2.0
        assert W_cubic_sum(1.0) == 2.0

    def test_derivatives(self, W_cube, W_identity, W_cubic_sum):
        assert derivative(W_cube, 0.0) == 0.0
        assert_allclose(derivative(W_identity, np.linspace(-3, 3, 7)), 1.0)
        assert derivative(W_cubic_sum, 1.0) == 4.0
        assert second_derivative(W_cubic_sum, 2.0) == 12.0

    @pytest.mark.parametrize(
        "coeffs", [[1.0], [1.0, 0.5, 1.0], [0.0, 0.0, 1.0], [2.0, 0.0, 0.0, 0.0, 1.0]]
    )
    def test_derivative_matches_central_difference(self, coeffs):
        W = validate(coeffs)
        x = np.linspace(-3.0, 3.0, 24)  # even count, no node at the critical point of x^3
        h = 1e-5
        difference = (evaluate(W, x + h) - evaluate(W, x - h)) / (2 * h)
        assert_allclose(difference, derivative(W, x), rtol=1e-6)

    def test_scalar_in_scalar_out(self, W_cubic_sum):
        assert isinstance(evaluate(W_cubic_sum, 0.5), float)
        assert evaluate(W_cubic_sum, np.zeros((2, 3))).shape == (2, 3)


class TestInvert:
    def test_examples(self, W_cube, W_identity, W_cubic_sum):
        assert_allclose(invert(W_cube, 8.0), 2.0, rtol=1e-14)
        assert invert(W_identity, -1.25) == -1.25
        assert_allclose(invert(W_cubic_sum, 2.0), 1.0, rtol=1e-15)

    def test_inverse_of_evaluate(self, W_cubic_sum, W_cube):
        x = np.linspace(-5.0, 5.0, 101)
        for W in (W_cubic_sum, W_cube):
            assert_allclose(invert(W, evaluate(W, x)), x, atol=1e-13)

    def test_inverse_of_evaluate_over_six_decades(self, W_identity, W_cubic_sum, W_cube):
        magnitudes = np.logspace(-3.0, 3.0, 121)
        x = np.concatenate([-magnitudes[::-1], magnitudes])
        for W in (W_identity, W_cubic_sum, W_cube):
            assert_allclose(invert(W, evaluate(W, x)), x, rtol=1e-10)

    def test_large_arguments(self, W_cubic_sum):
        x = invert(W_cubic_sum, 1e12)
        assert_allclose(evaluate(W_cubic_sum, x), 1e12, rtol=1e-14)

    def test_non_finite_argument(self, W_cubic_sum):
        with pytest.raises(BracketFailure):
            invert(W_cubic_sum, np.inf)

    def test_k_axis_annotates_with_inverse(self, W_cubic_sum):
        assert_allclose(k_axis(W_cubic_sum, [2.0, -2.0]), [1.0, -1.0], rtol=1e-14)


class TestSusy:
    def test_ground_state(self, W_identity, W_cube, W_cubic_sum):
        x = np.linspace(-3, 3, 13)
        assert_allclose(susy_ground_state(W_identity, x), np.exp(-(x**2) / 2), rtol=1e-14)
        assert_allclose(susy_ground_state(W_cube, x), np.exp(-(x**4) / 4), rtol=1e-14)
        assert susy_ground_state(W_cubic_sum, 0.0) == 1.0

    def test_ground_state_is_even_for_odd_w(self, W_identity, W_cube, W_cubic_sum):
        x = np.linspace(0.0, 3.0, 31)
        for W in (W_identity, W_cube, W_cubic_sum, validate([1.0, 0.0, 0.0, 0.0, 2.0])):
            assert_allclose(susy_ground_state(W, -x), susy_ground_state(W, x), rtol=1e-14)

    def test_potential(self, W_identity, W_cube, W_cubic_sum):
        x = np.linspace(-3, 3, 13)
        assert_allclose(susy_potential(W_identity, x), x**2 - 1, atol=1e-14)
        assert susy_potential(W_cube, 0.0) == 0.0
        assert susy_potential(W_cubic_sum, 1.0) == 0.0


class TestClassicalMomentum:
    def test_divides_by_slope(self, W_cubic_sum):
        assert_allclose(classical_momentum(W_cubic_sum, 1.0, 8.0), 2.0)

    def test_singular_at_critical_point(self, W_cube):
        with pytest.raises(SingularJacobian):
            classical_momentum(W_cube, 0.0, 1.0)
