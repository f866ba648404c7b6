# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from wcanon.modeling.bases import (
    alpha_dual,
    alpha_eigenstate,
    biorthogonality_check,
    gram_matrix,
    ho_basis,
    ho_eigenstate,
    J_CAP,
    mub_chirp_state,
    mub_momentum_state,
    position_state,
    SQRT_2PI,
    sym_eigenstate,
    unbiasedness_check,
    unbiasedness_report,
)
from wcanon.modeling.grids import (
    adapted_x_grid,
    inner_product,
    SampledSignal,
    uniform_x_grid,
)
from wcanon.modeling.operators import build_momentum_alpha
from wcanon.utils.errors import DegenerateEigenvalues, SingularJacobian, TruncationCap


class TestClosedForms:
    @pytest.mark.parametrize("builder", [mub_momentum_state, mub_chirp_state])
    def test_unit_modulus(self, W, builder):
        grid = uniform_x_grid(-2.0, 2.0, 64)
        for p in (-0.5, 0.0, 0.5):
            values = builder(W, grid, p).values
            assert_allclose(np.abs(values), 1.0 / SQRT_2PI, rtol=1e-12)

    def test_alpha_zero_is_the_momentum_state(self, W_cubic_sum):
        grid = uniform_x_grid(-2.0, 2.0, 64)
        state = alpha_eigenstate(W_cubic_sum, grid, 0.7, 0.0)
        assert_allclose(state.values, mub_momentum_state(W_cubic_sum, grid, 0.7).values)

    def test_alpha_half_is_the_symmetrized_state(self, W_cubic_sum):
        grid = uniform_x_grid(-2.0, 2.0, 64)
        state = alpha_eigenstate(W_cubic_sum, grid, 0.7, 0.5)
        assert_array_equal(state.values, sym_eigenstate(W_cubic_sum, grid, 0.7).values)

    def test_dual_pairs_to_a_plane_wave(self, W_cubic_sum):
        grid = uniform_x_grid(-1.0, 1.0, 64)
        product = (
            alpha_dual(W_cubic_sum, grid, 0.4, 0.3).values
            * alpha_eigenstate(W_cubic_sum, grid, 0.4, 0.3).values
        )
        slope = 1.0 + 3.0 * grid.nodes**2
        assert_allclose(product, slope / (2 * np.pi), rtol=1e-12)

    def test_alpha_state_is_an_approximate_eigenvector(self, W_cubic_sum):
        grid = uniform_x_grid(-1.0, 1.0, 2048)
        P = build_momentum_alpha(W_cubic_sum, grid, 0.3)
        state = alpha_eigenstate(W_cubic_sum, grid, 1.0, 0.3)
        residual = (P.entries @ state.values - state.values)[1:-1]
        assert np.linalg.norm(residual) <= 1e-3 * np.linalg.norm(state.values)

    def test_negative_power_at_critical_point(self, W_cube):
        grid = uniform_x_grid(-1.0, 1.0, 9)
        with pytest.raises(SingularJacobian):
            alpha_dual(W_cube, grid, 0.0, 1.5)

    def test_position_state_is_dW_normalized(self, W_cubic_sum):
        grid = uniform_x_grid(-1.0, 1.0, 33)
        e = position_state(W_cubic_sum, grid, 7)
        assert_allclose(inner_product(e, e, "dW", W_cubic_sum), 1.0)
        assert np.count_nonzero(e.values) == 1


class TestBiorthogonality:
    def test_whole_periods_are_exact(self, W_identity):
        length = 20.0
        grid = uniform_x_grid(0.0, length, 201)
        p_list = 2 * np.pi * np.arange(-2, 3) / length
        report = biorthogonality_check(W_identity, grid, 0.3, p_list, taper=False)
        assert_allclose(report.matrix, np.eye(5), atol=1e-12)
        assert report.passed

    @pytest.mark.parametrize("alpha", [0.0, 0.3, 0.5, 1.0])
    def test_tapered_overlaps_stay_below_the_envelope(self, W_cubic_sum, alpha):
        grid = adapted_x_grid(W_cubic_sum, 12.0, 1024)
        report = biorthogonality_check(W_cubic_sum, grid, alpha, [-1.5, 0.0, 1.5])
        assert report.passed, report.magnitudes
        assert_allclose(np.diag(report.magnitudes), 1.0)
        assert report.max_off_diagonal < 0.05

    def test_complementary_ordering_is_the_adjoint(self, W_cubic_sum):
        grid = adapted_x_grid(W_cubic_sum, 12.0, 1024)
        p_list = [-1.5, 0.0, 1.5]
        forward = biorthogonality_check(W_cubic_sum, grid, 0.3, p_list).matrix
        mirrored = biorthogonality_check(W_cubic_sum, grid, 0.7, p_list).matrix
        assert_allclose(mirrored, np.conj(forward).T, atol=1e-12)

    def test_eigenvalues_below_resolution(self, W_cubic_sum):
        grid = adapted_x_grid(W_cubic_sum, 12.0, 256)
        with pytest.raises(DegenerateEigenvalues):
            biorthogonality_check(W_cubic_sum, grid, 0.5, [0.0, 0.1])


class TestOscillatorBasis:
    def test_gram_on_adapted_grid(self, W):
        grid = adapted_x_grid(W, 12.0, 1024)
        states = [SampledSignal(row, grid) for row in ho_basis(W, grid, 12)]
        gram = gram_matrix(states, W, "dW")
        assert np.max(np.abs(gram - np.eye(13))) <= 1e-8

    def test_ground_state_of_the_cube(self, W_cube):
        grid = uniform_x_grid(-2.0, 2.0, 41)
        state = ho_eigenstate(W_cube, grid, 0)
        expected = np.pi**-0.25 * np.exp(-grid.nodes**6 / 2)
        assert_allclose(state.values, expected, rtol=1e-12)
        assert state.j == 0

    @pytest.mark.parametrize("fixture", ["W_cubic_sum", "W_cube"])
    def test_parity_for_odd_w(self, request, fixture):
        W = request.getfixturevalue(fixture)
        grid = uniform_x_grid(-2.0, 2.0, 41)
        for j, values in enumerate(ho_basis(W, grid, 5)):
            assert_allclose(values[::-1], (-1) ** j * values, atol=1e-12)

    def test_truncation_cap(self, W_identity):
        grid = uniform_x_grid(-2.0, 2.0, 16)
        ho_basis(W_identity, grid, J_CAP)
        with pytest.raises(TruncationCap):
            ho_basis(W_identity, grid, J_CAP + 1)

    def test_negative_index(self, W_identity):
        with pytest.raises(ValueError):
            ho_basis(W_identity, uniform_x_grid(-2.0, 2.0, 16), -1)


class TestUnbiasedness:
    @pytest.mark.parametrize("fixture, half_width", [("W_identity", 8.0), ("W_cubic_sum", 2.0)])
    def test_pairings_have_flat_moduli(self, request, fixture, half_width):
        W = request.getfixturevalue(fixture)
        grid = uniform_x_grid(-half_width, half_width, 1024)
        report = unbiasedness_report(W, grid)
        assert set(report.deviations) == {
            "position_momentum",
            "position_chirp",
            "momentum_chirp",
        }
        assert report.deviations["position_momentum"] <= 1e-12
        assert report.deviation <= 0.05
        assert unbiasedness_check(W, grid) == report.deviation
