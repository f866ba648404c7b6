# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wcanon.modeling.grids import (
    adapted_x_grid,
    Grid,
    grid_from_nodes,
    inner_product,
    measure_weights,
    norm,
    require_uniform,
    resample,
    resample_with_report,
    SampledSignal,
    u_coordinates,
    uniform_p_grid,
    uniform_w_grid,
    uniform_x_grid,
    W_DOMAIN,
    X_DOMAIN,
)
from wcanon.modeling.superpotential import evaluate
from wcanon.utils.errors import (
    BadBounds,
    GridMismatch,
    NonUniformGrid,
    TooFewNodes,
)


class TestBuilders:
    def test_unit_interval(self):
        grid = uniform_x_grid(0.0, 1.0, 11)
        assert_allclose(np.diff(grid.nodes), 0.1)
        assert_allclose(grid.weights[[0, -1]], 0.05)
        assert_allclose(grid.weights[1:-1], 0.1)
        assert grid.rep == X_DOMAIN
        assert grid.is_uniform

    def test_eight_nodes(self):
        grid = uniform_x_grid(-5.0, 5.0, 8)
        assert len(grid) == 8
        assert_allclose(grid.spacing, 10.0 / 7.0)

    def test_degenerate_interval(self):
        with pytest.raises(BadBounds):
            uniform_x_grid(1.0, 1.0, 16)

    def test_too_few_nodes(self):
        with pytest.raises(TooFewNodes):
            uniform_x_grid(-1.0, 1.0, 3)

    def test_w_grid_identity(self, W_identity):
        grid = uniform_w_grid(W_identity, -1.0, 1.0, 9)
        assert grid.rep == W_DOMAIN
        assert_allclose(grid.x_nodes[[0, 4, 8]], [-1.0, 0.0, 1.0], atol=1e-15)

    def test_w_grid_cube(self, W_cube):
        grid = uniform_w_grid(W_cube, 0.0, 8.0, 9)
        assert_allclose(grid.nodes[[0, 4, 8]], [0.0, 4.0, 8.0])
        assert_allclose(grid.x_nodes[[0, 4, 8]], [0.0, 4.0 ** (1.0 / 3.0), 2.0], rtol=1e-14)

    def test_w_grid_odd_superpotential_is_symmetric(self, W_cubic_sum):
        grid = uniform_w_grid(W_cubic_sum, -2.0, 2.0, 9)
        assert_allclose(grid.x_nodes, -grid.x_nodes[::-1], atol=1e-15)
        assert_allclose(evaluate(W_cubic_sum, grid.x_nodes), grid.nodes, atol=1e-14)

    def test_lazy_x_nodes(self, W_cubic_sum):
        grid = uniform_w_grid(W_cubic_sum, -2.0, 2.0, 9, map_to_x=False)
        assert grid.x_nodes is None
        weights = measure_weights(grid, "dx", W_cubic_sum)
        assert np.all(weights > 0)

    def test_adapted_grid_spans_u_range(self, W_cubic_sum):
        grid = adapted_x_grid(W_cubic_sum, 12.0, 64)
        assert_allclose(u_coordinates(grid, W_cubic_sum)[[0, -1]], [-12.0, 12.0], rtol=1e-14)

    def test_from_nodes(self, W_cubic_sum):
        grid = grid_from_nodes(np.linspace(0.0, 1.0, 11) ** 2)
        assert_allclose(grid.weights.sum(), 1.0)
        with pytest.raises(ValueError):
            grid_from_nodes(np.linspace(0.0, 1.0, 11), W_DOMAIN)
        w_grid = grid_from_nodes(np.linspace(-2.0, 2.0, 9), W_DOMAIN, W_cubic_sum)
        assert_allclose(w_grid.x_nodes[4], 0.0, atol=1e-15)

    def test_grid_rejects_bad_input(self):
        with pytest.raises(BadBounds):
            Grid(np.array([0.0, 2.0, 1.0, 3, 4, 5, 6, 7]), np.ones(8), X_DOMAIN)
        with pytest.raises(ValueError):
            Grid(np.arange(8.0), np.ones(8), "k_domain")

    def test_arrays_are_read_only(self):
        grid = uniform_x_grid(0.0, 1.0, 11)
        with pytest.raises(ValueError):
            grid.nodes[0] = 1.0


class TestSignals:
    def test_length_mismatch(self):
        grid = uniform_x_grid(0.0, 1.0, 11)
        with pytest.raises(GridMismatch):
            SampledSignal(np.ones(10), grid)

    def test_non_finite(self):
        grid = uniform_x_grid(0.0, 1.0, 11)
        values = np.ones(11)
        values[3] = np.nan
        with pytest.raises(ValueError):
            SampledSignal(values, grid)

    def test_unit_interval_inner_product(self):
        grid = uniform_x_grid(0.0, 1.0, 101)
        f = SampledSignal(np.ones(101), grid)
        assert_allclose(inner_product(f, f), 1.0, atol=1e-12)

    def test_gaussian_normalization(self):
        grid = uniform_x_grid(-8.0, 8.0, 512)
        f = SampledSignal(np.exp(-grid.nodes**2 / 2) / np.pi**0.25, grid)
        assert_allclose(norm(f) ** 2, 1.0, atol=1e-8)

    def test_dW_equals_dx_for_identity(self, W_identity):
        grid = uniform_x_grid(-3.0, 3.0, 64)
        f = SampledSignal(np.sin(grid.nodes) + 1j, grid)
        g = SampledSignal(np.cos(grid.nodes), grid)
        assert inner_product(f, g, "dW", W_identity) == inner_product(f, g, "dx")

    def test_dW_measure_on_x_grid(self, W_cubic_sum):
        grid = uniform_x_grid(-1.0, 1.0, 2001)
        one = SampledSignal(np.ones(2001), grid)
        # int dW over [-1, 1] = W(1) - W(-1)
        assert_allclose(inner_product(one, one, "dW", W_cubic_sum), 4.0, rtol=1e-6)

    @pytest.mark.parametrize("measure", ["dx", "dW"])
    def test_inner_product_is_conjugate_symmetric(self, W_cubic_sum, measure):
        grid = uniform_x_grid(-2.0, 2.0, 64)
        rng = np.random.default_rng(0)
        f = SampledSignal(rng.standard_normal(64) + 1j * rng.standard_normal(64), grid)
        g = SampledSignal(rng.standard_normal(64) + 1j * rng.standard_normal(64), grid)
        fg = inner_product(f, g, measure, W_cubic_sum)
        gf = inner_product(g, f, measure, W_cubic_sum)
        assert_allclose(fg, np.conj(gf), rtol=1e-13)

    def test_inner_product_needs_same_grid(self):
        f = SampledSignal(np.ones(11), uniform_x_grid(0.0, 1.0, 11))
        g = SampledSignal(np.ones(11), uniform_x_grid(0.0, 2.0, 11))
        with pytest.raises(GridMismatch):
            inner_product(f, g)

    def test_unknown_measure(self):
        grid = uniform_x_grid(0.0, 1.0, 11)
        with pytest.raises(ValueError):
            measure_weights(grid, "dp")


class TestResample:
    def test_identity_on_same_grid(self, W_identity):
        grid = uniform_x_grid(-2.0, 2.0, 33)
        f = SampledSignal(np.exp(-grid.nodes**2) * (1 + 0.5j), grid)
        assert_allclose(resample(f, grid, W_identity).values, f.values, atol=1e-12)

    @pytest.mark.parametrize("order", [1, 3, 5])
    def test_constant_is_reproduced(self, W_cubic_sum, order):
        source = uniform_x_grid(-2.0, 2.0, 40)
        target = uniform_w_grid(W_cubic_sum, -9.0, 9.0, 57)
        f = SampledSignal(np.full(40, 2.0 - 1.0j), source)
        g, report = resample_with_report(f, target, W_cubic_sum, order)
        assert_allclose(g.values, 2.0 - 1.0j, atol=1e-12)
        assert report.n_clipped == 0

    def test_error_decreases_under_refinement(self, W_cubic_sum):
        target = uniform_x_grid(-1.0, 1.0, 301)
        exact = np.exp(-evaluate(W_cubic_sum, target.nodes) ** 2)
        errors = []
        for n in (50, 100, 200):
            source = uniform_w_grid(W_cubic_sum, -3.0, 3.0, n)
            f = SampledSignal(np.exp(-source.nodes**2), source)
            errors.append(np.max(np.abs(resample(f, target, W_cubic_sum).values - exact)))
        assert errors[0] > errors[1] > errors[2]
        # cubic splines: fourth order
        assert errors[1] / errors[2] > 8.0

    def test_out_of_range_is_filled_with_zero(self, W_identity, caplog):
        source = uniform_x_grid(-1.0, 1.0, 21)
        target = uniform_x_grid(-2.0, 2.0, 41)
        f = SampledSignal(np.ones(21), source)
        g, report = resample_with_report(f, target, W_identity)
        assert report.n_clipped == 20
        assert report.lost_energy_fraction == 0.0
        assert_allclose(g.values[np.abs(target.nodes) > 1.0 + 1e-12], 0.0)
        assert "filled 20 target nodes" in caplog.text

    def test_lost_energy(self, W_identity):
        source = uniform_x_grid(-2.0, 2.0, 41)
        target = uniform_x_grid(0.0, 2.0, 21)
        f = SampledSignal(np.ones(41), source)
        _, report = resample_with_report(f, target, W_identity)
        # 19 interior source nodes on the negative side, plus the half-weight end
        assert_allclose(report.lost_energy_fraction, 1.95 / 4.0)

    def test_bad_order(self, W_identity):
        grid = uniform_x_grid(-1.0, 1.0, 21)
        with pytest.raises(ValueError):
            resample(SampledSignal(np.ones(21), grid), grid, W_identity, order=2)

    def test_p_axis_and_position_grid_do_not_mix(self, W_identity):
        f = SampledSignal(np.ones(21), uniform_x_grid(-1.0, 1.0, 21))
        with pytest.raises(GridMismatch):
            resample(f, uniform_p_grid(-1.0, 1.0, 21), W_identity)


def test_require_uniform(W_cubic_sum):
    require_uniform(uniform_p_grid(-1.0, 1.0, 16), "p_domain")
    squared = grid_from_nodes(np.linspace(0.0, 1.0, 16) ** 2, W_DOMAIN, W_cubic_sum)
    with pytest.raises(NonUniformGrid):
        require_uniform(squared, W_DOMAIN)
    with pytest.raises(ValueError):
        require_uniform(uniform_x_grid(-1.0, 1.0, 16), W_DOMAIN)
