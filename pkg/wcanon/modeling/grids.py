# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import make_interp_spline

from wcanon.modeling.superpotential import derivative, evaluate, invert, Superpotential
from wcanon.utils.errors import BadBounds, GridMismatch, NonUniformGrid, TooFewNodes
from wcanon.utils.misc import trapezoid_weights

logger = logging.getLogger(__name__)

X_DOMAIN = "x_domain"
W_DOMAIN = "w_domain"
P_DOMAIN = "p_domain"
REPS = (X_DOMAIN, W_DOMAIN, P_DOMAIN)

MIN_NODES = 8
UNIFORM_RTOL = 1e-9


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Grid:
    """
    Ordered sample nodes with trapezoid weights.

    For ``w_domain`` grids the nodes are values of u = W(x) and ``x_nodes`` holds their
    pre-images; ``p_domain`` grids are spectral axes in p_W.
    """

    nodes: np.ndarray
    weights: np.ndarray
    rep: str
    x_nodes: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.rep not in REPS:
            raise ValueError(f"unknown grid rep {self.rep!r}, expected one of {REPS}")
        nodes = np.asarray(self.nodes, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if nodes.ndim != 1 or weights.shape != nodes.shape:
            raise GridMismatch(f"nodes {nodes.shape} and weights {weights.shape} differ")
        if nodes.size < MIN_NODES:
            raise TooFewNodes(f"grid needs at least {MIN_NODES} nodes, got {nodes.size}")
        if not np.all(np.diff(nodes) > 0):
            raise BadBounds("grid nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise BadBounds("quadrature weights must be positive")
        object.__setattr__(self, "nodes", _frozen(nodes))
        object.__setattr__(self, "weights", _frozen(weights))
        if self.x_nodes is not None:
            x_nodes = np.asarray(self.x_nodes, dtype=np.float64)
            object.__setattr__(self, "x_nodes", _frozen(x_nodes))

    def __len__(self) -> int:
        return self.nodes.size

    @property
    def span(self) -> float:
        return float(self.nodes[-1] - self.nodes[0])

    @property
    def is_uniform(self) -> bool:
        steps = np.diff(self.nodes)
        return bool(np.allclose(steps, steps.mean(), rtol=UNIFORM_RTOL, atol=0.0))

    @property
    def spacing(self) -> float:
        """Mean node spacing (the exact step for uniform grids)."""
        return self.span / (len(self) - 1)

    def same_as(self, other: "Grid") -> bool:
        return self is other or (
            self.rep == other.rep
            and len(self) == len(other)
            and np.array_equal(self.nodes, other.nodes)
        )


@dataclass(frozen=True, eq=False)
class SampledSignal:
    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (len(self.grid),):
            raise GridMismatch(
                f"signal of shape {values.shape} does not match grid of {len(self.grid)} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("signal samples must be finite")
        object.__setattr__(self, "values", _frozen(values))

    def with_values(self, values) -> "SampledSignal":
        return SampledSignal(values, self.grid)


@dataclass(frozen=True)
class ClipReport:
    n_clipped: int
    lost_energy_fraction: float


def _check_bounds(lo: float, hi: float, n: int):
    if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
        raise BadBounds(f"need finite lower < upper bound, got [{lo}, {hi}]")
    if int(n) < MIN_NODES:
        raise TooFewNodes(f"grid needs at least {MIN_NODES} nodes, got {n}")


def _uniform(lo: float, hi: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    _check_bounds(lo, hi, n)
    nodes = np.linspace(lo, hi, int(n))
    h = (hi - lo) / (int(n) - 1)
    weights = np.full(int(n), h)
    weights[0] = weights[-1] = 0.5 * h
    return nodes, weights


def uniform_x_grid(xmin: float, xmax: float, N: int) -> Grid:
    nodes, weights = _uniform(xmin, xmax, N)
    return Grid(nodes, weights, X_DOMAIN)


def uniform_w_grid(
    W: Superpotential, wmin: float, wmax: float, N: int, map_to_x: bool = True
) -> Grid:
    """
    Nodes uniform in u = W(x). ``map_to_x=False`` skips computing the x pre-images,
    which are then obtained lazily through :func:`x_coordinates`.
    """
    nodes, weights = _uniform(wmin, wmax, N)
    x_nodes = invert(W, nodes) if map_to_x else None
    return Grid(nodes, weights, W_DOMAIN, x_nodes=x_nodes)


def uniform_p_grid(pmin: float, pmax: float, M: int) -> Grid:
    nodes, weights = _uniform(pmin, pmax, M)
    return Grid(nodes, weights, P_DOMAIN)


def adapted_x_grid(W: Superpotential, u_max: float, N: int) -> Grid:
    """Uniform x-grid on W^{-1}([-u_max, u_max])."""
    return uniform_x_grid(invert(W, -u_max), invert(W, u_max), N)


def grid_from_nodes(
    nodes, rep: str = X_DOMAIN, W: Optional[Superpotential] = None
) -> Grid:
    """
    Build a grid with trapezoid weights from arbitrary strictly increasing nodes,
    e.g. the first column of a CSV file.
    """
    nodes = np.asarray(nodes, dtype=np.float64)
    if nodes.ndim != 1 or nodes.size < MIN_NODES:
        raise TooFewNodes(f"grid needs at least {MIN_NODES} nodes, got {nodes.size}")
    if not np.all(np.diff(nodes) > 0):
        raise BadBounds("grid nodes must be strictly increasing")
    x_nodes = None
    if rep == W_DOMAIN:
        if W is None:
            raise ValueError("a w_domain grid needs the superpotential to map nodes back to x")
        x_nodes = invert(W, nodes)
    return Grid(nodes, trapezoid_weights(nodes), rep, x_nodes=x_nodes)


def x_coordinates(grid: Grid, W: Optional[Superpotential] = None) -> np.ndarray:
    if grid.rep == X_DOMAIN:
        return grid.nodes
    if grid.rep == W_DOMAIN:
        return grid.x_nodes if grid.x_nodes is not None else invert(W, grid.nodes)
    raise ValueError("a p_domain grid has no x coordinates")


def u_coordinates(grid: Grid, W: Optional[Superpotential] = None) -> np.ndarray:
    if grid.rep == W_DOMAIN:
        return grid.nodes
    if grid.rep == X_DOMAIN:
        if W is None:
            raise ValueError("mapping an x_domain grid to u needs the superpotential")
        return evaluate(W, grid.nodes)
    raise ValueError("a p_domain grid has no u coordinates")


def measure_weights(
    grid: Grid, measure: str = "dx", W: Optional[Superpotential] = None
) -> np.ndarray:
    """
    Quadrature weights of ``grid`` for the measure ``dx`` or ``dW``.

    On an x-grid dW = dx W'(x); on a u-grid dx = dW / W'(x). A p-axis only knows ``dx``
    (meaning dp).
    """
    if measure not in ("dx", "dW"):
        raise ValueError(f"unknown measure {measure!r}, expected 'dx' or 'dW'")
    if grid.rep == P_DOMAIN or (grid.rep == X_DOMAIN and measure == "dx"):
        return grid.weights
    if grid.rep == W_DOMAIN and measure == "dW":
        return grid.weights
    if W is None:
        raise ValueError(f"measure {measure} on a {grid.rep} grid needs the superpotential")
    slope = derivative(W, x_coordinates(grid, W))
    if measure == "dW":
        return grid.weights * slope
    with np.errstate(divide="ignore"):
        return grid.weights / slope


def inner_product(
    f: SampledSignal,
    g: SampledSignal,
    measure: str = "dx",
    W: Optional[Superpotential] = None,
) -> complex:
    """
    <f, g> = sum_i conj(f_i) g_i w_i under ``dx``, with the extra factor W'(x_i)
    under ``dW`` on an x-grid.
    """
    if not f.grid.same_as(g.grid):
        raise GridMismatch("inner product of signals sampled on different grids")
    weights = measure_weights(f.grid, measure, W)
    return complex(np.sum(np.conj(f.values) * g.values * weights))


def norm(f: SampledSignal, measure: str = "dx", W: Optional[Superpotential] = None) -> float:
    return float(np.sqrt(max(inner_product(f, f, measure, W).real, 0.0)))


def _interpolate(coords: np.ndarray, values: np.ndarray, targets: np.ndarray, order: int):
    real = make_interp_spline(coords, values.real, k=order)(targets)
    imag = make_interp_spline(coords, values.imag, k=order)(targets)
    return real + 1j * imag


def resample_with_report(
    f: SampledSignal, target: Grid, W: Optional[Superpotential], order: int = 3
) -> Tuple[SampledSignal, ClipReport]:
    """
    Interpolate ``f`` onto ``target``.

    Node coordinates of both grids are expressed in u = W(x), so functions that are
    polynomial in u up to ``order`` are reproduced exactly. Target nodes outside the
    source range are filled with 0.

    Returns:
        the resampled signal and a :class:`ClipReport` with the number of filled target
        nodes and the dW-energy fraction of the source that the target does not cover.
    """
    if order not in (1, 3, 5):
        raise ValueError(f"interpolation order must be 1, 3 or 5, got {order}")
    if (f.grid.rep == P_DOMAIN) != (target.rep == P_DOMAIN):
        raise GridMismatch("cannot resample between a p-axis and a position grid")

    if f.grid.rep == P_DOMAIN:
        src, dst = f.grid.nodes, target.nodes
    elif W is None or W.is_identity:
        src, dst = x_coordinates(f.grid, W), x_coordinates(target, W)
    else:
        src, dst = u_coordinates(f.grid, W), u_coordinates(target, W)

    lo, hi = src[0], src[-1]
    slack = 4 * np.finfo(np.float64).eps * max(abs(lo), abs(hi), 1.0)
    inside = (dst >= lo - slack) & (dst <= hi + slack)
    values = np.zeros(len(target), dtype=np.complex128)
    if inside.any():
        values[inside] = _interpolate(src, f.values, np.clip(dst[inside], lo, hi), order)

    n_clipped = int(np.count_nonzero(~inside))
    lost = 0.0
    if f.grid.rep != P_DOMAIN:
        energy = np.abs(f.values) ** 2 * measure_weights(f.grid, "dx" if W is None else "dW", W)
        total = float(np.sum(energy))
        uncovered = (src < dst[0] - slack) | (src > dst[-1] + slack)
        if total > 0:
            lost = float(np.sum(energy[uncovered]) / total)
    report = ClipReport(n_clipped, lost)
    if n_clipped or lost > 0:
        logger.warning(
            f"resample filled {n_clipped} target nodes with 0, "
            f"target misses {lost:.3e} of the source energy"
        )
    return SampledSignal(values, target), report


def resample(f: SampledSignal, target: Grid, W: Superpotential, order: int = 3) -> SampledSignal:
    return resample_with_report(f, target, W, order)[0]


def require_uniform(grid: Grid, rep: str):
    if grid.rep != rep:
        raise ValueError(f"expected a {rep} grid, got {grid.rep}")
    if not grid.is_uniform:
        raise NonUniformGrid(f"{rep} grid must be uniformly spaced")
