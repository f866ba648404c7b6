# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

"""
W-harmonic-oscillator phase space: ladder algebra on truncated Fock vectors, coherent
states, Wigner distributions over (W, p_W) and uncertainty products.

Coherent states are built as lowering-operator eigenvectors in the Fock picture. For the
oscillator ground state as fiducial this coincides with displacing psi_0 in u, so no
separate displacement-operator construction is provided.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import poisson

from wcanon.modeling.bases import ho_basis, J_CAP
from wcanon.modeling.grids import (
    Grid,
    measure_weights,
    norm,
    P_DOMAIN,
    require_uniform,
    SampledSignal,
    u_coordinates,
    W_DOMAIN,
)
from wcanon.modeling.superpotential import invert, Superpotential
from wcanon.modeling.wtransform import forward
from wcanon.utils.errors import (
    GridMismatch,
    NotNormalized,
    TailTooLarge,
    TruncationCap,
    TruncationOverflow,
)

logger = logging.getLogger(__name__)

LOWER = "lower"
RAISE = "raise"

NUMBER_FORM = "number"
NORMAL_FORM = "normal"
ANTINORMAL_FORM = "antinormal"

OVERFLOW_TOL = 1e-12
TAIL_LIMIT = 1e-10
MAX_COHERENT_AMPLITUDE = 4.0
NORMALIZATION_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class FockVector:
    """
    Coefficients c_0 .. c_{J_max} over the W-oscillator states psi_j. ``tail_weight`` is
    the probability mass known to lie above J_max (zero unless the vector was truncated).
    """

    coeffs: np.ndarray
    tail_weight: float = 0.0

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError(f"Fock coefficients must form a non-empty vector, got {coeffs.shape}")
        if coeffs.size - 1 > J_CAP:
            raise TruncationCap(f"J_max = {coeffs.size - 1} exceeds the cap {J_CAP}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Fock coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "tail_weight", float(self.tail_weight))

    @property
    def J_max(self) -> int:
        return self.coeffs.size - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def normalized(self) -> "FockVector":
        size = self.norm
        if size == 0:
            raise ValueError("cannot normalize the zero Fock vector")
        return FockVector(self.coeffs / size, self.tail_weight)


def fock_state(j: int, J_max: int) -> FockVector:
    """Pure number state |j> truncated at J_max."""
    if not 0 <= j <= J_max:
        raise ValueError(f"need 0 <= j <= J_max, got j={j}, J_max={J_max}")
    coeffs = np.zeros(J_max + 1, dtype=np.complex128)
    coeffs[j] = 1.0
    return FockVector(coeffs)


def random_fock_vector(rng: np.random.Generator, J_max: int) -> FockVector:
    """Normalized superposition with complex Gaussian coefficients."""
    coeffs = rng.standard_normal(J_max + 1) + 1j * rng.standard_normal(J_max + 1)
    return FockVector(coeffs / np.linalg.norm(coeffs))


def ladder_matrix(direction: str, J_max: int) -> np.ndarray:
    """
    Truncated ladder operator as a (J_max + 1) x (J_max + 1) matrix:
    a has sqrt(j) on the first superdiagonal, a^+ is its transpose.
    """
    if direction not in (LOWER, RAISE):
        raise ValueError(f"unknown ladder direction {direction!r}")
    lower = np.diag(np.sqrt(np.arange(1, J_max + 1, dtype=np.float64)), k=1)
    return lower if direction == LOWER else lower.T


def ladder_apply(direction: str, v: FockVector) -> FockVector:
    """
    a psi_j = sqrt(j) psi_{j-1} and a^+ psi_j = sqrt(j + 1) psi_{j+1}.

    Raising needs the top coefficient to vanish, otherwise its image falls outside the
    truncation.
    """
    c = v.coeffs
    out = np.zeros_like(c)
    amplitudes = np.sqrt(np.arange(1, c.size, dtype=np.float64))
    if direction == LOWER:
        out[:-1] = amplitudes * c[1:]
    elif direction == RAISE:
        if abs(c[-1]) > OVERFLOW_TOL:
            raise TruncationOverflow(
                f"raising a vector with |c_{v.J_max}| = {abs(c[-1]):.3e} leaves the truncation"
            )
        out[1:] = amplitudes * c[:-1]
    else:
        raise ValueError(f"unknown ladder direction {direction!r}")
    return FockVector(out, v.tail_weight)


def hamiltonian_apply(v: FockVector, form: str = NUMBER_FORM) -> FockVector:
    """
    H_W = a^+ a + 1/2, i.e. c_j -> (j + 1/2) c_j.

    ``form`` selects how the operator is evaluated: ``number`` uses the diagonal,
    ``normal`` multiplies by the truncated a^+ a + 1/2 and ``antinormal`` by the
    truncated a a^+ - 1/2. The antinormal form differs from the others only in the
    top coefficient, where the truncated a a^+ loses the J_max + 1 state.
    """
    if form == NUMBER_FORM:
        energies = np.arange(v.coeffs.size) + 0.5
        return FockVector(energies * v.coeffs, v.tail_weight)
    lower = ladder_matrix(LOWER, v.J_max)
    identity = np.eye(v.coeffs.size)
    if form == NORMAL_FORM:
        matrix = lower.T @ lower + 0.5 * identity
    elif form == ANTINORMAL_FORM:
        matrix = lower @ lower.T - 0.5 * identity
    else:
        raise ValueError(f"unknown Hamiltonian form {form!r}")
    return FockVector(matrix @ v.coeffs, v.tail_weight)


def fock_inner(v1: FockVector, v2: FockVector) -> complex:
    if v1.coeffs.size != v2.coeffs.size:
        raise GridMismatch(f"Fock vectors truncated at {v1.J_max} and {v2.J_max}")
    return complex(np.vdot(v1.coeffs, v2.coeffs))


def number_expectation(v: FockVector) -> float:
    weights = np.abs(v.coeffs) ** 2
    return float(np.sum(np.arange(weights.size) * weights) / np.sum(weights))


def coherent_state(z: complex, J_max: int = J_CAP) -> FockVector:
    """
    |z> = exp(-|z|^2/2) sum_j z^j / sqrt(j!) psi_j, truncated at J_max.

    Coefficients follow the recurrence c_j = c_{j-1} z / sqrt(j). The truncated weight
    is the Poisson tail P(n > J_max) with mean |z|^2.
    """
    z = complex(z)
    if abs(z) > MAX_COHERENT_AMPLITUDE:
        raise ValueError(f"|z| = {abs(z):.4g} exceeds {MAX_COHERENT_AMPLITUDE}")
    if J_max < 0:
        raise ValueError(f"J_max must be non-negative, got {J_max}")
    if J_max > J_CAP:
        raise TruncationCap(f"J_max = {J_max} exceeds the cap {J_CAP}")
    steps = np.ones(J_max + 1, dtype=np.complex128)
    steps[1:] = z / np.sqrt(np.arange(1, J_max + 1))
    coeffs = math.exp(-0.5 * abs(z) ** 2) * np.cumprod(steps)
    tail = float(poisson.sf(J_max, abs(z) ** 2))
    if tail > TAIL_LIMIT:
        raise TailTooLarge(
            f"coherent state z={z} loses {tail:.3e} of its weight above J_max={J_max}"
        )
    return FockVector(coeffs, tail)


def lowering_residual(v: FockVector, z: complex) -> float:
    """||a v - z v||, the eigen-residual of a coherent state."""
    lowered = ladder_apply(LOWER, v)
    return float(np.linalg.norm(lowered.coeffs - complex(z) * v.coeffs))


def coherent_overlap(z1: complex, z2: complex) -> complex:
    """<z1|z2> = exp(conj(z1) z2 - |z1|^2/2 - |z2|^2/2)."""
    z1, z2 = complex(z1), complex(z2)
    return complex(np.exp(np.conj(z1) * z2 - 0.5 * abs(z1) ** 2 - 0.5 * abs(z2) ** 2))


def fock_to_signal(W: Superpotential, v: FockVector, grid: Grid) -> SampledSignal:
    """sum_j c_j psi_j(W(x)) sampled on ``grid``."""
    basis = ho_basis(W, grid, v.J_max)
    return SampledSignal(v.coeffs @ basis, grid)


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """
    Real Wigner distribution over (u, p), ``values[i, a]`` at (u_i, p_a).
    ``imag_residue`` is the largest imaginary part relative to the largest real one.
    """

    values: np.ndarray
    u_axis: Grid
    p_axis: Grid
    imag_residue: float = 0.0

    def __post_init__(self):
        assert self.values.shape == (len(self.u_axis), len(self.p_axis)), (
            f"values {self.values.shape} do not match axes "
            f"({len(self.u_axis)}, {len(self.p_axis)})"
        )
        assert np.isrealobj(self.values), "Wigner values must be real"

    def marginal_u(self) -> np.ndarray:
        """Integral over p, approximating |g(u)|^2."""
        return self.values @ self.p_axis.weights

    def marginal_p(self) -> np.ndarray:
        """Integral over u, approximating |G(p)|^2."""
        return self.u_axis.weights @ self.values

    def total_mass(self) -> float:
        return float(self.u_axis.weights @ self.values @ self.p_axis.weights)

    def pull_back(self, W: Superpotential) -> np.ndarray:
        """x-coordinates of the u-axis rows, for plotting against x."""
        if self.u_axis.x_nodes is not None:
            return np.asarray(self.u_axis.x_nodes)
        return invert(W, self.u_axis.nodes)


def _lag_weights(n: int, du: float) -> np.ndarray:
    """
    Trapezoid weights in the lag y = k du for every row i: the overlap range is
    |k| <= min(i, n - 1 - i), with half weights at its ends.
    """
    i = np.arange(n)[:, None]
    k = np.abs(np.arange(-(n - 1), n))[None, :]
    reach = np.minimum(i, n - 1 - i)
    weights = np.where(k < reach, du, 0.0)
    weights = np.where((k == reach) & (reach > 0), 0.5 * du, weights)
    return weights


def wigner(g: SampledSignal, p_axis: Grid) -> WignerGrid:
    """
    W(u, p) = 1/pi sum_y dy conj(g(u + y)) g(u - y) exp(2 i p y)

    for g sampled uniformly in u. Lags run over the grid steps, so every row is an exact
    trapezoid rule over the overlap of the shifted copies.
    """
    require_uniform(g.grid, W_DOMAIN)
    require_uniform(p_axis, P_DOMAIN)
    n = len(g.grid)
    du = g.grid.spacing
    values = g.values

    lags = np.arange(-(n - 1), n)
    rows = np.arange(n)[:, None]
    plus = rows + lags[None, :]
    minus = rows - lags[None, :]
    valid = (plus >= 0) & (plus < n) & (minus >= 0) & (minus < n)
    products = np.where(
        valid,
        np.conj(values[np.clip(plus, 0, n - 1)]) * values[np.clip(minus, 0, n - 1)],
        0.0,
    )
    products = products * _lag_weights(n, du)

    kernel = np.exp(2j * np.outer(lags * du, p_axis.nodes))
    distribution = (products @ kernel) / math.pi

    scale = float(np.max(np.abs(distribution.real)))
    residue = float(np.max(np.abs(distribution.imag))) / scale if scale > 0 else 0.0
    if residue > 1e-10:
        logger.warning(f"Wigner distribution has relative imaginary residue {residue:.3e}")
    return WignerGrid(np.ascontiguousarray(distribution.real), g.grid, p_axis, residue)


def uncertainty_product(
    W: Superpotential,
    f: SampledSignal,
    grid: Optional[Grid],
    p_grid: Grid,
) -> float:
    """
    Delta W * Delta p_W for a dW-normalized signal.

    Delta W comes from the dW-moments of u = W(x) under |f|^2; Delta p_W from the
    dp-moments of |forward(f)|^2. Both distributions are normalized by their own mass.
    """
    if grid is not None and not grid.same_as(f.grid):
        raise GridMismatch("signal is not sampled on the given grid")
    size = norm(f, "dW", W)
    if abs(size - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"signal has dW-norm {size:.8g}, expected 1")

    u = u_coordinates(f.grid, W)
    density = np.abs(f.values) ** 2 * measure_weights(f.grid, "dW", W)
    spread_u = _spread(u, density)

    F = forward(W, f, p_grid)
    spectral = np.abs(F.values) ** 2 * p_grid.weights
    spread_p = _spread(p_grid.nodes, spectral)
    return spread_u * spread_p


def _spread(axis: np.ndarray, density: np.ndarray) -> float:
    mass = float(np.sum(density))
    mean = float(np.sum(axis * density)) / mass
    return math.sqrt(float(np.sum((axis - mean) ** 2 * density)) / mass)
