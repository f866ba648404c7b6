# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from wcanon.modeling.grids import (
    Grid,
    inner_product,
    measure_weights,
    SampledSignal,
    u_coordinates,
    x_coordinates,
)
from wcanon.modeling.superpotential import derivative, SINGULARITY_FLOOR, Superpotential
from wcanon.utils.errors import DegenerateEigenvalues, SingularJacobian, TruncationCap
from wcanon.utils.misc import (
    hermite_functions,
    raised_cosine_taper,
    TAPER_RAMP_FRACTION,
    taper_sidelobe_bound,
)

logger = logging.getLogger(__name__)

SQRT_2PI = np.sqrt(2.0 * np.pi)
J_CAP = 64

MUB_MOMENTUM = "mub_momentum"
MUB_CHIRP = "mub_chirp"
ALPHA_STATE = "alpha_state"
ALPHA_DUAL = "alpha_dual"
SYM_STATE = "sym_state"
HO_STATE = "ho_state"
POSITION_STATE = "position_state"

# (1 + rtol) * envelope + atol absorbs the quadrature error of the tapered overlap
SIDELOBE_RTOL = 1e-3
SIDELOBE_ATOL = 1e-6


@dataclass(frozen=True, eq=False)
class BasisVector(SampledSignal):
    """
    Closed-form basis state sampled on a grid. ``values`` of a dual state are the
    components of the bra, so pairings with duals are bilinear.
    """

    label: str = ""
    p: Optional[float] = None
    alpha: Optional[float] = None
    j: Optional[int] = None


def _phase(W: Superpotential, grid: Grid, p: float) -> np.ndarray:
    return np.exp(1j * p * u_coordinates(grid, W)) / SQRT_2PI


def mub_momentum_state(W: Superpotential, grid: Grid, p: float) -> BasisVector:
    return BasisVector(_phase(W, grid, p), grid, label=MUB_MOMENTUM, p=float(p))


def mub_chirp_state(W: Superpotential, grid: Grid, p: float) -> BasisVector:
    """Eigenstate of W + p_W: exp(i p W - i W^2 / 2) / sqrt(2 pi)."""
    u = u_coordinates(grid, W)
    values = np.exp(1j * p * u - 0.5j * u**2) / SQRT_2PI
    return BasisVector(values, grid, label=MUB_CHIRP, p=float(p))


def _slope_power(W: Superpotential, grid: Grid, exponent: float) -> np.ndarray:
    slope = derivative(W, x_coordinates(grid, W))
    if exponent < 0 and np.any(slope < SINGULARITY_FLOOR):
        raise SingularJacobian(f"(W')^{exponent:g} is singular on this grid")
    return slope**exponent


def alpha_eigenstate(W: Superpotential, grid: Grid, p: float, alpha: float) -> BasisVector:
    values = _slope_power(W, grid, alpha) * _phase(W, grid, p)
    return BasisVector(values, grid, label=ALPHA_STATE, p=float(p), alpha=float(alpha))


def alpha_dual(W: Superpotential, grid: Grid, p: float, alpha: float) -> BasisVector:
    values = _slope_power(W, grid, 1.0 - alpha) * _phase(W, grid, -p)
    return BasisVector(values, grid, label=ALPHA_DUAL, p=float(p), alpha=float(alpha))


def sym_eigenstate(W: Superpotential, grid: Grid, p: float) -> BasisVector:
    state = alpha_eigenstate(W, grid, p, 0.5)
    return BasisVector(state.values, grid, label=SYM_STATE, p=float(p), alpha=0.5)


def position_state(W: Superpotential, grid: Grid, i: int) -> BasisVector:
    """Node indicator e_i / sqrt(w_i W'(x_i)), the grid image of a W-position eigenstate."""
    weight = measure_weights(grid, "dW", W)[i]
    if weight < SINGULARITY_FLOOR * grid.weights[i]:
        raise SingularJacobian(f"W' vanishes at node {i}")
    values = np.zeros(len(grid))
    values[i] = 1.0 / np.sqrt(weight)
    return BasisVector(values, grid, label=POSITION_STATE)


def ho_basis(W: Superpotential, grid: Grid, j_max: int) -> np.ndarray:
    """
    W-oscillator states psi_0 .. psi_{j_max} as rows of an array, orthonormal under dW.
    """
    if j_max < 0:
        raise ValueError(f"j must be non-negative, got {j_max}")
    if j_max > J_CAP:
        raise TruncationCap(f"oscillator index {j_max} exceeds the cap {J_CAP}")
    return hermite_functions(u_coordinates(grid, W), j_max)


def ho_eigenstate(W: Superpotential, grid: Grid, j: int) -> BasisVector:
    values = ho_basis(W, grid, j)[j]
    return BasisVector(values, grid, label=HO_STATE, j=int(j))


def gram_matrix(
    vectors: Sequence[SampledSignal], W: Superpotential, measure: str = "dW"
) -> np.ndarray:
    n = len(vectors)
    gram = np.zeros((n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(a, n):
            gram[a, b] = inner_product(vectors[a], vectors[b], measure, W)
            gram[b, a] = np.conj(gram[a, b])
    return gram


@dataclass(frozen=True, eq=False)
class BiorthogonalityReport:
    matrix: np.ndarray
    bounds: np.ndarray
    p_list: np.ndarray

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.matrix)

    @property
    def max_off_diagonal(self) -> float:
        off = self.magnitudes - np.diag(np.diag(self.magnitudes))
        return float(off.max())

    @property
    def passed(self) -> bool:
        off = ~np.eye(self.matrix.shape[0], dtype=bool)
        return bool(np.all(self.magnitudes[off] <= self.bounds[off]))


def biorthogonality_check(
    W: Superpotential,
    grid: Grid,
    alpha: float,
    p_list: Sequence[float],
    taper: bool = True,
) -> BiorthogonalityReport:
    """
    Tapered dual/state pairings M_ab = <dual(p_a)| T |state(p_b)> under dx, normalized
    by the diagonal.

    Off-diagonal entries are bounded by the sidelobe envelope of the taper's Fourier
    transform at |p_b - p_a|. With ``taper=False`` the window is rectangular, which is
    exact on a grid spanning whole periods of every p.
    """
    p = np.asarray(p_list, dtype=np.float64)
    u = u_coordinates(grid, W)
    span = float(u[-1] - u[0])
    resolution = 2.0 * np.pi / span
    gaps = np.abs(p[:, None] - p[None, :])[~np.eye(p.size, dtype=bool)]
    if gaps.size and gaps.min() < resolution * (1.0 - 1e-9):
        raise DegenerateEigenvalues(
            f"eigenvalues {p.tolist()} are closer than the resolution 2*pi/{span:.4g}"
        )

    if taper:
        window = raised_cosine_taper(u, u[0], u[-1])
        ramp = TAPER_RAMP_FRACTION * span
    else:
        window = np.ones_like(u)
        ramp = 0.0
    flat = span - 2.0 * ramp

    duals = np.stack([alpha_dual(W, grid, pa, alpha).values for pa in p])
    states = np.stack([alpha_eigenstate(W, grid, pb, alpha).values for pb in p], axis=1)
    raw = duals @ (states * (grid.weights * window)[:, None])
    diagonal = np.sqrt(np.abs(np.diag(raw)))
    matrix = raw / (diagonal[:, None] * diagonal[None, :])

    bounds = np.ones((p.size, p.size))
    for a in range(p.size):
        for b in range(p.size):
            if a != b:
                envelope = taper_sidelobe_bound(p[b] - p[a], flat, ramp)
                bounds[a, b] = envelope * (1.0 + SIDELOBE_RTOL) + SIDELOBE_ATOL
    return BiorthogonalityReport(matrix, bounds, p)


def _spread(magnitudes: np.ndarray) -> float:
    magnitudes = np.asarray(magnitudes, dtype=np.float64).ravel()
    mean = magnitudes.mean()
    return float(np.max(np.abs(magnitudes - mean)) / mean)


@dataclass(frozen=True)
class UnbiasednessReport:
    deviations: Dict[str, float] = field(default_factory=dict)

    @property
    def deviation(self) -> float:
        return max(self.deviations.values())


def unbiasedness_report(
    W: Superpotential,
    grid: Grid,
    p_values: Sequence[float] = (-0.5, 0.0, 0.5),
) -> UnbiasednessReport:
    """
    Relative spread of overlap moduli for the three basis pairings.

    Position pairings use the node indicators and divide out the measure factor
    sqrt(w_i W'(x_i)); the momentum/chirp pairing uses tapered dW overlaps.
    """
    weights = measure_weights(grid, "dW", W)
    usable = weights >= SINGULARITY_FLOOR * grid.weights
    nodes = np.flatnonzero(usable)

    deviations = {}
    pairings = (("position_momentum", mub_momentum_state), ("position_chirp", mub_chirp_state))
    for name, builder in pairings:
        moduli: List[float] = []
        for p in p_values:
            target = builder(W, grid, p)
            for i in nodes:
                overlap = inner_product(position_state(W, grid, i), target, "dW", W)
                moduli.append(abs(overlap) / np.sqrt(weights[i]))
        deviations[name] = _spread(moduli)

    u = u_coordinates(grid, W)
    window = raised_cosine_taper(u, u[0], u[-1])
    tapered = [
        SampledSignal(mub_chirp_state(W, grid, q).values * window, grid) for q in p_values
    ]
    moduli = [
        abs(inner_product(mub_momentum_state(W, grid, p), chirp, "dW", W))
        for p in p_values
        for chirp in tapered
    ]
    deviations["momentum_chirp"] = _spread(moduli)
    return UnbiasednessReport(deviations)


def unbiasedness_check(
    W: Superpotential, grid: Grid, p_values: Sequence[float] = (-0.5, 0.0, 0.5)
) -> float:
    return unbiasedness_report(W, grid, p_values).deviation
