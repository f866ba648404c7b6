# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from wcanon.modeling.grids import (
    Grid,
    measure_weights,
    require_uniform,
    SampledSignal,
    W_DOMAIN,
    X_DOMAIN,
)
from wcanon.modeling.superpotential import (
    derivative,
    evaluate,
    second_derivative,
    SINGULARITY_FLOOR,
    Superpotential,
)
from wcanon.utils.errors import GridMismatch, NonMonotone, SingularJacobian
from wcanon.utils.misc import operator_norm

logger = logging.getLogger(__name__)

POSITION = "position"
MOMENTUM_ALPHA = "momentum_alpha"
MOMENTUM_SYMMETRIZED = "momentum_symmetrized"
MOMENTUM_W = "momentum_w"
SIMILARITY = "similarity"
CHIRP = "chirp"

HALF_DENSITY = "half_density"
ORDERING_AVERAGE = "ordering_average"
DERIVATIVE_FORM = "derivative_form"
CONSTRUCTIONS = (HALF_DENSITY, ORDERING_AVERAGE, DERIVATIVE_FORM)

SELF_ADJOINT_BOTH = "self_adjoint_dx_and_dW"
SELF_ADJOINT_DX = "self_adjoint_dx"
SELF_ADJOINT_DW = "self_adjoint_dW"
QUASI_HERMITIAN = "quasi_hermitian"

DEFAULT_ADJOINT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """
    Dense complex matrix acting on samples of ``grid``.

    ``measure`` names the inner product the operator is meant to be examined under;
    ``alpha`` records the ordering parameter for the momentum and similarity kinds.
    """

    entries: np.ndarray
    grid: Grid
    measure: str
    kind: str
    alpha: Optional[float] = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        n = len(self.grid)
        if entries.shape != (n, n):
            raise GridMismatch(f"operator of shape {entries.shape} on a grid of {n} nodes")
        if self.kind in (POSITION, SIMILARITY):
            off_diagonal = entries - np.diag(np.diag(entries))
            assert not np.any(off_diagonal), f"{self.kind} operator must be diagonal"
            assert not np.any(np.diag(entries).imag), f"{self.kind} operator must be real"
        if self.kind == SIMILARITY:
            assert np.all(np.diag(entries).real > 0), "similarity entries must be positive"
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def interior(self) -> np.ndarray:
        """Block without the two one-sided boundary rows and columns."""
        return self.entries[1:-1, 1:-1]

    def apply(self, f: SampledSignal) -> SampledSignal:
        if not f.grid.same_as(self.grid):
            raise GridMismatch("operator and signal live on different grids")
        return SampledSignal(self.entries @ f.values, self.grid)


@dataclass(frozen=True)
class AdjointReport:
    defect_dx: float
    defect_dW: float
    interior_rows: int
    norm: float
    classification: str

    @property
    def relative_dx(self) -> float:
        return self.defect_dx / self.norm if self.norm > 0 else 0.0

    @property
    def relative_dW(self) -> float:
        return self.defect_dW / self.norm if self.norm > 0 else 0.0


def _three_point_weights(a, b, c, t):
    """First-derivative weights at t of the quadratic through nodes a, b, c."""
    wa = (2 * t - b - c) / ((a - b) * (a - c))
    wb = (2 * t - a - c) / ((b - a) * (b - c))
    wc = (2 * t - a - b) / ((c - a) * (c - b))
    return wa, wb, wc


def derivative_matrix(grid: Grid) -> np.ndarray:
    """
    Second-order finite-difference d/d(node) matrix: central rows inside, one-sided
    three-point rows at both ends. Uniform grids get the exact (-1, 0, 1) / 2h stencil,
    so the interior block is antisymmetric.
    """
    nodes = grid.nodes
    n = nodes.size
    D = np.zeros((n, n))
    rows = np.arange(1, n - 1)
    if grid.is_uniform:
        h = grid.spacing
        D[rows, rows - 1] = -0.5 / h
        D[rows, rows + 1] = 0.5 / h
        D[0, :3] = np.array([-3.0, 4.0, -1.0]) / (2 * h)
        D[-1, -3:] = np.array([1.0, -4.0, 3.0]) / (2 * h)
        return D

    a, b, c = nodes[rows - 1], nodes[rows], nodes[rows + 1]
    wa, wb, wc = _three_point_weights(a, b, c, b)
    D[rows, rows - 1] = wa
    D[rows, rows] = wb
    D[rows, rows + 1] = wc
    D[0, :3] = _three_point_weights(nodes[0], nodes[1], nodes[2], nodes[0])
    D[-1, -3:] = _three_point_weights(nodes[-3], nodes[-2], nodes[-1], nodes[-1])
    return D


def _jacobian(W: Superpotential, grid: Grid) -> np.ndarray:
    if grid.rep != X_DOMAIN:
        raise ValueError(f"momentum operators are built on x_domain grids, got {grid.rep}")
    slope = derivative(W, grid.nodes)
    if np.any(slope < SINGULARITY_FLOOR):
        bad = grid.nodes[np.argmin(slope)]
        raise SingularJacobian(f"W'(x) < {SINGULARITY_FLOOR:g} at grid node x = {bad:.6g}")
    inside = [c for c in W.critical_points if grid.nodes[0] <= c <= grid.nodes[-1]]
    if inside:
        raise NonMonotone(f"W has critical point(s) {inside} inside the grid")
    return slope


def build_position(W: Superpotential, grid: Grid) -> OperatorMatrix:
    if grid.rep == W_DOMAIN:
        diagonal = grid.nodes
    elif grid.rep == X_DOMAIN:
        diagonal = evaluate(W, grid.nodes)
    else:
        raise ValueError("position operator needs an x_domain or w_domain grid")
    return OperatorMatrix(np.diag(diagonal).astype(np.complex128), grid, "dx", POSITION)


def build_momentum_alpha(W: Superpotential, grid: Grid, alpha: float) -> OperatorMatrix:
    """
    -i (W')^{alpha-1} D (W')^{-alpha}; hbar = 1.
    """
    slope = _jacobian(W, grid)
    D = derivative_matrix(grid)
    entries = -1j * (slope ** (alpha - 1.0))[:, None] * D * (slope ** (-alpha))[None, :]
    measure = "dW" if alpha == 0 else "dx"
    return OperatorMatrix(entries, grid, measure, MOMENTUM_ALPHA, alpha=float(alpha))


def build_momentum_symmetrized(
    W: Superpotential,
    grid: Grid,
    alpha: float = 0.5,
    construction: str = HALF_DENSITY,
) -> OperatorMatrix:
    """
    Symmetrized momentum, the arithmetic average of the alpha and 1 - alpha orderings.

    Args:
        construction: how the average is realized on the grid.
            ``half_density``: -i (W')^{-1/2} D (W')^{-1/2}; exactly Hermitian on the
            interior and exactly independent of alpha.
            ``ordering_average``: (P_alpha + P_{1-alpha}) / 2 taken literally; Hermitian,
            alpha-independent up to O(h^2).
            ``derivative_form``: -i (W')^{-1} D + (i/2) W'' (W')^{-2}; alpha-independent,
            Hermitian only on smooth samples up to O(h^2).
    """
    if construction not in CONSTRUCTIONS:
        raise ValueError(f"unknown construction {construction!r}, expected one of {CONSTRUCTIONS}")
    slope = _jacobian(W, grid)
    D = derivative_matrix(grid)
    if construction == HALF_DENSITY:
        half = slope**-0.5
        entries = -1j * half[:, None] * D * half[None, :]
    elif construction == ORDERING_AVERAGE:
        forward = (slope ** (alpha - 1.0))[:, None] * D * (slope ** (-alpha))[None, :]
        partner = (slope ** (-alpha))[:, None] * D * (slope ** (alpha - 1.0))[None, :]
        entries = -0.5j * (forward + partner)
    else:
        curvature = second_derivative(W, grid.nodes) / slope**2
        entries = -1j * (1.0 / slope)[:, None] * D + 0.5j * np.diag(curvature)
    return OperatorMatrix(entries, grid, "dx", MOMENTUM_SYMMETRIZED, alpha=float(alpha))


def build_momentum_w(grid: Grid) -> OperatorMatrix:
    """-i d/du on a uniform u-grid."""
    require_uniform(grid, W_DOMAIN)
    return OperatorMatrix(-1j * derivative_matrix(grid), grid, "dW", MOMENTUM_W)


def build_similarity(W: Superpotential, grid: Grid, alpha: float) -> OperatorMatrix:
    slope = _jacobian(W, grid)
    entries = np.diag(slope ** (-alpha)).astype(np.complex128)
    return OperatorMatrix(entries, grid, "dx", SIMILARITY, alpha=float(alpha))


def build_chirp_operator(W: Superpotential, grid: Grid) -> OperatorMatrix:
    """W + p_W with the dW-self-adjoint ordering (alpha = 0)."""
    entries = build_position(W, grid).entries + build_momentum_alpha(W, grid, 0.0).entries
    return OperatorMatrix(entries, grid, "dW", CHIRP, alpha=0.0)


def _classify(relative_dx: float, relative_dW: float, tol: float) -> str:
    if relative_dx <= tol and relative_dW <= tol:
        return SELF_ADJOINT_BOTH
    if relative_dx <= tol:
        return SELF_ADJOINT_DX
    if relative_dW <= tol:
        return SELF_ADJOINT_DW
    return QUASI_HERMITIAN


def _adjoint_defect(G: np.ndarray, weights: np.ndarray) -> float:
    """||G - M^{-1} G^H M|| for M = diag(weights)."""
    adjoint = G.conj().T * weights[None, :] / weights[:, None]
    return operator_norm(G - adjoint)


def adjoint_report(
    P: OperatorMatrix, W: Superpotential, tol: float = DEFAULT_ADJOINT_TOL
) -> AdjointReport:
    """
    Adjoint defects of ``P`` under dx and dW, restricted to the interior block.

    Args:
        tol: relative defect below which ``P`` counts as self-adjoint under a measure.
    """
    G = P.interior
    w_dx = measure_weights(P.grid, "dx", W)[1:-1]
    w_dW = measure_weights(P.grid, "dW", W)[1:-1]
    defect_dx = _adjoint_defect(G, w_dx)
    defect_dW = _adjoint_defect(G, w_dW)
    scale = operator_norm(G)
    rel_dx = defect_dx / scale if scale > 0 else 0.0
    rel_dW = defect_dW / scale if scale > 0 else 0.0
    return AdjointReport(
        defect_dx=defect_dx,
        defect_dW=defect_dW,
        interior_rows=G.shape[0],
        norm=scale,
        classification=_classify(rel_dx, rel_dW, tol),
    )


def _interior_norm(values: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(values[1:-1]) ** 2 * weights[1:-1])))


def commutator_defect(W: Superpotential, P: OperatorMatrix, f: SampledSignal) -> float:
    """
    ||(W P - P W - i) f|| / ||f|| over interior nodes. ``f`` should vanish near both ends
    of the grid, where the one-sided rows live.
    """
    if not f.grid.same_as(P.grid):
        raise GridMismatch("commutator test signal and operator live on different grids")
    position = np.diag(build_position(W, P.grid).entries).real
    values = f.values
    residual = position * (P.entries @ values) - P.entries @ (position * values) - 1j * values
    weights = P.grid.weights
    return _interior_norm(residual, weights) / _interior_norm(values, weights)


def similarity_check(W: Superpotential, grid: Grid, alpha: float) -> float:
    """||S P_alpha S^{-1} - P_0|| over the interior block, S = (W')^{-alpha}."""
    S = np.diag(build_similarity(W, grid, alpha).entries).real
    P_alpha = build_momentum_alpha(W, grid, alpha).entries
    P_0 = build_momentum_alpha(W, grid, 0.0).entries
    residual = S[:, None] * P_alpha * (1.0 / S)[None, :] - P_0
    return operator_norm(residual[1:-1, 1:-1])


def construction_spread(
    W: Superpotential,
    grid: Grid,
    f: SampledSignal,
    alphas: Sequence[float] = (0.0, 0.3, 0.5, 1.0),
    constructions: Sequence[str] = CONSTRUCTIONS,
) -> float:
    """
    Largest interior ||(P_a - P_b) f|| / ||f|| between symmetrized realizations over all
    constructions and alphas. Decreases as O(h^2) for smooth, centered ``f``.
    """
    images = [
        build_momentum_symmetrized(W, grid, alpha, construction).apply(f).values
        for construction in constructions
        for alpha in alphas
    ]
    weights = grid.weights
    scale = _interior_norm(f.values, weights)
    spread = 0.0
    for a, b in combinations(images, 2):
        spread = max(spread, _interior_norm(a - b, weights) / scale)
    return spread
