# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

"""
Acceptance suite behind ``wcanon verify``.

Every check family takes the composed run config and returns a list of
:class:`CheckResult`. The rig (superpotentials, alphas, grids, tolerances) comes from the
``verify`` and ``tolerances`` nodes of the config.
"""

import itertools
import logging
import math
from collections import OrderedDict
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Sequence

import numpy as np
from omegaconf import DictConfig
from tqdm import tqdm

from wcanon.build_wcanon import build_p_grid, build_w_grid, build_x_grid
from wcanon.modeling.bases import (
    gram_matrix,
    ho_basis,
    ho_eigenstate,
    mub_chirp_state,
    mub_momentum_state,
    unbiasedness_check,
)
from wcanon.modeling.grids import (
    adapted_x_grid,
    norm,
    SampledSignal,
    u_coordinates,
    uniform_x_grid,
)
from wcanon.modeling.operators import (
    adjoint_report,
    build_momentum_alpha,
    build_momentum_symmetrized,
    commutator_defect,
    construction_spread,
    ORDERING_AVERAGE,
    similarity_check,
)
from wcanon.modeling.phase_space import (
    coherent_overlap,
    coherent_state,
    fock_inner,
    fock_to_signal,
    lowering_residual,
    random_fock_vector,
    uncertainty_product,
    wigner,
)
from wcanon.modeling.superpotential import evaluate, Superpotential, validate
from wcanon.modeling.wtransform import (
    eigenfunction_check,
    forward,
    forward_fast,
    inverse,
    windowed,
)
from wcanon.utils.errors import ConfigError
from wcanon.utils.misc import hermite_functions, operator_norm

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    bound: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict:
        return asdict(self)


def _upper(name: str, value: float, bound: float, detail: str = "") -> CheckResult:
    value = float(value)
    return CheckResult(name, value, float(bound), bool(value <= bound), detail)


def _lower(name: str, value: float, bound: float, detail: str = "") -> CheckResult:
    value = float(value)
    return CheckResult(name, value, float(bound), bool(value >= bound), detail)


def describe(W: Superpotential) -> str:
    """Human-readable W, e.g. ``x+x^3``."""
    terms = []
    for power, a in enumerate(W.coeffs, start=1):
        if a == 0:
            continue
        monomial = "x" if power == 1 else f"x^{power}"
        terms.append(monomial if a == 1 else f"{a:g}*{monomial}")
    return "+".join(terms)


def _superpotentials(coeff_lists) -> List[Superpotential]:
    return [validate(list(coeffs)) for coeffs in coeff_lists]


def _curved(cfg: DictConfig) -> List[Superpotential]:
    """Rig superpotentials other than W = x, for which dx and dW differ."""
    return [W for W in _superpotentials(cfg.verify.superpotentials) if not W.is_identity]


def _adapted(cfg: DictConfig, W: Superpotential):
    return adapted_x_grid(W, float(cfg.verify.u_max), int(cfg.verify.N))


def _relative_error(values: np.ndarray, reference: np.ndarray, weights: np.ndarray) -> float:
    misfit = np.sum(np.abs(values - reference) ** 2 * weights)
    return math.sqrt(float(misfit) / float(np.sum(np.abs(reference) ** 2 * weights)))


def check_commutator(cfg: DictConfig) -> List[CheckResult]:
    """[W, P_alpha] - i on a centered Gaussian converges at second order."""
    rig, tol = cfg.verify, cfg.tolerances
    results = []
    for W in _superpotentials(rig.superpotentials):
        for alpha in rig.alphas:
            defects = []
            for N in rig.refinement:
                grid = uniform_x_grid(rig.operator_grid.xmin, rig.operator_grid.xmax, N)
                f = SampledSignal(np.exp(-grid.nodes**2), grid)
                P = build_momentum_alpha(W, grid, float(alpha))
                defects.append(commutator_defect(W, P, f))
            ratios = np.asarray(defects[:-1]) / np.asarray(defects[1:])
            results.append(
                _upper(
                    f"commutator[{describe(W)},alpha={alpha:g}]",
                    np.max(np.abs(ratios - tol.commutator_ratio)),
                    tol.commutator_slack,
                    f"defects {np.round(defects, 12).tolist()}, "
                    f"ratios {np.round(ratios, 4).tolist()}",
                )
            )
    return results


def check_adjointness(cfg: DictConfig) -> List[CheckResult]:
    """alpha = 1/2 is dx-self-adjoint, alpha = 0 dW-self-adjoint, others neither."""
    rig, tol = cfg.verify, cfg.tolerances
    results = []
    for W in _curved(cfg):
        grid = build_x_grid(rig.operator_grid)
        operators = [
            (f"alpha={a:g}", float(a), build_momentum_alpha(W, grid, float(a)))
            for a in rig.alphas
        ]
        operators.append(("symmetrized", 0.5, build_momentum_symmetrized(W, grid)))
        for label, alpha, P in operators:
            report = adjoint_report(P, W, tol.adjoint)
            name = f"adjoint[{describe(W)},{label}]"
            detail = f"classification {report.classification}"
            # (measure, expected self-adjoint)
            if alpha == 0.5:
                expected = ((".dx", True), (".dW", False))
            elif alpha == 0.0:
                expected = ((".dx", False), (".dW", True))
            else:
                expected = ((".dx", False), (".dW", False))
            for suffix, self_adjoint in expected:
                value = report.relative_dx if suffix == ".dx" else report.relative_dW
                if self_adjoint:
                    results.append(_upper(name + suffix, value, tol.adjoint, detail))
                else:
                    results.append(_lower(name + suffix, value, tol.adjoint_floor, detail))
    return results


def check_similarity(cfg: DictConfig) -> List[CheckResult]:
    rig, tol = cfg.verify, cfg.tolerances
    results = []
    for W in _curved(cfg):
        grid = build_x_grid(rig.operator_grid)
        scale = operator_norm(build_momentum_alpha(W, grid, 0.0).interior)
        for alpha in rig.alphas:
            residual = similarity_check(W, grid, float(alpha)) / scale
            name = f"similarity[{describe(W)},alpha={alpha:g}]"
            results.append(_upper(name, residual, tol.similarity))
    return results


def check_alpha_independence(cfg: DictConfig) -> List[CheckResult]:
    """
    The literal ordering average (P_alpha + P_{1-alpha}) / 2 depends on alpha only through
    the O(h^2) discretization error: its spread over the rig alphas must shrink by
    ``alpha_spread_ratio`` per halving of h. The default half-density realization is
    alpha-independent to rounding.
    """
    rig, tol = cfg.verify, cfg.tolerances
    alphas = [float(a) for a in rig.alphas]
    results = []
    for W in _curved(cfg):
        spreads = []
        for N in rig.refinement:
            grid = uniform_x_grid(rig.operator_grid.xmin, rig.operator_grid.xmax, N)
            f = SampledSignal(np.exp(-grid.nodes**2), grid)
            spreads.append(construction_spread(W, grid, f, alphas, [ORDERING_AVERAGE]))
        ratios = np.asarray(spreads[:-1]) / np.asarray(spreads[1:])
        results.append(
            _upper(
                f"alpha_independence[{describe(W)},ordering_average]",
                np.max(np.abs(ratios - tol.alpha_spread_ratio)),
                tol.alpha_spread_slack,
                f"spreads {np.round(spreads, 12).tolist()}, ratios {np.round(ratios, 4).tolist()}",
            )
        )

        grid = build_x_grid(rig.operator_grid)
        blocks = [build_momentum_symmetrized(W, grid, a).interior for a in alphas]
        worst = 0.0
        for a, b in itertools.combinations(range(len(blocks)), 2):
            scale = operator_norm(blocks[a])
            worst = max(worst, operator_norm(blocks[a] - blocks[b]) / scale)
        results.append(
            _upper(f"alpha_independence[{describe(W)},half_density]", worst, tol.alpha_independence)
        )
    return results


def check_orthonormality(cfg: DictConfig) -> List[CheckResult]:
    rig, tol = cfg.verify, cfg.tolerances
    results = []
    for W in _superpotentials(rig.superpotentials):
        grid = _adapted(cfg, W)
        states = [SampledSignal(row, grid) for row in ho_basis(W, grid, int(rig.gram_j_max))]
        gram = gram_matrix(states, W, "dW")
        deviation = np.max(np.abs(gram - np.eye(len(states))))
        results.append(_upper(f"ho_gram[{describe(W)}]", deviation, tol.gram))
    return results


def check_eigenfunction(cfg: DictConfig) -> List[CheckResult]:
    """The W-oscillator states are eigenfunctions of the transform with eigenvalue (-i)^j."""
    rig, tol = cfg.verify, cfg.tolerances
    p_grid = build_p_grid(rig.p_axis)
    results = []
    for W in _superpotentials(rig.superpotentials):
        grid = _adapted(cfg, W)
        worst, worst_j = 0.0, 0
        for j in range(int(rig.eigen_j_max) + 1):
            check = eigenfunction_check(W, j, grid, p_grid)
            error = max(abs(check.lam - (-1j) ** j), check.residual)
            if error > worst:
                worst, worst_j = error, j
        results.append(
            _upper(f"eigenfunction[{describe(W)}]", worst, tol.eigen, f"worst at j={worst_j}")
        )
    return results


def check_invariance(cfg: DictConfig) -> List[CheckResult]:
    """Forward of psi_0(W(x)) is the Gaussian profile psi_0(p) for any W, including x^3."""
    rig, tol = cfg.verify, cfg.tolerances
    p_grid = build_p_grid(rig.p_axis)
    results = []
    for W in _superpotentials(rig.transform_only):
        grid = _adapted(cfg, W)
        f = SampledSignal(hermite_functions(u_coordinates(grid, W), 0)[0], grid)
        F = forward(W, f, p_grid, num_workers=int(cfg.num_workers))
        reference = hermite_functions(p_grid.nodes, 0)[0]
        error = _relative_error(F.values, reference, p_grid.weights)
        results.append(_upper(f"invariance[{describe(W)}]", error, tol.invariance))
    return results


def check_roundtrip(cfg: DictConfig) -> List[CheckResult]:
    rig, tol = cfg.verify, cfg.tolerances
    p_grid = build_p_grid(rig.p_axis)
    results = []
    for W in _superpotentials(rig.superpotentials):
        grid = _adapted(cfg, W)
        roundtrip, cross = 0.0, 0.0
        for j in range(int(rig.roundtrip_j_max) + 1):
            f = ho_eigenstate(W, grid, j)
            F = forward(W, f, p_grid, num_workers=int(cfg.num_workers))
            back = inverse(W, F, grid)
            error = back.with_values(back.values - f.values)
            roundtrip = max(roundtrip, norm(error, "dW", W) / norm(f, "dW", W))
            F_fast = forward_fast(W, f, p_grid)
            gap = np.max(np.abs(F_fast.values - F.values)) / np.max(np.abs(F.values))
            cross = max(cross, gap)
        results.append(_upper(f"roundtrip[{describe(W)}]", roundtrip, tol.roundtrip))
        results.append(_upper(f"fast_path[{describe(W)}]", cross, tol.fast_path))
    return results


def check_uncertainty(cfg: DictConfig) -> List[CheckResult]:
    rig, tol = cfg.verify, cfg.tolerances
    p_grid = build_p_grid(rig.p_axis)
    rng = np.random.default_rng(int(rig.seed))
    results = []
    for W in _superpotentials(rig.superpotentials):
        grid = _adapted(cfg, W)
        ground = uncertainty_product(W, ho_eigenstate(W, grid, 0), grid, p_grid)
        results.append(
            _upper(f"uncertainty_ground[{describe(W)}]", abs(ground - 0.5), tol.uncertainty)
        )
        smallest = math.inf
        draws = range(int(rig.random_draws))
        for _ in tqdm(draws, desc=f"uncertainty {describe(W)}", leave=False, disable=None):
            v = random_fock_vector(rng, int(rig.random_j_max))
            f = fock_to_signal(W, v, grid)
            smallest = min(smallest, uncertainty_product(W, f, grid, p_grid))
        results.append(
            _lower(f"uncertainty_random[{describe(W)}]", smallest, 0.5 - tol.uncertainty)
        )
    return results


def check_unbiasedness(cfg: DictConfig) -> List[CheckResult]:
    rig, tol = cfg.verify, cfg.tolerances
    results = []
    for W in _superpotentials(rig.superpotentials):
        grid = _adapted(cfg, W)
        modulus = 0.0
        for p in (-0.5, 0.0, 0.5):
            for state in (mub_momentum_state(W, grid, p), mub_chirp_state(W, grid, p)):
                modulus = max(modulus, np.max(np.abs(np.abs(state.values) * SQRT_2PI - 1.0)))
        results.append(_upper(f"mub_modulus[{describe(W)}]", modulus, tol.modulus))

        widths = rig.unbiasedness_half_width
        half_width = float(widths.identity if W.is_identity else widths.default)
        overlap_grid = uniform_x_grid(-half_width, half_width, int(rig.N))
        deviation = unbiasedness_check(W, overlap_grid)
        results.append(_upper(f"unbiasedness[{describe(W)}]", deviation, tol.unbiasedness))
    return results


def check_coherent(cfg: DictConfig) -> List[CheckResult]:
    rig, tol = cfg.verify, cfg.tolerances
    J_max = int(cfg.coherent.J_max)
    zs = [complex(re, im) for re, im in rig.coherent_z]
    states = [coherent_state(z, J_max) for z in zs]
    residual = max(lowering_residual(v, z) for v, z in zip(states, zs))
    overlap = max(
        abs(fock_inner(states[a], states[b]) - coherent_overlap(zs[a], zs[b]))
        for a in range(len(zs))
        for b in range(len(zs))
    )
    return [
        _upper("coherent_residual", residual, tol.coherent),
        _upper("coherent_overlap", overlap, tol.coherent),
    ]


def check_wigner(cfg: DictConfig) -> List[CheckResult]:
    rig, tol = cfg.verify, cfg.tolerances
    W = (_curved(cfg) or _superpotentials(rig.superpotentials))[0]
    grid = build_w_grid(W, rig.wigner)
    p_axis = build_p_grid(rig.wigner.p_axis)
    g = ho_eigenstate(W, grid, 0)
    wg = wigner(g, p_axis)

    u, p = grid.nodes, p_axis.nodes
    rows, cols = np.abs(u) <= 6.0, np.abs(p) <= 6.0
    analytic = np.exp(-u[rows, None] ** 2 - p[None, cols] ** 2) / math.pi
    error = np.max(np.abs(wg.values[np.ix_(rows, cols)] - analytic))

    density = np.abs(g.values) ** 2
    mass = np.sum(density * grid.weights)
    marginal = np.sum(np.abs(wg.marginal_u() - density) * grid.weights) / mass
    return [
        _upper("wigner_ground_state", error, tol.wigner),
        _upper("wigner_marginal", marginal, tol.wigner_marginal),
        _upper("wigner_mass", abs(wg.total_mass() - 1.0), tol.wigner_mass),
        _upper("wigner_imag_residue", wg.imag_residue, 1e-10),
    ]


def check_chirp(cfg: DictConfig) -> List[CheckResult]:
    """The spectrogram of exp(i c W(x)) peaks at p = c in every row."""
    rig = cfg.verify
    p_grid = build_p_grid(rig.p_axis)
    grid = build_x_grid(rig.chirp_grid)
    results = []
    for W in _curved(cfg):
        u = evaluate(W, grid.nodes)
        for c in rig.chirp_tones:
            f = SampledSignal(np.exp(1j * float(c) * u), grid)
            S = windowed(W, f, None, list(rig.chirp_centers), p_grid, int(cfg.num_workers))
            expected = p_grid.nodes[np.argmin(np.abs(p_grid.nodes - float(c)))]
            misses = int(np.count_nonzero(S.ridge != expected))
            results.append(
                _upper(
                    f"chirp_ridge[{describe(W)},c={c:g}]",
                    misses,
                    0,
                    f"ridge {np.round(S.ridge, 4).tolist()}, expected {expected:.4f}",
                )
            )
    return results


CHECKS: Dict[str, Callable[[DictConfig], List[CheckResult]]] = OrderedDict(
    commutator=check_commutator,
    adjointness=check_adjointness,
    similarity=check_similarity,
    alpha_independence=check_alpha_independence,
    orthonormality=check_orthonormality,
    eigenfunction=check_eigenfunction,
    invariance=check_invariance,
    roundtrip=check_roundtrip,
    uncertainty=check_uncertainty,
    unbiasedness=check_unbiasedness,
    coherent=check_coherent,
    wigner=check_wigner,
    chirp=check_chirp,
)


def run_acceptance(
    cfg: DictConfig, checks: Sequence[str] = None, quiet: bool = False
) -> List[CheckResult]:
    """
    Run the selected check families (all by default, or ``cfg.verify.checks``).

    Returns:
        the flat list of results in family order.
    """
    if checks is None:
        checks = cfg.verify.checks or list(CHECKS)
    unknown = [name for name in checks if name not in CHECKS]
    if unknown:
        raise ConfigError(
            f"unknown acceptance checks {unknown}, expected some of {list(CHECKS)}"
        )

    results: List[CheckResult] = []
    for name in tqdm(list(checks), desc="acceptance", disable=quiet):
        family = CHECKS[name](cfg)
        for result in family:
            level = logging.INFO if result.passed else logging.WARNING
            logger.log(
                level,
                f"{'PASS' if result.passed else 'FAIL'} {result.name}: "
                f"{result.value:.3e} (bound {result.bound:.1e})",
            )
        results.extend(family)
    failed = sum(not r.passed for r in results)
    logger.info(f"acceptance: {len(results) - failed}/{len(results)} checks passed")
    return results
