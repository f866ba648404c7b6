# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial

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

logger = logging.getLogger(__name__)

STRICTLY_MONOTONE = "strictly_monotone"
MONOTONE_WITH_CRITICAL_POINTS = "monotone_with_critical_points"

CLASSIFICATION_TOL = 1e-12
SINGULARITY_FLOOR = 1e-10

_INVERT_MAX_ITER = 400
_BRACKET_MAX_DOUBLINGS = 1100
_NEWTON_SAFEGUARD = 1e-12
_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class MonotonicityClass:
    tag: str
    critical_points: Tuple[float, ...] = ()

    @property
    def strictly_monotone(self) -> bool:
        return self.tag == STRICTLY_MONOTONE


@dataclass(frozen=True)
class Superpotential:
    """
    Admissible polynomial superpotential W(x) = sum_j a_j x^j, j = 1 .. 2J+1.

    ``coeffs[0]`` is a_1. Instances are produced by :func:`validate` and are immutable,
    so they can be shared between threads.
    """

    coeffs: Tuple[float, ...]
    monotonicity: MonotonicityClass

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def strictly_monotone(self) -> bool:
        return self.monotonicity.strictly_monotone

    @property
    def critical_points(self) -> Tuple[float, ...]:
        return self.monotonicity.critical_points

    @property
    def is_identity(self) -> bool:
        return self.coeffs == (1.0,)

    @property
    def is_odd(self) -> bool:
        # a_j with even j sit at odd positions of coeffs
        return all(c == 0.0 for c in self.coeffs[1::2])

    @cached_property
    def poly(self) -> Polynomial:
        return Polynomial((0.0,) + self.coeffs)

    @cached_property
    def dpoly(self) -> Polynomial:
        return self.poly.deriv()

    @cached_property
    def d2poly(self) -> Polynomial:
        return self.poly.deriv(2)

    @cached_property
    def antiderivative(self) -> Polynomial:
        return self.poly.integ(lbnd=0.0)

    def __call__(self, x):
        return evaluate(self, x)

    def to_descriptor(self) -> Dict[str, Any]:
        return {"coeffs": list(self.coeffs)}


def _as_output(values):
    if np.ndim(values) == 0:
        return float(values)
    return values


def _refined_minima(dpoly: Polynomial) -> np.ndarray:
    """
    Real local minimum candidates of W' on the real line: roots of W'' (and of W'
    itself, for even-multiplicity zeros) polished by Newton on W''.
    """
    d2 = dpoly.deriv()
    d3 = d2.deriv()
    candidates = []
    for poly in (dpoly, d2):
        if poly.degree() < 1:
            continue
        roots = poly.roots()
        keep = np.abs(roots.imag) <= 1e-4 * (1.0 + np.abs(roots.real))
        candidates.extend(roots.real[keep].tolist())
    if not candidates:
        return np.zeros(0)
    x = np.asarray(candidates, dtype=np.float64)
    if d2.degree() >= 1:
        for _ in range(200):
            slope = d3(x)
            step = np.where(slope != 0.0, d2(x) / np.where(slope != 0.0, slope, 1.0), 0.0)
            x = x - step
            if np.all(np.abs(step) <= 2 * _EPS * np.maximum(np.abs(x), 1e-300)):
                break
    return np.sort(x)


def _merge_close(points: np.ndarray, rtol: float = 1e-6) -> Tuple[float, ...]:
    merged = []
    for p in points:
        if merged and abs(p - merged[-1]) <= rtol * (1.0 + abs(p)):
            continue
        merged.append(float(p))
    return tuple(merged)


def validate(coeffs: Sequence[float]) -> Superpotential:
    """
    Check the admissibility rules for W and classify its monotonicity.

    Args:
        coeffs: a_1, a_2, ... (index 1 first).

    Returns:
        Superpotential: the validated value, with trailing zero coefficients dropped.
    """
    values = np.asarray(list(coeffs), dtype=np.float64)
    if values.size == 0:
        raise RejectEmptyCoefficients("coefficient list is empty")
    if not np.all(np.isfinite(values)):
        raise ValidationRejection(f"coefficients must be finite, got {values.tolist()}")
    if np.any(values < 0):
        idx = int(np.flatnonzero(values < 0)[0]) + 1
        raise RejectNegativeCoefficient(f"a_{idx} = {values[idx - 1]} is negative")
    nonzero = np.flatnonzero(values)
    if nonzero.size == 0:
        raise RejectEmptyCoefficients("all coefficients are zero")

    # powers are 1-based
    highest = int(nonzero[-1]) + 1
    lowest = int(nonzero[0]) + 1
    if highest % 2 == 0:
        raise RejectEvenLeadingPower(f"highest power x^{highest} is even")
    if lowest % 2 == 0:
        raise RejectEvenLowestPower(f"lowest power x^{lowest} is even")
    for power in range(2, highest, 2):
        if values[power - 1] > values[power - 2]:
            raise RejectEvenDominance(
                f"a_{power} = {values[power - 1]} exceeds a_{power - 1} = {values[power - 2]}"
            )

    trimmed = tuple(float(c) for c in values[:highest])
    dpoly = Polynomial((0.0,) + trimmed).deriv()

    critical = []
    for x in _refined_minima(dpoly):
        slope = float(dpoly(x))
        terms = np.abs(dpoly.coef) * np.abs(x) ** np.arange(dpoly.coef.size)
        scale = max(1.0, float(np.sum(terms)))
        if slope < -CLASSIFICATION_TOL * scale:
            raise RejectNonMonotone(f"W'({x:.6g}) = {slope:.3e} < 0")
        if abs(slope) <= CLASSIFICATION_TOL:
            critical.append(x)
    critical_points = _merge_close(np.sort(np.asarray(critical)))
    tag = MONOTONE_WITH_CRITICAL_POINTS if critical_points else STRICTLY_MONOTONE
    return Superpotential(trimmed, MonotonicityClass(tag, critical_points))


def from_descriptor(descriptor: Dict[str, Any]) -> Superpotential:
    if "coeffs" not in descriptor:
        raise ValueError(f"superpotential descriptor needs a 'coeffs' entry: {descriptor}")
    return validate(descriptor["coeffs"])


def evaluate(W: Superpotential, x):
    return _as_output(W.poly(np.asarray(x, dtype=np.float64)))


def derivative(W: Superpotential, x):
    return _as_output(W.dpoly(np.asarray(x, dtype=np.float64)))


def second_derivative(W: Superpotential, x):
    return _as_output(W.d2poly(np.asarray(x, dtype=np.float64)))


def _bracket(W: Superpotential, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    lo = -(1.0 + np.abs(w))
    hi = 1.0 + np.abs(w)
    for _ in range(_BRACKET_MAX_DOUBLINGS):
        need_lo = W.poly(lo) > w
        need_hi = W.poly(hi) < w
        if not (need_lo.any() or need_hi.any()):
            return lo, hi
        lo = np.where(need_lo, 2.0 * lo, lo)
        hi = np.where(need_hi, 2.0 * hi, hi)
    raise BracketFailure("could not bracket W(x) = w")


def invert(W: Superpotential, w):
    """
    Solve W(x) = w by bisection on a sign-change bracket with safeguarded Newton steps.
    Iterates until the bracket or the Newton step reaches machine precision.
    """
    w_arr = np.asarray(w, dtype=np.float64)
    if not np.all(np.isfinite(w_arr)):
        raise BracketFailure(f"cannot invert W at non-finite value(s) {w}")
    target = w_arr.ravel()
    if W.is_identity:
        return _as_output(target.reshape(w_arr.shape).copy())

    with np.errstate(over="ignore", invalid="ignore"):
        lo, hi = _bracket(W, target)
    x = 0.5 * (lo + hi)
    done = np.zeros(target.shape, dtype=bool)
    for it in range(_INVERT_MAX_ITER):
        f = W.poly(x) - target
        done |= f == 0.0
        lo = np.where(f < 0.0, x, lo)
        hi = np.where(f > 0.0, x, hi)
        slope = W.dpoly(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_newton = x - f / slope
        use_newton = (slope > _NEWTON_SAFEGUARD) & (x_newton >= lo) & (x_newton <= hi)
        x_new = np.where(use_newton, x_newton, 0.5 * (lo + hi))
        tiny = 2.0 * _EPS * np.abs(x_new)
        converged = (np.abs(x_new - x) <= tiny) | (hi - lo <= tiny)
        x = np.where(done, x, x_new)
        done |= converged
        if done.all():
            logger.debug(f"invert converged after {it + 1} iterations")
            break
    return _as_output(x.reshape(w_arr.shape))


def susy_ground_state(W: Superpotential, x):
    """exp(-int_0^x W), equal to 1 at the origin."""
    return _as_output(np.exp(-W.antiderivative(np.asarray(x, dtype=np.float64))))


def susy_potential(W: Superpotential, x):
    x_arr = np.asarray(x, dtype=np.float64)
    return _as_output(W.poly(x_arr) ** 2 - W.dpoly(x_arr))


def classical_momentum(W: Superpotential, x, p_x):
    """
    Classical p_W = p_x / W'(x); every ordering of the Jacobian factor agrees classically.
    """
    x_arr = np.asarray(x, dtype=np.float64)
    slope = W.dpoly(x_arr)
    if np.any(slope < SINGULARITY_FLOOR):
        raise SingularJacobian("W' vanishes at a requested point")
    return _as_output(np.asarray(p_x, dtype=np.float64) / slope)


def k_axis(W: Superpotential, p):
    """Optional annotation of a p_W axis by k = W^{-1}(p_W)."""
    return invert(W, p)
