# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

TAPER_RAMP_FRACTION = 0.2


def next_pow2(n: int) -> int:
    """Smallest power of two that is >= n (and >= 1)."""
    n = int(n)
    if n <= 1:
        return 1
    return 1 << (n - 1).bit_length()


def is_pow2(n: int) -> bool:
    n = int(n)
    return n > 0 and (n & (n - 1)) == 0


def trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    """
    Composite trapezoid weights for (possibly non-uniform) strictly increasing nodes.
    """
    nodes = np.asarray(nodes, dtype=np.float64)
    steps = np.diff(nodes)
    weights = np.zeros_like(nodes)
    weights[:-1] += 0.5 * steps
    weights[1:] += 0.5 * steps
    return weights


def operator_norm(
    matrix: np.ndarray, tol: float = 1e-6, max_iter: int = 500, seed: int = 0
) -> float:
    """
    Largest singular value of a dense matrix by power iteration on G^H G.

    Inputs:
    - matrix: array of shape (m, n), real or complex.
    - tol: stop when the relative change of the estimate falls below this value.
    - max_iter: hard cap on the number of iterations.
    - seed: seed of the (deterministic) start vector.

    Outputs:
    - the estimate of ||G||_2; exactly 0.0 for an all-zero matrix.
    """
    matrix = np.asarray(matrix)
    if matrix.size == 0 or not np.any(matrix):
        return 0.0
    rng = np.random.default_rng(seed)
    n = matrix.shape[1]
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for it in range(max_iter):
        gv = matrix @ v
        sigma_new = float(np.linalg.norm(gv))
        u = matrix.conj().T @ gv
        u_norm = np.linalg.norm(u)
        if u_norm == 0.0:
            return sigma_new
        v = u / u_norm
        if abs(sigma_new - sigma) <= tol * sigma_new:
            logger.debug(f"power iteration converged after {it + 1} steps")
            return sigma_new
        sigma = sigma_new
    logger.debug(f"power iteration hit max_iter={max_iter}, estimate {sigma:.6e}")
    return sigma


def raised_cosine_taper(
    u: np.ndarray, u_min: float, u_max: float, fraction: float = TAPER_RAMP_FRACTION
) -> np.ndarray:
    """
    Raised-cosine (Tukey) taper on [u_min, u_max]: each ramp covers ``fraction`` of the
    interval, the middle is flat at 1 and the taper vanishes outside the interval.
    """
    u = np.asarray(u, dtype=np.float64)
    ramp = fraction * (u_max - u_min)
    taper = np.zeros_like(u)
    inside = (u >= u_min) & (u <= u_max)
    taper[inside] = 1.0
    left = inside & (u < u_min + ramp)
    right = inside & (u > u_max - ramp)
    taper[left] = 0.5 * (1.0 - np.cos(np.pi * (u[left] - u_min) / ramp))
    taper[right] = 0.5 * (1.0 - np.cos(np.pi * (u_max - u[right]) / ramp))
    return taper


def taper_transform_ratio(omega, flat: float, ramp: float) -> np.ndarray:
    """
    Normalized continuous Fourier transform T(omega) / T(0) of a raised-cosine taper
    with flat length ``flat`` and ramp length ``ramp`` on each side.
    """
    omega = np.abs(np.asarray(omega, dtype=np.float64))
    length = flat + ramp
    sinc = np.sinc(omega * length / (2.0 * np.pi))
    t = omega * ramp / np.pi
    denom = 1.0 - t**2
    near_pole = np.abs(denom) < 1e-8
    bump = np.where(
        near_pole, np.pi / 4.0, np.cos(0.5 * np.pi * t) / np.where(near_pole, 1.0, denom)
    )
    return sinc * bump


def taper_sidelobe_bound(delta: float, flat: float, ramp: float) -> float:
    """
    max_{|w| >= |delta|} |T(w) / T(0)| for the raised-cosine taper.
    The envelope decays like |w|^-3, so a dense scan over a few dozen lobes suffices.
    """
    delta = abs(float(delta))
    length = flat + ramp
    lobe = 2.0 * np.pi / length
    span = 40.0 * lobe + (40.0 * np.pi / ramp if ramp > 0 else 0.0)
    omega = delta + np.linspace(0.0, span, int(math.ceil(64 * span / lobe)) + 1)
    return float(np.max(np.abs(taper_transform_ratio(omega, flat, ramp))))


def hermite_functions(u: np.ndarray, j_max: int) -> np.ndarray:
    """
    Normalized Hermite functions psi_0 .. psi_{j_max} evaluated at u.

    Uses the orthonormal three-term recurrence, which equals
    (sqrt(pi) 2^j j!)^{-1/2} H_j(u) exp(-u^2/2) without overflowing for large j.

    Outputs:
    - array of shape (j_max + 1, len(u)).
    """
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros((j_max + 1,) + u.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * u**2)
    if j_max >= 1:
        out[1] = np.sqrt(2.0) * u * out[0]
    for j in range(1, j_max):
        out[j + 1] = (
            np.sqrt(2.0 / (j + 1)) * u * out[j] - np.sqrt(j / (j + 1.0)) * out[j - 1]
        )
    return out
