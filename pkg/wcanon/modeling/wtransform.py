# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.signal import fftconvolve

from wcanon.modeling.grids import (
    Grid,
    measure_weights,
    norm,
    P_DOMAIN,
    require_uniform,
    resample_with_report,
    SampledSignal,
    u_coordinates,
    uniform_p_grid,
    uniform_w_grid,
    x_coordinates,
)
from wcanon.modeling.superpotential import evaluate, Superpotential
from wcanon.utils.errors import CenterOutOfRange, ClippingExceeded, GridMismatch
from wcanon.utils.misc import hermite_functions, next_pow2

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)

# sign of the exponent of the forward kernel exp(-i p W(x)); the inverse uses the opposite
_FORWARD_SIGN = -1

CLIP_ENERGY_LIMIT = 1e-3
FAST_MAX_POINTS = 1 << 22
FAST_RESAMPLE_ORDER = 5
WINDOW_NORM_TOL = 1e-6
MAX_EIGEN_INDEX = 16


@dataclass(frozen=True, eq=False)
class Spectrum:
    values: np.ndarray
    p_grid: Grid

    def __post_init__(self):
        require_uniform(self.p_grid, P_DOMAIN)
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (len(self.p_grid),):
            raise GridMismatch(f"spectrum of shape {values.shape} on {len(self.p_grid)} bins")
        if not np.all(np.isfinite(values)):
            raise ValueError("spectrum values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class Spectrogram:
    magnitudes: np.ndarray
    centers: np.ndarray
    p_axis: Grid

    def __post_init__(self):
        assert self.magnitudes.shape == (len(self.centers), len(self.p_axis))
        assert np.all(self.magnitudes >= 0), "spectrogram magnitudes must be non-negative"

    @property
    def ridge(self) -> np.ndarray:
        """p-value of the strongest bin in every row."""
        return self.p_axis.nodes[np.argmax(self.magnitudes, axis=1)]


@dataclass(frozen=True)
class EigenCheck:
    lam: complex
    residual: float


def nyquist_p_grid(grid: Grid, W: Superpotential, M: Optional[int] = None) -> Grid:
    """Uniform p-axis spanning the Nyquist range pi / du of the grid's mean u-spacing."""
    u = u_coordinates(grid, W)
    du = (u[-1] - u[0]) / (u.size - 1)
    p_max = math.pi / du
    return uniform_p_grid(-p_max, p_max, M or len(grid))


def _kernel(p: np.ndarray, u: np.ndarray, sign: int) -> np.ndarray:
    return np.exp(sign * 1j * np.outer(p, u))


def _chunks(n: int, chunk_size: int):
    return [slice(start, min(start + chunk_size, n)) for start in range(0, n, chunk_size)]


def forward(
    W: Superpotential,
    f: SampledSignal,
    p_grid: Grid,
    chunk_size: int = 256,
    num_workers: int = 0,
) -> Spectrum:
    """
    Direct quadrature of the W-Fourier transform

        F(p_a) = 1/sqrt(2 pi) sum_i w_i W'(x_i) exp(-i p_a W(x_i)) f_i.

    Output bins are computed in chunks of ``chunk_size`` rows, in a thread pool when
    ``num_workers > 1``.
    """
    require_uniform(p_grid, P_DOMAIN)
    u = u_coordinates(f.grid, W)
    weighted = f.values * measure_weights(f.grid, "dW", W)
    p = p_grid.nodes
    sign = _FORWARD_SIGN

    def run(rows: slice) -> np.ndarray:
        return _kernel(p[rows], u, sign) @ weighted

    blocks = _chunks(p.size, chunk_size)
    if num_workers > 1:
        with ThreadPoolExecutor(max_workers=num_workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(rows) for rows in blocks]
    return Spectrum(np.concatenate(parts) / SQRT_2PI, p_grid)


def forward_fast(
    W: Superpotential,
    f: SampledSignal,
    p_grid: Grid,
    u_range: Optional[Tuple[float, float]] = None,
    order: int = FAST_RESAMPLE_ORDER,
) -> Spectrum:
    """
    W-Fourier transform through a uniform u-grid and a chirp-z transform.

    The signal is resampled as g(u) = f(W^{-1}(u)) onto a power-of-two uniform u-grid
    covering ``u_range`` (the source range by default), integrated with trapezoid
    weights and evaluated on the uniform p-axis by a chirp-z (Bluestein) convolution
    through ``scipy.signal.fftconvolve``. For W = x on a uniform grid no resampling is
    done. A u-grid longer than ``FAST_MAX_POINTS`` is capped with a warning.
    """
    require_uniform(p_grid, P_DOMAIN)
    p = p_grid.nodes
    dp = p_grid.spacing
    sign = _FORWARD_SIGN

    if W.is_identity and f.grid.rep != P_DOMAIN and f.grid.is_uniform and u_range is None:
        u0, du = float(f.grid.nodes[0]), f.grid.spacing
        samples = f.values * f.grid.weights
    else:
        u_src = u_coordinates(f.grid, W)
        lo, hi = u_range if u_range is not None else (float(u_src[0]), float(u_src[-1]))
        p_max = float(np.max(np.abs(p)))
        step = float(np.median(np.diff(u_src)))
        if p_max > 0:
            step = min(step, math.pi / (4.0 * p_max))
        n_u = next_pow2(int(math.ceil((hi - lo) / step)) + 1)
        if n_u > FAST_MAX_POINTS:
            logger.warning(
                f"fast path needs {n_u} u-samples to resolve |p| <= {p_max:.4g}, "
                f"capping at {FAST_MAX_POINTS}; the transform is under-resolved"
            )
            n_u = FAST_MAX_POINTS
        target = uniform_w_grid(W, lo, hi, n_u, map_to_x=False)
        g, report = resample_with_report(f, target, W, order)
        if report.lost_energy_fraction > CLIP_ENERGY_LIMIT:
            raise ClippingExceeded(
                f"resampling onto u in [{lo:.4g}, {hi:.4g}] lost "
                f"{report.lost_energy_fraction:.3e} of the signal energy"
            )
        u0, du = lo, target.spacing
        samples = g.values * target.weights

    values = _chirp_z(samples, u0, du, float(p[0]), dp, p.size, sign)
    return Spectrum(values / SQRT_2PI, p_grid)


def _chirp_z(
    samples: np.ndarray, u0: float, du: float, p0: float, dp: float, M: int, sign: int
) -> np.ndarray:
    """
    sum_k samples_k exp(sign i p_a u_k) for u_k = u0 + k du, p_a = p0 + a dp.

    Indices are centred on both axes before splitting p u into chirps, so every chirp
    phase stays below theta ((N + M) / 2)^2 / 2 and is evaluated from a real argument.
    """
    N = samples.size
    j = np.arange(N) - (N - 1) / 2.0
    m = np.arange(M) - (M - 1) / 2.0
    u_c = u0 + du * (N - 1) / 2.0
    p_c = p0 + dp * (M - 1) / 2.0
    theta = sign * dp * du

    # p_a u_k = p_c u_c + p_c j du + u_c m dp + (m^2 + j^2 - (m - j)^2) dp du / 2
    y = samples * np.exp(1j * (sign * p_c * du * j + theta * j**2 / 2.0))
    lag = np.arange(-(N - 1), M) + (N - M) / 2.0
    h = np.exp(-1j * theta * lag**2 / 2.0)
    conv = fftconvolve(y, h)[N - 1 : N - 1 + M]
    return conv * np.exp(1j * (sign * (p_c * u_c + u_c * dp * m) + theta * m**2 / 2.0))


def inverse(
    W: Superpotential, F: Spectrum, x_grid: Grid, chunk_size: int = 256
) -> SampledSignal:
    """
    f(x_i) = 1/sqrt(2 pi) sum_a dp_a exp(+i p_a W(x_i)) F(p_a), trapezoid weights in p.
    """
    u = u_coordinates(x_grid, W)
    weighted = F.values * F.p_grid.weights
    p = F.p_grid.nodes
    sign = -_FORWARD_SIGN
    parts = [_kernel(u[rows], p, sign) @ weighted for rows in _chunks(u.size, chunk_size)]
    return SampledSignal(np.concatenate(parts) / SQRT_2PI, x_grid)


def parseval_ratio(W: Superpotential, f: SampledSignal, F: Spectrum) -> float:
    """||F||^2 under dp over ||f||^2 under dW."""
    energy = norm(f, "dW", W) ** 2
    spectral = float(np.sum(np.abs(F.values) ** 2 * F.p_grid.weights))
    return spectral / energy if energy > 0 else float("nan")


def normalize_window(window: SampledSignal, W: Superpotential) -> SampledSignal:
    """Rescale ``window`` to unit dW-norm, warning when that changes it."""
    size = norm(window, "dW", W)
    if size == 0:
        raise ValueError("window is identically zero")
    if abs(size - 1.0) > WINDOW_NORM_TOL:
        logger.warning(f"window has dW-norm {size:.6g}, renormalizing to 1")
        return window.with_values(window.values / size)
    return window


def _window_profile(W: Superpotential, window: Optional[SampledSignal]):
    """
    Window as a function of the u-offset from its center. The default is the W-oscillator
    ground state; a sampled window is centered where W(x) = 0.
    """
    if window is None:
        return lambda du: hermite_functions(du, 0)[0]
    window = normalize_window(window, W)
    u_w = u_coordinates(window.grid, W)
    real = make_interp_spline(u_w, window.values.real, k=3)
    imag = make_interp_spline(u_w, window.values.imag, k=3)

    def profile(du: np.ndarray) -> np.ndarray:
        inside = (du >= u_w[0]) & (du <= u_w[-1])
        out = np.zeros(du.shape, dtype=np.complex128)
        out[inside] = real(du[inside]) + 1j * imag(du[inside])
        return out

    return profile


def windowed(
    W: Superpotential,
    f: SampledSignal,
    window: Optional[SampledSignal],
    centers: Sequence[float],
    p_grid: Grid,
    num_workers: int = 0,
) -> Spectrogram:
    """
    Windowed W-Fourier transform. Row c is |forward(f * h(W(x) - W(c)))|, i.e. the
    window is translated in u and mapped back to x, which keeps its dW-norm.

    Args:
        window: sampled window, or None for the W-oscillator ground state.
        centers: window centers in x; each must lie inside the signal's grid.
    """
    require_uniform(p_grid, P_DOMAIN)
    centers = np.asarray(centers, dtype=np.float64)
    x = x_coordinates(f.grid, W)
    outside = (centers < x[0]) | (centers > x[-1])
    if np.any(outside):
        raise CenterOutOfRange(
            f"window centers {centers[outside].tolist()} lie outside [{x[0]:.6g}, {x[-1]:.6g}]"
        )

    profile = _window_profile(W, window)
    u = u_coordinates(f.grid, W)
    weighted = f.values * measure_weights(f.grid, "dW", W)
    kernel_t = _kernel(u, p_grid.nodes, _FORWARD_SIGN) / SQRT_2PI
    u_centers = evaluate(W, centers)

    def row(u_c: float) -> np.ndarray:
        return np.abs((weighted * profile(u - u_c)) @ kernel_t)

    if num_workers > 1:
        with ThreadPoolExecutor(max_workers=num_workers) as pool:
            rows = list(pool.map(row, np.atleast_1d(u_centers)))
    else:
        rows = [row(u_c) for u_c in np.atleast_1d(u_centers)]
    return Spectrogram(np.stack(rows), centers, p_grid)


def eigenfunction_check(
    W: Superpotential, j: int, grid: Grid, p_grid: Grid, fast: bool = False
) -> EigenCheck:
    """
    Transform the j-th W-oscillator state and fit F ~ lam * psi_j(p). The fitted
    eigenvalue should be (-i)^j; the residual is the relative L2 misfit under dp.
    """
    if not 0 <= j <= MAX_EIGEN_INDEX:
        raise ValueError(f"eigenfunction check supports 0 <= j <= {MAX_EIGEN_INDEX}, got {j}")
    state = SampledSignal(hermite_functions(u_coordinates(grid, W), j)[j], grid)
    F = (forward_fast if fast else forward)(W, state, p_grid)
    reference = hermite_functions(p_grid.nodes, j)[j]
    weights = p_grid.weights
    lam = complex(np.sum(reference * F.values * weights) / np.sum(reference**2 * weights))
    misfit = F.values - lam * reference
    energy = float(np.sum(np.abs(F.values) ** 2 * weights))
    residual = math.sqrt(float(np.sum(np.abs(misfit) ** 2 * weights)) / energy)
    return EigenCheck(lam, residual)


def benchmark(
    W: Superpotential, f: SampledSignal, p_grid: Grid, repeats: int = 3
) -> Dict[str, float]:
    """Best-of-``repeats`` wall times of the direct and fast paths."""
    timings = {}
    for name, fn in (("direct", forward), ("fast", forward_fast)):
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            fn(W, f, p_grid)
            best = min(best, time.perf_counter() - start)
        timings[name] = best
    timings["speedup"] = timings["direct"] / timings["fast"]
    logger.info(
        f"forward {timings['direct']:.3f}s, forward_fast {timings['fast']:.3f}s, "
        f"speedup {timings['speedup']:.1f}x"
    )
    return timings
