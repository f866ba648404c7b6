# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

"""
Command-line front end, installed as the ``wcanon`` console script.

Exit codes: 0 success, 1 usage, configuration or I/O error, 2 superpotential rejected,
3 verification failed, 4 numeric guard tripped.
"""

import argparse
import json
import logging
import os
import sys
from typing import List, Optional, Sequence

import numpy as np
from hydra.errors import HydraException
from omegaconf import DictConfig, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from wcanon.build_wcanon import (
    build_p_grid,
    build_superpotential,
    build_w_grid,
    build_x_grid,
    load_config,
)
from wcanon.eval.acceptance import run_acceptance
from wcanon.modeling.bases import (
    alpha_eigenstate,
    gram_matrix,
    ho_eigenstate,
    mub_chirp_state,
    mub_momentum_state,
)
from wcanon.modeling.grids import (
    resample,
    u_coordinates,
    uniform_w_grid,
    W_DOMAIN,
)
from wcanon.modeling.phase_space import (
    coherent_state,
    fock_to_signal,
    lowering_residual,
    wigner,
)
from wcanon.modeling.wtransform import (
    forward,
    forward_fast,
    inverse,
    nyquist_p_grid,
    parseval_ratio,
    Spectrogram,
    windowed,
)
from wcanon.utils.errors import (
    ConfigError,
    EXIT_OK,
    EXIT_REJECTED,
    EXIT_USAGE,
    EXIT_VERIFY_FAILED,
    exit_code_for,
    ValidationRejection,
    WcanonError,
)
from wcanon.utils.io import (
    read_fock_json,
    read_signal_csv,
    read_spectrum_csv,
    write_fock_json,
    write_json,
    write_run_meta,
    write_signal_csv,
    write_spectrogram_csv,
    write_spectrum_csv,
    write_wigner_csv,
)
from wcanon.utils.logger import setup_logger
from wcanon.utils.misc import is_pow2

logger = logging.getLogger(__name__)

DIRECTIONS = ("forward", "inverse")
PATHS = ("direct", "fast")
FAMILIES = ("mub", "ho", "alpha")
DEFAULT_WINDOW = "ho0"


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 is reserved for rejected superpotentials."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _output_path(cfg: DictConfig, args, default_name: str) -> str:
    return args.out if getattr(args, "out", None) else os.path.join(cfg.output_dir, default_name)


def _require_pow2(n: int, what: str):
    if not is_pow2(n):
        raise ConfigError(f"the fast path needs a power-of-two {what}, got {n}")


def _require_choice(value: str, choices: Sequence[str], what: str):
    if value not in choices:
        raise ConfigError(f"unknown {what} {value!r}, expected one of {list(choices)}")


def cmd_validate(args, cfg: DictConfig) -> int:
    node = cfg.superpotential
    if args.coeffs is not None:
        node = OmegaConf.merge(node, {"coeffs": args.coeffs})
    coeffs = OmegaConf.to_container(node.coeffs)
    try:
        W = build_superpotential(node)
    except ValidationRejection as e:
        report = {"valid": False, "coeffs": coeffs, "reason": e.reason, "message": str(e)}
        code = EXIT_REJECTED
    else:
        report = {
            "valid": True,
            "coeffs": list(W.coeffs),
            "monotonicity": W.monotonicity.tag,
            "critical_points": list(W.critical_points),
        }
        code = EXIT_OK
    write_json(_output_path(cfg, args, "validate.json"), report)
    print(json.dumps(report, sort_keys=True))
    return code


def cmd_verify(args, cfg: DictConfig) -> int:
    results = run_acceptance(cfg, quiet=args.quiet)
    passed = all(r.passed for r in results)
    report = {"passed": passed, "checks": [r.to_dict() for r in results]}
    write_json(_output_path(cfg, args, "verify.json"), report)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name} value={r.value:.3e} bound={r.bound:.1e}")
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_transform(args, cfg: DictConfig) -> int:
    direction = args.direction or cfg.transform.direction
    path = args.path or cfg.transform.path
    _require_choice(direction, DIRECTIONS, "direction")
    _require_choice(path, PATHS, "path")
    W = build_superpotential(cfg.superpotential)

    if direction == "forward":
        f = read_signal_csv(args.signal, W)
        if f is None:
            raise ConfigError(f"{args.signal} holds no samples")
        if cfg.p_axis.get("nyquist", False):
            p_grid = nyquist_p_grid(f.grid, W, int(cfg.p_axis.M))
        else:
            p_grid = build_p_grid(cfg.p_axis)
        if path == "fast":
            _require_pow2(len(f.grid), "signal length N")
            _require_pow2(len(p_grid), "p-axis length M")
            F = forward_fast(W, f, p_grid)
        else:
            F = forward(W, f, p_grid, num_workers=int(cfg.num_workers))
        write_spectrum_csv(_output_path(cfg, args, "spectrum.csv"), F)
    else:
        if path == "fast":
            raise ConfigError("the fast path only exists for the forward transform")
        F = read_spectrum_csv(args.signal)
        f = inverse(W, F, build_x_grid(cfg.grid))
        write_signal_csv(_output_path(cfg, args, "signal.csv"), f)
    print(f"parseval_ratio {parseval_ratio(W, f, F):.12g}")
    return EXIT_OK


def cmd_spectrogram(args, cfg: DictConfig) -> int:
    W = build_superpotential(cfg.superpotential)
    p_grid = build_p_grid(cfg.p_axis)
    centers = np.asarray(
        args.centers if args.centers else list(cfg.spectrogram.centers), dtype=np.float64
    )
    window_arg = args.window or cfg.spectrogram.window

    f = read_signal_csv(args.signal, W)
    if f is None:
        logger.warning(f"{args.signal} holds no samples, writing an all-zero spectrogram")
        S = Spectrogram(np.zeros((centers.size, len(p_grid))), centers, p_grid)
    else:
        window = None
        if window_arg != DEFAULT_WINDOW:
            window = read_signal_csv(window_arg, W)
            if window is None:
                raise ConfigError(f"window file {window_arg} holds no samples")
        S = windowed(W, f, window, centers, p_grid, num_workers=int(cfg.num_workers))
    write_spectrogram_csv(_output_path(cfg, args, "spectrogram.csv"), S)
    return EXIT_OK


def cmd_basis(args, cfg: DictConfig) -> int:
    _require_choice(args.family, FAMILIES, "basis family")
    W = build_superpotential(cfg.superpotential)
    grid = build_x_grid(cfg.grid)
    out_dir = args.out or cfg.output_dir

    if args.family == "ho":
        indices = args.indices or ["0", "1", "2", "3"]
        states = [ho_eigenstate(W, grid, int(j)) for j in indices]
        names = [f"ho_j{int(j)}.csv" for j in indices]
    elif args.family == "mub":
        builder = mub_chirp_state if args.chirp else mub_momentum_state
        prefix = "mub_chirp" if args.chirp else "mub"
        ps = [float(p) for p in (args.indices or ["0"])]
        states = [builder(W, grid, p) for p in ps]
        names = [f"{prefix}_p{p:g}.csv" for p in ps]
    else:
        ps = [float(p) for p in (args.indices or ["0"])]
        states = [alpha_eigenstate(W, grid, p, args.alpha) for p in ps]
        names = [f"alpha{args.alpha:g}_p{p:g}.csv" for p in ps]

    files = []
    for state, name in zip(states, names):
        path = os.path.join(out_dir, name)
        write_signal_csv(path, state)
        files.append(path)
    report = {"family": args.family, "files": files}
    if args.family == "ho":
        gram = gram_matrix(states, W, "dW")
        report["gram_max_deviation"] = float(np.max(np.abs(gram - np.eye(len(states)))))
    write_json(os.path.join(out_dir, "basis.json"), report)
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


def cmd_coherent(args, cfg: DictConfig) -> int:
    z = complex(args.z[0], args.z[1])
    J_max = args.j_max if args.j_max is not None else int(cfg.coherent.J_max)
    v = coherent_state(z, J_max)
    W = build_superpotential(cfg.superpotential)
    signal = fock_to_signal(W, v, build_x_grid(cfg.grid))
    out_dir = args.out or cfg.output_dir
    write_fock_json(os.path.join(out_dir, "coherent.json"), v)
    write_signal_csv(os.path.join(out_dir, "coherent_signal.csv"), signal)
    print(f"residual {lowering_residual(v, z):.3e} tail_weight {v.tail_weight:.3e}")
    return EXIT_OK


def cmd_wigner(args, cfg: DictConfig) -> int:
    W = build_superpotential(cfg.superpotential)
    p_axis = build_p_grid(cfg.wigner.p_axis)
    if args.fock:
        g = fock_to_signal(W, read_fock_json(args.fock), build_w_grid(W, cfg.wigner))
    elif args.signal:
        f = read_signal_csv(args.signal, W)
        if f is None:
            raise ConfigError(f"{args.signal} holds no samples")
        if f.grid.rep == W_DOMAIN and f.grid.is_uniform:
            g = f
        else:
            u = u_coordinates(f.grid, W)
            target = uniform_w_grid(W, float(u[0]), float(u[-1]), len(f.grid))
            g = resample(f, target, W, order=5)
    else:
        raise ConfigError("wigner needs a signal CSV or --fock")
    wg = wigner(g, p_axis)
    write_wigner_csv(_output_path(cfg, args, "wigner.csv"), wg)
    print(f"total_mass {wg.total_mass():.8f} imag_residue {wg.imag_residue:.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON file merged over the defaults")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="hydra override, e.g. grid.N=2048 (repeatable)",
    )
    common.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    common.add_argument("--out", default=None, help="output file or directory")

    parser = _Parser(prog="wcanon", description="W-canonical transformation toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check a superpotential")
    p.add_argument("--coeffs", type=float, nargs="+", default=None, help="a_1 a_2 ...")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("transform", parents=[common], help="W-Fourier transform a CSV")
    p.add_argument("signal", help="signal CSV (forward) or spectrum CSV (inverse)")
    p.add_argument("--direction", default=None, help="forward | inverse")
    p.add_argument("--path", default=None, help="direct | fast")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("spectrogram", parents=[common], help="windowed W-Fourier transform")
    p.add_argument("signal", help="signal CSV")
    p.add_argument("--window", default=None, help="'ho0' or a window CSV")
    p.add_argument("--centers", type=float, nargs="+", default=None, help="window centers in x")
    p.set_defaults(func=cmd_spectrogram)

    p = sub.add_parser("basis", parents=[common], help="write basis vectors as CSV")
    p.add_argument("--family", required=True, help="mub | ho | alpha")
    p.add_argument("--indices", nargs="+", default=None, help="j values or p values")
    p.add_argument("--alpha", type=float, default=0.5, help="ordering of the alpha family")
    p.add_argument("--chirp", action="store_true", help="mub family: chirp states")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("coherent", parents=[common], help="coherent state in the Fock basis")
    p.add_argument("--z", type=float, nargs=2, default=[0.0, 0.0], metavar=("RE", "IM"))
    p.add_argument("--j-max", type=int, default=None)
    p.set_defaults(func=cmd_coherent)

    p = sub.add_parser("wigner", parents=[common], help="Wigner distribution over (W, p_W)")
    p.add_argument("signal", nargs="?", default=None, help="signal CSV")
    p.add_argument("--fock", default=None, help="Fock vector JSON instead of a signal")
    p.set_defaults(func=cmd_wigner)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logger(level=logging.WARNING if args.quiet else logging.INFO)

    try:
        cfg = load_config(overrides=args.set, json_file=args.config)
        code = args.func(args, cfg)
        write_run_meta(cfg.output_dir, args.command, argv, OmegaConf.to_container(cfg))
    except (
        WcanonError,
        ValueError,
        OSError,
        HydraException,
        OmegaConfBaseException,
    ) as e:
        code = exit_code_for(e)
        logger.error(f"{args.command} failed ({type(e).__name__}): {e}")
    return code


if __name__ == "__main__":
    sys.exit(main())
