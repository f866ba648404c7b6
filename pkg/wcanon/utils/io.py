# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

"""
CSV and JSON artifacts. Every read and write goes through the iopath path manager and
writes land atomically (temporary file, then move).
"""

import csv
import io
import json
import logging
import os
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from iopath.common.file_io import g_pathmgr

import wcanon
from wcanon.modeling.grids import (
    grid_from_nodes,
    P_DOMAIN,
    SampledSignal,
    W_DOMAIN,
    X_DOMAIN,
)
from wcanon.modeling.phase_space import FockVector, WignerGrid
from wcanon.modeling.superpotential import Superpotential
from wcanon.modeling.wtransform import Spectrogram, Spectrum
from wcanon.utils.errors import ConfigError, InvalidInput

logger = logging.getLogger(__name__)

AXIS_HEADERS = {X_DOMAIN: "x", W_DOMAIN: "w", P_DOMAIN: "p"}
RUN_META_NAME = "run_meta.json"


def _fmt(value: float) -> str:
    return repr(float(value))


def read_text(path: str) -> str:
    if not g_pathmgr.exists(path):
        raise FileNotFoundError(f"{path} does not exist")
    with g_pathmgr.open(path, "r") as f:
        return f.read()


def atomic_write_text(path: str, text: str):
    directory = os.path.dirname(path)
    if directory:
        g_pathmgr.mkdirs(directory)
    tmp_path = path + ".tmp"
    with g_pathmgr.open(tmp_path, "w") as f:
        f.write(text)
    g_pathmgr.mv(tmp_path, path)
    logger.info(f"wrote {path}")


def read_json(path: str) -> Any:
    text = read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {path}: {e}") from e


def write_json(path: str, payload: Any):
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _read_rows(path: str) -> Tuple[List[str], np.ndarray]:
    rows = list(csv.reader(io.StringIO(read_text(path))))
    rows = [row for row in rows if row]
    if not rows:
        raise ValueError(f"{path} has no header row")
    header = [name.strip() for name in rows[0]]
    try:
        body = np.asarray([[float(v) for v in row] for row in rows[1:]], dtype=np.float64)
    except ValueError as e:
        raise InvalidInput(f"{path}: {e}") from e
    if body.size and body.shape[1] != len(header):
        raise ValueError(f"{path}: rows have {body.shape[1]} columns, header has {len(header)}")
    return header, body.reshape(-1, len(header))


def _write_rows(path: str, header: Sequence[str], columns: Sequence[np.ndarray]):
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_signal_csv(
    path: str, W: Optional[Superpotential] = None
) -> Optional[SampledSignal]:
    """
    Read an ``x,re,im`` or ``w,re,im`` file. The grid is inferred from the first column
    with trapezoid weights. Returns None for a header-only file.
    """
    header, body = _read_rows(path)
    if len(header) != 3 or header[1:] != ["re", "im"] or header[0] not in ("x", "w"):
        raise ValueError(f"{path}: expected header x,re,im or w,re,im, got {header}")
    if body.shape[0] == 0:
        return None
    rep = X_DOMAIN if header[0] == "x" else W_DOMAIN
    grid = grid_from_nodes(body[:, 0], rep, W)
    return SampledSignal(body[:, 1] + 1j * body[:, 2], grid)


def write_signal_csv(path: str, f: SampledSignal):
    header = [AXIS_HEADERS[f.grid.rep], "re", "im"]
    _write_rows(path, header, [f.grid.nodes, f.values.real, f.values.imag])


def read_spectrum_csv(path: str) -> Spectrum:
    header, body = _read_rows(path)
    if header != ["p", "re", "im"]:
        raise ValueError(f"{path}: expected header p,re,im, got {header}")
    grid = grid_from_nodes(body[:, 0], P_DOMAIN)
    return Spectrum(body[:, 1] + 1j * body[:, 2], grid)


def write_spectrum_csv(path: str, F: Spectrum):
    _write_rows(path, ["p", "re", "im"], [F.p_grid.nodes, F.values.real, F.values.imag])


def write_table_csv(
    path: str, corner: str, row_axis: np.ndarray, col_axis: np.ndarray, values: np.ndarray
):
    """
    Two-axis table: first row holds ``corner`` and the column axis, every following row
    its row-axis value and the values.
    """
    assert values.shape == (len(row_axis), len(col_axis))
    lines = [",".join([corner] + [_fmt(v) for v in col_axis])]
    for r, row in zip(row_axis, values):
        lines.append(",".join([_fmt(r)] + [_fmt(v) for v in row]))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_spectrogram_csv(path: str, S: Spectrogram):
    write_table_csv(path, "x\\p", S.centers, S.p_axis.nodes, S.magnitudes)


def write_wigner_csv(path: str, wg: WignerGrid):
    write_table_csv(path, "w\\p", wg.u_axis.nodes, wg.p_axis.nodes, wg.values)


def write_fock_json(path: str, v: FockVector):
    payload = {
        "coeffs": [[float(c.real), float(c.imag)] for c in v.coeffs],
        "tail_weight": v.tail_weight,
    }
    write_json(path, payload)


def read_fock_json(path: str) -> FockVector:
    """
    Read a Fock vector written by :func:`write_fock_json`, or a bare list of
    ``[re, im]`` pairs.
    """
    payload = read_json(path)
    try:
        pairs = payload["coeffs"] if isinstance(payload, dict) else payload
        coeffs = np.asarray([complex(re, im) for re, im in pairs])
        tail = float(payload.get("tail_weight", 0.0)) if isinstance(payload, dict) else 0.0
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInput(f"{path} is not a Fock vector of [re, im] pairs: {e!r}") from e
    return FockVector(coeffs, tail)


def write_run_meta(
    output_dir: str, command: str, argv: Sequence[str], config: Dict[str, Any]
):
    """Sidecar with everything that is not deterministic in a run."""
    meta = {
        "command": command,
        "argv": list(argv),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "version": wcanon.__version__,
        "config": config,
    }
    write_json(os.path.join(output_dir, RUN_META_NAME), meta)
