# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import logging
import os
from typing import Optional, Sequence

from hydra import compose
from hydra.errors import InstantiationException
from hydra.utils import instantiate
from omegaconf import DictConfig, OmegaConf

import wcanon
from wcanon.modeling.grids import Grid, uniform_p_grid, uniform_w_grid, uniform_x_grid
from wcanon.modeling.superpotential import Superpotential
from wcanon.utils.errors import ConfigError, WcanonError
from wcanon.utils.io import read_json

# Check if the user is running Python from the parent directory of the wcanon repo
# (i.e. the directory where this repo is cloned into), which shadows the package.
if os.path.isdir(os.path.join(wcanon.__path__[0], "wcanon")):
    raise RuntimeError(
        "You're likely running Python from the parent directory of the wcanon repository. "
        "This is not supported since the `wcanon` Python package could be shadowed by the "
        "repository name. Please run Python from another directory after installing wcanon."
    )

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = "configs/wcanon_default.yaml"
OUTPUT_DIR_ENV = "WCANON_OUTPUT_DIR"


def load_config(
    config_file: str = DEFAULT_CONFIG,
    overrides: Sequence[str] = (),
    json_file: Optional[str] = None,
) -> DictConfig:
    """
    Compose the run configuration.

    Precedence, lowest first: the YAML config, hydra ``overrides``, the JSON file, and
    the ``WCANON_OUTPUT_DIR`` environment variable for ``output_dir``. A JSON file that
    holds a bare superpotential descriptor ``{"coeffs": [...]}`` sets the
    ``superpotential`` node.
    """
    cfg = compose(config_name=config_file, overrides=list(overrides))
    if json_file is not None:
        payload = read_json(json_file)
        if not isinstance(payload, dict):
            raise ConfigError(f"{json_file} must hold a JSON object, got {type(payload).__name__}")
        if "coeffs" in payload:
            payload = {"superpotential": {"coeffs": payload["coeffs"]}}
        cfg = OmegaConf.merge(cfg, OmegaConf.create(payload))
    output_dir = os.environ.get(OUTPUT_DIR_ENV)
    if output_dir:
        cfg.output_dir = output_dir
    OmegaConf.resolve(cfg)
    return cfg


def build_superpotential(node: DictConfig) -> Superpotential:
    """Instantiate a ``superpotential`` node, re-raising wcanon errors unwrapped."""
    try:
        return instantiate(node)
    except InstantiationException as e:
        if isinstance(e.__cause__, WcanonError):
            raise e.__cause__ from None
        raise ConfigError(str(e)) from e


def build_x_grid(node: DictConfig) -> Grid:
    return uniform_x_grid(float(node.xmin), float(node.xmax), int(node.N))


def build_p_grid(node: DictConfig) -> Grid:
    return uniform_p_grid(float(node.pmin), float(node.pmax), int(node.M))


def build_w_grid(W: Superpotential, node: DictConfig) -> Grid:
    return uniform_w_grid(W, float(node.umin), float(node.umax), int(node.N))
