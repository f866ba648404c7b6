# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

from hydra import initialize_config_module
from hydra.core.global_hydra import GlobalHydra

__version__ = "1.0"

if not GlobalHydra.instance().is_initialized():
    initialize_config_module("wcanon", version_base="1.2")
