# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import functools
import logging
import sys

_FORMAT = "[%(asctime)s %(name)s %(levelname)s] %(message)s"
_DATEFMT = "%m/%d %H:%M:%S"


@functools.lru_cache()  # so that calling setup_logger multiple times won't add many handlers
def _install_handler(name: str) -> logging.Logger:
    logger = logging.getLogger(name)
    logger.propagate = False
    handler = logging.StreamHandler(stream=sys.stderr)
    handler.setFormatter(logging.Formatter(_FORMAT, datefmt=_DATEFMT))
    logger.addHandler(handler)
    return logger


def setup_logger(name: str = "wcanon", level: int = logging.INFO) -> logging.Logger:
    """
    Attach a single stream handler to the package logger and set its level.

    Args:
        name (str): root name of the logger, usually the package name.
        level (int): logging level of the logger.

    Returns:
        logging.Logger: the configured logger.
    """
    logger = _install_handler(name)
    logger.setLevel(level)
    return logger
