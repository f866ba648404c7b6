# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import logging

import pytest

from wcanon.modeling.grids import adapted_x_grid, uniform_p_grid
from wcanon.modeling.superpotential import validate
from wcanon.utils.logger import setup_logger

# x, x + x^3 and x^3
IDENTITY = [1.0]
CUBIC_SUM = [1.0, 0.0, 1.0]
CUBE = [0.0, 0.0, 1.0]


@pytest.fixture(scope="session", autouse=True)
def wcanon_handler():
    # bind the CLI stream handler to the session stderr, not to a per-test capsys buffer
    setup_logger()


@pytest.fixture(autouse=True)
def propagate_wcanon_logs():
    # the CLI installs a non-propagating handler; caplog listens on the root logger
    logger = logging.getLogger("wcanon")
    previous = logger.propagate
    logger.propagate = True
    yield
    logger.propagate = previous


@pytest.fixture
def W_identity():
    return validate(IDENTITY)


@pytest.fixture
def W_cubic_sum():
    return validate(CUBIC_SUM)


@pytest.fixture
def W_cube():
    return validate(CUBE)


@pytest.fixture(params=[IDENTITY, CUBIC_SUM], ids=["x", "x+x^3"])
def W(request):
    return validate(request.param)


@pytest.fixture
def adapted_grid(W):
    return adapted_x_grid(W, 12.0, 1024)


@pytest.fixture(scope="session")
def p_grid():
    return uniform_p_grid(-12.0, 12.0, 1024)
