import logging

import numpy as np
import pytest

from lindbladcraft.models.qubit import build_damped_qubit, build_dephasing_qubit, excited_state
from lindbladcraft.models.tfim import build_tfim, tfim_initial_state

# config
SHOW_EXCEPTIONS = True

pytest_plugins = ["pytester"]

# For console output
handler = logging.StreamHandler()
handler.setLevel(logging.DEBUG)
formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
handler.setFormatter(formatter)


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="run acceptance-scale ensembles")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def disable_logging_exception(mocker):
    if not SHOW_EXCEPTIONS:
        mocker.patch("logging.exception", lambda *args, **kwargs: None)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def damped_qubit():
    return build_damped_qubit(omega=0.0, gamma=1.0)


@pytest.fixture
def dephasing_qubit():
    return build_dephasing_qubit(omega=1.0, gamma=0.5)


@pytest.fixture
def excited():
    return excited_state()


@pytest.fixture
def tfim():
    return build_tfim(2, J=1.0, h=1.0, gamma=[0.1, 0.1])


@pytest.fixture
def tfim_initial():
    return tfim_initial_state(2)
