import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bootperc import models


@pytest.fixture(scope="session")
def op():
    return models.op()


@pytest.fixture(scope="session")
def dtbp():
    return models.dtbp()


@pytest.fixture(scope="session")
def spiral():
    return models.spiral()


@pytest.fixture(scope="session")
def two_neighbour():
    return models.two_neighbour()
