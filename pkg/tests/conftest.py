import numpy as np
import pytest

from dunkl.rootsys import build_root_system
from dunkl.weylgroup import enumerate_group


@pytest.fixture(scope="session")
def A2():
    return build_root_system("A", 2, 4.0)


@pytest.fixture(scope="session")
def A3():
    return build_root_system("A", 3, 8.0)


@pytest.fixture(scope="session")
def B2():
    return build_root_system("B", 2, 4.0)


@pytest.fixture(scope="session")
def B3():
    return build_root_system("B", 3, 4.0)


@pytest.fixture(scope="session")
def table_A2(A2):
    return enumerate_group(A2)


@pytest.fixture(scope="session")
def table_A3(A3):
    return enumerate_group(A3)


@pytest.fixture(scope="session")
def table_B2(B2):
    return enumerate_group(B2)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
