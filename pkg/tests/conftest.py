import numpy as np
import pytest

from vcesim.substrate import build_custom, build_fat_tree
from vcesim.workload import RandomBenefit, generate_sequence


@pytest.fixture(scope="session")
def ft4():
    return build_fat_tree(4)


@pytest.fixture(scope="session")
def ft4_sequence():
    return generate_sequence(1, 400, RandomBenefit())


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture()
def path_graph():
    """server - switch - server, caps 20 everywhere."""
    return build_custom(
        [("server", 20), ("switch", 0), ("server", 20)],
        [(0, 1, 20), (1, 2, 20)],
    )
