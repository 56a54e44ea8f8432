import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from incentive_dynamics import Game, MixedProfile, make_rps  # noqa: E402


@pytest.fixture
def bad_rps():
    return make_rps(1, 2)


@pytest.fixture
def x532():
    return MixedProfile(([0.5, 0.3, 0.2], [0.5, 0.3, 0.2]))


@pytest.fixture
def unequal_rows_game():
    return Game.from_matrix([[1, 0, 0], [0, 1, 0], [0, -3, 1]])


@pytest.fixture
def unequal_excess_game():
    return Game.from_matrix([[1, 2], [3, 0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
