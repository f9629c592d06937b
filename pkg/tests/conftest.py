import numpy as np
import pytest

from hedgenash import normalize_payoffs, validate_game

RPS_NORMALIZED = [[0.5, 0.0, 1.0], [1.0, 0.5, 0.0], [0.0, 1.0, 0.5]]
RPS_NONNEGATIVE = [[1.0, 0.0, 2.0], [2.0, 1.0, 0.0], [0.0, 2.0, 1.0]]
HAWK_DOVE = [[0.0, 3.0], [1.0, 2.0]]


@pytest.fixture
def rps_norm():
    return validate_game(RPS_NORMALIZED)


@pytest.fixture
def rps_nonneg():
    return validate_game(RPS_NONNEGATIVE)


@pytest.fixture
def identity2():
    return validate_game(np.eye(2))


@pytest.fixture
def hawk_dove():
    return validate_game(HAWK_DOVE)


@pytest.fixture
def hawk_dove_norm():
    game, _, _ = normalize_payoffs(validate_game(HAWK_DOVE))
    return game
