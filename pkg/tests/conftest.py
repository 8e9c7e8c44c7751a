import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from teamgames import RandomGameConfig, build_example1, build_example2, generate_random


@pytest.fixture(scope="session")
def example1_32():
    return build_example1(3, 2)


@pytest.fixture(scope="session")
def example2_32():
    return build_example2(3, 2)


@pytest.fixture(scope="session")
def small_random_games():
    """A dozen small 3-player games across information structures."""
    games = []
    for seed in range(12):
        nu = (0.0, 0.25, 0.5, 1.0)[seed % 4]
        depth = 3 + seed % 3
        games.append(
            generate_random(
                RandomGameConfig(num_players=3, depth=depth, nu=nu, seed=seed)
            )
        )
    return games
