import math

import numpy as np
import pytest

from qw2d.coin import build_coin, coin_from_angle
from qw2d.entropy import entropy_series
from qw2d.evolution import InitialState

ACCEPTANCE_LINES: list[str] = []
_SERIES_CACHE: dict = {}

SQ2 = math.sqrt(0.5)


def cached_series(coin, phi, n_max=512):
    key = (coin, phi, n_max)
    if key not in _SERIES_CACHE:
        _SERIES_CACHE[key] = entropy_series(coin, phi, n_max)
    return _SERIES_CACHE[key]


# the dual-path validation suite: 3 coins x 3 initial states, all with abcd != 0
SUITE_COINS = {
    "hadamard": coin_from_angle(math.pi / 4),
    "theta_pi_3": coin_from_angle(math.pi / 3),
    "complex": build_coin(0.6 * np.exp(0.2j), 0.8, np.exp(0.5j)),
}
SUITE_STATES = {
    "L": InitialState(1, 0, 0, 0),
    "uniform": InitialState(0.5, 0.5, 0.5, 0.5),
    "L+iU": InitialState(SQ2, 0, 0, 1j * SQ2),
}
SUITE = [(cn, sn) for cn in SUITE_COINS for sn in SUITE_STATES]


@pytest.fixture
def hadamard():
    return coin_from_angle(math.pi / 4)


@pytest.fixture
def identity_coin():
    return build_coin(1, 0, 1)


@pytest.fixture
def phi_L():
    return InitialState(1, 0, 0, 0)


@pytest.fixture(scope="session")
def series_cache():
    return _SERIES_CACHE


@pytest.fixture
def record():
    def _record(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
