"""Seeded pseudo-random coins and initial states for the property suites."""

from __future__ import annotations

import numpy as np

from .coin import CoinParameters, build_coin
from .evolution import InitialState


def random_coin(rng: np.random.Generator, min_abcd: float = 0.0) -> CoinParameters:
    while True:
        t = rng.uniform(0.0, np.pi / 2)
        al, be, ga = rng.uniform(0.0, 2 * np.pi, 3)
        coin = build_coin(np.cos(t) * np.exp(1j * al), np.sin(t) * np.exp(1j * be), np.exp(1j * ga))
        if abs(coin.abcd) >= min_abcd:
            return coin


def random_state(rng: np.random.Generator) -> InitialState:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return InitialState.normalized(v)


def sample_cases(k: int, seed: int = 2024, min_abcd: float = 0.0):
    rng = np.random.default_rng(seed)
    return [(random_coin(rng, min_abcd), random_state(rng)) for _ in range(k)]
