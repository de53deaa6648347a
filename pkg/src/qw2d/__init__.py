"""Discrete-time quantum walks on Z^2 with tensor-square coins: entropies and their limits."""

from .coin import build_coin, coin_from_angle, directions_for, split_directions, tensor_square
from .entropy import coin_density, entropy_record, entropy_series, von_neumann_entropy
from .evolution import InitialState, distribution, evolve, path_sum_oracle, walk

__version__ = "0.1.0"
