"""
U(2) coins, their tensor squares and the four direction matrices.

Basis order is fixed everywhere as (L, R, D, U) -> (0, 1, 2, 3), with
L = 1⊗1, R = 1⊗2, D = 2⊗1, U = 2⊗2 for the two qubit factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "CoinError",
    "NotNormalized",
    "NotUnitDeterminant",
    "OutOfRange",
    "CoinParameters",
    "TensorCoin",
    "DirectionMatrices",
    "build_coin",
    "coin_from_angle",
    "coin_from_dict",
    "tensor_square",
    "split_directions",
    "directions_for",
]

CHIRALITIES = ("L", "R", "D", "U")

INPUT_TOL = 1e-10
UNITARY_TOL = 1e-12


class CoinError(ValueError):
    """Base class for rejected coin input."""


class NotNormalized(CoinError):
    pass


class NotUnitDeterminant(CoinError):
    pass


class OutOfRange(CoinError):
    pass


@dataclass(frozen=True)
class CoinParameters:
    """
    A validated 2x2 unitary ``[[a, b], [c, d]]`` with ``det = delta``.

    ``c`` and ``d`` are derived as ``c = -delta*conj(b)``, ``d = delta*conj(a)``.
    """

    a: complex
    b: complex
    delta: complex
    c: complex
    d: complex

    @property
    def matrix(self) -> NDArray[np.complex128]:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @property
    def abcd(self) -> complex:
        return self.a * self.b * self.c * self.d

    def to_dict(self) -> dict:
        return {
            "a": [self.a.real, self.a.imag],
            "b": [self.b.real, self.b.imag],
            "delta": [self.delta.real, self.delta.imag],
        }


@dataclass(frozen=True)
class TensorCoin:
    """4x4 tensor square ``U ⊗ U`` in basis order (L, R, D, U)."""

    entries: NDArray[np.complex128]

    def __post_init__(self) -> None:
        self.entries.setflags(write=False)


@dataclass(frozen=True)
class DirectionMatrices:
    """Row slices of the tensor coin: P (left), Q (right), R (down), S (up)."""

    P: NDArray[np.complex128]
    Q: NDArray[np.complex128]
    R: NDArray[np.complex128]
    S: NDArray[np.complex128]

    def __post_init__(self) -> None:
        for m in (self.P, self.Q, self.R, self.S):
            m.setflags(write=False)

    def as_tuple(self) -> tuple[NDArray[np.complex128], ...]:
        return (self.P, self.Q, self.R, self.S)

    def total(self) -> NDArray[np.complex128]:
        return self.P + self.Q + self.R + self.S


def build_coin(a: complex, b: complex, delta: complex) -> CoinParameters:
    """
    Validate ``(a, b, delta)`` and derive the remaining coin entries.

    Raises
    ------
    NotNormalized
        If ``|a|^2 + |b|^2`` differs from 1 by 1e-10 or more.
    NotUnitDeterminant
        If ``|delta|`` differs from 1 by 1e-10 or more.
    """
    a, b, delta = complex(a), complex(b), complex(delta)
    norm = abs(a) ** 2 + abs(b) ** 2
    if not abs(norm - 1.0) < INPUT_TOL:
        raise NotNormalized(f"|a|^2 + |b|^2 = {norm!r}, expected 1")
    if not abs(abs(delta) - 1.0) < INPUT_TOL:
        raise NotUnitDeterminant(f"|delta| = {abs(delta)!r}, expected 1")
    c = -delta * b.conjugate()
    d = delta * a.conjugate()
    return CoinParameters(a=a, b=b, delta=delta, c=c, d=d)


def coin_from_angle(theta: float) -> CoinParameters:
    """The real coin ``[[cos θ, sin θ], [sin θ, -cos θ]]``; θ = π/4 is Hadamard."""
    if not 0.0 < theta < math.pi / 2:
        raise OutOfRange(f"theta must lie in (0, pi/2), got {theta!r}")
    return build_coin(math.cos(theta), math.sin(theta), -1.0)


def coin_from_dict(spec: dict) -> CoinParameters:
    """Parse ``{"theta": t}`` or ``{"a": [re, im], "b": [re, im], "delta": [re, im]}``."""
    if "theta" in spec:
        extra = set(spec) - {"theta"}
        if extra:
            raise CoinError(f"unexpected coin keys alongside theta: {sorted(extra)}")
        return coin_from_angle(float(spec["theta"]))
    missing = {"a", "b", "delta"} - set(spec)
    if missing:
        raise CoinError(f"coin spec missing keys: {sorted(missing)}")

    def pair(key: str) -> complex:
        v = spec[key]
        if not (isinstance(v, (list, tuple)) and len(v) == 2):
            raise CoinError(f"coin.{key} must be a [re, im] pair")
        return complex(float(v[0]), float(v[1]))

    return build_coin(pair("a"), pair("b"), pair("delta"))


def tensor_square(coin: CoinParameters) -> TensorCoin:
    m = coin.matrix
    return TensorCoin(np.kron(m, m))


def split_directions(tensor: TensorCoin) -> DirectionMatrices:
    parts = []
    for row in range(4):
        m = np.zeros((4, 4), dtype=np.complex128)
        m[row] = tensor.entries[row]
        parts.append(m)
    return DirectionMatrices(*parts)


def directions_for(coin: CoinParameters) -> DirectionMatrices:
    return split_directions(tensor_square(coin))
