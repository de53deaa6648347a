"""
Lattice evolution of the four-component amplitude field.

The field at time ``n`` is a dense ``(4, 2n+1, 2n+1)`` complex array indexed
``[chirality, x + n, y + n]``.  One step applies

    Ψ_{n+1}(x, y) = P Ψ_n(x+1, y) + Q Ψ_n(x-1, y) + R Ψ_n(x, y+1) + S Ψ_n(x, y-1)

into a fresh array two sites wider (double buffering, no in-place update).
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np
from numpy.typing import NDArray

from .coin import CoinParameters, DirectionMatrices, directions_for

__all__ = [
    "NotNormalizedState",
    "ResourceLimit",
    "TooLarge",
    "InitialState",
    "AmplitudeField",
    "PathSumTable",
    "ProbabilityGrid",
    "DEFAULT_MEMORY_CAP",
    "initial_field",
    "step",
    "evolve",
    "walk",
    "path_sum_oracle",
    "distribution",
    "field_bytes",
]

DEFAULT_MEMORY_CAP = 4 * 1024**3
ORACLE_MAX_N = 8


class NotNormalizedState(ValueError):
    pass


class ResourceLimit(MemoryError):
    pass


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class InitialState:
    """Unit vector ``alpha|L> + beta|R> + gamma|D> + lambda|U>``."""

    alpha: complex
    beta: complex
    gamma: complex
    lam: complex

    def __post_init__(self) -> None:
        norm = sum(abs(complex(v)) ** 2 for v in self.components)
        if not abs(norm - 1.0) < 1e-12:
            raise NotNormalizedState(
                f"phi must satisfy |alpha|^2+|beta|^2+|gamma|^2+|lambda|^2 = 1, got {norm!r}"
            )

    @property
    def components(self) -> tuple[complex, complex, complex, complex]:
        return (self.alpha, self.beta, self.gamma, self.lam)

    @property
    def vector(self) -> NDArray[np.complex128]:
        return np.array(self.components, dtype=np.complex128)

    @classmethod
    def from_vector(cls, v) -> "InitialState":
        v = [complex(z) for z in v]
        if len(v) != 4:
            raise ValueError(f"phi needs 4 components, got {len(v)}")
        return cls(*v)

    @classmethod
    def normalized(cls, v) -> "InitialState":
        arr = np.asarray(v, dtype=np.complex128)
        return cls.from_vector(arr / np.linalg.norm(arr))

    def to_list(self) -> list[list[float]]:
        return [[complex(z).real, complex(z).imag] for z in self.components]


@dataclass(frozen=True)
class AmplitudeField:
    n: int
    amplitudes: NDArray[np.complex128]

    def __post_init__(self) -> None:
        side = 2 * self.n + 1
        if self.amplitudes.shape != (4, side, side):
            raise ValueError(
                f"amplitudes shape {self.amplitudes.shape} does not match n={self.n}"
            )
        self.amplitudes.setflags(write=False)

    def at(self, x: int, y: int) -> NDArray[np.complex128]:
        """Four-component amplitude at lattice site ``(x, y)``."""
        if abs(x) > self.n or abs(y) > self.n:
            return np.zeros(4, dtype=np.complex128)
        return self.amplitudes[:, x + self.n, y + self.n].copy()

    def norm(self) -> float:
        flat = self.amplitudes.reshape(-1)
        return float(np.vdot(flat, flat).real)

    def component_norms(self) -> NDArray[np.float64]:
        flat = self.amplitudes.reshape(4, -1)
        return np.einsum("ij,ij->i", flat.conj(), flat).real


@dataclass(frozen=True)
class ProbabilityGrid:
    n: int
    p: NDArray[np.float64]

    def at(self, x: int, y: int) -> float:
        if abs(x) > self.n or abs(y) > self.n:
            return 0.0
        return float(self.p[x + self.n, y + self.n])


@dataclass(frozen=True)
class PathSumTable:
    """Path-sum matrices ``Ξ_n(l, r, d, u)`` keyed by step counts."""

    n: int
    entries: dict[tuple[int, int, int, int], NDArray[np.complex128]]

    def distribution(self, phi: InitialState) -> ProbabilityGrid:
        # several step-count classes land on the same site in 2D; their
        # amplitudes interfere, so sum them before squaring
        side = 2 * self.n + 1
        amps = np.zeros((side, side, 4), dtype=np.complex128)
        v = phi.vector
        for (l, r, d, u), xi in self.entries.items():
            amps[r - l + self.n, u - d + self.n] += xi @ v
        return ProbabilityGrid(self.n, (amps.real**2 + amps.imag**2).sum(axis=2))

    def amplitude(self, phi: InitialState, x: int, y: int) -> NDArray[np.complex128]:
        v = phi.vector
        out = np.zeros(4, dtype=np.complex128)
        for (l, r, d, u), xi in self.entries.items():
            if r - l == x and u - d == y:
                out += xi @ v
        return out


def field_bytes(n: int) -> int:
    return (2 * n + 1) ** 2 * 4 * 16


def initial_field(phi: InitialState) -> AmplitudeField:
    amps = np.zeros((4, 1, 1), dtype=np.complex128)
    amps[:, 0, 0] = phi.vector
    return AmplitudeField(0, amps)


@numba.njit(cache=True, nogil=True)
def _apply_rows(rows, src, dst, lo, hi):  # pragma: no cover - compiled
    # src x-slab [lo, hi) -> its (disjoint) images in dst; each output entry is
    # written once with a fixed term order, so slab partitioning is invisible
    m = src.shape[1]
    for i in range(lo, hi):
        for j in range(m):
            s0 = src[0, i, j]
            s1 = src[1, i, j]
            s2 = src[2, i, j]
            s3 = src[3, i, j]
            if s0 == 0 and s1 == 0 and s2 == 0 and s3 == 0:
                continue
            dst[0, i, j + 1] = rows[0, 0] * s0 + rows[0, 1] * s1 + rows[0, 2] * s2 + rows[0, 3] * s3
            dst[1, i + 2, j + 1] = rows[1, 0] * s0 + rows[1, 1] * s1 + rows[1, 2] * s2 + rows[1, 3] * s3
            dst[2, i + 1, j] = rows[2, 0] * s0 + rows[2, 1] * s1 + rows[2, 2] * s2 + rows[2, 3] * s3
            dst[3, i + 1, j + 2] = rows[3, 0] * s0 + rows[3, 1] * s1 + rows[3, 2] * s2 + rows[3, 3] * s3


def step(
    field: AmplitudeField,
    dirs: DirectionMatrices,
    threads: int = 1,
    pool: ThreadPoolExecutor | None = None,
) -> AmplitudeField:
    """Advance the field by one time step."""
    src = field.amplitudes
    m = src.shape[1]
    dst = np.zeros((4, m + 2, m + 2), dtype=np.complex128)
    rows = np.stack([dirs.P[0], dirs.Q[1], dirs.R[2], dirs.S[3]])

    workers = max(1, min(threads, m))
    if workers == 1 or m < 64:
        _apply_rows(rows, src, dst, 0, m)
    else:
        bounds = np.linspace(0, m, workers + 1).astype(int)
        spans = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        if pool is None:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                list(ex.map(lambda s: _apply_rows(rows, src, dst, *s), spans))
        else:
            list(pool.map(lambda s: _apply_rows(rows, src, dst, *s), spans))
    return AmplitudeField(field.n + 1, dst)


def walk(
    coin: CoinParameters,
    phi: InitialState,
    n_max: int,
    threads: int = 1,
    memory_cap: int = DEFAULT_MEMORY_CAP,
) -> Iterator[AmplitudeField]:
    """Yield the fields at times ``0, 1, ..., n_max``."""
    if n_max < 0:
        raise ValueError(f"n must be non-negative, got {n_max}")
    if field_bytes(n_max) > memory_cap:
        raise ResourceLimit(
            f"lattice for n={n_max} needs {field_bytes(n_max)} bytes, cap is {memory_cap}"
        )
    dirs = directions_for(coin)
    field = initial_field(phi)
    yield field
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for _ in range(n_max):
                field = step(field, dirs, threads, pool)
                yield field
    else:
        for _ in range(n_max):
            field = step(field, dirs)
            yield field


def evolve(
    coin: CoinParameters,
    phi: InitialState,
    n: int,
    threads: int = 1,
    memory_cap: int = DEFAULT_MEMORY_CAP,
) -> AmplitudeField:
    field = None
    for field in walk(coin, phi, n, threads=threads, memory_cap=memory_cap):
        pass
    return field


def path_sum_oracle(coin: CoinParameters, n: int) -> PathSumTable:
    """
    Brute-force ``Ξ_n`` by enumerating all ``4**n`` direction words.

    Each word contributes the time-ordered product of its direction matrices
    (latest step leftmost) to the class of its step counts.
    """
    if n > ORACLE_MAX_N:
        raise TooLarge(f"path-sum oracle limited to n <= {ORACLE_MAX_N}, got {n}")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    mats = np.stack(directions_for(coin).as_tuple())
    words = np.array(list(itertools.product(range(4), repeat=n)), dtype=np.int64)
    words = words.reshape(4**n, n)
    prods = np.broadcast_to(np.eye(4, dtype=np.complex128), (4**n, 4, 4)).copy()
    for k in range(n):
        prods = mats[words[:, k]] @ prods

    counts = np.stack([(words == j).sum(axis=1) for j in range(4)], axis=1)
    entries: dict[tuple[int, int, int, int], NDArray[np.complex128]] = {}
    for key, prod in zip(map(tuple, counts.tolist()), prods):
        if key in entries:
            entries[key] = entries[key] + prod
        else:
            entries[key] = prod.copy()
    return PathSumTable(n, entries)


def distribution(field: AmplitudeField) -> ProbabilityGrid:
    a = field.amplitudes
    p = (a.real**2 + a.imag**2).sum(axis=0)
    return ProbabilityGrid(field.n, p)
