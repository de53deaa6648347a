"""
Finite-time entropies of the walk.

The reduced coin density is the 4x4 Gram matrix of the chirality component
fields.  Its spectrum gives the coin-position entanglement; the position-side
reduced density (small n only) gives the same number from the other side of
the Schmidt split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
from numpy.typing import NDArray

from .coin import CHIRALITIES
from .evolution import AmplitudeField, ProbabilityGrid, TooLarge

__all__ = [
    "NotHermitian",
    "OutOfRange",
    "BadSpectrum",
    "EmptyComponent",
    "CoinDensity",
    "SpectralPair",
    "KroneckerFactors",
    "EntropyRecord",
    "coin_density",
    "jacobi_eigh",
    "hermitian_eigenvalues",
    "spectral_pair",
    "rearrange",
    "nearest_kronecker",
    "kronecker_factor_check",
    "von_neumann_entropy",
    "position_entropy_small",
    "shannon_entropy",
    "conditional_entropy",
    "entropy_record",
    "EntropySeries",
    "entropy_series",
]

LOG_GUARD = 1e-300


class NotHermitian(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class BadSpectrum(ValueError):
    pass


class EmptyComponent(ValueError):
    pass


@dataclass(frozen=True)
class CoinDensity:
    """
    Reduced coin density ``Tr_position |Ψ_n><Ψ_n|``.

    ``m[i, j] = sum_{x,y} Ψ^i(x,y) conj(Ψ^j(x,y))``, so row L, column R holds
    ``<Ψ^R, Ψ^L>`` with the conjugate on the first argument.
    """

    m: NDArray[np.complex128]

    def __post_init__(self) -> None:
        self.m.setflags(write=False)

    @property
    def norms(self) -> NDArray[np.float64]:
        return np.diag(self.m).real.copy()

    def cross(self) -> list[complex]:
        """Off-diagonal ``<Ψ^j, Ψ^i>`` for pairs (L,R),(L,D),(L,U),(R,D),(R,U),(D,U)."""
        return [complex(self.m[i, j]) for i in range(4) for j in range(i + 1, 4)]


@dataclass(frozen=True)
class SpectralPair:
    r_plus: float
    r_minus: float

    def products(self) -> tuple[float, float, float, float]:
        rp, rm = self.r_plus, self.r_minus
        return (rp * rp, rm * rm, rp * rm, rp * rm)


@dataclass(frozen=True)
class KroneckerFactors:
    first: NDArray[np.complex128]
    second: NDArray[np.complex128]
    residual: float
    singular_values: NDArray[np.float64]


@dataclass(frozen=True)
class EntropyRecord:
    n: int
    s_c: float
    s_shannon: float
    s_w: tuple[float, float, float, float]
    overlaps: CoinDensity
    eigs: tuple[float, float, float, float]
    extras: dict = field(default_factory=dict, compare=False)


def coin_density(fld: AmplitudeField) -> CoinDensity:
    flat = fld.amplitudes.reshape(4, -1)
    m = np.zeros((4, 4), dtype=np.complex128)
    for i in range(4):
        for j in range(i, 4):
            m[i, j] = np.vdot(flat[j], flat[i])
    for i in range(4):
        m[i, i] = m[i, i].real
        for j in range(i + 1, 4):
            m[j, i] = np.conj(m[i, j])
    return CoinDensity(m)


def jacobi_eigh(
    m: NDArray[np.complex128], tol: float = 1e-14, max_sweeps: int = 50
) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """
    Cyclic complex Jacobi eigensolver for a small Hermitian matrix.

    Returns eigenvalues in descending order and the matching unitary
    eigenvector matrix (columns).
    """
    a = np.array(m, dtype=np.complex128)
    k = a.shape[0]
    v = np.eye(k, dtype=np.complex128)
    for _ in range(max_sweeps):
        off = math.sqrt(sum(abs(a[p, q]) ** 2 for p in range(k) for q in range(k) if p != q))
        if off < tol:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                g = a[p, q]
                mag = abs(g)
                if mag < 1e-300:
                    continue
                phase = g / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # rotation G = diag(1, conj(phase)) @ [[c, s], [-s, c]] in the (p, q) plane
                gp = np.array([c, -s * phase.conjugate()])
                gq = np.array([s, c * phase.conjugate()])
                cols = a[:, [p, q]]
                a[:, p] = cols @ gp
                a[:, q] = cols @ gq
                rows = a[[p, q], :]
                a[p, :] = gp.conj() @ rows
                a[q, :] = gq.conj() @ rows
                a[p, q] = 0.0
                a[q, p] = 0.0
                vc = v[:, [p, q]]
                v[:, p] = vc @ gp
                v[:, q] = vc @ gq
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigenvalues(m: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Descending real spectrum of a small Hermitian matrix (Jacobi)."""
    m = np.asarray(m, dtype=np.complex128)
    dev = np.abs(m - m.conj().T).max()
    if dev > 1e-10:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}")
    w, _ = jacobi_eigh(0.5 * (m + m.conj().T))
    return w


def spectral_pair(delta_n: float) -> SpectralPair:
    """``r_± = (1 ± sqrt(1 - 4Δ)) / 2`` for the determinant Δ of a trace-one 2x2."""
    if delta_n < -1e-12 or delta_n > 0.25 + 1e-9:
        raise OutOfRange(f"determinant {delta_n!r} outside [0, 1/4]")
    disc = math.sqrt(max(0.0, 1.0 - 4.0 * min(max(delta_n, 0.0), 0.25)))
    return SpectralPair((1.0 + disc) / 2.0, (1.0 - disc) / 2.0)


def rearrange(m: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """Map ``m[(i1 i2), (j1 j2)]`` to ``R[(i1 j1), (i2 j2)]``; ``A⊗B`` becomes ``vec(A) vec(B)^T``."""
    return np.asarray(m).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


def nearest_kronecker(density: CoinDensity) -> KroneckerFactors:
    """Best rank-one rearrangement fit, factors scaled to unit trace."""
    u, s, vh = np.linalg.svd(rearrange(density.m))
    first = (math.sqrt(s[0]) * u[:, 0]).reshape(2, 2)
    second = (math.sqrt(s[0]) * vh[0]).reshape(2, 2)
    tr1 = np.trace(first)
    tr2 = np.trace(second)
    if abs(tr1) > 1e-300 and abs(tr2) > 1e-300:
        first = first / tr1
        second = second / tr2
    first = 0.5 * (first + first.conj().T)
    second = 0.5 * (second + second.conj().T)
    residual = float(np.abs(density.m - np.kron(first, second)).max())
    return KroneckerFactors(first, second, residual, s)


def kronecker_factor_check(density: CoinDensity, tol: float = 1e-8) -> KroneckerFactors | None:
    """Factors of ``density = A ⊗ B`` when the rearrangement has numerical rank one, else None."""
    fit = nearest_kronecker(density)
    if fit.singular_values[1] >= tol:
        return None
    return fit


def von_neumann_entropy(eigs) -> float:
    lam = np.asarray(eigs, dtype=np.float64)
    if np.any(lam < -1e-9):
        raise BadSpectrum(f"negative eigenvalue {lam.min():.3e}")
    if abs(lam.sum() - 1.0) >= 1e-8:
        raise BadSpectrum(f"eigenvalues sum to {lam.sum()!r}")
    lam = lam[lam > LOG_GUARD]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def position_entropy_small(fld: AmplitudeField) -> float:
    """Entanglement from the explicit position-side reduced density (n <= 8)."""
    if fld.n > 8:
        raise TooLarge(f"explicit position density limited to n <= 8, got {fld.n}")
    psi = fld.amplitudes.reshape(4, -1)
    rho_p = psi.T @ psi.conj()
    r = np.linalg.eigvalsh(rho_p)
    r = r[r > 1e-15]
    return float(max(0.0, -np.sum(r * np.log2(r))))


def _plogp(p: NDArray[np.float64]) -> float:
    q = p[p > LOG_GUARD]
    return max(0.0, float(-np.sum(q * np.log2(q))))


def shannon_entropy(grid: ProbabilityGrid) -> float:
    return _plogp(grid.p)


def conditional_entropy(fld: AmplitudeField, w: str) -> float:
    """Shannon entropy of the normalized ``|Ψ^W(x,y)|^2`` site distribution."""
    idx = CHIRALITIES.index(w)
    comp = fld.amplitudes[idx]
    mass = comp.real**2 + comp.imag**2
    total = float(mass.sum())
    if total <= 1e-14:
        raise EmptyComponent(f"component {w} carries mass {total:.3e}")
    return _plogp(mass / total)


@numba.njit(cache=True)
def _site_sums(amps):  # pragma: no cover - compiled
    # per component: sum |ψ|^2 and sum |ψ|^2 log2 |ψ|^2; then sum p log2 p
    out = np.zeros(9)
    inv_ln2 = 1.0 / np.log(2.0)
    for i in range(amps.shape[1]):
        for j in range(amps.shape[2]):
            p = 0.0
            for c in range(4):
                z = amps[c, i, j]
                q = z.real * z.real + z.imag * z.imag
                if q > 1e-300:
                    out[c] += q
                    out[4 + c] += q * np.log(q) * inv_ln2
                p += q
            if p > 1e-300:
                out[8] += p * np.log(p) * inv_ln2
    return out


def entropy_record(fld: AmplitudeField) -> EntropyRecord:
    """All finite-time entropies at one time step, in a single pass over the lattice."""
    rho = coin_density(fld)
    eigs = hermitian_eigenvalues(rho.m)
    s_c = von_neumann_entropy(eigs)
    sums = _site_sums(fld.amplitudes)
    s_w = []
    for c in range(4):
        mass = sums[c]
        if mass <= 1e-14:
            s_w.append(math.nan)
        else:
            s_w.append(float(math.log2(mass) - sums[4 + c] / mass))
    return EntropyRecord(
        n=fld.n,
        s_c=s_c,
        s_shannon=max(0.0, float(-sums[8])),
        s_w=tuple(s_w),
        overlaps=rho,
        eigs=tuple(float(e) for e in eigs),
    )


@dataclass(frozen=True)
class EntropySeries:
    """Per-time entropy records for ``n = 1 .. n_max`` stored column-wise."""

    n: NDArray[np.int64]
    s_c: NDArray[np.float64]
    s_shannon: NDArray[np.float64]
    s_w: NDArray[np.float64]
    rho: NDArray[np.complex128]
    eigs: NDArray[np.float64]
    total_norm: NDArray[np.float64]

    @property
    def norms(self) -> NDArray[np.float64]:
        return np.einsum("kii->ki", self.rho).real

    def window(self, n_lo: int, n_hi: int) -> NDArray[np.bool_]:
        return (self.n >= n_lo) & (self.n <= n_hi)


def entropy_series(coin, phi, n_max: int, threads: int = 1, memory_cap: int | None = None) -> EntropySeries:
    from .evolution import DEFAULT_MEMORY_CAP, walk

    cap = DEFAULT_MEMORY_CAP if memory_cap is None else memory_cap
    recs = []
    norms = []
    for fld in walk(coin, phi, n_max, threads=threads, memory_cap=cap):
        if fld.n == 0:
            continue
        recs.append(entropy_record(fld))
        norms.append(float(np.trace(recs[-1].overlaps.m).real))
    return EntropySeries(
        n=np.array([r.n for r in recs], dtype=np.int64),
        s_c=np.array([r.s_c for r in recs]),
        s_shannon=np.array([r.s_shannon for r in recs]),
        s_w=np.array([r.s_w for r in recs]).reshape(-1, 4),
        rho=np.array([r.overlaps.m for r in recs]).reshape(-1, 4, 4),
        eigs=np.array([r.eigs for r in recs]).reshape(-1, 4),
        total_norm=np.array(norms),
    )
