"""
Long-time limits: singular-edge quadrature of the limiting overlaps,
limiting entanglement, Shannon-entropy scaling, and the empirical
trailing-window extrapolation that cross-checks all of them.

The limiting overlaps have the form

    ||Ψ_∞^i||^2 = 1/(4π^2) ∫∫ h^i(x, y) / (sqrt(c1^2 - x^2) sqrt(c2^2 - y^2)) dx dy

on (-c1, c1) x (-c2, c2) with c1 = |a|^2, c2 = |d|^2.  Gauss-Chebyshev nodes
x = c1 cos θ absorb both inverse-square-root edges exactly.

Several transcriptions of the weights h^i are shipped.  The printed
coefficient-based forms are kept for the errata table; the momentum-spectral
form is exact: with U(k) = diag(e^{-ik1}, e^{ik1}, e^{-ik2}, e^{ik2}) (U ⊗ U)
and eigenpairs (ω_m(k), v_m(k)), the Cesàro limit of ||Ψ_n^i||^2 is the torus
average of sum_m |<v_m, φ>|^2 |v_m^i|^2, and folding k_j = ±arccos(x_j / c_j)
turns that average into the double integral above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .coin import CHIRALITIES, CoinParameters, tensor_square
from .entropy import (
    CoinDensity,
    EntropySeries,
    nearest_kronecker,
    spectral_pair,
    von_neumann_entropy,
)
from .evolution import InitialState

__all__ = [
    "DegenerateCoin",
    "OutsideDomain",
    "TooShort",
    "TooFewPoints",
    "NotFactorable",
    "WeightCoefficients",
    "QuadratureGrid",
    "Transcription",
    "TRANSCRIPTIONS",
    "CALIBRATED_TRANSCRIPTION",
    "weight_coefficients",
    "grid_for",
    "weight_h",
    "chebyshev_quadrature2d",
    "limit_overlaps",
    "limit_overlap_diagonal",
    "empirical_limit",
    "empirical_overlaps",
    "limit_entanglement",
    "shannon_correction_integral",
    "scaling_fit",
    "claimed_leading_term",
]

FOUR_PI_SQ = 4.0 * math.pi**2
# the claimed leading term log2(n/4) as (slope, intercept) against log2 n
CLAIMED_SLOPE = 1.0
CLAIMED_INTERCEPT = -2.0


class DegenerateCoin(ValueError):
    """The limit theorems assume abcd != 0."""


class OutsideDomain(ValueError):
    pass


class TooShort(ValueError):
    pass


class TooFewPoints(ValueError):
    pass


class NotFactorable(ValueError):
    def __init__(self, residual: float):
        super().__init__(
            f"limiting coin density is not a Kronecker product (residual {residual:.3e} > 1e-6)"
        )
        self.residual = residual


def _require_nondegenerate(coin: CoinParameters) -> None:
    if abs(coin.abcd) <= 1e-12:
        raise DegenerateCoin(
            "limit theorems require abcd != 0 for the coin [[a, b], [c, d]]; "
            f"got |abcd| = {abs(coin.abcd):.3e}"
        )


@dataclass(frozen=True)
class WeightCoefficients:
    A: complex
    B: complex
    C: complex
    D: complex

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.A, self.B, self.C, self.D)


def weight_coefficients(
    coin: CoinParameters, phi: InitialState, variant: str = "printed"
) -> WeightCoefficients:
    """
    Coefficients A, B, C, D of the limiting weights.

    ``variant="printed"`` keeps B and C identical, as they are printed;
    ``variant="swapped"`` exchanges the (bc, ad) pair in B so that B and C
    are the R and D rows of ``U ⊗ U`` applied to φ.
    """
    _require_nondegenerate(coin)
    a, b, c, d = coin.a, coin.b, coin.c, coin.d
    al, be, ga, la = phi.components
    A = a * a * al + a * b * (be + ga) + b * b * la
    C = a * c * al + b * c * be + a * d * ga + b * d * la
    if variant == "printed":
        B = C
    elif variant == "swapped":
        B = a * c * al + a * d * be + b * c * ga + b * d * la
    else:
        raise ValueError(f"unknown coefficient variant {variant!r}")
    D = c * c * al + c * d * (be + ga) + d * d * la
    return WeightCoefficients(A, B, C, D)


@dataclass(frozen=True)
class QuadratureGrid:
    n_x: int
    n_y: int
    c1: float
    c2: float

    def __post_init__(self) -> None:
        if self.n_x < 8 or self.n_y < 8:
            raise ValueError(f"need at least 8 nodes per axis, got {self.n_x}x{self.n_y}")
        if not (0.0 < self.c1 < 1.0 and 0.0 < self.c2 < 1.0):
            raise ValueError(f"half-widths must lie in (0, 1), got {self.c1}, {self.c2}")

    def angles(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        tx = (2.0 * np.arange(1, self.n_x + 1) - 1.0) * math.pi / (2 * self.n_x)
        ty = (2.0 * np.arange(1, self.n_y + 1) - 1.0) * math.pi / (2 * self.n_y)
        return tx, ty

    def nodes(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        tx, ty = self.angles()
        return self.c1 * np.cos(tx), self.c2 * np.cos(ty)

    def mesh(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        x, y = self.nodes()
        return np.meshgrid(x, y, indexing="ij")

    def kernel(self, X, Y):
        return np.sqrt(self.c1**2 - X**2) * np.sqrt(self.c2**2 - Y**2)


def grid_for(coin: CoinParameters, n: int = 128) -> QuadratureGrid:
    return QuadratureGrid(n, n, abs(coin.a) ** 2, abs(coin.d) ** 2)


def chebyshev_quadrature2d(g: Callable, grid: QuadratureGrid) -> float:
    """
    ``∫∫ g(x, y) / (sqrt(c1^2 - x^2) sqrt(c2^2 - y^2)) dx dy`` by Gauss-Chebyshev.

    ``g`` is called once on the full node mesh and must broadcast.
    """
    X, Y = grid.mesh()
    vals = np.asarray(g(X, Y))
    return float(np.sum(vals) * (math.pi / grid.n_x) * (math.pi / grid.n_y))


# --------------------------------------------------------------------------
# weight transcriptions


def _momentum_weights(coin, phi, X, Y, c1, c2):
    T = tensor_square(coin).entries
    k1 = np.arccos(np.clip(X / c1, -1.0, 1.0))
    k2 = np.arccos(np.clip(Y / c2, -1.0, 1.0))
    v = phi.vector
    h = np.zeros((4,) + np.shape(X))
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            q1, q2 = s1 * k1, s2 * k2
            ph = np.stack(
                [np.exp(-1j * q1), np.exp(1j * q1), np.exp(-1j * q2), np.exp(1j * q2)], axis=-1
            )
            M = ph[..., :, None] * T
            _, V = np.linalg.eig(M)
            # Löwdin orthonormalization guards near-degenerate eigenvector pairs
            G = np.swapaxes(V.conj(), -1, -2) @ V
            e, Q = np.linalg.eigh(G)
            V = V @ (Q * (e ** -0.5)[..., None, :]) @ np.swapaxes(Q.conj(), -1, -2)
            amp = np.einsum("...jm,j->...m", V.conj(), v)
            F = np.einsum("...im,...m->...i", np.abs(V) ** 2, np.abs(amp) ** 2)
            h += np.moveaxis(F, -1, 0)
    return h


def _printed_weights(coin, phi, X, Y, c1, c2, *, power, denominators, coefficients, root):
    w = weight_coefficients(coin, phi, coefficients)
    a2, b2 = abs(coin.a) ** 2, abs(coin.b) ** 2
    c2_, d2 = abs(coin.c) ** 2, abs(coin.d) ** 2
    A2, B2, C2, D2 = (abs(z) ** 2 for z in w.as_tuple())
    first = ((1 - X) / (1 + X)) ** power * ((1 - Y) / (1 + Y)) ** power
    second = np.sqrt(1.0 / (1 + X)) * np.sqrt(1.0 / (1 + Y))
    if denominators == "printed":
        den1 = (a2, a2 * d2, a2 * d2, d2)
    else:
        den1 = (a2 * a2, a2 * d2, a2 * d2, d2 * d2)
    den2 = (c2_ * c2_, b2 * c2_, b2 * c2_, b2 * b2)
    num1 = (A2, B2, C2, D2)
    num2 = (D2, C2, B2, A2)
    h = np.stack([num1[i] / den1[i] * first + num2[i] / den2[i] * second for i in range(4)])
    if root == "edge":
        # kernel sqrt(c - x^2) instead of sqrt(c^2 - x^2), re-expressed on Chebyshev nodes
        h = h * (np.sqrt(c1**2 - X**2) / np.sqrt(c1 - X**2))
        h = h * (np.sqrt(c2**2 - Y**2) / np.sqrt(c2 - Y**2))
    return h


@dataclass(frozen=True)
class Transcription:
    """One reading of the weight functions h^i."""

    id: str
    kind: str
    params: dict = field(default_factory=dict)

    def weights(self, coin: CoinParameters, phi: InitialState, X, Y, c1: float, c2: float):
        """All four ``h^i`` on broadcastable ``X, Y``; shape ``(4,) + X.shape``."""
        X = np.asarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if self.kind == "momentum":
            return _momentum_weights(coin, phi, X, Y, c1, c2)
        return _printed_weights(coin, phi, X, Y, c1, c2, **self.params)


def _build_transcriptions() -> dict[str, Transcription]:
    out = {"momentum-spectral": Transcription("momentum-spectral", "momentum")}
    for power in (0.5, -0.5):
        for den in ("printed", "quartic"):
            for coef in ("printed", "swapped"):
                for root in ("square", "edge"):
                    tid = f"printed[p={power:+.1f},den={den},bc={coef},root={root}]"
                    out[tid] = Transcription(
                        tid,
                        "printed",
                        dict(power=power, denominators=den, coefficients=coef, root=root),
                    )
    return out


TRANSCRIPTIONS = _build_transcriptions()
# selected by calibrate() against n=512 simulations (scripts/calibrate.py)
CALIBRATED_TRANSCRIPTION = "momentum-spectral"


def _transcription(t: str | Transcription | None) -> Transcription:
    if t is None:
        return TRANSCRIPTIONS[CALIBRATED_TRANSCRIPTION]
    if isinstance(t, str):
        return TRANSCRIPTIONS[t]
    return t


def weight_h(
    direction: str,
    x: float,
    y: float,
    coin: CoinParameters,
    phi: InitialState,
    transcription: str | Transcription | None = None,
) -> float:
    """Pointwise weight ``h^direction(x, y)`` on the open rectangle."""
    _require_nondegenerate(coin)
    c1, c2 = abs(coin.a) ** 2, abs(coin.d) ** 2
    if not (abs(x) < c1 and abs(y) < c2):
        raise OutsideDomain(f"({x}, {y}) outside (-{c1:.6g}, {c1:.6g}) x (-{c2:.6g}, {c2:.6g})")
    h = _transcription(transcription).weights(coin, phi, np.array(x), np.array(y), c1, c2)
    return float(h[CHIRALITIES.index(direction)])


def limit_overlaps(
    coin: CoinParameters,
    phi: InitialState,
    grid: QuadratureGrid | None = None,
    transcription: str | Transcription | None = None,
) -> NDArray[np.float64]:
    """Quadrature estimates of ``||Ψ_∞^i||^2`` for i = L, R, D, U."""
    _require_nondegenerate(coin)
    grid = grid_for(coin) if grid is None else grid
    tr = _transcription(transcription)
    X, Y = grid.mesh()
    h = tr.weights(coin, phi, X, Y, grid.c1, grid.c2)
    scale = (math.pi / grid.n_x) * (math.pi / grid.n_y) / FOUR_PI_SQ
    return np.array([float(np.sum(h[i]) * scale) for i in range(4)])


def limit_overlap_diagonal(
    direction: str,
    coin: CoinParameters,
    phi: InitialState,
    grid: QuadratureGrid | None = None,
    transcription: str | Transcription | None = None,
) -> float:
    return float(limit_overlaps(coin, phi, grid, transcription)[CHIRALITIES.index(direction)])


# --------------------------------------------------------------------------
# empirical extrapolation


def empirical_limit(series, window: float = 0.5) -> tuple[float, float]:
    """Cesàro estimate over the trailing ``window`` fraction and the max deviation inside it."""
    s = np.asarray(series, dtype=np.float64)
    if s.size < 32:
        raise TooShort(f"need at least 32 samples, got {s.size}")
    if not 0.0 < window <= 1.0:
        raise ValueError(f"window fraction must lie in (0, 1], got {window}")
    k = max(1, int(math.ceil(s.size * window)))
    tail = s[-k:]
    est = float(np.mean(tail))
    return est, float(np.max(np.abs(tail - est)))


def empirical_overlaps(series: EntropySeries, window: float = 0.5) -> tuple[NDArray, NDArray]:
    """Trailing-window limits of the four norms and the six complex cross overlaps."""
    diag = np.array([empirical_limit(series.rho[:, i, i].real, window)[0] for i in range(4)])
    cross = []
    for i in range(4):
        for j in range(i + 1, 4):
            re = empirical_limit(series.rho[:, i, j].real, window)[0]
            im = empirical_limit(series.rho[:, i, j].imag, window)[0]
            cross.append(complex(re, im))
    return diag, np.array(cross)


def limiting_density(diag, cross) -> CoinDensity:
    m = np.zeros((4, 4), dtype=np.complex128)
    k = 0
    for i in range(4):
        m[i, i] = diag[i]
        for j in range(i + 1, 4):
            m[i, j] = cross[k]
            m[j, i] = np.conj(cross[k])
            k += 1
    return CoinDensity(m)


def entropy_from_pairs(first: NDArray, second: NDArray) -> float:
    """Entanglement of ``first ⊗ second`` from each factor's determinant."""
    p1 = spectral_pair(float(np.linalg.det(first).real))
    p2 = spectral_pair(float(np.linalg.det(second).real))
    eigs = [x * y for x in (p1.r_plus, p1.r_minus) for y in (p2.r_plus, p2.r_minus)]
    return von_neumann_entropy(eigs)


def limit_entanglement(
    coin: CoinParameters,
    phi: InitialState,
    method: str,
    series: EntropySeries | None = None,
    grid: QuadratureGrid | None = None,
    window: float = 0.5,
    transcription: str | Transcription | None = None,
    n_max: int = 512,
) -> float:
    """
    Limiting coin-position entanglement in bits.

    ``method="empirical"`` averages the trailing window of the S_n^c series.
    ``method="quadrature"`` builds the limiting density from quadrature norms
    and empirical cross overlaps and reads the entropy off its Kronecker
    factors; it raises NotFactorable when that density is not a product.
    """
    if method not in ("quadrature", "empirical"):
        raise ValueError(f"unknown method {method!r}")
    if method == "quadrature":
        _require_nondegenerate(coin)
    if series is None:
        from .entropy import entropy_series

        series = entropy_series(coin, phi, n_max)
    if method == "empirical":
        return empirical_limit(series.s_c, window)[0]
    diag = limit_overlaps(coin, phi, grid, transcription)
    _, cross = empirical_overlaps(series, window)
    fit = nearest_kronecker(limiting_density(diag, cross))
    if fit.residual > 1e-6:
        raise NotFactorable(fit.residual)
    return entropy_from_pairs(fit.first, fit.second)


def shannon_correction_integral(
    target: str,
    coin: CoinParameters,
    phi: InitialState,
    grid: QuadratureGrid | None = None,
    transcription: str | Transcription | None = None,
) -> float:
    """
    ``∫∫ (f^W/ρ^W) log2(f^W/ρ^W) dx dy`` for W in L, R, D, U, or
    ``∫∫ f log2 f dx dy`` for ``target="total"``.

    f^W carries the 1/(4π^2) prefactor so that ``∫∫ f^W = ρ^W``.
    """
    _require_nondegenerate(coin)
    grid = grid_for(coin) if grid is None else grid
    tr = _transcription(transcription)
    X, Y = grid.mesh()
    h = tr.weights(coin, phi, X, Y, grid.c1, grid.c2)
    K = grid.kernel(X, Y)
    w = (math.pi / grid.n_x) * (math.pi / grid.n_y)
    if target == "total":
        g = h.sum(axis=0) / FOUR_PI_SQ
    else:
        i = CHIRALITIES.index(target)
        rho = float(np.sum(h[i]) * w / FOUR_PI_SQ)
        g = h[i] / (FOUR_PI_SQ * rho)
    # integrand on the Chebyshev measure: K * (g/K) log2(g/K) = g log2(g/K)
    mask = g > 1e-300
    vals = np.zeros_like(g)
    vals[mask] = g[mask] * np.log2(g[mask] / K[mask])
    return float(np.sum(vals) * w)


def claimed_leading_term(n) -> NDArray[np.float64]:
    return CLAIMED_SLOPE * np.log2(np.asarray(n, dtype=np.float64)) + CLAIMED_INTERCEPT


def scaling_fit(ns, values, n_min: int, n_max: int) -> tuple[float, float, float]:
    """Least-squares fit ``S_n ≈ slope * log2 n + intercept`` over ``n_min <= n <= n_max``."""
    ns = np.asarray(ns, dtype=np.float64)
    vals = np.asarray(values, dtype=np.float64)
    sel = (ns >= n_min) & (ns <= n_max) & np.isfinite(vals)
    if n_min < 16 or sel.sum() < 6:
        raise TooFewPoints(f"need >= 6 points with n_min >= 16, got {int(sel.sum())} (n_min={n_min})")
    x = np.log2(ns[sel])
    y = vals[sel]
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
