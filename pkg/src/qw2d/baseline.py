"""Symmetric simple random walk on Z: the classical Shannon-entropy reference."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import gammaln

__all__ = [
    "TooShort",
    "BinomialDistribution",
    "binomial_distribution",
    "rw_entropy",
    "RWLimitReport",
    "rw_limit_report",
    "CLAIMED_SECOND_ORDER",
]

# (1/2) log2(2πe)
CLAIMED_SECOND_ORDER = 0.5 * math.log2(2 * math.pi * math.e)


class TooShort(ValueError):
    pass


@dataclass(frozen=True)
class BinomialDistribution:
    n: int
    positions: NDArray[np.int64]
    probabilities: NDArray[np.float64]


def binomial_distribution(n: int) -> BinomialDistribution:
    """``p(-n + 2k) = C(n, k) / 2^n`` via log-gamma, safe up to n = 2^20 and beyond."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    k = np.arange(n + 1, dtype=np.float64)
    logp = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0) - n * math.log(2.0)
    p = np.exp(logp)
    # enforce the exact mirror symmetry that rounding in gammaln can break
    p = 0.5 * (p + p[::-1])
    return BinomialDistribution(n, (2 * np.arange(n + 1) - n).astype(np.int64), p)


def rw_entropy(n: int) -> float:
    """Shannon entropy in bits of the n-step symmetric walk."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    k = np.arange(n + 1, dtype=np.float64)
    logp = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0) - n * math.log(2.0)
    p = np.exp(logp)
    keep = p > 0
    return float(-np.sum(p[keep] * logp[keep]) / math.log(2.0))


@dataclass(frozen=True)
class RWLimitReport:
    n: NDArray[np.int64]
    entropy: NDArray[np.float64]
    ratio: NDArray[np.float64]
    bracket: NDArray[np.float64]
    ratio_estimate: float
    bracket_estimate: float
    claimed_constant: float

    @property
    def offset(self) -> float:
        return self.bracket_estimate - self.claimed_constant

    def summary(self) -> dict:
        return {
            "n_max": int(self.n[-1]),
            "ratio_at_n_max": float(self.ratio[-1]),
            "ratio_trailing_mean": self.ratio_estimate,
            "bracket_at_n_max": float(self.bracket[-1]),
            "bracket_trailing_mean": self.bracket_estimate,
            "bracket_limit_measured": self.bracket_estimate,
            "claimed_constant": self.claimed_constant,
            "difference": self.offset,
        }


def rw_limit_report(n_max: int, n_min: int = 16) -> RWLimitReport:
    """
    Both limiting sequences at powers of two ``n_min .. n_max``:
    ``S/log2(sqrt n)`` and ``log2(sqrt n) (S/log2(sqrt n) - 1)``.
    """
    if n_max < 2**10:
        raise TooShort(f"n_max must be at least 1024, got {n_max}")
    ns = []
    n = n_min
    while n <= n_max:
        ns.append(n)
        n *= 2
    ns = np.array(ns, dtype=np.int64)
    s = np.array([rw_entropy(int(m)) for m in ns])
    half_log = 0.5 * np.log2(ns.astype(np.float64))
    ratio = s / half_log
    bracket = half_log * (ratio - 1.0)
    k = max(1, len(ns) // 2)
    return RWLimitReport(
        n=ns,
        entropy=s,
        ratio=ratio,
        bracket=bracket,
        ratio_estimate=float(np.mean(ratio[-k:])),
        bracket_estimate=float(np.mean(bracket[-k:])),
        claimed_constant=CLAIMED_SECOND_ORDER,
    )
