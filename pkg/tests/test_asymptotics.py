import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SUITE_COINS, SUITE_STATES, cached_series
from qw2d.asymptotics import (
    CALIBRATED_TRANSCRIPTION,
    TRANSCRIPTIONS,
    DegenerateCoin,
    NotFactorable,
    OutsideDomain,
    QuadratureGrid,
    TooFewPoints,
    TooShort,
    chebyshev_quadrature2d,
    empirical_limit,
    entropy_from_pairs,
    grid_for,
    limit_entanglement,
    limit_overlaps,
    scaling_fit,
    shannon_correction_integral,
    weight_coefficients,
    weight_h,
)
from qw2d.coin import build_coin, coin_from_angle
from qw2d.evolution import InitialState
from qw2d.sampling import random_coin, random_state

PRINTED = "printed[p=+0.5,den=printed,bc=printed,root=square]"


# -- coefficients ---------------------------------------------------------------

def test_weight_coefficients_hadamard_L(hadamard, phi_L):
    w = weight_coefficients(hadamard, phi_L)
    # a = b = c = 1/sqrt2, d = -1/sqrt2 with phi = |L>
    assert w.A == pytest.approx(0.5)
    assert w.B == pytest.approx(0.5)
    assert w.C == pytest.approx(0.5)
    assert w.D == pytest.approx(0.5)


def test_weight_coefficients_swapped_differs():
    coin = coin_from_angle(math.pi / 3)
    phi = InitialState(0, 1, 0, 0)
    printed = weight_coefficients(coin, phi, "printed")
    swapped = weight_coefficients(coin, phi, "swapped")
    a, b, c, d = coin.a, coin.b, coin.c, coin.d
    assert printed.B == pytest.approx(b * c)
    assert swapped.B == pytest.approx(a * d)
    assert printed.C == swapped.C


def test_degenerate_coin(identity_coin, phi_L):
    with pytest.raises(DegenerateCoin, match="abcd"):
        weight_coefficients(identity_coin, phi_L)
    with pytest.raises(DegenerateCoin):
        limit_overlaps(build_coin(0, 1, -1), phi_L)


def test_weight_h_domain(hadamard, phi_L):
    assert weight_h("L", 0.1, -0.2, hadamard, phi_L) >= 0.0
    with pytest.raises(OutsideDomain):
        weight_h("L", 0.6, 0.0, hadamard, phi_L)


# -- quadrature ---------------------------------------------------------------------

@pytest.mark.parametrize("c1,c2", [(0.5, 0.5), (0.25, 0.75), (0.9, 0.1)])
def test_quadrature_unit_checks(c1, c2):
    grid = QuadratureGrid(64, 64, c1, c2)
    assert abs(chebyshev_quadrature2d(lambda X, Y: np.ones_like(X), grid) - math.pi**2) < 1e-10
    half = chebyshev_quadrature2d(lambda X, Y: X**2 / c1**2, grid)
    assert abs(half - math.pi**2 / 2) < 1e-10
    quarter = chebyshev_quadrature2d(lambda X, Y: np.ones_like(X), grid) / (4 * math.pi**2)
    assert abs(quarter - 0.25) < 1e-10


def test_quadrature_grid_validation():
    with pytest.raises(ValueError):
        QuadratureGrid(4, 64, 0.5, 0.5)
    with pytest.raises(ValueError):
        QuadratureGrid(64, 64, 1.0, 0.5)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_overlaps_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    coin, phi = random_coin(rng, min_abcd=1e-3), random_state(rng)
    q = limit_overlaps(coin, phi, grid_for(coin, 32))
    assert abs(q.sum() - 1.0) < 1e-6
    assert np.all(q >= -1e-12)


def test_transcription_table():
    assert CALIBRATED_TRANSCRIPTION in TRANSCRIPTIONS
    assert len(TRANSCRIPTIONS) == 17


@pytest.mark.parametrize("tid", [CALIBRATED_TRANSCRIPTION, PRINTED])
def test_quadrature_convergence(tid):
    # doubling N from 128 must move every overlap by less than 1e-8
    coin, phi = SUITE_COINS["theta_pi_3"], SUITE_STATES["uniform"]
    q128 = limit_overlaps(coin, phi, grid_for(coin, 128), tid)
    q256 = limit_overlaps(coin, phi, grid_for(coin, 256), tid)
    assert np.abs(q256 - q128).max() < 1e-8


@pytest.mark.slow
@pytest.mark.parametrize("cname", ["theta_pi_3", "complex"])
def test_quadrature_matches_simulation(cname):
    coin, phi = SUITE_COINS[cname], SUITE_STATES["L"]
    series = cached_series(coin, phi, 512)
    emp = np.array([empirical_limit(series.rho[:, i, i].real)[0] for i in range(4)])
    q = limit_overlaps(coin, phi, grid_for(coin, 128))
    assert np.abs(q - emp).max() < 1e-2


# -- empirical extrapolation -----------------------------------------------------------

def test_empirical_limit_constant():
    est, dev = empirical_limit(np.full(64, 0.7))
    assert est == pytest.approx(0.7, abs=1e-15)
    assert dev == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("n_max", [64, 256, 1024])
def test_empirical_limit_damped_alternation(n_max):
    n = np.arange(1, n_max + 1)
    est, _ = empirical_limit(0.3 + 0.1 * (-1.0) ** n / n)
    assert abs(est - 0.3) < 10 / n_max


def test_empirical_limit_too_short():
    with pytest.raises(TooShort):
        empirical_limit(np.zeros(31))


# -- scaling fit ---------------------------------------------------------------

def test_scaling_fit_recovers_line():
    ns = np.arange(1, 513)
    slope, intercept, r2 = scaling_fit(ns, 1.0 * np.log2(ns) - 2.0, 64, 512)
    assert slope == pytest.approx(1.0, abs=1e-12)
    assert intercept == pytest.approx(-2.0, abs=1e-12)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_scaling_fit_noise_lowers_r2():
    ns = np.arange(1, 513)
    vals = np.log2(ns) + 0.3 * np.sin(ns)
    assert scaling_fit(ns, vals, 64, 512)[2] < 0.999


def test_scaling_fit_too_few_points():
    ns = np.arange(1, 513)
    with pytest.raises(TooFewPoints):
        scaling_fit(ns, np.log2(ns), 8, 512)
    with pytest.raises(TooFewPoints):
        scaling_fit(ns, np.log2(ns), 100, 104)


# -- limiting entanglement and corrections ------------------------------------------

def test_entropy_from_pairs_extremes():
    pure = np.array([[1, 0], [0, 0]], dtype=complex)
    mixed = np.eye(2, dtype=complex) / 2
    assert entropy_from_pairs(pure, pure) == pytest.approx(0.0, abs=1e-12)
    assert entropy_from_pairs(mixed, mixed) == pytest.approx(2.0, abs=1e-12)
    assert entropy_from_pairs(pure, mixed) == pytest.approx(1.0, abs=1e-12)


def test_limit_entanglement_empirical_and_quadrature(hadamard, phi_L):
    series = cached_series(hadamard, phi_L, 512)
    s = limit_entanglement(hadamard, phi_L, "empirical", series=series)
    assert 0.0 < s < 2.0
    try:
        s_quad = limit_entanglement(hadamard, phi_L, "quadrature", series=series)
    except NotFactorable as exc:
        assert exc.residual > 1e-6
    else:
        assert abs(s_quad - s) < 1e-2


def test_limit_entanglement_rejects_unknown_method(hadamard, phi_L):
    with pytest.raises(ValueError):
        limit_entanglement(hadamard, phi_L, "guess")


def test_correction_integrals_finite():
    coin, phi = coin_from_angle(math.pi / 4), InitialState(1, 0, 0, 0)
    grid = grid_for(coin, 64)
    val = shannon_correction_integral("total", coin, phi, grid)
    assert np.isfinite(val)
    for w in "LRDU":
        assert np.isfinite(shannon_correction_integral(w, coin, phi, grid))


def test_correction_integral_constant_integrand():
    # h ≡ 1 makes each normalized f^W the product of two arcsine densities on
    # (-c, c), whose differential entropy is log2(πc/2) per axis; the log
    # singularity at the edges limits Gauss-Chebyshev to O(1/N) here
    coin = coin_from_angle(math.pi / 4)
    phi = InitialState(1, 0, 0, 0)

    class Flat:
        def weights(self, coin, phi, X, Y, c1, c2):
            return np.ones((4,) + np.shape(X))

    want = -2 * math.log2(math.pi * 0.5 / 2)
    for n in (64, 256, 1024):
        got = shannon_correction_integral("L", coin, phi, grid_for(coin, n), Flat())
        assert abs(got - want) < 2.5 / n
