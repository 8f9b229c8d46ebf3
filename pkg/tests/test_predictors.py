import math

import mpmath
import pytest

from irgcouple.kernels import ScalingSequence
from irgcouple.properties.predictors import (DegenerateProduct, DomainError, HypothesisViolation,
                                             PredictionWindow, d_from_peak, ell_from_product,
                                             kl_divergence_bernoulli, predict_chromatic_dense_d,
                                             predict_chromatic_sparse_ell, predict_quasi_clique,
                                             refined_center, slowly_varying_ratio, sparse_regime)
from oracles import mp_d, mp_ell, mp_kl

@pytest.mark.parametrize("g,p", [(0.9, 0.5), (1.0, 0.5), (0.75, 0.1), (0.0, 0.3), (0.51, 0.5)])
def test_kl_against_mpmath(g, p):
    assert kl_divergence_bernoulli(g, p) == pytest.approx(float(mp_kl(g, p)), rel=1e-13, abs=1e-15)


def test_kl_properties():
    assert kl_divergence_bernoulli(0.3, 0.3) == 0.0
    assert kl_divergence_bernoulli(1.0, 0.5) == pytest.approx(math.log(2), abs=1e-12)
    assert kl_divergence_bernoulli(1.0, 0.2) == pytest.approx(-math.log(0.2))
    vals = [kl_divergence_bernoulli(g / 100, 0.4) for g in range(41, 101)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert all(kl_divergence_bernoulli(g / 20, 0.4) >= 0 for g in range(21))
    for bad in [(0.5, 0.0), (0.5, 1.0), (1.2, 0.5)]:
        with pytest.raises(DomainError):
            kl_divergence_bernoulli(*bad)


@pytest.mark.parametrize("x", [0.5, 2.0, 2.0001 * math.log(2), 10.0, 11.09, 11.1, 37.0, 150.0, 1e3])
def test_ell_against_scan(x):
    assert ell_from_product(x) == mp_ell(x)


def test_ell_examples():
    assert ell_from_product(10) == 4
    assert ell_from_product(0.5) == 2
    # the defining inequality is non-strict: x = 2 (l-1) log(l-1) gives l
    assert ell_from_product(2 * 4 * math.log(4)) == 5
    with pytest.raises(DegenerateProduct):
        ell_from_product(0.0)


def test_sparse_window_depends_on_product_only():
    a = predict_chromatic_sparse_ell(0.01, 1001)[1]
    b = predict_chromatic_sparse_ell(0.005, 2001)[1]
    assert a.members == b.members
    ell, win = predict_chromatic_sparse_ell(10 / 99, 100)
    assert ell == 4 and win.members in ((4, 5), (4, 5, 6))


def test_sparse_window_narrowing():
    ell = 5
    inside = 0.5 * ((2 * ell - 1) * math.log(ell) + 2 * ell * math.log(ell))
    got, win = predict_chromatic_sparse_ell(inside / 99, 100)
    assert got == ell and win.members == (5, 6) and win.flags["narrowed"]
    got, win = predict_chromatic_sparse_ell(8.5 / 99, 100)
    assert win.members == (got, got + 1, got + 2)


def test_sparse_regime_flag():
    lam = ScalingSequence("power", 1.0, 0.8)
    flags = sparse_regime(lam)
    assert flags["delta"] == pytest.approx(0.05) and flags["in_regime"]
    _, win = predict_chromatic_sparse_ell(1999 / 2000 ** 0.8, 2000, scaling=lam)
    assert win.flags["delta"] == pytest.approx(0.05)
    assert not sparse_regime(ScalingSequence("power", 1.0, 0.7))["in_regime"]


@pytest.mark.parametrize("k", [0.1, 1.0, 2.0, 3.0, 5.5, 20.0, 100.0])
def test_d_against_scan(k):
    assert d_from_peak(k) == mp_d(k)


def test_dense_window():
    assert predict_chromatic_dense_d(3)[0] == 3
    assert predict_chromatic_dense_d(20)[0] == 6
    d, win = predict_chromatic_dense_d(3)
    assert win.members == (3, 4) and win.flags["narrowing_condition_ambiguous"]
    d, win = predict_chromatic_dense_d(6.0)  # in (5 log 3, 6 log 3)
    assert d == 3 and win.members == (3,)
    with pytest.raises(DomainError):
        d_from_peak(0)


def test_quasi_clique_window_values():
    win = predict_quasi_clique(1000, 0.9, 0.5, 0.35)
    with mpmath.workdps(40):
        D = mp_kl(0.9, 0.5)
        omega = 2 * mpmath.log(1000) / D
        B = (2 / D) * (mpmath.log(1000) - mpmath.log(mpmath.log(1000)) + mpmath.log(mpmath.e * D / 2))
    assert win.center == pytest.approx(float(omega), rel=1e-13)
    assert win.params["refined_center"] == pytest.approx(float(B), rel=1e-13)
    assert abs(win.center - 37.53) < 1e-2
    assert refined_center(1000, 0.9, 0.5) == pytest.approx(23.2702088, abs=1e-6)
    assert win.interval == pytest.approx((0.65 * win.center, 1.35 * win.center))
    g1 = predict_quasi_clique(500, 1.0, 0.5, 0.35, 1.0)
    assert g1.flags["gamma_one"]
    assert g1.refined == pytest.approx((g1.params["refined_center"] - 1, g1.params["refined_center"] + 2))


def test_quasi_clique_preconditions():
    with pytest.raises(HypothesisViolation):
        predict_quasi_clique(100, 0.5, 0.5, 0.1)
    with pytest.raises(HypothesisViolation):
        predict_quasi_clique(100, 1.01, 0.5, 0.1)
    near = predict_quasi_clique(100, 0.5 + 1e-6, 0.5, 0.1)
    assert near.flags["diverging"] and near.center > 1e9


def test_window_membership_helpers():
    w = PredictionWindow("x", interval=(2.5, 4.5), refined=(3.0, 3.5))
    assert w.contains(3) and not w.contains(5)
    assert w.contains(3, "refined") and not w.contains(4, "refined")
    assert w.bracket_inside(3, 4) and not w.bracket_inside(3, 5)
    assert w.bracket_outside(5, 9) and not w.bracket_outside(4, 9)
    with pytest.raises(ValueError):
        PredictionWindow("x", interval=(3, 2))


def test_slowly_varying_ratio():
    def inv_log(n):
        return 1 / math.log(n)

    assert slowly_varying_ratio(10**6, inv_log) == pytest.approx(
        1 + math.log(1 / math.log(10**6)) / math.log(10**6))
    assert slowly_varying_ratio(10**6, inv_log) == pytest.approx(0.8099, abs=1e-4)
    assert slowly_varying_ratio(10**9, inv_log) == pytest.approx(0.8537, abs=1e-4)
    ratios = [slowly_varying_ratio(10**k, inv_log) for k in (3, 4, 6, 9, 15)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
