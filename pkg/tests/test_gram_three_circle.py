import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from polyneck.annulus_basis import AnnulusField, annulus_energy, shift_field
from polyneck.errors import InvalidParameter, PreconditionError
from polyneck.gram import exp_integral, interval_gram, log_interval_gram
from polyneck.three_circle import (
    matrix_margin,
    min_L,
    mode_exponents,
    random_field_check,
    scaled_matrix,
    single_mode_ratio_via_D,
    three_circle_certificate,
    three_circle_matrix,
    three_circle_ratio,
)


# -- interval Gram ----------------------------------------------------------

def test_gram_examples():
    S = interval_gram([1, -1], 0.0, 1.0).entries
    assert S[0, 1] == 1.0
    assert S[0, 0] == pytest.approx((math.e**2 - 1) / 2, rel=1e-15)
    assert exp_integral(4, 0.0, 0.5) == pytest.approx((math.e**2 - 1) / 4, rel=1e-15)


def test_gram_rejects_bad_interval():
    with pytest.raises(InvalidParameter):
        interval_gram([1], 1.0, 1.0)
    with pytest.raises(InvalidParameter):
        interval_gram([0.5], 0.0, 1.0)


@pytest.mark.parametrize("a, b", [(-3.0, -1.0), (-0.5, 0.5), (0.0, 2.0), (1.0, 1.0 + 1e-6)])
def test_gram_against_quadrature(a, b):
    lam = [3, 1, 0, -1, -3]
    S = interval_gram(lam, a, b).entries
    for i, x in enumerate(lam):
        for j, y in enumerate(lam):
            want, _ = quad(lambda t: math.exp((x + y) * t), a, b, epsabs=0, epsrel=1e-13)
            assert S[i, j] == pytest.approx(want, rel=1e-10)


def test_log_gram_survives_overflow():
    lam = [200, -200]
    logS = log_interval_gram(lam, 10.0, 11.0)
    # ∫ e^{400 t} over [10, 11] = e^{4400}(1 - e^{-400})/400
    assert logS[0, 0] == pytest.approx(4400 - math.log(400), rel=1e-14)
    assert logS[0, 1] == pytest.approx(0.0, abs=1e-15)


# -- three-circle matrix ----------------------------------------------------

def _closed_ratio(L):
    return (math.exp(L) + math.exp(-3 * L)) / 2


def test_certificate_small_L_fails():
    assert _closed_ratio(0.1) < 1
    assert not three_circle_certificate(1, 1, 0.1).certified


def test_certificate_large_L_passes():
    assert _closed_ratio(3.0) > 1
    c = three_circle_certificate(1, 1, 3.0)
    assert c.certified and c.margin > c.threshold


def test_zero_mode_rejected():
    with pytest.raises(PreconditionError):
        three_circle_certificate(2, 0, 1.0)


@pytest.mark.parametrize("L", [0.3, 1.0, 2.0, 3.0])
def test_m1_pure_growing_mode_closed_form(L):
    # RHS/LHS for c = (1, 0) is the closed-form ratio; D[0,0] = 2 S_0[0,0] (ratio - 1)
    D = three_circle_matrix(1, 1, L)
    S0 = interval_gram([1, -1], -L / 2, L / 2).entries
    assert D[0, 0] == pytest.approx(2 * S0[0, 0] * (_closed_ratio(L) - 1), rel=1e-12)


def test_min_L_bracket():
    L1 = min_L(1, 1)
    assert 0.1 < L1 < 3
    assert min_L(1, 5) <= L1
    assert not three_circle_certificate(1, 1, L1 - 0.01).certified


def _composite_gauss(f, a, b, panels=10_000, order=4):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    t = (mid[:, None] + h[:, None] * x[None, :]).ravel()
    return float(np.sum(f(t).reshape(panels, order) * (h[:, None] * w[None, :])))


@pytest.mark.parametrize("m, n, L", [(1, 1, 1.2), (2, 1, 2.5), (2, 3, 1.0), (3, 2, 3.2)])
def test_quadratic_form_matches_quadrature(m, n, L):
    rng = np.random.default_rng(10 * m + n)
    lam = mode_exponents(m, n)
    D = three_circle_matrix(m, n, L)
    for _ in range(5):
        c = rng.standard_normal(2 * m)

        def g(t):
            return (c[None, :] * np.exp(np.outer(t, lam))).sum(axis=1) ** 2

        F = [_composite_gauss(g, (k - 1.5) * L, (k - 0.5) * L) for k in range(3)]
        want = math.exp(-L) * (F[0] + F[2]) - 2 * F[1]
        assert c @ D @ c == pytest.approx(want, rel=1e-9, abs=1e-9 * (F[0] + F[1] + F[2]))


def test_diagonal_congruence_invariance():
    D = three_circle_matrix(2, 2, 2.0)
    rng = np.random.default_rng(0)
    d = np.exp(rng.uniform(-5, 5, 4))
    ev1, thr1 = matrix_margin(D)
    ev2, thr2 = matrix_margin(D * d[:, None] * d[None, :])
    assert ev1 == pytest.approx(ev2, rel=1e-10)
    assert thr1 == pytest.approx(thr2, rel=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_scaled_matrix_matches_plain_floats(m):
    D = three_circle_matrix(m, 2, 1.7)
    d = 1 / np.sqrt(np.abs(np.diag(D)))
    assert np.allclose(scaled_matrix(m, 2, 1.7)[0], D * d[:, None] * d[None, :], atol=1e-12)


@pytest.mark.parametrize("m, n", [(1, 1), (2, 1), (2, 7), (3, 2)])
def test_translation_agrees(m, n):
    for L in np.arange(0.25, 8.01, 0.25):
        a = three_circle_certificate(m, n, L, centered=True).certified
        b = three_circle_certificate(m, n, L, centered=False).certified
        assert a == b


@pytest.mark.parametrize("m, n, L", [(2, 1, 2.5), (3, 4, 3.3), (2, 40, 0.6)])
def test_margin_against_high_precision(m, n, L):
    mpmath.mp.dps = 60
    lam = [int(v) for v in mode_exponents(m, n)]
    Lm = mpmath.mpf(L)

    def integ(alpha, a, b):
        if alpha == 0:
            return b - a
        return (mpmath.exp(alpha * b) - mpmath.exp(alpha * a)) / alpha

    k = len(lam)
    D = mpmath.matrix(k, k)
    for i in range(k):
        for j in range(k):
            s = lam[i] + lam[j]
            D[i, j] = (mpmath.exp(-Lm) * (integ(s, -1.5 * Lm, -0.5 * Lm) + integ(s, 0.5 * Lm, 1.5 * Lm))
                       - 2 * integ(s, -0.5 * Lm, 0.5 * Lm))
    for i in range(k):
        for j in range(k):
            if i != j:
                D[i, j] /= mpmath.sqrt(abs(D[i, i]) * abs(D[j, j]))
    for i in range(k):
        D[i, i] = mpmath.sign(D[i, i])
    want = min(mpmath.eigsy(D)[0])
    c = three_circle_certificate(m, n, L)
    assert c.margin == pytest.approx(float(want), abs=1e-12)


# -- random fields ----------------------------------------------------------

def test_single_mode_ratio_equivalence():
    rng = np.random.default_rng(5)
    L = 2.6
    for n in (1, 2, 5):
        C, D = tuple(rng.standard_normal(2)), tuple(rng.standard_normal(2))
        u = AnnulusField(2, modes={(n, 1): (C, D)})
        assert three_circle_ratio(u, L) == pytest.approx(single_mode_ratio_via_D(2, n, C, D, L), rel=1e-9)
        assert three_circle_ratio(u, L) < 1


def test_ratio_is_translation_invariant():
    u = AnnulusField(2, modes={(1, 1): ((1.0, -0.5), (0.3, 0.2)), (3, 2): ((0.1, 0.0), (0.0, 2.0))})
    L = 2.5
    # F_{i+1}(u) = F_i(u(· - L))
    v = shift_field(u, -L)
    for i in range(3):
        assert annulus_energy(u, i + 1, L) == pytest.approx(annulus_energy(v, i, L), rel=1e-12)


def test_random_field_check_small():
    rep = random_field_check(2, 2.5, 200, seed=1)
    assert rep.evaluated == 200 and rep.passed and rep.worst_ratio < 1


def test_pure_growing_mode_violates_below_threshold():
    u = AnnulusField(1, modes={(1, 1): ((1.0,), (0.0,))})
    assert three_circle_ratio(u, 0.1) == pytest.approx(1 / _closed_ratio(0.1), rel=1e-12)
    assert three_circle_ratio(u, 0.1) > 1


def test_random_field_check_deterministic():
    a = random_field_check(2, 2.5, 100, seed=9)
    b = random_field_check(2, 2.5, 100, seed=9)
    assert a.worst_ratio == b.worst_ratio


def test_zero_field_skipped(monkeypatch):
    import polyneck.three_circle as tc

    monkeypatch.setattr(tc, "random_zero_average_field", lambda m, rng, n_cap: AnnulusField(m))
    rep = tc.random_field_check(2, 2.5, 10, seed=0)
    assert rep.skipped == 10 and rep.evaluated == 0 and rep.passed
