import random
from fractions import Fraction

import pytest
import sympy as sp

from polyneck.errors import InvalidParameter
from polyneck.operator_poly import (
    build_operator_polynomial,
    evaluate_at_mode,
    laplacian_mode_oracle,
    radial_factorization,
    radial_restriction,
    recursion_step,
    verify_structure,
)


def test_m1_is_cylinder_laplacian():
    assert build_operator_polynomial(1).coeffs == {(2, 0): 1, (0, 1): 1}


def test_m2_hand_expansion():
    # (∂_t^2 + Δ)^2 - 4∂_t^2
    assert build_operator_polynomial(2).coeffs == {(4, 0): 1, (2, 1): 2, (0, 2): 1, (2, 0): -4}


def test_m3_radial_slice():
    P = build_operator_polynomial(3)
    assert (P[(6, 0)], P[(4, 0)], P[(2, 0)]) == (1, -20, 64)


@pytest.mark.parametrize("m", [0, 13, -1])
def test_out_of_range(m):
    with pytest.raises(InvalidParameter):
        build_operator_polynomial(m)


def test_cap_is_configurable():
    assert build_operator_polynomial(14, max_m=16).m == 14


@pytest.mark.parametrize("m", range(1, 13))
def test_type_invariants(m):
    P = build_operator_polynomial(m)
    assert all(1 <= p + 2 * q <= 2 * m for p, q in P.coeffs)
    assert (0, 0) not in P.coeffs
    assert P[(2 * m, 0)] == 1 and P[(0, m)] == 1
    assert all(p % 2 == 0 for p, _ in P.coeffs)
    assert all(a != 0 for a in P.coeffs.values())


@pytest.mark.parametrize(
    "m, expected",
    [(1, (0, 0, 1)), (2, (0, 0, -4, 0, 1)), (3, (0, 0, 64, 0, -20, 0, 1))],
)
def test_radial_restriction_examples(m, expected):
    assert radial_restriction(build_operator_polynomial(m)) == expected


@pytest.mark.parametrize("m", range(1, 13))
def test_radial_factorization_against_sympy(m):
    X = sp.symbols("X")
    expr = sp.expand(X**2 * sp.prod([X**2 - (2 * j) ** 2 for j in range(1, m)]))
    want = tuple(int(c) for c in reversed(sp.Poly(expr, X).all_coeffs()))
    assert radial_factorization(m) == want
    assert radial_restriction(build_operator_polynomial(m)) == want


def test_evaluate_examples():
    P2 = build_operator_polynomial(2)
    assert evaluate_at_mode(P2, 1, -3) == 0
    assert evaluate_at_mode(P2, 2, 0) == 0
    for m in range(1, 6):
        assert evaluate_at_mode(build_operator_polynomial(m), 0, 0) == 0


def test_oracle_examples():
    assert laplacian_mode_oracle(2, 1, 3) == 0
    assert laplacian_mode_oracle(1, 5, 0) == 25
    assert laplacian_mode_oracle(2, 0, 0) == 0


@pytest.mark.parametrize("m", range(1, 13))
def test_evaluate_matches_oracle(m):
    rng = random.Random(1000 + m)
    P = build_operator_polynomial(m)
    for _ in range(200):
        lam = Fraction(rng.randint(-60, 60), rng.randint(1, 9))
        mu = Fraction(rng.randint(0, 400), rng.randint(1, 9))
        assert evaluate_at_mode(P, lam, -mu) == laplacian_mode_oracle(m, lam, mu)


def _cartesian_laplacian_power(expr, xs, m):
    for _ in range(m):
        expr = sum(sp.diff(expr, x, 2) for x in xs)
        expr = sp.powsimp(sp.factor_terms(sp.together(expr)))
    return expr


@pytest.mark.parametrize("m, lam, harmonic", [
    (2, sp.Rational(5, 2), "x0"),
    (2, 3, "x0*x1"),
    (3, sp.Rational(7, 3), "x0"),
])
def test_operator_against_cartesian_laplacian(m, lam, harmonic):
    """Δ^m (r^λ φ_n) = P_m(λ, -μ_n) r^{λ-2m} φ_n, with φ_n = h/r^n."""
    xs = sp.symbols(f"x0:{2 * m}", positive=True)
    h = sp.sympify(harmonic, locals={str(x): x for x in xs})
    n = sp.Poly(h, *xs).total_degree()
    r = sp.sqrt(sum(x**2 for x in xs))
    u = r ** (lam - n) * h
    lhs = _cartesian_laplacian_power(u, xs, m)
    point = {x: sp.Rational(k + 1, 3) for k, x in enumerate(xs)}
    ratio = sp.N((lhs / (r ** (lam - 2 * m - n) * h)).subs(point), 40)
    mu = n * (n + 2 * m - 2)
    want = evaluate_at_mode(build_operator_polynomial(m), Fraction(str(lam)), -mu)
    assert abs(ratio - sp.Rational(want.numerator, want.denominator)) < sp.Float("1e-30", 40)


@pytest.mark.parametrize("m", [1, 2, 8])
def test_structure_examples(m):
    rep = verify_structure(build_operator_polynomial(m))
    assert rep.ok and rep.offending is None


def test_structure_flags_bad_polynomial():
    P = build_operator_polynomial(3)
    bad = type(P)(m=3, coeffs={**P.coeffs, (3, 0): 7})
    rep = verify_structure(bad)
    assert not rep.no_odd_p and rep.offending == (3, 0, 7)
    flipped = type(P)(m=3, coeffs={**P.coeffs, (4, 0): 20})
    rep = verify_structure(flipped)
    assert not rep.signs and not rep.factorization


@pytest.mark.parametrize("m", range(2, 13))
def test_recursion_consistency(m):
    P = build_operator_polynomial(m)
    assert recursion_step(P.intermediates[m - 1], m, m - 1) == P.coeffs
    assert P.intermediates[m] == P.coeffs
    assert P.intermediates[1] == {k: v for k, v in
                                 {(2, 0): 1, (1, 0): 2 * (m - 1), (0, 1): 1}.items() if v}
