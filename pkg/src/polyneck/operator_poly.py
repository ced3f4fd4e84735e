"""The constant-coefficient polynomial P_m with

    Δ^m u = e^{-2mt} P_m(∂_t, Δ_S) u

in cylinder coordinates (t = log|x|) on R^{2m} minus the origin.

Polynomials in the two commuting symbols X = ∂_t and Y = Δ_S are stored as
dicts ``{(p, q): a}`` meaning Σ a X^p Y^q, with zero entries pruned.  All
arithmetic is exact (int / Fraction).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from polyneck.errors import InvalidParameter

DEFAULT_MAX_M = 12

Coeffs = Dict[Tuple[int, int], int]


def _prune(coeffs: Mapping[Tuple[int, int], int]) -> Coeffs:
    return {key: a for key, a in sorted(coeffs.items()) if a != 0}


def poly_mul(f: Mapping, g: Mapping) -> Coeffs:
    out: Coeffs = {}
    for (p1, q1), a in f.items():
        for (p2, q2), b in g.items():
            key = (p1 + p2, q1 + q2)
            out[key] = out.get(key, 0) + a * b
    return _prune(out)


def step_factor(m: int, l: int) -> Coeffs:
    """The factor □_l + b_l ∂_t taking P_l to P_{l+1} (target dimension 2m)."""
    box_shift = -4 * l * (m - 1 - l)
    b = 2 * (m - 1 - 2 * l)
    return _prune({(2, 0): 1, (0, 1): 1, (1, 0): b, (0, 0): box_shift})


def recursion_step(coeffs: Mapping, m: int, l: int) -> Coeffs:
    """Apply one step of the recursion: P_{l+1} = (□_l + b_l ∂_t) P_l."""
    return poly_mul(step_factor(m, l), coeffs)


@dataclass(frozen=True)
class OperatorPolynomial:
    m: int
    coeffs: Dict[Tuple[int, int], int]
    # intermediates[l] is P_l for the same target m; intermediates[m] is P_m
    intermediates: Tuple[Dict[Tuple[int, int], int], ...] = field(
        default=(), repr=False, compare=False
    )

    def __getitem__(self, key: Tuple[int, int]) -> int:
        return self.coeffs.get(key, 0)

    def degree(self) -> int:
        return max(p + 2 * q for p, q in self.coeffs)


def build_operator_polynomial(m: int, max_m: int = DEFAULT_MAX_M) -> OperatorPolynomial:
    """Build P_m by the exact product recursion starting from P_0 = 1.

    >>> build_operator_polynomial(2).coeffs
    {(0, 2): 1, (2, 0): -4, (2, 1): 2, (4, 0): 1}
    """
    if not isinstance(m, int) or isinstance(m, bool) or m < 1 or m > max_m:
        raise InvalidParameter(f"m must be an integer in [1, {max_m}], got {m!r}")
    current: Coeffs = {(0, 0): 1}
    chain = [current]
    for l in range(m):
        current = recursion_step(current, m, l)
        chain.append(current)
    return OperatorPolynomial(m=m, coeffs=current, intermediates=tuple(chain))


def radial_restriction(P: OperatorPolynomial) -> Tuple[int, ...]:
    """Coefficients of P(X, 0) in ascending powers of X."""
    deg = max(p for p, _ in P.coeffs)
    out = [0] * (deg + 1)
    for (p, q), a in P.coeffs.items():
        if q == 0:
            out[p] = a
    return tuple(out)


def radial_factorization(m: int) -> Tuple[int, ...]:
    """Expand X^2 Π_{j=1}^{m-1} (X^2 - (2j)^2) in ascending powers of X."""
    poly = [0, 0, 1]
    for j in range(1, m):
        c = -(2 * j) ** 2
        nxt = [0] * (len(poly) + 2)
        for i, a in enumerate(poly):
            nxt[i + 2] += a
            nxt[i] += c * a
        poly = nxt
    return tuple(poly)


def evaluate_at_mode(P: OperatorPolynomial, lam, eig) -> Fraction:
    """Substitute ∂_t -> lam and Δ_S -> eig exactly."""
    lam = Fraction(lam)
    eig = Fraction(eig)
    return sum((a * lam**p * eig**q for (p, q), a in P.coeffs.items()), Fraction(0))


def laplacian_mode_oracle(m: int, lam, mu) -> Fraction:
    # Δ(r^λ φ) = (λ(λ+2m-2) - μ) r^{λ-2} φ for Δ_S φ = -μ φ, iterated m times
    lam = Fraction(lam)
    mu = Fraction(mu)
    out = Fraction(1)
    for j in range(m):
        e = lam - 2 * j
        out *= e * (e + 2 * m - 2) - mu
    return out


@dataclass(frozen=True)
class StructureReport:
    m: int
    no_odd_p: bool
    signs: bool
    factorization: bool
    offending: Optional[Tuple[int, int, int]] = None

    @property
    def ok(self) -> bool:
        return self.no_odd_p and self.signs and self.factorization


def verify_structure(P: OperatorPolynomial) -> StructureReport:
    m = P.m
    offending = None

    no_odd_p = True
    for (p, q), a in P.coeffs.items():
        if p % 2:
            no_odd_p = False
            offending = offending or (p, q, a)

    signs = True
    for p in range(2, 2 * m + 1, 2):
        a = P[(p, 0)]
        if (-1) ** (m - p // 2) * a <= 0:
            signs = False
            offending = offending or (p, 0, a)

    radial = radial_restriction(P)
    expected = radial_factorization(m)
    factorization = radial == expected
    if not factorization and offending is None:
        for p in range(max(len(radial), len(expected))):
            got = radial[p] if p < len(radial) else 0
            want = expected[p] if p < len(expected) else 0
            if got != want:
                offending = (p, 0, got)
                break

    return StructureReport(m, no_odd_p, signs, factorization, offending)
