"""Exact one-variable jet algebra Q[w_0, w_1, ...] with the derivation
D: w_j -> w_{j+1}, used to check integration-by-parts identities for
∂_t^{2n} w · ∂_t w and the radial Pohozaev form.

Real-valued w stands in for the vector-valued map: every identity used is
bilinear and symmetric in the two factors, so products may be taken to
commute.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple, Union

from polyneck.errors import InvalidParameter
from polyneck.operator_poly import build_operator_polynomial

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


class JetPolynomial:
    """Finite sum of monomials Π w_{j_i}, keyed by the sorted orders (j_1 <= j_2 <= ...)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Iterable[int], Scalar] = ()):
        acc: Dict[Monomial, Fraction] = {}
        for key, c in dict(terms).items():
            key = tuple(sorted(key))
            if any(j < 0 for j in key):
                raise InvalidParameter(f"negative jet order in {key}")
            acc[key] = acc.get(key, Fraction(0)) + Fraction(c)
        self.terms: Dict[Monomial, Fraction] = {k: v for k, v in sorted(acc.items()) if v != 0}

    @classmethod
    def w(cls, j: int) -> "JetPolynomial":
        return cls({(j,): 1})

    @classmethod
    def const(cls, c: Scalar) -> "JetPolynomial":
        return cls({(): c})

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return JetPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return JetPolynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: Dict[Monomial, Fraction] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                key = tuple(sorted(k1 + k2))
                out[key] = out.get(key, 0) + v1 * v2
        return JetPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = JetPolynomial.const(other)
        if not isinstance(other, JetPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.terms.items():
            mono = "*".join(f"w{j}" if e == 1 else f"w{j}^{e}" for j, e in sorted(Counter(key).items()))
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def _coerce(x) -> JetPolynomial:
    if isinstance(x, JetPolynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return JetPolynomial.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a jet polynomial")


def jet_derive(p: JetPolynomial) -> JetPolynomial:
    """Leibniz-rule derivative with w_j -> w_{j+1}."""
    out: Dict[Monomial, Fraction] = {}
    for key, c in p.terms.items():
        for i in range(len(key)):
            # repeated factors are visited once each, giving the multiplicity
            bumped = key[:i] + (key[i] + 1,) + key[i + 1:]
            bumped = tuple(sorted(bumped))
            out[bumped] = out.get(bumped, 0) + c
    return JetPolynomial(out)


w = JetPolynomial.w
HALF = Fraction(1, 2)


def identity_one_antiderivative(n: int) -> JetPolynomial:
    """(-1)^{n+1} w_n^2 / 2 + Σ_{k=1}^{n-1} (-1)^{k+1} w_k w_{2n-k}."""
    out = (-1) ** (n + 1) * HALF * w(n) * w(n)
    for k in range(1, n):
        out = out + (-1) ** (k + 1) * w(k) * w(2 * n - k)
    return out


def verify_identity_one(n: int) -> bool:
    """w_{2n} w_1 == D(identity_one_antiderivative(n))."""
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    return w(2 * n) * w(1) == jet_derive(identity_one_antiderivative(n))


def identity_two_antiderivative(n: int, k: int) -> JetPolynomial:
    out = JetPolynomial()
    for l in range(1, n - k + 1):
        out = out + (-1) ** (l - 1) * w(k + l - 1) * w(2 * n - k - l)
    return out


def verify_identity_two(n: int, k: int) -> bool:
    """w_k w_{2n-k} == D(Σ_l (-1)^{l-1} w_{k+l-1} w_{2n-k-l}) + (-1)^{n-k} w_n^2."""
    if n < 2 or not 1 <= k <= n - 1:
        raise InvalidParameter(f"need n >= 2 and 1 <= k <= n-1, got n={n}, k={k}")
    rhs = jet_derive(identity_two_antiderivative(n, k)) + (-1) ** (n - k) * w(n) * w(n)
    return w(k) * w(2 * n - k) == rhs


def radial_coefficients(m: int) -> Dict[int, int]:
    """a_{2n,0} for n = 1..m, read off the operator polynomial."""
    P = build_operator_polynomial(m)
    return {n: P[(2 * n, 0)] for n in range(1, m + 1)}


def pohozaev_q(m: int) -> JetPolynomial:
    """Radial part of Q: the squared terms plus D of the triple alternating sum."""
    a = radial_coefficients(m)
    squares = JetPolynomial()
    inner = JetPolynomial()
    for n in range(1, m + 1):
        squares = squares + a[n] * (-1) ** (n + 1) * (n - HALF) * w(n) * w(n)
        for k in range(1, n):
            for l in range(1, n - k + 1):
                inner = inner + (-1) ** (k + l) * a[n] * w(k + l - 1) * w(2 * n - k - l)
    return squares + jet_derive(inner)


def pohozaev_q_direct(m: int) -> JetPolynomial:
    """The same quantity assembled from identity one alone (before expanding
    the cross terms with identity two)."""
    a = radial_coefficients(m)
    out = JetPolynomial()
    for n in range(1, m + 1):
        out = out + a[n] * identity_one_antiderivative(n)
    return out


def radial_source(m: int) -> JetPolynomial:
    """Σ_n a_{2n,0} w_{2n} w_1: the radial slice of P(∂_t, Δ) u · ∂_t u."""
    a = radial_coefficients(m)
    out = JetPolynomial()
    for n in range(1, m + 1):
        out = out + a[n] * w(2 * n) * w(1)
    return out


def verify_radial_pohozaev(m: int) -> bool:
    if m < 1:
        raise InvalidParameter(f"m must be >= 1, got {m}")
    return jet_derive(pohozaev_q(m)) == radial_source(m)
