"""Near-orthogonality of the normalized exponentials f_k(t) ∝ e^{n_k t} on [0, L].

M is their Gram matrix, M̄ its L -> ∞ limit, E = M - M̄.  The chain checked
here is λ_1(M) >= λ_1(M̄) - |λ_E| with |λ_E| <= 2m e^{-2nL} for L >= 1, and
det M̄ is computed exactly as a Cauchy-type determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List

import numpy as np

from polyneck.errors import InvalidParameter, PreconditionError
from polyneck.gram import interval_gram
from polyneck.jacobi import jacobi_eigenvalues, smallest_eigenvalue

PERTURBATION_SLACK = 1e-9


def _exponents(m: int, n: int) -> np.ndarray:
    if m < 1:
        raise InvalidParameter(f"m must be positive, got {m}")
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    return n + 2 * np.arange(m, dtype=np.int64)


@dataclass(frozen=True)
class GramPair:
    m: int
    n: int
    L: float
    M: np.ndarray
    Mbar: np.ndarray

    @property
    def E(self) -> np.ndarray:
        return self.M - self.Mbar


def limit_gram(m: int, n: int) -> np.ndarray:
    nk = _exponents(m, n).astype(float)
    return 2.0 * np.sqrt(np.outer(nk, nk)) / (nk[:, None] + nk[None, :])


def gram_pair(m: int, n: int, L: float) -> GramPair:
    """M and M̄, built from the all-negative-exponent closed forms."""
    if L < 1:
        raise PreconditionError(f"L must be >= 1, got {L}")
    nk = _exponents(m, n).astype(float)
    Mbar = limit_gram(m, n)
    tail = -np.expm1(-2.0 * nk * L)
    cross = -np.expm1(-(nk[:, None] + nk[None, :]) * L)
    M = Mbar * cross / np.sqrt(np.outer(tail, tail))
    return GramPair(m, n, float(L), M, Mbar)


def gram_from_integrals(m: int, n: int, L: float) -> np.ndarray:
    """M recomputed as the normalized Gram of e^{n_k t} over [0, L]."""
    S = interval_gram(_exponents(m, n), 0.0, L).entries
    d = np.sqrt(np.diag(S))
    return S / np.outer(d, d)


def cauchy_determinant(m: int, n: int) -> Fraction:
    """det M̄ = Π 2n_k · Π_{k<l} (n_k - n_l)^2 / Π_{k,l} (n_k + n_l), exactly.

    >>> cauchy_determinant(2, 1)
    Fraction(1, 4)
    """
    nk = [int(v) for v in _exponents(m, n)]
    num = math.prod(2 * a for a in nk)
    for i in range(m):
        for j in range(i + 1, m):
            num *= (nk[i] - nk[j]) ** 2
    den = math.prod(a + b for a in nk for b in nk)
    return Fraction(num, den)


@dataclass(frozen=True)
class WeakOrthogonalityCertificate:
    m: int
    n: int
    L: float
    lambda1: float
    lambda1bar: float
    lambdaE_bound: float
    lambdaE_exact: float
    lambdaE_frobenius: float
    cauchy_det: Fraction
    delta: float
    perturbation_ok: bool
    determinant_ok: bool
    valid: bool


def weak_orthogonality_certificate(m: int, n: int, L: float) -> WeakOrthogonalityCertificate:
    pair = gram_pair(m, n, L)
    lam1 = smallest_eigenvalue(pair.M)
    lam1bar = smallest_eigenvalue(pair.Mbar)
    E = pair.E
    ev_E = jacobi_eigenvalues(E)
    lamE_exact = float(np.abs(ev_E).max())
    lamE_frob = float(np.sqrt(np.trace(E @ E)))
    bound = 2.0 * m * math.exp(-2.0 * n * L)
    det = cauchy_determinant(m, n)

    delta = lam1bar - bound
    if delta <= 0:
        delta = 0.0
    perturbation_ok = lam1 >= lam1bar - bound - PERTURBATION_SLACK
    # each of the other m-1 eigenvalues of M̄ is below tr M̄ = m
    determinant_ok = lam1bar >= float(det) / m ** (m - 1) - PERTURBATION_SLACK * abs(lam1bar)
    valid = perturbation_ok and determinant_ok and lam1 >= delta - PERTURBATION_SLACK
    return WeakOrthogonalityCertificate(
        m, n, float(L), lam1, lam1bar, bound, lamE_exact, lamE_frob, det, delta,
        bool(perturbation_ok), bool(determinant_ok), bool(valid),
    )


@dataclass
class GramSweep:
    m: int
    L: float
    certificates: List[WeakOrthogonalityCertificate]
    empirical_C_tilde: float

    @property
    def all_valid(self) -> bool:
        return all(c.valid for c in self.certificates)


def gram_sweep(m: int, n_max: int, L: float) -> GramSweep:
    """Certificates for n = 1..n_max plus C̃_emp = min_n e^{nL/2} λ_1."""
    if n_max < 1:
        raise InvalidParameter(f"n_max must be >= 1, got {n_max}")
    certs = [weak_orthogonality_certificate(m, n, L) for n in range(1, n_max + 1)]
    c_emp = min(math.exp(c.n * L / 2) * c.lambda1 for c in certs)
    return GramSweep(m, float(L), certs, c_emp)


def scaled_determinant_floor(m: int, n_max: int = 200):
    """(min over 1 <= n <= n_max of e^{n/2} det M̄, the minimizing n)."""
    vals = [(math.exp(n / 2) * float(cauchy_determinant(m, n)), n) for n in range(1, n_max + 1)]
    return min(vals)
