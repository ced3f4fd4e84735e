"""Killing fields of S^{2m-1} and the radial/tangential reproducing formula

    V = <V, x/|x|> x/|x| + Σ_k |x|^{-2} <V, X_k(x)> Y_k(x),

with X_k(x) = α_k x for a trace-orthonormal basis α_k of so(2m) and
Y_k = 2 X_k.  The factor 2 comes from Σ_k X_k X_kᵀ = (|x|^2 I - x xᵀ)/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from polyneck.errors import DomainError, InvalidParameter, PreconditionError

MAX_M = 8
REPRODUCING_CONSTANT = 2.0
TANGENCY_TOL = 1e-12


@dataclass(frozen=True)
class KillingBasis:
    m: int
    generators: np.ndarray  # shape (m(2m-1), 2m, 2m)
    pairs: Tuple[Tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.generators)

    def fields(self, x) -> np.ndarray:
        """Rows X_k(x) = α_k x."""
        return self.generators @ np.asarray(x, dtype=float)


def build_killing_basis(m: int) -> KillingBasis:
    if not 1 <= m <= MAX_M:
        raise InvalidParameter(f"m must be in [1, {MAX_M}], got {m}")
    d = 2 * m
    pairs = tuple((i, j) for i in range(d) for j in range(i + 1, d))
    gens = np.zeros((len(pairs), d, d))
    w = 1.0 / np.sqrt(2.0)
    for k, (i, j) in enumerate(pairs):
        gens[k, i, j] = w
        gens[k, j, i] = -w
    gens.flags.writeable = False
    return KillingBasis(m, gens, pairs)


def _check_point(basis: KillingBasis, x) -> Tuple[np.ndarray, float]:
    x = np.asarray(x, dtype=float)
    if x.shape != (2 * basis.m,):
        raise InvalidParameter(f"expected a vector in R^{2 * basis.m}, got shape {x.shape}")
    r2 = float(x @ x)
    if r2 == 0.0:
        raise DomainError("x must be nonzero")
    return x, r2


def tangential_reproduce(basis: KillingBasis, x, V) -> np.ndarray:
    x, r2 = _check_point(basis, x)
    V = np.asarray(V, dtype=float)
    if abs(x @ V) > TANGENCY_TOL * np.sqrt(r2) * np.linalg.norm(V):
        raise PreconditionError("V is not tangent to the sphere through x")
    X = basis.fields(x)
    return (X @ V / r2) @ (REPRODUCING_CONSTANT * X)


def decompose_vector(basis: KillingBasis, x, V) -> Tuple[float, np.ndarray]:
    """(radial component, tangential coefficients |x|^{-2} <V, X_k(x)>)."""
    x, r2 = _check_point(basis, x)
    V = np.asarray(V, dtype=float)
    radial = float(V @ x) / np.sqrt(r2)
    return radial, basis.fields(x) @ V / r2


def reconstruct(basis: KillingBasis, x, radial: float, coeffs) -> np.ndarray:
    x, r2 = _check_point(basis, x)
    X = basis.fields(x)
    return radial * x / np.sqrt(r2) + np.asarray(coeffs) @ (REPRODUCING_CONSTANT * X)


def field_outer_sum(basis: KillingBasis, x) -> np.ndarray:
    X = basis.fields(x)
    return X.T @ X


@dataclass
class SphereReport:
    m: int
    trials: int
    seed: int
    max_reproduce_residual: float
    max_decompose_residual: float
    max_outer_residual: float
    max_orthonormality_error: float
    passed: bool


def sphere_check(m: int, trials: int, seed: int, tol: float = 1e-12) -> SphereReport:
    """Random (x, V) trials: tangential reproduction, full decomposition, and
    the outer-product identity, each as a relative residual."""
    basis = build_killing_basis(m)
    rng = np.random.default_rng(seed)
    d = 2 * m
    gram = np.einsum("aij,bij->ab", basis.generators, basis.generators)
    ortho = float(np.abs(gram - np.eye(len(basis))).max())
    rep = dec = outer = 0.0
    for _ in range(trials):
        x = rng.standard_normal(d) * np.exp(rng.uniform(-3, 3))
        W = rng.standard_normal(d)
        r2 = x @ x
        V = W - (W @ x) / r2 * x
        rep = max(rep, np.linalg.norm(tangential_reproduce(basis, x, V) - V) / np.linalg.norm(V))
        radial, coeffs = decompose_vector(basis, x, W)
        dec = max(dec, np.linalg.norm(reconstruct(basis, x, radial, coeffs) - W) / np.linalg.norm(W))
        expected = 0.5 * (r2 * np.eye(d) - np.outer(x, x))
        outer = max(outer, np.abs(field_outer_sum(basis, x) - expected).max() / r2)
    passed = max(rep, dec, outer, ortho) <= tol
    return SphereReport(m, trials, seed, float(rep), float(dec), float(outer), ortho, bool(passed))
