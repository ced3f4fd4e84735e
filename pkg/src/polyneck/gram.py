"""Gram matrices of exponentials e^{λ_j t} over an interval, plain and log-domain."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from polyneck.errors import InvalidParameter


def _exponent_sums(exponents) -> np.ndarray:
    lam = np.asarray(exponents)
    if lam.ndim != 1 or not np.issubdtype(lam.dtype, np.integer):
        raise InvalidParameter("exponents must be a 1-d sequence of integers")
    lam = lam.astype(np.int64)
    return lam[:, None] + lam[None, :]


def log_exp_integral(alpha, a: float, b: float) -> np.ndarray:
    """log ∫_a^b e^{αt} dt for integer α (array), without overflow.

    The α = 0 branch is chosen by exact integer comparison.
    """
    alpha = np.asarray(alpha, dtype=np.int64)
    zero = alpha == 0
    beta = np.where(zero, 1, np.abs(alpha)).astype(float)
    end = np.where(alpha > 0, b, a)
    width = b - a
    val = alpha * end + np.log(-np.expm1(-beta * width)) - np.log(beta)
    return np.where(zero, np.log(width), val)


def exp_integral(alpha, a: float, b: float) -> np.ndarray:
    """∫_a^b e^{αt} dt; (e^{αb} - e^{αa})/α, or b - a when α = 0."""
    alpha = np.asarray(alpha, dtype=np.int64)
    zero = alpha == 0
    safe = np.where(zero, 1, alpha).astype(float)
    val = np.exp(alpha * a) * np.expm1(alpha * (b - a)) / safe
    return np.where(zero, b - a, val)


@dataclass(frozen=True)
class IntervalGram:
    exponents: Tuple[int, ...]
    interval: Tuple[float, float]
    entries: np.ndarray

    def quadratic_form(self, c) -> float:
        c = np.asarray(c, dtype=float)
        return float(c @ self.entries @ c)


def interval_gram(exponents, a: float, b: float) -> IntervalGram:
    """S_{jj'} = ∫_a^b e^{(λ_j + λ_j') t} dt.

    >>> float(interval_gram([1, -1], 0.0, 1.0).entries[0, 1])
    1.0
    """
    if not a < b:
        raise InvalidParameter(f"need a < b, got ({a}, {b})")
    sums = _exponent_sums(exponents)
    entries = exp_integral(sums, a, b)
    return IntervalGram(tuple(int(x) for x in exponents), (float(a), float(b)), entries)


def log_interval_gram(exponents, a: float, b: float) -> np.ndarray:
    """Entrywise log of ``interval_gram(...).entries`` (all entries are positive)."""
    if not a < b:
        raise InvalidParameter(f"need a < b, got ({a}, {b})")
    return log_exp_integral(_exponent_sums(exponents), a, b)
