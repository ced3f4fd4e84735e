"""Separated m-polyharmonic functions on annuli of R^{2m} and their weighted
annulus energies

    F_i(u) = ∫_{A_i} u^2 / |x|^{2m} dx,   A_i = {e^{-iL} < |x| < e^{-(i-1)L}}.

In cylinder coordinates t = log|x| a mode (n, l) contributes
Σ_k C_k e^{n_k t} + D_k e^{-n_k t} times a normalized spherical harmonic, with
n_k = n + 2(k-1).  Spherical harmonics are never evaluated: orthonormality
turns F_i into a sum over modes of one-dimensional integrals in t.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from polyneck.errors import InvalidParameter
from polyneck.gram import exp_integral
from polyneck.operator_poly import (
    build_operator_polynomial,
    evaluate_at_mode,
    radial_restriction,
)


def harmonic_dimension(m: int, n: int) -> int:
    """h_n: dimension of degree-n spherical harmonics on S^{2m-1}."""
    d = 2 * m
    if n < 0:
        return 0
    lower = math.comb(n + d - 3, n - 2) if n >= 2 else 0
    return math.comb(n + d - 1, n) - lower


def brute_force_harmonic_dimension(m: int, n: int) -> int:
    """Kernel dimension of Δ acting on homogeneous degree-n polynomials in 2m variables."""
    d = 2 * m
    cols = list(itertools.combinations_with_replacement(range(d), n))
    if n < 2:
        return len(cols)
    rows = {mono: i for i, mono in enumerate(itertools.combinations_with_replacement(range(d), n - 2))}
    lap = np.zeros((len(rows), len(cols)))
    for j, mono in enumerate(cols):
        powers = [mono.count(v) for v in range(d)]
        for v in range(d):
            e = powers[v]
            if e >= 2:
                lowered = list(mono)
                lowered.remove(v)
                lowered.remove(v)
                lap[rows[tuple(lowered)], j] += e * (e - 1)
    return len(cols) - int(np.linalg.matrix_rank(lap))


@dataclass(frozen=True)
class ModeSpectrum:
    m: int
    n: int
    mu: int
    multiplicity: int
    exponents: Tuple[int, ...]


def mode_spectrum(m: int, n: int) -> ModeSpectrum:
    if m < 1:
        raise InvalidParameter(f"m must be positive, got {m}")
    if n < 0:
        raise InvalidParameter(f"n must be nonnegative, got {n}")
    return ModeSpectrum(
        m=m,
        n=n,
        mu=n * (n + 2 * m - 2),
        multiplicity=harmonic_dimension(m, n),
        exponents=tuple(n + 2 * k for k in range(m)),
    )


@dataclass(frozen=True)
class AnnihilationReport:
    m: int
    n: int
    roots_checked: Tuple[int, ...]
    residuals: Tuple[int, ...]
    complete: bool
    passed: bool


def _multiset_product(roots: Sequence[int]) -> Tuple[int, ...]:
    poly = [1]
    for r in roots:
        nxt = [0] * (len(poly) + 1)
        for i, a in enumerate(poly):
            nxt[i + 1] += a
            nxt[i] -= r * a
        poly = nxt
    return tuple(poly)


def verify_mode_annihilation(m: int, n: int, P=None) -> AnnihilationReport:
    """Check that every listed exponent is an indicial root of P_m at mode n.

    For n >= 1 the 2m exponents ±n_k are distinct roots of the degree-2m
    polynomial λ -> P_m(λ, -μ_n), hence all of them.  For n = 0 the radial
    polynomial must factor as λ^2 Π (λ ∓ 2j) over the zero-mode block.
    """
    P = P or build_operator_polynomial(m)
    if n < 0:
        raise InvalidParameter(f"n must be nonnegative, got {n}")
    spectrum = mode_spectrum(m, n)
    if n >= 1:
        roots = tuple(s * e for e in spectrum.exponents for s in (1, -1))
        residuals = tuple(int(evaluate_at_mode(P, r, -spectrum.mu)) for r in roots)
        degree = max(p for p, _ in P.coeffs)
        complete = len(set(roots)) == degree
    else:
        roots = (0, 0) + tuple(s * 2 * j for j in range(1, m) for s in (1, -1))
        residuals = tuple(int(evaluate_at_mode(P, r, 0)) for r in roots)
        complete = radial_restriction(P) == _multiset_product(roots)
    passed = complete and all(r == 0 for r in residuals)
    return AnnihilationReport(m, n, roots, residuals, complete, passed)


@dataclass(frozen=True)
class ZeroMode:
    """Coefficients of A0 + B0 t + Σ_{k=2}^m (C0_k e^{2(k-1)t} + D0_k e^{-2(k-1)t})."""

    A0: float = 0.0
    B0: float = 0.0
    C0: Tuple[float, ...] = ()
    D0: Tuple[float, ...] = ()

    def is_zero(self) -> bool:
        return self.A0 == 0 and self.B0 == 0 and not any(self.C0) and not any(self.D0)


ModeKey = Tuple[int, int]


@dataclass(frozen=True)
class AnnulusField:
    m: int
    zero_mode: ZeroMode = field(default_factory=ZeroMode)
    modes: Mapping[ModeKey, Tuple[Tuple[float, ...], Tuple[float, ...]]] = field(
        default_factory=dict
    )

    def __post_init__(self):
        if self.m < 1:
            raise InvalidParameter(f"m must be positive, got {self.m}")
        zm = self.zero_mode
        for name in ("C0", "D0"):
            vals = getattr(zm, name)
            if vals and len(vals) != self.m - 1:
                raise InvalidParameter(f"zero_mode.{name} needs {self.m - 1} entries")
        for (n, l), (C, D) in self.modes.items():
            if n < 1:
                raise InvalidParameter(f"mode n must be >= 1, got {n}")
            if not 1 <= l <= harmonic_dimension(self.m, n):
                raise InvalidParameter(f"l={l} outside 1..h_{n}")
            if len(C) != self.m or len(D) != self.m:
                raise InvalidParameter(f"mode ({n},{l}) needs {self.m} C and D coefficients")

    @property
    def zero_average(self) -> bool:
        return self.zero_mode.is_zero()

    def is_zero(self) -> bool:
        return self.zero_average and all(
            not any(C) and not any(D) for C, D in self.modes.values()
        )

    def scaled(self, c: float) -> "AnnulusField":
        zm = self.zero_mode
        return AnnulusField(
            self.m,
            ZeroMode(c * zm.A0, c * zm.B0, tuple(c * x for x in zm.C0), tuple(c * x for x in zm.D0)),
            {k: (tuple(c * x for x in C), tuple(c * x for x in D)) for k, (C, D) in self.modes.items()},
        )


def shift_field(u: AnnulusField, s: float) -> AnnulusField:
    """The field t -> u(t + s), i.e. u composed with the dilation x -> e^s x."""
    m = u.m
    zm = u.zero_mode
    ks = range(2, m + 1)
    zero = ZeroMode(
        zm.A0 + zm.B0 * s,
        zm.B0,
        tuple(c * math.exp(2 * (k - 1) * s) for c, k in zip(zm.C0, ks)),
        tuple(d * math.exp(-2 * (k - 1) * s) for d, k in zip(zm.D0, ks)),
    )
    modes = {}
    for (n, l), (C, D) in u.modes.items():
        nk = [n + 2 * k for k in range(m)]
        modes[(n, l)] = (
            tuple(c * math.exp(e * s) for c, e in zip(C, nk)),
            tuple(d * math.exp(-e * s) for d, e in zip(D, nk)),
        )
    return AnnulusField(m, zero, modes)


def mode_energy(m: int, n: int, C, D, a: float, b: float) -> float:
    """∫_a^b (Σ_k C_k e^{n_k t} + D_k e^{-n_k t})^2 dt in closed form.

    Each exponential is recentred at the interval midpoint so the Gram entries
    stay within e^{|α|(b-a)/2}.
    """
    lam, S = _centred_gram(m, n, 0.5 * (b - a))
    c = np.concatenate([np.asarray(C, float), np.asarray(D, float)]) * np.exp(lam * (0.5 * (a + b)))
    return float(c @ S @ c)


@functools.lru_cache(maxsize=4096)
def _centred_gram(m: int, n: int, half: float):
    nk = np.array([n + 2 * k for k in range(m)], dtype=np.int64)
    lam = np.concatenate([nk, -nk])
    S = exp_integral(lam[:, None] + lam[None, :], -half, half)
    lam.flags.writeable = False
    S.flags.writeable = False
    return lam, S


def _t_exp_integral(alpha: int, a: float, b: float) -> float:
    if alpha == 0:
        return 0.5 * (b * b - a * a)
    return (math.exp(alpha * b) * (b / alpha - 1 / alpha**2)
            - math.exp(alpha * a) * (a / alpha - 1 / alpha**2))


def zero_mode_energy(m: int, zm: ZeroMode, a: float, b: float) -> float:
    """∫_a^b of the squared zero-mode profile (coefficients w.r.t. normalized φ_0)."""
    if zm.is_zero():
        return 0.0
    exps: List[int] = [0]
    coef: List[float] = [zm.A0]
    for k in range(2, m + 1):
        exps += [2 * (k - 1), -2 * (k - 1)]
        coef += [zm.C0[k - 2] if zm.C0 else 0.0, zm.D0[k - 2] if zm.D0 else 0.0]
    lam = np.array(exps, dtype=np.int64)
    c = np.array(coef)
    S = exp_integral(lam[:, None] + lam[None, :], a, b)
    total = float(c @ S @ c)
    # B0 t against itself and against the exponentials (including the constant)
    B0 = zm.B0
    total += B0 * B0 * (b**3 - a**3) / 3.0
    total += 2 * B0 * sum(ci * _t_exp_integral(int(e), a, b) for ci, e in zip(c, lam))
    return total


def annulus_interval(i: int, L: float) -> Tuple[float, float]:
    return (-i * L, -(i - 1) * L)


def annulus_energy(u: AnnulusField, i: int, L: float) -> float:
    """F_i(u) over t in [-iL, -(i-1)L].  ``i`` may be 0 (the shell just outside B_1)."""
    if not L > 0:
        raise InvalidParameter(f"L must be positive, got {L}")
    a, b = annulus_interval(i, L)
    total = zero_mode_energy(u.m, u.zero_mode, a, b)
    for n, l in sorted(u.modes):
        C, D = u.modes[(n, l)]
        total += mode_energy(u.m, n, C, D, a, b)
    return total


def field_from_json(obj: Mapping, m: Optional[int] = None) -> AnnulusField:
    m = int(obj.get("m", m) if m is None else m)
    zm_obj = obj.get("zero_mode") or {}
    zm = ZeroMode(
        float(zm_obj.get("A0", 0.0)),
        float(zm_obj.get("B0", 0.0)),
        tuple(float(x) for x in zm_obj.get("C0", ())),
        tuple(float(x) for x in zm_obj.get("D0", ())),
    )
    modes: Dict[ModeKey, Tuple[Tuple[float, ...], Tuple[float, ...]]] = {}
    for entry in obj.get("modes", []):
        key = (int(entry["n"]), int(entry["l"]))
        if key in modes:
            raise InvalidParameter(f"duplicate mode {key}")
        modes[key] = (tuple(float(x) for x in entry["C"]), tuple(float(x) for x in entry["D"]))
    return AnnulusField(m, zm, modes)


def field_to_json(u: AnnulusField) -> dict:
    zm = u.zero_mode
    return {
        "m": u.m,
        "zero_mode": {"A0": zm.A0, "B0": zm.B0, "C0": list(zm.C0), "D0": list(zm.D0)},
        "modes": [
            {"n": n, "l": l, "C": list(u.modes[(n, l)][0]), "D": list(u.modes[(n, l)][1])}
            for n, l in sorted(u.modes)
        ],
    }
