"""Three-circle inequality 2F_1 < e^{-L}(F_0 + F_2) for zero-average
m-polyharmonic functions, certified one spherical mode at a time.

For a mode n with exponents λ = (n_1..n_m, -n_1..-n_m) and coefficients
c = (A_1..A_m, B_1..B_m), the inequality on the centred intervals reads
cᵀ D c > 0 with

    D(L, n) = e^{-L} (S_- + S_+) - 2 S_0,

where S_-, S_0, S_+ are Gram matrices of the exponentials over
[-3L/2, -L/2], [-L/2, L/2] and [L/2, 3L/2].  D is assembled in the log
domain and scaled by its own diagonal before the eigenvalue solve, so grid
scans up to L = 50 never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from polyneck.annulus_basis import (
    AnnulusField,
    ZeroMode,
    annulus_energy,
    harmonic_dimension,
)
from polyneck.errors import InvalidParameter, PreconditionError, SearchFailure
from polyneck.gram import interval_gram, log_exp_integral
from polyneck.jacobi import jacobi_eigenvalues

MARGIN_RTOL = 1e-9
GRID_STEP = 0.25
L_CAP = 50.0
N_CAP = 20
MAX_FIELD_MODES = 5

LOG2 = float(np.log(2.0))


def mode_exponents(m: int, n: int) -> np.ndarray:
    nk = n + 2 * np.arange(m, dtype=np.int64)
    return np.concatenate([nk, -nk])


def _intervals(L, centered: bool):
    """(lower, middle, upper) intervals, each as (a, b) arrays broadcastable over L."""
    if centered:
        return (-1.5 * L, -0.5 * L), (-0.5 * L, 0.5 * L), (0.5 * L, 1.5 * L)
    return (-2.0 * L, -L), (-L, 0.0 * L), (0.0 * L, L)


def _log_D(m: int, n: int, L, centered: bool):
    """Sign and log|.| of D(L, n) for an array of L values, shape (G, 2m, 2m)."""
    L = np.atleast_1d(np.asarray(L, dtype=float))[:, None, None]
    lam = mode_exponents(m, n)
    alpha = (lam[:, None] + lam[None, :])[None, :, :]
    (a_lo, b_lo), (a_mid, b_mid), (a_hi, b_hi) = _intervals(L, centered)
    lo = -L + log_exp_integral(alpha, a_lo, b_lo)
    hi = -L + log_exp_integral(alpha, a_hi, b_hi)
    mid = LOG2 + log_exp_integral(alpha, a_mid, b_mid)
    top = np.maximum(np.maximum(lo, hi), mid)
    val = np.exp(lo - top) + np.exp(hi - top) - np.exp(mid - top)
    with np.errstate(divide="ignore"):
        log_abs = top + np.log(np.abs(val))
    return np.sign(val), log_abs, mid


def scaled_matrix(m: int, n: int, L, centered: bool = True) -> np.ndarray:
    """Λ D Λ with Λ = |diag D|^{-1/2}, for one L or an array of them.

    When a diagonal entry of D vanishes exactly the diagonal of 2S_0 is used
    for that index instead; either choice is a positive diagonal congruence.
    """
    sign, log_abs, log_mid = _log_D(m, n, L, centered)
    diag = np.diagonal(log_abs, axis1=-2, axis2=-1)
    fallback = np.diagonal(log_mid, axis1=-2, axis2=-1)
    diag = np.where(np.isfinite(diag), diag, fallback)
    with np.errstate(under="ignore"):
        return sign * np.exp(log_abs - 0.5 * diag[..., :, None] - 0.5 * diag[..., None, :])


def three_circle_matrix(m: int, n: int, L: float, centered: bool = True) -> np.ndarray:
    """D(L, n) in plain floating point (moderate L only; may overflow otherwise)."""
    lam = mode_exponents(m, n)
    lo, mid, hi = _intervals(L, centered)
    S_lo = interval_gram(lam, *lo).entries
    S_mid = interval_gram(lam, *mid).entries
    S_hi = interval_gram(lam, *hi).entries
    return np.exp(-L) * (S_lo + S_hi) - 2.0 * S_mid


def matrix_margin(D) -> Tuple[float, float]:
    """(smallest eigenvalue, threshold) of D after scaling by |diag D|^{-1/2}."""
    D = np.asarray(D, dtype=float)
    d = np.abs(np.diagonal(D, axis1=-2, axis2=-1))
    d = np.where(d > 0, d, 1.0)
    s = 1.0 / np.sqrt(d)
    scaled = D * s[..., :, None] * s[..., None, :]
    ev = jacobi_eigenvalues(scaled)[..., 0]
    thr = MARGIN_RTOL * np.abs(np.trace(scaled, axis1=-2, axis2=-1))
    return ev, thr


@dataclass(frozen=True)
class ThreeCircleCertificate:
    m: int
    n: int
    L: float
    margin: float
    threshold: float
    certified: bool


def _check_mode(m: int, n: int) -> None:
    if m < 1:
        raise InvalidParameter(f"m must be positive, got {m}")
    if n < 1:
        raise PreconditionError("three-circle certificates need n >= 1 (zero-average fields)")


def _margins(m: int, n: int, L, centered: bool = True):
    S = scaled_matrix(m, n, L, centered)
    ev = jacobi_eigenvalues(S)[..., 0]
    thr = MARGIN_RTOL * np.abs(np.trace(S, axis1=-2, axis2=-1))
    return ev, thr


def three_circle_certificate(m: int, n: int, L: float, centered: bool = True) -> ThreeCircleCertificate:
    _check_mode(m, n)
    if not L > 0:
        raise InvalidParameter(f"L must be positive, got {L}")
    ev, thr = _margins(m, n, [L], centered)
    margin, threshold = float(ev[0]), float(thr[0])
    return ThreeCircleCertificate(m, n, float(L), margin, threshold, margin > threshold)


def certified_on_grid(m: int, n: int, Ls, centered: bool = True) -> np.ndarray:
    ev, thr = _margins(m, n, Ls, centered)
    return ev > thr


def min_L(m: int, n: int, tol: float = 1e-3, cap: float = L_CAP, step: float = GRID_STEP) -> float:
    """Smallest L̂ beyond the last uncertified→certified transition on a grid.

    Every grid point in (0, cap] is evaluated; no monotonicity in L is
    assumed.  The last bracketing pair is refined by bisection to ``tol``.
    """
    _check_mode(m, n)
    grid = np.arange(1, int(round(cap / step)) + 1) * step
    ok = certified_on_grid(m, n, grid)
    if not ok[-1]:
        raise SearchFailure(f"no certified L <= {cap} for m={m}, n={n}")
    bad = np.flatnonzero(~ok)
    lo = float(grid[bad[-1]]) if bad.size else 0.0
    hi = float(grid[bad[-1] + 1]) if bad.size else float(grid[0])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if three_circle_certificate(m, n, mid).certified:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class UniformLReport:
    m: int
    n_max: int
    min_L: List[float]
    L_star: float
    margins: List[float]
    thresholds: List[float]
    peak_n: int
    nonincreasing_after_peak: bool
    all_certified: bool
    translation_agrees: bool = True
    tol: float = 1e-3

    def rows(self):
        for n in range(1, self.n_max + 1):
            yield {
                "m": self.m,
                "n": n,
                "min_L": self.min_L[n - 1],
                "margin_at_Lstar": self.margins[n - 1],
            }


def uniform_L_report(m: int, n_max: int, tol: float = 1e-3, cap: float = L_CAP) -> UniformLReport:
    if n_max < 1:
        raise InvalidParameter(f"n_max must be >= 1, got {n_max}")
    per_n = [min_L(m, n, tol=tol, cap=cap) for n in range(1, n_max + 1)]
    L_star = max(per_n)
    # a mode could dip below the threshold between grid points above its own
    # min_L; nudge L* up until every mode is certified there
    while True:
        certs = [three_circle_certificate(m, n, L_star) for n in range(1, n_max + 1)]
        if all(c.certified for c in certs):
            break
        L_star += tol
        if L_star > cap:
            raise SearchFailure(f"no common certified L <= {cap} for m={m}")
    peak = int(np.argmax(per_n))
    tail = per_n[peak:]
    nonincreasing = all(b <= a for a, b in zip(tail, tail[1:]))
    agrees = all(
        three_circle_certificate(m, n, L_star, centered=False).certified for n in range(1, n_max + 1)
    )
    return UniformLReport(
        m=m,
        n_max=n_max,
        min_L=per_n,
        L_star=L_star,
        margins=[c.margin for c in certs],
        thresholds=[c.threshold for c in certs],
        peak_n=peak + 1,
        nonincreasing_after_peak=nonincreasing,
        all_certified=True,
        translation_agrees=agrees,
        tol=tol,
    )


def random_zero_average_field(m: int, rng: np.random.Generator, n_cap: int = N_CAP,
                              max_modes: int = MAX_FIELD_MODES) -> AnnulusField:
    """Draw 1..max_modes distinct modes with n uniform on 1..n_cap, l uniform on
    1..h_n, and standard normal C, D coefficients (draw order: count, then per
    mode n, l, C, D)."""
    count = int(rng.integers(1, max_modes + 1))
    modes = {}
    while len(modes) < count:
        n = int(rng.integers(1, n_cap + 1))
        l = int(rng.integers(1, harmonic_dimension(m, n) + 1))
        C = tuple(float(x) for x in rng.standard_normal(m))
        D = tuple(float(x) for x in rng.standard_normal(m))
        modes.setdefault((n, l), (C, D))
    return AnnulusField(m, ZeroMode(), modes)


def three_circle_ratio(u: AnnulusField, L: float) -> float:
    """2F_1 / (e^{-L}(F_0 + F_2)); the inequality holds iff this is < 1."""
    f0, f1, f2 = (annulus_energy(u, i, L) for i in (0, 1, 2))
    return 2.0 * f1 / (np.exp(-L) * (f0 + f2))


def single_mode_ratio_via_D(m: int, n: int, C, D, L: float) -> float:
    """The same ratio computed from D(L, n) for a single mode.

    The coefficients are moved from the window [-L, 0] to the centred
    window [-L/2, L/2] (a diagonal rescaling), then
    ratio = 1 - cᵀDc / (e^{-L} cᵀ(S_- + S_+)c).
    """
    lam = mode_exponents(m, n)
    c = np.concatenate([np.asarray(C, float), np.asarray(D, float)]) * np.exp(-lam * L / 2)
    Dm = three_circle_matrix(m, n, L)
    lo, _, hi = _intervals(L, True)
    outer = np.exp(-L) * (interval_gram(lam, *lo).entries + interval_gram(lam, *hi).entries)
    return float(1.0 - (c @ Dm @ c) / (c @ outer @ c))


@dataclass
class RandomFieldReport:
    m: int
    L: float
    trials: int
    seed: int
    evaluated: int
    skipped: int
    worst_ratio: float
    passed: bool
    worst_field: Optional[AnnulusField] = field(default=None, repr=False)


def random_field_check(m: int, L: float, trials: int, seed: int, n_cap: int = N_CAP) -> RandomFieldReport:
    rng = np.random.default_rng(seed)
    worst = -np.inf
    worst_field = None
    skipped = 0
    for _ in range(trials):
        u = random_zero_average_field(m, rng, n_cap=n_cap)
        if u.is_zero():
            skipped += 1
            continue
        r = three_circle_ratio(u, L)
        if not r < worst:
            worst, worst_field = r, u
    evaluated = trials - skipped
    return RandomFieldReport(
        m=m,
        L=float(L),
        trials=trials,
        seed=seed,
        evaluated=evaluated,
        skipped=skipped,
        worst_ratio=float(worst),
        passed=bool(evaluated == 0 or worst < 1.0),
        worst_field=worst_field,
    )
