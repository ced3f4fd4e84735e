"""Discrete exponential decay for nondecreasing sequences F_0..F_{n0} with

    F_n <= Θ_n + C1 (F_{n+1} - F_{n-1}),   1 <= n <= n0 - 1,
    Θ_n <= C2 · scale · e^{-σ(n0 - n)},
    F_{n0} <= endpoint_bound · scale.

certify_decay replays the constructive argument index by index: indices
where the forcing term dominates are bounded by 2Θ_n directly, every other
index is chained (two steps at a time, factor 2C1/(2C1+1) per pair) up to the
next such index or to n0.  The resulting bound is

    F_n <= C' · scale · e^{-σ̃(n0 - n)},   σ̃ = min(σ, σ'),
    σ' = -½ log(2C1/(2C1+1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from polyneck.errors import GenerationError, InvalidParameter, PreconditionError

ABS_TOL = 1e-12
MAX_RETRIES = 16


@dataclass(frozen=True)
class DecayProblem:
    n0: int
    F: Tuple[float, ...]
    Theta: Tuple[float, ...]
    C1: float
    C2: float
    sigma: float
    scale: float
    endpoint_bound: float

    @classmethod
    def from_json(cls, obj) -> "DecayProblem":
        try:
            return cls(
                n0=int(obj["n0"]),
                F=tuple(float(x) for x in obj["F"]),
                Theta=tuple(float(x) for x in obj["Theta"]),
                C1=float(obj["C1"]),
                C2=float(obj["C2"]),
                sigma=float(obj["sigma"]),
                scale=float(obj["scale"]),
                endpoint_bound=float(obj["endpoint_bound"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidParameter(f"malformed decay instance: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "n0": self.n0,
            "F": list(self.F),
            "Theta": list(self.Theta),
            "C1": self.C1,
            "C2": self.C2,
            "sigma": self.sigma,
            "scale": self.scale,
            "endpoint_bound": self.endpoint_bound,
        }

    def theta_cap(self, n: int) -> float:
        return self.C2 * self.scale * math.exp(-self.sigma * (self.n0 - n))


@dataclass
class HypothesisReport:
    passed: bool
    failures: List[Tuple[str, int]] = field(default_factory=list)

    def first(self, kind: Optional[str] = None) -> Optional[int]:
        for k, i in self.failures:
            if kind is None or k == kind:
                return i
        return None


def _validate_shape(p: DecayProblem) -> None:
    if p.n0 < 2:
        raise InvalidParameter(f"n0 must be >= 2, got {p.n0}")
    if len(p.F) != p.n0 + 1 or len(p.Theta) != p.n0 + 1:
        raise InvalidParameter(
            f"F and Theta need n0+1 = {p.n0 + 1} entries, got {len(p.F)} and {len(p.Theta)}"
        )
    if not (p.C1 > 0 and p.C2 > 0 and p.sigma > 0):
        raise InvalidParameter("C1, C2 and sigma must be positive")
    if p.scale < 0 or p.endpoint_bound < 0:
        raise InvalidParameter("scale and endpoint_bound must be nonnegative")


def check_hypotheses(p: DecayProblem, tol: float = ABS_TOL) -> HypothesisReport:
    _validate_shape(p)
    F, T, n0 = p.F, p.Theta, p.n0
    failures: List[Tuple[str, int]] = []
    for n in range(n0 + 1):
        if F[n] < -tol or T[n] < -tol:
            failures.append(("nonnegative", n))
    for n in range(1, n0 + 1):
        if F[n] < F[n - 1] - tol:
            failures.append(("monotone", n))
    for n in range(n0 + 1):
        if T[n] > p.theta_cap(n) + tol:
            failures.append(("theta_bound", n))
    for n in range(1, n0):
        if F[n] > T[n] + p.C1 * (F[n + 1] - F[n - 1]) + tol:
            failures.append(("iteration", n))
    if F[n0] > p.endpoint_bound * p.scale + tol:
        failures.append(("endpoint", n0))
    return HypothesisReport(not failures, failures)


def sigma_prime(C1: float) -> float:
    return -0.5 * math.log(2 * C1 / (2 * C1 + 1))


@dataclass
class DecayCertificate:
    sigma_prime: float
    sigma_tilde: float
    C_prime: float          # smallest constant the argument gives for this instance
    C_prime_branch: float   # closed-form constant of the branches taken
    verified: bool
    B: Tuple[int, ...]
    branches: Tuple[str, ...]
    bounds: Tuple[float, ...]
    tightness: float        # max_n F_n / (C' scale e^{-σ̃(n0-n)})


@dataclass(frozen=True)
class ChainStep:
    n: int
    l: int
    anchor: int
    lhs: float   # F_n
    rhs: float   # (2C1/(2C1+1))^{(l+1)/2} F_{n+l+1}


def _forcing_dominated(p: DecayProblem) -> List[bool]:
    """dominated[n] is True for n in 1..n0-1 with C1(F_{n+1} - F_{n-1}) <= Θ_n."""
    F = p.F
    out = [False] * (p.n0 + 1)
    for n in range(1, p.n0):
        out[n] = not p.C1 * (F[n + 1] - F[n - 1]) > p.Theta[n]
    return out


def _next_anchors(p: DecayProblem, dominated: Sequence[bool]) -> List[int]:
    """n1(n): smallest forcing-dominated index > n, or n0 if there is none."""
    nxt = [p.n0] * (p.n0 + 1)
    upcoming = p.n0
    for n in range(p.n0, -1, -1):
        nxt[n] = upcoming
        if dominated[n]:
            upcoming = n
    return nxt


def chain_steps(p: DecayProblem) -> List[ChainStep]:
    """The intermediate two-step chain inequalities used by certify_decay."""
    r = 2 * p.C1 / (2 * p.C1 + 1)
    dominated = _forcing_dominated(p)
    nxt = _next_anchors(p, dominated)
    out = []
    for n in range(p.n0):
        if dominated[n] or n == nxt[n] - 1:
            continue
        n1 = nxt[n]
        l = n1 - n - 1 if (n1 - n - 1) % 2 else n1 - n - 2
        out.append(ChainStep(n, l, n1, p.F[n], r ** ((l + 1) // 2) * p.F[n + l + 1]))
    return out


def certify_decay(p: DecayProblem) -> DecayCertificate:
    report = check_hypotheses(p)
    if not report.passed:
        kind, idx = report.failures[0]
        raise PreconditionError(f"hypothesis '{kind}' fails at index {idx}")

    n0, scale = p.n0, p.scale
    r = 2 * p.C1 / (2 * p.C1 + 1)
    s_prime = sigma_prime(p.C1)
    s_tilde = min(p.sigma, s_prime)
    dominated = _forcing_dominated(p)
    nxt = _next_anchors(p, dominated)

    def anchor_const(n1: int) -> float:
        return p.endpoint_bound if n1 == n0 else 2 * p.C2

    bounds: List[float] = []
    branches: List[str] = []
    branch_consts: List[float] = []
    for n in range(n0 + 1):
        if n == n0:
            K = p.endpoint_bound
            bounds.append(K * scale)
            branches.append("endpoint")
            branch_consts.append(K)
        elif dominated[n]:
            bounds.append(2 * p.C2 * scale * math.exp(-p.sigma * (n0 - n)))
            branches.append("forcing")
            branch_consts.append(2 * p.C2)
        else:
            n1 = nxt[n]
            K = anchor_const(n1)
            anchored = K * scale * math.exp(-p.sigma * (n0 - n1))
            if n == n1 - 1:
                bounds.append(anchored)
                branches.append("adjacent")
                branch_consts.append(K * math.exp(s_tilde))
            else:
                l = n1 - n - 1 if (n1 - n - 1) % 2 else n1 - n - 2
                bounds.append(r ** ((l + 1) // 2) * anchored)
                branches.append("chain")
                branch_consts.append(K * math.exp(s_prime))

    C_branch = max(branch_consts)
    if scale > 0:
        C_prime = max(b / (scale * math.exp(-s_tilde * (n0 - n))) for n, b in enumerate(bounds))
    else:
        C_prime = C_branch

    verified = True
    tightness = 0.0
    for n in range(n0 + 1):
        target = C_prime * scale * math.exp(-s_tilde * (n0 - n))
        if p.F[n] > target * (1 + 1e-12) + ABS_TOL:
            verified = False
        if target > 0:
            tightness = max(tightness, p.F[n] / target)
    verified = verified and C_prime <= C_branch * (1 + 1e-12)

    return DecayCertificate(
        sigma_prime=s_prime,
        sigma_tilde=s_tilde,
        C_prime=C_prime,
        C_prime_branch=C_branch,
        verified=verified,
        B=tuple(n for n in range(1, n0) if not dominated[n]),
        branches=tuple(branches),
        bounds=tuple(bounds),
        tightness=tightness,
    )


def generate_admissible(n0: int, C1: float, C2: float, sigma: float, scale: float,
                        seed: int, endpoint_bound: float = 1.0) -> DecayProblem:
    """A random instance satisfying every hypothesis by construction.

    Θ_n is a uniform fraction of its cap.  F is built backwards from
    F_{n0} = U(1/2, 1) · endpoint_bound · scale; each F_{n-1} is a U(1/2, 1)
    fraction of the largest value allowed by monotonicity, the difference
    inequality at n, and feasibility of the inequality at n-1.
    """
    if n0 < 2:
        raise InvalidParameter(f"n0 must be >= 2, got {n0}")
    if not (C1 > 0 and C2 > 0 and sigma > 0) or scale < 0 or endpoint_bound < 0:
        raise InvalidParameter("C1, C2, sigma must be positive; scale, endpoint_bound nonnegative")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RETRIES):
        caps = C2 * scale * np.exp(-sigma * (n0 - np.arange(n0 + 1)))
        theta = rng.uniform(0.0, 1.0, n0 + 1) * caps
        F = np.zeros(n0 + 1)
        F[n0] = rng.uniform(0.5, 1.0) * endpoint_bound * scale
        F[n0 - 1] = rng.uniform(0.5, 1.0) * F[n0]
        ok = True
        for n in range(n0 - 1, 0, -1):
            upper = min(F[n], F[n + 1] - (F[n] - theta[n]) / C1)
            if n - 1 >= 1:
                upper = min(upper, theta[n - 1] + C1 * F[n])
            if upper < -ABS_TOL:
                ok = False
                break
            F[n - 1] = rng.uniform(0.5, 1.0) * max(upper, 0.0)
        if ok:
            p = DecayProblem(n0, tuple(F.tolist()), tuple(theta.tolist()), C1, C2, sigma,
                             scale, endpoint_bound)
            if check_hypotheses(p).passed:
                return p
    raise GenerationError(f"could not build an admissible instance after {MAX_RETRIES} tries")


PARAMETER_GRID = {
    "C1": (0.5, 1.0, 4.0),
    "sigma": (0.2, 0.5, 1.0),
    "n0": (16, 64, 256),
}


@dataclass
class FuzzReport:
    trials: int
    seed: int
    verified: int
    failures: List[int]
    best_tightness: float

    @property
    def passed(self) -> bool:
        return not self.failures


def fuzz(trials: int, seed: int, C1: float, C2: float, sigma: float, n0: int,
         scale: float = 1.0) -> FuzzReport:
    """Certify ``trials`` generated instances with seeds derived from ``seed``."""
    seeds = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
    failures = []
    best = 0.0
    for i, s in enumerate(seeds):
        cert = certify_decay(generate_admissible(n0, C1, C2, sigma, scale, int(s)))
        best = max(best, cert.tightness)
        if not cert.verified:
            failures.append(i)
    return FuzzReport(trials, seed, trials - len(failures), failures, best)
