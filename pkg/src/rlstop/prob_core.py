"""Waiting-time distributions for Bernoulli reward streams.

``T`` is the number of negative rewards before the first positive one
(geometric), ``W_r`` the number of negatives before the r-th positive
(negative binomial, the sum of ``r`` independent copies of ``T``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

# Above this many trials the exact integer binomial gets slow; fall back to lgamma.
_EXACT_COEFF_LIMIT = 20_000
# Direct products are used while every factor stays comfortably inside float range.
_DIRECT_LIMIT = 1_000
_TINY = 1e-290


@dataclass(frozen=True)
class RewardModel:
    """Per-observation reward probabilities; ``q`` is always ``1 - p``."""

    p: float
    q: float = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        if not math.isfinite(p) or not 0.0 < p < 1.0:
            raise ValueError(f"p must lie strictly inside (0, 1), got {self.p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", 1.0 - p)


@dataclass(frozen=True)
class WaitingTimeSpec:
    r: int

    def __post_init__(self):
        if isinstance(self.r, bool) or int(self.r) != self.r or self.r < 1:
            raise ValueError(f"r must be an integer >= 1, got {self.r!r}")
        object.__setattr__(self, "r", int(self.r))


def _check_count(k, name="k"):
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise ValueError(f"{name} must be a nonnegative integer, got {k!r}")
    return int(k)


def geometric_pmf(model: RewardModel, k: int) -> float:
    """Pr[T = k] = p q^k."""
    k = _check_count(k)
    return model.p * model.q**k


def pgf_eval(model: RewardModel, spec: WaitingTimeSpec, z: float) -> float:
    """Probability generating function of ``W_r``, ``[p / (1 - q z)]^r``, on [0, 1]."""
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z must lie in [0, 1], got {z!r}")
    return (model.p / (1.0 - model.q * z)) ** spec.r


def nb_mean(model: RewardModel, spec: WaitingTimeSpec) -> float:
    return spec.r * model.q / model.p


def nb_variance(model: RewardModel, spec: WaitingTimeSpec) -> float:
    return spec.r * model.q / model.p**2


def log_binom(n: int, k: int) -> float:
    """log C(n, k), exact-integer based for moderate n."""
    if n <= _EXACT_COEFF_LIMIT:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def nb_logpmf(model: RewardModel, spec: WaitingTimeSpec, k: int) -> float:
    k = _check_count(k)
    r = spec.r
    return log_binom(r + k - 1, k) + r * math.log(model.p) + k * math.log(model.q)


def nb_pmf(model: RewardModel, spec: WaitingTimeSpec, k: int) -> float:
    """Pr[W_r = k] = C(r+k-1, k) p^r q^k.

    This is the sign-free form of the generalized binomial expansion
    C(-r, k) p^r (-q)^k. Small cases are a direct product; once the
    coefficient or the powers leave float range the value comes from log space.
    """
    k = _check_count(k)
    r = spec.r
    if r + k - 1 <= _DIRECT_LIMIT:
        coeff = math.comb(r + k - 1, k)
        pr, qk = model.p**r, model.q**k
        if coeff < 1e300 and pr > _TINY and qk > _TINY:
            value = coeff * pr * qk
            if value > _TINY:
                return value
    return math.exp(nb_logpmf(model, spec, k))


def nb_pmf_recurrence(model: RewardModel, spec: WaitingTimeSpec, kmax: int) -> list[float]:
    """pmf values for k = 0..kmax via Pr[k] = Pr[k-1] q (r+k-1) / k.

    Independent of the log-space path; used as a cross-check.
    """
    kmax = _check_count(kmax, "kmax")
    r, q = spec.r, model.q
    out = [model.p**r]
    for k in range(1, kmax + 1):
        out.append(out[-1] * q * (r + k - 1) / k)
    return out


def nb_cdf(model: RewardModel, spec: WaitingTimeSpec, b: int) -> float:
    """Pr[W_r <= b] as an exact finite sum of pmf terms."""
    b = _check_count(b, "b")
    total = math.fsum(nb_pmf(model, spec, k) for k in range(b + 1))
    return min(total, 1.0)


def tail_horizon(model: RewardModel, spec: WaitingTimeSpec, tol: float = 1e-12) -> int:
    """A count K with Pr[W_r > K] <= tol.

    Uses the generating-function (Chernoff) bound Pr[W_r > K] <= G_r(z) / z^(K+1)
    for 1 < z < 1/q, minimised over a grid of z. Only meant for choosing
    truncation points in checks.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    p, q, r = model.p, model.q, spec.r
    best = None
    zmax = 1.0 / q
    for i in range(1, 400):
        z = 1.0 + (zmax - 1.0) * i / 400.0
        log_g = r * (math.log(p) - math.log1p(-q * z))
        k = math.ceil((log_g - math.log(tol)) / math.log(z)) - 1
        if best is None or k < best:
            best = k
    return max(best, 0)
