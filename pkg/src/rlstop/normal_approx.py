"""Normal approximation to the negative-reward waiting time."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .prob_core import RewardModel, WaitingTimeSpec, _check_count, nb_cdf, nb_mean, nb_variance


@dataclass(frozen=True)
class NormalParams:
    mu: float
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")


def normal_params(model: RewardModel, spec: WaitingTimeSpec) -> NormalParams:
    return NormalParams(mu=nb_mean(model, spec), sigma2=nb_variance(model, spec))


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF through ``erfc``, accurate in both tails."""
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def standardized_bound(model: RewardModel, spec: WaitingTimeSpec, b: int) -> float:
    """(b p - r q) / sqrt(r q), i.e. (b - mu) / sigma."""
    r = spec.r
    return (b * model.p - r * model.q) / math.sqrt(r * model.q)


def tail_normal(model: RewardModel, spec: WaitingTimeSpec, b: int) -> float:
    """Approximate Pr[W_r > b] as 1 - Phi((b p - r q) / sqrt(r q)).

    No continuity correction, so the values line up with the published
    cost-bound table.
    """
    b = _check_count(b, "b")
    # 1 - Phi(x) == Phi(-x); the latter keeps precision deep in the tail
    return std_normal_cdf(-standardized_bound(model, spec, b))


def approximation_error(model: RewardModel, spec: WaitingTimeSpec, b: int) -> float:
    """Absolute gap between the normal tail and the exact tail 1 - cdf(b)."""
    exact = 1.0 - nb_cdf(model, spec, b)
    return abs(tail_normal(model, spec, b) - exact)
