"""Rule B: positives (side A) race negatives (side B) to h = 2m + 1 points."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .prob_core import RewardModel, log_binom

# Direct float powers and exact binomials are fine up to here; beyond, use logs.
_LOG_SPACE_M = 500


@dataclass(frozen=True)
class RuleBConfig:
    m: int
    h: int = field(init=False)

    def __post_init__(self):
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 0:
            raise ValueError(f"m must be a nonnegative integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "h", 2 * int(self.m) + 1)


@dataclass(frozen=True)
class RuleBReport:
    m: int
    p: float
    success_prob: float
    failure_prob: float
    length_min: int
    length_max: int
    per_length_probs: tuple[tuple[int, float], ...]


def win_prob_at(config: RuleBConfig, model: RewardModel, k: int) -> float:
    """f_k: probability that A reaches h exactly at observation 4m + 1 - k.

    A must hold 2m points after the first 4m - k observations and then
    score once more.
    """
    m = config.m
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= 2 * m:
        raise ValueError(f"k must be an integer in [0, {2 * m}], got {k!r}")
    k = int(k)
    if m <= _LOG_SPACE_M:
        return math.comb(4 * m - k, 2 * m) * model.p ** (2 * m + 1) * model.q ** (2 * m - k)
    log_f = (log_binom(4 * m - k, 2 * m) + (2 * m + 1) * math.log(model.p)
             + (2 * m - k) * math.log(model.q))
    return math.exp(log_f)


def success_prob(config: RuleBConfig, model: RewardModel) -> float:
    """P_m, the probability that A reaches the threshold first."""
    return math.fsum(win_prob_at(config, model, k) for k in range(2 * config.m + 1))


def failure_prob(config: RuleBConfig, model: RewardModel) -> float:
    return 1.0 - success_prob(config, model)


def episode_length_range(config: RuleBConfig) -> tuple[int, int]:
    return 2 * config.m + 1, 4 * config.m + 1


def analyze_rule_b(config: RuleBConfig, model: RewardModel) -> RuleBReport:
    per_k = tuple((k, win_prob_at(config, model, k)) for k in range(2 * config.m + 1))
    ps = math.fsum(f for _, f in per_k)
    lo, hi = episode_length_range(config)
    return RuleBReport(m=config.m, p=model.p, success_prob=ps, failure_prob=1.0 - ps,
                       length_min=lo, length_max=hi, per_length_probs=per_k)
