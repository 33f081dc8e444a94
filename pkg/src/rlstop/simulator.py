"""Seeded Monte Carlo episodes for both stopping rules.

Randomness is counter based: observation ``t`` of episode ``e`` under seed
``s`` is a pure function of ``(s, e, t)``. Each episode owns a SplitMix64
stream whose starting state is derived from the seed and the episode index,
so results do not depend on how episodes are batched or spread over workers.
All aggregation is done on integer sums, which makes summaries bit-identical
for a given seed.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .prob_core import RewardModel, nb_mean, nb_variance
from .rule_a import Conclusion, CostModel, RuleAConfig, classify_outcome, exceedance_exact, \
    max_success_negatives, success_probability
from .rule_b import RuleBConfig, success_prob

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)

GUARD_CAP = 10**9
DEFAULT_BLOCK = 1 << 17


class RunawayEpisodeError(RuntimeError):
    """An episode exceeded the observation guard cap (a defect, not a domain outcome)."""


# -- scalar generator -------------------------------------------------------

def mix64(x: int) -> int:
    """SplitMix64 output function."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _M1) & MASK64
    x = ((x ^ (x >> 27)) * _M2) & MASK64
    return x ^ (x >> 31)


def episode_key(seed: int, episode: int) -> int:
    return mix64(mix64(seed) + (episode + 1) * GAMMA)


def uniform_at(seed: int, episode: int, t: int) -> float:
    """The ``t``-th uniform in [0, 1) of an episode's stream."""
    return (mix64(episode_key(seed, episode) + (t + 1) * GAMMA) >> 11) * _INV_2_53


def bernoulli_stream(p: float, seed: int, episode: int) -> Iterator[bool]:
    """Infinite stream of observations, True for a positive reward."""
    key = episode_key(seed, episode)
    t = 0
    while True:
        t += 1
        yield (mix64(key + t * GAMMA) >> 11) * _INV_2_53 < p


# -- vectorised generator ---------------------------------------------------

def _mix64_np(x: np.ndarray) -> np.ndarray:
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_M1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_M2)
    return x ^ (x >> np.uint64(31))


def _episode_keys(seed: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.uint64) + np.uint64(1)
    base = np.uint64(mix64(seed))
    with np.errstate(over="ignore"):
        return _mix64_np(base + idx * np.uint64(GAMMA))


def _uniforms(keys: np.ndarray, t: int) -> np.ndarray:
    step = np.uint64(((t + 1) * GAMMA) & MASK64)
    with np.errstate(over="ignore"):
        bits = _mix64_np(keys + step) >> np.uint64(11)
    return bits.astype(np.float64) * _INV_2_53


# -- episodes ---------------------------------------------------------------

@dataclass(frozen=True)
class EpisodeOutcome:
    positives: int
    negatives: int
    observations: int
    conclusion: Conclusion
    cost: float | None = None


def run_rule_a_episode(model: RewardModel, config: RuleAConfig, stream: Iterable[bool],
                       costs: CostModel | None = None) -> EpisodeOutcome:
    """Consume observations until ``r`` positives have been seen.

    ``model`` is only used by callers that build ``stream`` from it; the
    episode logic itself reads the stream.
    """
    positives = negatives = 0
    it = iter(stream)
    while positives < config.r:
        if positives + negatives >= GUARD_CAP:
            raise RunawayEpisodeError(f"rule A episode passed {GUARD_CAP} observations")
        if next(it):
            positives += 1
        else:
            negatives += 1
    n = positives + negatives
    return EpisodeOutcome(positives, negatives, n, classify_outcome(negatives, config),
                          None if costs is None else n * costs.c)


def run_rule_b_episode(model: RewardModel, config: RuleBConfig, stream: Iterable[bool],
                       costs: CostModel | None = None) -> EpisodeOutcome:
    """Consume observations until either side holds h points; A (positives) winning is success."""
    h = config.h
    positives = negatives = 0
    it = iter(stream)
    while positives < h and negatives < h:
        if next(it):
            positives += 1
        else:
            negatives += 1
    n = positives + negatives
    conclusion = Conclusion.SUCCESS if positives == h else Conclusion.FAILURE
    return EpisodeOutcome(positives, negatives, n, conclusion,
                          None if costs is None else n * costs.c)


def _rule_a_block(p: float, r: int, keys: np.ndarray):
    """Negative counts for a block of rule A episodes."""
    n = keys.size
    pos = np.zeros(n, dtype=np.int64)
    neg = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    t = 0
    while active.size:
        if t >= GUARD_CAP:
            raise RunawayEpisodeError(f"rule A episode passed {GUARD_CAP} observations")
        hit = _uniforms(keys[active], t) < p
        pos[active] += hit
        neg[active] += ~hit
        active = active[pos[active] < r]
        t += 1
    return neg


def _rule_b_block(p: float, h: int, keys: np.ndarray):
    n = keys.size
    pos = np.zeros(n, dtype=np.int64)
    neg = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    t = 0
    while active.size:
        hit = _uniforms(keys[active], t) < p
        pos[active] += hit
        neg[active] += ~hit
        active = active[(pos[active] < h) & (neg[active] < h)]
        t += 1
    return pos, neg


# -- aggregation ------------------------------------------------------------

@dataclass
class _Partial:
    """Integer sufficient statistics; merging is exact."""

    n: int = 0
    sum_neg: int = 0
    sum_neg2: int = 0
    sum_obs: int = 0
    successes: int = 0
    exceed: int = 0
    lengths: dict = field(default_factory=dict)
    neg_hist: dict = field(default_factory=dict)

    def merge(self, other: "_Partial") -> "_Partial":
        return _Partial(self.n + other.n, self.sum_neg + other.sum_neg,
                        self.sum_neg2 + other.sum_neg2, self.sum_obs + other.sum_obs,
                        self.successes + other.successes, self.exceed + other.exceed,
                        _merge_counts(self.lengths, other.lengths),
                        _merge_counts(self.neg_hist, other.neg_hist))


def _merge_counts(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


def _counts(values: np.ndarray) -> dict:
    keys, counts = np.unique(values, return_counts=True)
    return {int(k): int(c) for k, c in zip(keys, counts)}


@dataclass(frozen=True)
class SimulationConfig:
    n_episodes: int
    seed: int
    model: RewardModel
    rule: RuleAConfig | RuleBConfig
    bound: int | None = None
    cost: CostModel | None = None

    def __post_init__(self):
        if isinstance(self.n_episodes, bool) or int(self.n_episodes) != self.n_episodes \
                or self.n_episodes < 1:
            raise ValueError(f"n_episodes must be a positive integer, got {self.n_episodes!r}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not isinstance(self.rule, (RuleAConfig, RuleBConfig)):
            raise TypeError("rule must be a RuleAConfig or RuleBConfig")
        if self.bound is not None:
            if isinstance(self.rule, RuleBConfig):
                raise ValueError("a negative-count bound only applies to rule A")
            if int(self.bound) != self.bound or self.bound < 0:
                raise ValueError(f"bound must be a nonnegative integer, got {self.bound!r}")


@dataclass(frozen=True)
class SimulationSummary:
    rule: str
    n_episodes: int
    seed: int
    empirical_mean_negatives: float
    empirical_var_negatives: float
    empirical_exceedance: float | None
    empirical_success_rate: float
    mean_cost: float | None
    analytic: dict
    negatives_counts: dict = field(default_factory=dict)
    length_counts: dict | None = None


def episode_arrays(config: SimulationConfig, start: int, stop: int):
    """(positives, negatives) per episode for indices ``start..stop-1``."""
    keys = _episode_keys(config.seed, start, stop)
    rule = config.rule
    if isinstance(rule, RuleAConfig):
        neg = _rule_a_block(config.model.p, rule.r, keys)
        return np.full_like(neg, rule.r), neg
    return _rule_b_block(config.model.p, rule.h, keys)


def _block_partial(config: SimulationConfig, start: int, stop: int) -> _Partial:
    pos, neg = episode_arrays(config, start, stop)
    obs = pos + neg
    rule = config.rule
    if isinstance(rule, RuleAConfig):
        successes = int(np.count_nonzero(neg <= max_success_negatives(rule)))
        exceed = 0 if config.bound is None else int(np.count_nonzero(neg > config.bound))
        lengths = {}
    else:
        successes = int(np.count_nonzero(pos == rule.h))
        exceed = 0
        lengths = _counts(obs)
    return _Partial(
        n=int(neg.size),
        sum_neg=int(neg.sum()),
        sum_neg2=int((neg * neg).sum()),
        sum_obs=int(obs.sum()),
        successes=successes,
        exceed=exceed,
        lengths=lengths,
        neg_hist=_counts(neg),
    )


def _ratio(num, den) -> float:
    """Correctly rounded float of an exact rational."""
    return float(Fraction(num, den))


def _analytic(config: SimulationConfig) -> dict:
    model, rule = config.model, config.rule
    if isinstance(rule, RuleAConfig):
        out = {
            "mean_negatives": nb_mean(model, rule.spec),
            "var_negatives": nb_variance(model, rule.spec),
            "success_rate": success_probability(model, rule),
        }
        if config.bound is not None:
            out["exceedance"] = exceedance_exact(model, rule, config.bound)
        if config.cost is not None:
            out["mean_cost"] = (rule.r + nb_mean(model, rule.spec)) * config.cost.c
        return out
    return {"success_rate": success_prob(rule, model)}


def simulate(config: SimulationConfig, block_size: int = DEFAULT_BLOCK,
             workers: int = 1) -> SimulationSummary:
    """Run ``config.n_episodes`` episodes and summarise them.

    ``block_size`` and ``workers`` only change how the work is split; the
    summary is identical for any choice.
    """
    if block_size < 1 or workers < 1:
        raise ValueError("block_size and workers must be positive")
    n = int(config.n_episodes)
    bounds = [(s, min(s + block_size, n)) for s in range(0, n, block_size)]
    if workers == 1:
        partials = [_block_partial(config, s, e) for s, e in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda se: _block_partial(config, *se), bounds))
    total = _Partial()
    for part in partials:
        total = total.merge(part)

    var = (_ratio(total.n * total.sum_neg2 - total.sum_neg**2, total.n * (total.n - 1))
           if total.n > 1 else 0.0)
    is_a = isinstance(config.rule, RuleAConfig)
    return SimulationSummary(
        rule="A" if is_a else "B",
        n_episodes=total.n,
        seed=config.seed,
        empirical_mean_negatives=_ratio(total.sum_neg, total.n),
        empirical_var_negatives=var,
        empirical_exceedance=(_ratio(total.exceed, total.n)
                              if is_a and config.bound is not None else None),
        empirical_success_rate=_ratio(total.successes, total.n),
        mean_cost=(None if config.cost is None
                   else float(Fraction(total.sum_obs, total.n) * Fraction(config.cost.c))),
        analytic=_analytic(config),
        negatives_counts=dict(sorted(total.neg_hist.items())),
        length_counts=None if is_a else dict(sorted(total.lengths.items())),
    )


def binomial_se(prob: float, n: int) -> float:
    """Standard error of an empirical frequency with success probability ``prob``."""
    return math.sqrt(prob * (1.0 - prob) / n)
