"""Rule A: stop after ``r`` positive rewards, judge success by the negatives ratio."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .normal_approx import tail_normal
from .prob_core import RewardModel, WaitingTimeSpec, _check_count, nb_cdf, nb_mean


class Conclusion(str, enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"


@dataclass(frozen=True)
class RuleAConfig:
    r: int
    rho_star: float

    def __post_init__(self):
        WaitingTimeSpec(self.r)
        if not 0.0 < self.rho_star <= 1.0:
            raise ValueError(f"rho_star must lie in (0, 1], got {self.rho_star!r}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "rho_star", float(self.rho_star))

    @property
    def spec(self) -> WaitingTimeSpec:
        return WaitingTimeSpec(self.r)


@dataclass(frozen=True)
class CostModel:
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"cost per observation must be positive, got {self.c!r}")


@dataclass(frozen=True)
class BoundSpec:
    """How the negative-count bound ``b`` is obtained.

    Exactly one of ``absolute`` (b itself), ``additive`` (E[W_r] + d) or
    ``multiplicative`` (alpha * E[W_r]) must be given.
    """

    absolute: int | None = None
    additive: float | None = None
    multiplicative: float | None = None

    def __post_init__(self):
        given = [v is not None for v in (self.absolute, self.additive, self.multiplicative)]
        if sum(given) != 1:
            raise ValueError("exactly one of absolute, additive, multiplicative must be set")
        if self.absolute is not None:
            _check_count(self.absolute, "absolute bound")
        if self.additive is not None and not self.additive > 0:
            raise ValueError(f"additive offset d must be positive, got {self.additive!r}")
        if self.multiplicative is not None and not self.multiplicative >= 1:
            raise ValueError(f"multiplier alpha must be >= 1, got {self.multiplicative!r}")

    @property
    def kind(self) -> str:
        if self.absolute is not None:
            return "absolute"
        return "additive" if self.additive is not None else "multiplicative"

    @property
    def value(self):
        return {"absolute": self.absolute, "additive": self.additive,
                "multiplicative": self.multiplicative}[self.kind]


@dataclass(frozen=True)
class RuleAReport:
    expected_negatives: float
    resolved_bound: int
    exceedance_exact: float
    exceedance_approx: float
    approx_error: float
    min_cost: float
    max_cost_at_bound: float


def rewards_ratio(model: RewardModel) -> float:
    """Expected negatives per positive reward, q / p."""
    return model.q / model.p


def classify_outcome(w: int, config: RuleAConfig) -> Conclusion:
    """Success iff W / r < rho_star; the boundary counts as failure."""
    w = _check_count(w, "W")
    return Conclusion.SUCCESS if w / config.r < config.rho_star else Conclusion.FAILURE


def estimate_p(w: int, r: int) -> float:
    w = _check_count(w, "W")
    r = WaitingTimeSpec(r).r
    return r / (r + w)


def max_success_negatives(config: RuleAConfig) -> int:
    """Largest W that ``classify_outcome`` still calls a success (-1 if none)."""
    w = max(math.ceil(config.rho_star * config.r) + 1, 0)
    while w >= 0 and classify_outcome(w, config) is Conclusion.FAILURE:
        w -= 1
    return w


def success_probability(model: RewardModel, config: RuleAConfig) -> float:
    """Pr[W_r / r < rho_star] under the exact negative binomial law."""
    w = max_success_negatives(config)
    return 0.0 if w < 0 else nb_cdf(model, config.spec, w)


def round_half_up(x: float) -> int:
    """Nearest integer, ties upward.

    ``x`` is first snapped to 9 decimals so representation noise such as
    1.5 * 4.999999999999999 still counts as the tie 7.5.
    """
    snapped = Decimal(repr(x)).quantize(Decimal("1e-9"), rounding=ROUND_HALF_UP)
    return int(snapped.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def resolve_bound(spec: BoundSpec, model: RewardModel, config: RuleAConfig) -> int:
    if spec.kind == "absolute":
        b = spec.absolute
    else:
        mean = nb_mean(model, config.spec)
        raw = mean + spec.additive if spec.kind == "additive" else spec.multiplicative * mean
        b = round_half_up(raw)
    if b < 0:
        raise ValueError(f"resolved bound is negative: {b}")
    return int(b)


def exceedance_exact(model: RewardModel, config: RuleAConfig, b: int) -> float:
    """P_b = 1 - sum_{k<=b} Pr[W_r = k]."""
    return 1.0 - nb_cdf(model, config.spec, b)


def exceedance_approx(model: RewardModel, config: RuleAConfig, b: int) -> float:
    return tail_normal(model, config.spec, b)


def episode_cost(observations: int, costs: CostModel) -> float:
    return _check_count(observations, "observations") * costs.c


def analyze_rule_a(model: RewardModel, config: RuleAConfig, costs: CostModel,
                   spec: BoundSpec) -> RuleAReport:
    b = resolve_bound(spec, model, config)
    exact = exceedance_exact(model, config, b)
    approx = exceedance_approx(model, config, b)
    return RuleAReport(
        expected_negatives=nb_mean(model, config.spec),
        resolved_bound=b,
        exceedance_exact=exact,
        exceedance_approx=approx,
        approx_error=abs(approx - exact),
        min_cost=episode_cost(config.r, costs),
        max_cost_at_bound=episode_cost(config.r + b, costs),
    )
