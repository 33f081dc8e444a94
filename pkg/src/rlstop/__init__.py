"""Stopping rules for learning episodes with random positive/negative rewards."""
from .normal_approx import (NormalParams, approximation_error, normal_params, std_normal_cdf,
                            tail_normal)
from .prob_core import (RewardModel, WaitingTimeSpec, geometric_pmf, nb_cdf, nb_mean, nb_pmf,
                        nb_variance, pgf_eval)
from .rule_a import (BoundSpec, Conclusion, CostModel, RuleAConfig, RuleAReport, analyze_rule_a,
                     classify_outcome, episode_cost, estimate_p, exceedance_approx,
                     exceedance_exact, resolve_bound, rewards_ratio, success_probability)
from .rule_b import (RuleBConfig, RuleBReport, analyze_rule_b, episode_length_range,
                     failure_prob, success_prob, win_prob_at)
from .simulator import (EpisodeOutcome, SimulationConfig, SimulationSummary, run_rule_a_episode,
                        run_rule_b_episode, simulate)

__version__ = "0.1.0"
