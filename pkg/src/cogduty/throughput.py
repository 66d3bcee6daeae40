"""Analytic policy evaluation: steady state, mean cycle and weighted rates.

A policy pins one (power, duration) action per sensing outcome.  The
chain of sensing instants is Markov in the true channel state; with

    A = sum_k eps_k   P00(ts + T_k)
    B = sum_k theta_k P10(ts + T_k)

the steady-state probability of sensing a free channel is the fixed
point of pi <- pi*A + (1-pi)*B, i.e. Pss = B / (1 - A + B).  The mean
time between sensing instants is

    mu = Pss * sum_k eps_k (ts + T_k) + (1-Pss) * sum_k theta_k (ts + T_k)

and the long-run rates average the free/busy split of each window,

    Rs*mu = sum_k [Pss eps_k df(T_k) + (1-Pss) theta_k db(T_k)] C0(P_k)
          + sum_k [Pss eps_k (T_k-df(T_k)) + (1-Pss) theta_k (T_k-db(T_k))] C1(P_k)
    Rp*mu = r0 * sum_k [same overlap weights](1 - Pout(P_k))

with df/db the expected free time given a free/busy observation.
Perfect sensing is the degenerate case eps = (1, 0), theta = (0, 1) over
the two actions (free action first), so both modes share one code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .link import LinkBudget, capacity_free, capacity_interfered, outage_prob
from .sensing import SoftMetricModel, ThresholdSet, level_probs
from .traffic import ChannelState, TrafficModel, expected_free_time, transition_prob

__all__ = [
    "PerfectPolicy",
    "SoftPolicy",
    "PolicyEvaluation",
    "policy_levels",
    "steady_state_free",
    "mean_cycle",
    "evaluate",
]


def _check_action(name, value, minimum=0.0):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= minimum):
        raise ValueError(f"{name} must be finite and >= {minimum}, got {value!r}")


@dataclass(frozen=True)
class PerfectPolicy:
    """Transmit actions keyed on the (error-free) sensed state."""

    p_free: float
    t_free: float
    p_busy: float
    t_busy: float

    def __post_init__(self):
        for name in ("p_free", "t_free", "p_busy", "t_busy"):
            _check_action(name, getattr(self, name))


@dataclass(frozen=True)
class SoftPolicy:
    """Transmit actions keyed on the quantization level of the metric."""

    thresholds: ThresholdSet
    powers: tuple[float, ...]
    durations: tuple[float, ...]

    def __init__(self, thresholds, powers, durations):
        if not isinstance(thresholds, ThresholdSet):
            thresholds = ThresholdSet(thresholds)
        powers = tuple(float(p) for p in powers)
        durations = tuple(float(t) for t in durations)
        n = thresholds.levels
        if len(powers) != n or len(durations) != n:
            raise ValueError(
                f"need {n} powers and durations for {n} levels, "
                f"got {len(powers)} and {len(durations)}"
            )
        for i, p in enumerate(powers):
            _check_action(f"powers[{i}]", p)
        for i, t in enumerate(durations):
            _check_action(f"durations[{i}]", t)
        object.__setattr__(self, "thresholds", thresholds)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "durations", durations)


@dataclass(frozen=True)
class PolicyEvaluation:
    """Steady-state quantities and the weighted objective for one policy."""

    p_ss: float
    mean_cycle: float
    rate_secondary: float
    rate_primary: float
    objective: float
    alpha: float


def policy_levels(policy, metric: SoftMetricModel | None):
    """(eps, theta, powers, durations) per level for either policy kind."""
    if isinstance(policy, PerfectPolicy):
        return (
            (1.0, 0.0),
            (0.0, 1.0),
            (policy.p_free, policy.p_busy),
            (policy.t_free, policy.t_busy),
        )
    if metric is None:
        raise ValueError("soft policies need a SoftMetricModel")
    eps = level_probs(metric, policy.thresholds, ChannelState.FREE)
    theta = level_probs(metric, policy.thresholds, ChannelState.BUSY)
    return eps, theta, policy.powers, policy.durations


def steady_state_free(
    traffic: TrafficModel,
    t_s: float,
    policy,
    metric: SoftMetricModel | None = None,
) -> float:
    """Steady-state probability that a sensing instant finds the channel free."""
    if not t_s > 0.0:
        raise ValueError(f"t_s must be > 0, got {t_s}")
    eps, theta, _, durations = policy_levels(policy, metric)
    a = sum(
        e * transition_prob(traffic, ChannelState.FREE, ChannelState.FREE, t_s + t)
        for e, t in zip(eps, durations)
    )
    b = sum(
        th * transition_prob(traffic, ChannelState.BUSY, ChannelState.FREE, t_s + t)
        for th, t in zip(theta, durations)
    )
    return b / (1.0 - a + b)


def mean_cycle(t_s, durations, eps, theta, p_ss) -> float:
    """Average time between consecutive sensing instants."""
    free_len = sum(e * (t_s + t) for e, t in zip(eps, durations))
    busy_len = sum(th * (t_s + t) for th, t in zip(theta, durations))
    return p_ss * free_len + (1.0 - p_ss) * busy_len


def evaluate(
    traffic: TrafficModel,
    link: LinkBudget,
    t_s: float,
    alpha: float,
    policy,
    metric: SoftMetricModel | None = None,
) -> PolicyEvaluation:
    """Long-run secondary/primary rates and the weighted objective."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    eps, theta, powers, durations = policy_levels(policy, metric)
    p_ss = steady_state_free(traffic, t_s, policy, metric)
    mu = mean_cycle(t_s, durations, eps, theta, p_ss)

    rate_s = 0.0
    rate_p = 0.0
    for e, th, p, t in zip(eps, theta, powers, durations):
        d_free = expected_free_time(traffic, ChannelState.FREE, t)
        d_busy = expected_free_time(traffic, ChannelState.BUSY, t)
        w_free = p_ss * e * d_free + (1.0 - p_ss) * th * d_busy
        w_overlap = p_ss * e * (t - d_free) + (1.0 - p_ss) * th * (t - d_busy)
        rate_s += w_free * capacity_free(link, p) + w_overlap * capacity_interfered(link, p)
        rate_p += w_overlap * (1.0 - outage_prob(link, p))
    rate_s /= mu
    rate_p *= link.r_primary / mu

    return PolicyEvaluation(
        p_ss=p_ss,
        mean_cycle=mu,
        rate_secondary=rate_s,
        rate_primary=rate_p,
        objective=(1.0 - alpha) * rate_s + alpha * rate_p,
        alpha=alpha,
    )
