"""Alternating on/off primary-channel model.

The primary holds each state for an exponential time (means t_on_mean and
t_off_mean), giving a two-state Markov process in continuous time.  With
u = T_on/(T_on+T_off) and L = 1/T_on + 1/T_off, the state-transition
probabilities over a lag t are

    P00(t) = (1-u) + u e^{-L t}        free -> free
    P10(t) = (1-u)(1 - e^{-L t})       busy -> free

and the expected free time accumulated over a window of length t is the
integral of the matching transition probability:

    delta_free(t) = (1-u) t + (u/L)(1 - e^{-L t})
    delta_busy(t) = (1-u)(t - (1 - e^{-L t})/L)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "ChannelState",
    "TrafficModel",
    "duration_pdf",
    "utilization",
    "transition_prob",
    "expected_free_time",
]


class ChannelState(enum.Enum):
    FREE = 0
    BUSY = 1


@dataclass(frozen=True)
class TrafficModel:
    """Mean on/off durations of the primary (both strictly positive)."""

    t_on_mean: float
    t_off_mean: float

    def __post_init__(self):
        for name in ("t_on_mean", "t_off_mean"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")

    @property
    def lambda_on(self) -> float:
        return 1.0 / self.t_on_mean

    @property
    def lambda_off(self) -> float:
        return 1.0 / self.t_off_mean

    @property
    def total_rate(self) -> float:
        return self.lambda_on + self.lambda_off

    @property
    def utilization(self) -> float:
        return self.t_on_mean / (self.t_on_mean + self.t_off_mean)


def _check_time(t):
    if math.isnan(t) or t < 0.0:
        raise ValueError(f"time must be >= 0, got {t}")


def duration_pdf(model: TrafficModel, state: ChannelState, t: float) -> float:
    """pdf of the holding time in `state`, lam * exp(-lam * t)."""
    _check_time(t)
    lam = model.lambda_on if state is ChannelState.BUSY else model.lambda_off
    return lam * math.exp(-lam * t)


def utilization(model: TrafficModel) -> float:
    """Long-run fraction of time the primary is on."""
    return model.utilization


def transition_prob(model: TrafficModel, frm: ChannelState, to: ChannelState, t: float) -> float:
    """Probability the channel is in state `to` a time t after being seen in `frm`."""
    _check_time(t)
    u = model.utilization
    decay = math.exp(-model.total_rate * t)
    if frm is ChannelState.FREE:
        p_free = (1.0 - u) + u * decay
    else:
        p_free = (1.0 - u) * (1.0 - decay)
    return p_free if to is ChannelState.FREE else 1.0 - p_free


def expected_free_time(model: TrafficModel, sensed: ChannelState, t: float) -> float:
    """Expected free time within [0, t] given the state observed at 0.

    Equals the integral of transition_prob(model, sensed, FREE, s) over
    s in [0, t]; closed form, exact for the exponential model.
    """
    _check_time(t)
    u = model.utilization
    rate = model.total_rate
    ramp = -math.expm1(-rate * t) / rate  # (1 - e^{-L t}) / L, accurate near 0
    if sensed is ChannelState.FREE:
        return (1.0 - u) * t + u * ramp
    return (1.0 - u) * (t - ramp)
