"""Sensing-outcome models: perfect binary sensing and quantized soft sensing.

The soft-sensing metric g has conditional pdfs

    f0(g) = exp(-g)                                  channel free
    f1(g) = exp(-(g + g0)) * I0(2*sqrt(g*g0))        channel busy

i.e. a unit exponential and (half of) a noncentral chi-square with 2 dof
and noncentrality 2*g0.  A threshold set t_1 < ... < t_S partitions
[0, inf) into S+1 levels; the probability of landing in level k is

    eps_k   = exp(-t_{k-1}) - exp(-t_k)                       free
    theta_k = Q1(sqrt(2 g0), sqrt(2 t_{k-1})) - Q1(..., sqrt(2 t_k))   busy

with t_0 = 0 and t_{S+1} = inf.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .numerics import bessel_i0e, marcum_q1
from .traffic import ChannelState

__all__ = ["SoftMetricModel", "ThresholdSet", "level_probs", "sample_metric", "classify"]


@dataclass(frozen=True)
class SoftMetricModel:
    """Noncentrality parameter g0 >= 0 of the busy-state metric distribution."""

    gamma0: float

    def __post_init__(self):
        if not (isinstance(self.gamma0, (int, float)) and self.gamma0 >= 0 and math.isfinite(self.gamma0)):
            raise ValueError(f"gamma0 must be a finite number >= 0, got {self.gamma0!r}")

    def f0(self, gamma: float) -> float:
        """Metric pdf given the channel is free."""
        if gamma < 0.0:
            return 0.0
        return math.exp(-gamma)

    def f1(self, gamma: float) -> float:
        """Metric pdf given the channel is busy.

        Written as exp(-(sqrt(g) - sqrt(g0))^2) * i0e(2 sqrt(g g0)) so the
        Bessel factor never overflows for large arguments.
        """
        if gamma < 0.0:
            return 0.0
        root = math.sqrt(gamma * self.gamma0)
        return math.exp(-((math.sqrt(gamma) - math.sqrt(self.gamma0)) ** 2)) * bessel_i0e(2.0 * root)


@dataclass(frozen=True)
class ThresholdSet:
    """Strictly increasing positive quantization thresholds (possibly empty)."""

    thresholds: tuple[float, ...]

    def __init__(self, thresholds=()):
        values = tuple(float(t) for t in thresholds)
        for t in values:
            if not (math.isfinite(t) and t > 0.0):
                raise ValueError(f"thresholds must be positive and finite, got {t}")
        for lo, hi in zip(values, values[1:]):
            if not lo < hi:
                raise ValueError(f"thresholds must be strictly increasing, got {values}")
        object.__setattr__(self, "thresholds", values)

    @property
    def levels(self) -> int:
        """Number of quantization levels, S + 1."""
        return len(self.thresholds) + 1

    def edges(self) -> list[tuple[float, float]]:
        """[t_{k-1}, t_k) interval per level, with t_0 = 0 and t_{S+1} = inf."""
        pts = (0.0,) + self.thresholds + (math.inf,)
        return list(zip(pts[:-1], pts[1:]))


def level_probs(
    model: SoftMetricModel, thresholds: ThresholdSet, state: ChannelState
) -> tuple[float, ...]:
    """Probability of the metric falling in each quantization level."""
    if state is ChannelState.FREE:
        upper = [math.exp(-t) for t in thresholds.thresholds]
    else:
        a = math.sqrt(2.0 * model.gamma0)
        upper = [marcum_q1(a, math.sqrt(2.0 * t)) for t in thresholds.thresholds]
    tails = [1.0] + upper + [0.0]
    return tuple(hi - lo for hi, lo in zip(tails[:-1], tails[1:]))


def sample_metric(model: SoftMetricModel, state: ChannelState, rng: np.random.Generator, size=None):
    """Draw the sensing metric conditional on the true channel state.

    Busy draws use g = ((Z1 + sqrt(2 g0))^2 + Z2^2) / 2 with Z1, Z2 iid
    standard normal, which reproduces f1 exactly.
    """
    if state is ChannelState.FREE:
        return rng.exponential(1.0, size=size)
    shift = math.sqrt(2.0 * model.gamma0)
    z1 = rng.standard_normal(size=size)
    z2 = rng.standard_normal(size=size)
    return 0.5 * ((z1 + shift) ** 2 + z2**2)


def classify(thresholds: ThresholdSet, gamma: float) -> int:
    """Level index in 1..S+1 of the right-open interval containing gamma."""
    if math.isnan(gamma) or gamma < 0.0:
        raise ValueError(f"metric must be >= 0, got {gamma}")
    return bisect.bisect_right(thresholds.thresholds, gamma) + 1
