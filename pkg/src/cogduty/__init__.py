"""cogduty: transmission power and duration control over an unslotted
on/off primary channel, under perfect or quantized soft sensing.

The package computes closed-form primary/secondary throughput for a
sense-then-transmit secondary link, searches for the policy maximizing the
weighted sum rate (1-alpha)*Rs + alpha*Rp, and cross-validates every
analytic expression with an event-driven Monte Carlo simulator.
"""

__version__ = "0.1.0"

from .traffic import ChannelState, TrafficModel
from .link import LinkBudget
from .sensing import SoftMetricModel, ThresholdSet
from .throughput import PerfectPolicy, PolicyEvaluation, SoftPolicy, evaluate
from .optimizer import GridSpec, OptResult, optimize_perfect, optimize_soft, sweep_alpha
from .simulator import SimConfig, SimReport, simulate, validate_policy

__all__ = [
    "ChannelState",
    "TrafficModel",
    "LinkBudget",
    "SoftMetricModel",
    "ThresholdSet",
    "PerfectPolicy",
    "SoftPolicy",
    "PolicyEvaluation",
    "evaluate",
    "GridSpec",
    "OptResult",
    "optimize_perfect",
    "optimize_soft",
    "sweep_alpha",
    "SimConfig",
    "SimReport",
    "simulate",
    "validate_policy",
    "__version__",
]
