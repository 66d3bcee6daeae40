"""Rayleigh-fading closed forms for the primary/secondary link pair.

All channel gains are exponentially distributed (Rayleigh amplitude) and
independent.  With c = e^{r0} - 1, the closed forms are

    Pout(p) = 1 - [Pp*gpp / (Pp*gpp + p*c*gsp)] * exp(-c*sp2 / (Pp*gpp))
    C0(p)   = e^x E1(x),            x = ss2 / (p*gss)
    C1(p)   = w1/(w1-w2) * [e^{x1}E1(x1) - e^{x2}E1(x2)],
              w1 = p*gss, w2 = Pp*gps, xi = ss2/wi
    C1(p)   = 1 - (ss2/w) e^{ss2/w} E1(ss2/w)   when w1 = w2 = w

where gains denote mean values.  Rates are in nats.  Powers above p_max
are evaluated (the optimizer enforces the cap) but flagged with a warning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .numerics import exp_integral_e1

__all__ = [
    "LinkBudget",
    "outage_prob",
    "capacity_free",
    "capacity_interfered",
    "combined_gain_pdf",
]

# relative width of the equal-means branch; avoids catastrophic cancellation
# in the 1/(w1 - w2) prefactor of the general formula
_EQUAL_MEANS_RTOL = 1e-9


@dataclass(frozen=True)
class LinkBudget:
    """Powers, noise variances, mean channel gains and the primary rate (nats)."""

    p_primary: float
    r_primary: float
    noise_p: float
    noise_s: float
    mean_gain_pp: float
    mean_gain_ss: float
    mean_gain_ps: float
    mean_gain_sp: float
    p_max: float

    def __post_init__(self):
        for name in (
            "p_primary",
            "r_primary",
            "noise_p",
            "noise_s",
            "mean_gain_pp",
            "mean_gain_ss",
            "mean_gain_ps",
            "mean_gain_sp",
            "p_max",
        ):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")

    @property
    def rate_gap(self) -> float:
        """c = e^{r0} - 1, the SINR threshold of the primary's fixed rate."""
        return math.expm1(self.r_primary)


def _check_power(link: LinkBudget, p: float) -> None:
    if math.isnan(p) or p < 0.0:
        raise ValueError(f"power must be >= 0, got {p}")
    if p > link.p_max:
        warnings.warn(
            f"power {p} exceeds p_max={link.p_max}; evaluating anyway", stacklevel=3
        )


def outage_prob(link: LinkBudget, p: float) -> float:
    """Probability the primary's fixed rate exceeds its instantaneous capacity
    while the secondary transmits at power p."""
    _check_power(link, p)
    c = link.rate_gap
    direct = link.p_primary * link.mean_gain_pp
    return 1.0 - direct / (direct + p * c * link.mean_gain_sp) * math.exp(
        -c * link.noise_p / direct
    )


def capacity_free(link: LinkBudget, p: float) -> float:
    """Secondary ergodic capacity (nats/use) with the primary silent."""
    _check_power(link, p)
    if p == 0.0:
        return 0.0
    x = link.noise_s / (p * link.mean_gain_ss)
    return math.exp(x) * exp_integral_e1(x)


def capacity_interfered(link: LinkBudget, p: float) -> float:
    """Secondary ergodic capacity (nats/use) under primary interference."""
    _check_power(link, p)
    if p == 0.0:
        return 0.0
    w1 = p * link.mean_gain_ss
    w2 = link.p_primary * link.mean_gain_ps
    if abs(w1 - w2) < _EQUAL_MEANS_RTOL * max(w1, w2):
        x = link.noise_s / (0.5 * (w1 + w2))
        return 1.0 - x * math.exp(x) * exp_integral_e1(x)
    x1 = link.noise_s / w1
    x2 = link.noise_s / w2
    psi1 = math.exp(x1) * exp_integral_e1(x1)
    psi2 = math.exp(x2) * exp_integral_e1(x2)
    return w1 / (w1 - w2) * (psi1 - psi2)


def combined_gain_pdf(link: LinkBudget, p: float, z: float) -> float:
    """pdf of z = (Pp*g_ps + p*g_ss)/ss2, the normalized total received power
    at the secondary receiver; the convolution of two exponential densities.

    Used as an independent route to the interfered capacity:
    C1a = int_0^inf log(1+z) f(z) dz equals capacity_interfered plus the
    interference-only term e^{x2}E1(x2).
    """
    if z < 0.0:
        return 0.0
    if p <= 0.0:
        raise ValueError("combined_gain_pdf requires p > 0")
    s2 = link.noise_s
    w1 = p * link.mean_gain_ss
    w2 = link.p_primary * link.mean_gain_ps
    if abs(w1 - w2) < _EQUAL_MEANS_RTOL * max(w1, w2):
        w = 0.5 * (w1 + w2)
        return s2 * s2 * z / (w * w) * math.exp(-s2 * z / w)
    return s2 * (math.exp(-s2 * z / w1) - math.exp(-s2 * z / w2)) / (w1 - w2)
