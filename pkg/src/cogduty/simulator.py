"""Event-driven Monte Carlo of the sense/transmit cycle.

The primary's on/off trajectory is generated exactly (alternating
exponential holding times, no time discretization).  Each cycle senses,
waits t_s, transmits the policy's (power, duration) action, and accrues

    secondary nats:  free_overlap * log(1 + p*g_ss/ss2)
                   + busy_overlap * log(1 + p*g_ss/(Pp*g_ps + ss2))
    primary nats:    r0 * busy_overlap * 1{no outage}

with fresh gains g_ss, g_ps, g_pp, g_sp drawn every cycle (block fading)
and the outage event r0 > log(1 + Pp*g_pp/(p*g_sp + sp2)) evaluated per
cycle.  `sensing_lag` positions the measurement window: 0 starts it at
the sensing instant (matching the analytic formulas, which count the
window's free time from the observation), t_s starts it where the
transmission physically begins.

Replicas own independent child streams spawned from one master seed, so
results are bit-identical regardless of scheduling.
"""

from __future__ import annotations

import bisect
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .link import LinkBudget
from .sensing import SoftMetricModel, sample_metric
from .throughput import PerfectPolicy, SoftPolicy, evaluate, policy_levels
from .traffic import ChannelState, TrafficModel

__all__ = [
    "SimConfig",
    "SimReport",
    "ValidationRow",
    "ValidationRecord",
    "simulate",
    "validate_policy",
    "thread_budget",
]

_CHUNK = 8192  # renewal events drawn per trajectory extension


@dataclass(frozen=True)
class SimConfig:
    """Cycle budget, master seed and measurement conventions."""

    cycles: int = 100_000
    seed: int = 0
    sensing_lag: float = 0.0
    credit_sensing_primary: bool = False
    replicas: int = 10

    def __post_init__(self):
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.sensing_lag < 0.0:
            raise ValueError("sensing_lag must be >= 0")


@dataclass(frozen=True)
class SimReport:
    """Empirical rates and cycle statistics with across-replica standard errors."""

    rate_secondary_mean: float
    rate_secondary_se: float
    rate_primary_mean: float
    rate_primary_se: float
    p_ss_empirical: float
    mean_cycle_empirical: float
    cycles_run: int
    level_occupancy: tuple[float, ...]


class _Renewal:
    """Exact on/off trajectory with prefix sums of accumulated free time.

    Event times and prefix sums are kept as plain lists so the hot loop
    can use bisect; chunks are drawn vectorized from the replica stream.
    """

    def __init__(self, traffic: TrafficModel, rng: np.random.Generator):
        self.traffic = traffic
        self.rng = rng
        # stationary start: busy with probability u, fresh holding time
        # (memorylessness makes the residual exponential again)
        self.start_busy = bool(rng.random() < traffic.utilization)
        self.times = [0.0]
        self.free_prefix = [0.0]
        self._extend()

    def _extend(self):
        n0 = len(self.times) - 1
        first_busy = self.start_busy ^ (n0 % 2 == 1)
        means = np.empty(_CHUNK)
        if first_busy:
            means[0::2] = self.traffic.t_on_mean
            means[1::2] = self.traffic.t_off_mean
        else:
            means[0::2] = self.traffic.t_off_mean
            means[1::2] = self.traffic.t_on_mean
        holds = self.rng.exponential(1.0, size=_CHUNK) * means
        free_holds = np.where(
            (np.arange(n0, n0 + _CHUNK) % 2 == 0) ^ self.start_busy, holds, 0.0
        )
        self.times.extend((self.times[-1] + np.cumsum(holds)).tolist())
        self.free_prefix.extend((self.free_prefix[-1] + np.cumsum(free_holds)).tolist())

    def ensure(self, t: float):
        while self.times[-1] <= t:
            self._extend()

    def is_free(self, t: float) -> bool:
        idx = bisect.bisect_right(self.times, t) - 1
        return (idx % 2 == 0) ^ self.start_busy

    def free_before(self, t: float) -> float:
        idx = bisect.bisect_right(self.times, t) - 1
        if (idx % 2 == 0) ^ self.start_busy:
            return self.free_prefix[idx] + (t - self.times[idx])
        return self.free_prefix[idx]

    def free_between(self, a: float, b: float) -> float:
        return self.free_before(b) - self.free_before(a)


def thread_budget() -> int:
    """Worker cap from COGDUTY_THREADS (0 or unset = auto)."""
    raw = os.environ.get("COGDUTY_THREADS", "0")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"COGDUTY_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ValueError(f"COGDUTY_THREADS must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def _run_replica(traffic, link, t_s, policy, metric, config, n_cycles, seed_seq):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    renewal = _Renewal(traffic, rng)
    eps, theta, powers, durations = policy_levels(policy, metric)
    n_levels = len(powers)
    soft = isinstance(policy, SoftPolicy)

    g_ss = rng.exponential(link.mean_gain_ss, size=n_cycles).tolist()
    g_ps = rng.exponential(link.mean_gain_ps, size=n_cycles).tolist()
    g_pp = rng.exponential(link.mean_gain_pp, size=n_cycles).tolist()
    g_sp = rng.exponential(link.mean_gain_sp, size=n_cycles).tolist()
    if soft:
        free_metrics = sample_metric(metric, ChannelState.FREE, rng, size=n_cycles).tolist()
        busy_metrics = sample_metric(metric, ChannelState.BUSY, rng, size=n_cycles).tolist()
        level_edges = list(policy.thresholds.thresholds)

    ss2 = link.noise_s
    sp2 = link.noise_p
    p_p = link.p_primary
    r0 = link.r_primary
    lag = config.sensing_lag

    t = 0.0
    sec_nats = 0.0
    prim_nats = 0.0
    free_senses = 0
    level_counts = [0] * n_levels
    i_free = i_busy = 0
    for m in range(n_cycles):
        renewal.ensure(t)
        free_now = renewal.is_free(t)
        if free_now:
            free_senses += 1
        if soft:
            if free_now:
                g = free_metrics[i_free]
                i_free += 1
            else:
                g = busy_metrics[i_busy]
                i_busy += 1
            k = bisect.bisect_right(level_edges, g)
        else:
            k = 0 if free_now else 1
        level_counts[k] += 1
        p = powers[k]
        t_tx = durations[k]

        w0 = t + lag
        w1 = w0 + t_tx
        renewal.ensure(max(w1, t + t_s + t_tx))
        free_ov = renewal.free_between(w0, w1) if t_tx > 0.0 else 0.0
        busy_ov = t_tx - free_ov

        if p > 0.0 and t_tx > 0.0:
            sec_nats += free_ov * math.log1p(p * g_ss[m] / ss2)
            sec_nats += busy_ov * math.log1p(p * g_ss[m] / (p_p * g_ps[m] + ss2))
        if busy_ov > 0.0:
            capacity = math.log1p(p_p * g_pp[m] / (p * g_sp[m] + sp2))
            if r0 <= capacity:
                prim_nats += r0 * busy_ov
        if config.credit_sensing_primary and t_s > 0.0:
            busy_sense = t_s - renewal.free_between(t, t + t_s)
            if busy_sense > 0.0 and r0 <= math.log1p(p_p * g_pp[m] / sp2):
                prim_nats += r0 * busy_sense

        t += t_s + t_tx

    elapsed = t
    return (
        sec_nats / elapsed,
        prim_nats / elapsed,
        free_senses / n_cycles,
        elapsed / n_cycles,
        [c / n_cycles for c in level_counts],
    )


def _se(values) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def _simulate_partials(traffic, link, t_s, policy, metric, config):
    if isinstance(policy, SoftPolicy) and metric is None:
        raise ValueError("soft policies need a SoftMetricModel")
    if isinstance(policy, PerfectPolicy) and metric is not None:
        raise ValueError("perfect policies take no metric model")
    if not t_s > 0.0:
        raise ValueError(f"t_s must be > 0, got {t_s}")

    replicas = min(config.replicas, config.cycles)
    per_replica = config.cycles // replicas
    seeds = np.random.SeedSequence(config.seed).spawn(replicas)
    workers = min(thread_budget(), replicas)

    def job(seq):
        return _run_replica(traffic, link, t_s, policy, metric, config, per_replica, seq)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, seeds))
    else:
        results = [job(s) for s in seeds]
    return results, per_replica * replicas


def _merge(results, cycles_run) -> SimReport:
    rates_s = np.array([r[0] for r in results])
    rates_p = np.array([r[1] for r in results])
    p_ss = np.array([r[2] for r in results])
    cycles = np.array([r[3] for r in results])
    occupancy = np.mean([r[4] for r in results], axis=0)
    return SimReport(
        rate_secondary_mean=float(rates_s.mean()),
        rate_secondary_se=_se(rates_s),
        rate_primary_mean=float(rates_p.mean()),
        rate_primary_se=_se(rates_p),
        p_ss_empirical=float(p_ss.mean()),
        mean_cycle_empirical=float(cycles.mean()),
        cycles_run=cycles_run,
        level_occupancy=tuple(float(x) for x in occupancy),
    )


def simulate(
    traffic: TrafficModel,
    link: LinkBudget,
    t_s: float,
    policy,
    metric: SoftMetricModel | None = None,
    config: SimConfig = SimConfig(),
) -> SimReport:
    """Monte Carlo estimate of the long-run rates under one policy.

    `config.cycles` is the total budget, split evenly across replicas;
    standard errors come from the across-replica spread.
    """
    results, cycles_run = _simulate_partials(traffic, link, t_s, policy, metric, config)
    return _merge(results, cycles_run)


@dataclass(frozen=True)
class ValidationRow:
    quantity: str
    analytic: float
    simulated: float
    std_err: float
    z: float


@dataclass(frozen=True)
class ValidationRecord:
    rows: tuple[ValidationRow, ...]
    flagged: tuple[str, ...]
    report: SimReport

    @property
    def ok(self) -> bool:
        return not self.flagged


def _z_score(analytic, simulated, se):
    diff = simulated - analytic
    # constant quantities (e.g. mu with equal durations) have zero spread;
    # accumulated float rounding leaves a sub-1e-9 residual, not a mismatch
    if abs(diff) <= 1e-9 * max(1.0, abs(analytic)):
        return 0.0
    if se == 0.0:
        return math.inf
    return diff / se


def validate_policy(
    traffic: TrafficModel,
    link: LinkBudget,
    t_s: float,
    policy,
    metric: SoftMetricModel | None = None,
    cycles: int = 100_000,
    seed: int = 0,
    replicas: int = 10,
    sensing_lag: float = 0.0,
) -> ValidationRecord:
    """Analytic-vs-simulated comparison with one z-score per quantity.

    Standard errors for p_ss and the mean cycle are also taken across
    replicas; |z| > 3 rows are flagged.
    """
    config = SimConfig(cycles=cycles, seed=seed, replicas=replicas, sensing_lag=sensing_lag)
    partials, cycles_run = _simulate_partials(traffic, link, t_s, policy, metric, config)
    report = _merge(partials, cycles_run)
    analytic = evaluate(traffic, link, t_s, 0.5, policy, metric)

    p_ss_vals = np.array([p[2] for p in partials])
    mu_vals = np.array([p[3] for p in partials])
    spread = _se

    rows = (
        ValidationRow(
            "rate_s",
            analytic.rate_secondary,
            report.rate_secondary_mean,
            report.rate_secondary_se,
            _z_score(analytic.rate_secondary, report.rate_secondary_mean, report.rate_secondary_se),
        ),
        ValidationRow(
            "rate_p",
            analytic.rate_primary,
            report.rate_primary_mean,
            report.rate_primary_se,
            _z_score(analytic.rate_primary, report.rate_primary_mean, report.rate_primary_se),
        ),
        ValidationRow(
            "p_ss",
            analytic.p_ss,
            report.p_ss_empirical,
            spread(p_ss_vals),
            _z_score(analytic.p_ss, report.p_ss_empirical, spread(p_ss_vals)),
        ),
        ValidationRow(
            "mu",
            analytic.mean_cycle,
            report.mean_cycle_empirical,
            spread(mu_vals),
            _z_score(analytic.mean_cycle, report.mean_cycle_empirical, spread(mu_vals)),
        ),
    )
    flagged = tuple(r.quantity for r in rows if abs(r.z) > 3.0)
    return ValidationRecord(rows=rows, flagged=flagged, report=report)
