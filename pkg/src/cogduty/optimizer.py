"""Grid search with local refinement for the weighted sum-rate objective.

Perfect sensing searches the full 4-D lattice (P_F, T_F, P_B, T_B) and
soft sensing with one threshold the full 5-D lattice; both are evaluated
vectorized from small per-axis tables (capacities, outage, transition
probabilities), which makes the default ~194k/2.9M point grids cheap.
Each refinement round halves the span of every axis around the incumbent
and re-evaluates a lattice of the same point counts.

For two or more thresholds the full lattice is infeasible, so the search
runs multi-start coordinate descent over the same axes: five random
starts plus a start embedded from the (S-1)-threshold optimum, which by
construction reproduces its objective exactly (duplicated level actions
make the extra threshold inert), so more levels never score worse.

Ties within 1e-12 of the round maximum are broken lexicographically:
lower busy-side powers first, then lower free-side powers, then
durations in the same order.  A tied threshold falls back to the highest
value, or to the value nearest the warm-start seed when one is given --
the threshold is unidentified when every level acts identically, and the
sweep keeps it continuous across such degenerate weights.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .link import LinkBudget, capacity_free, capacity_interfered, outage_prob
from .sensing import SoftMetricModel, ThresholdSet
from .throughput import PerfectPolicy, PolicyEvaluation, SoftPolicy, evaluate
from .traffic import ChannelState, TrafficModel, expected_free_time, transition_prob
from .numerics import marcum_q1

__all__ = [
    "GridSpec",
    "OptResult",
    "EvaluationBudgetError",
    "optimize_perfect",
    "optimize_soft",
    "sweep_alpha",
]

_TIE_TOL = 1e-12
_DESCENT_STARTS = 5
_DESCENT_SEED = 0xC09D
_MAX_PASSES = 100


class EvaluationBudgetError(ValueError):
    """Full-grid search would exceed the configured evaluation budget."""


@dataclass(frozen=True)
class GridSpec:
    """Lattice densities, bounds and refinement depth for the search."""

    power_points: int = 21
    time_points: int = 21
    threshold_points: int = 15
    refine_rounds: int = 2
    t_cap: float = 20.0
    gamma_max: float | None = None
    max_grid_evals: int = 50_000_000

    def __post_init__(self):
        for name in ("power_points", "time_points", "threshold_points"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")
        if not self.t_cap > 0:
            raise ValueError("t_cap must be > 0")
        if self.gamma_max is not None and not self.gamma_max > 0:
            raise ValueError("gamma_max must be > 0")
        if self.max_grid_evals < 1:
            raise ValueError("max_grid_evals must be >= 1")

    def resolved_gamma_max(self, metric: SoftMetricModel) -> float:
        if self.gamma_max is not None:
            return self.gamma_max
        g0 = metric.gamma0
        return g0 + 5.0 * math.sqrt(g0) + 5.0


@dataclass(frozen=True)
class OptResult:
    """Best policy found, its evaluation, and search accounting."""

    best_policy: PerfectPolicy | SoftPolicy
    evaluation: PolicyEvaluation
    evaluations_count: int
    grid_trace: tuple[float, ...] = field(default=())


# ---------------------------------------------------------------------------
# per-axis tables


class _Tables:
    """Per-axis values of every scalar the objective consumes."""

    def __init__(self, traffic, link, t_s, metric=None):
        self.traffic = traffic
        self.link = link
        self.t_s = t_s
        self.metric = metric

    def power(self, powers: np.ndarray):
        c0 = np.array([capacity_free(self.link, float(p)) for p in powers])
        c1 = np.array([capacity_interfered(self.link, float(p)) for p in powers])
        ok = np.array([1.0 - outage_prob(self.link, float(p)) for p in powers])
        return c0, c1, ok

    def time(self, times: np.ndarray):
        df = np.array(
            [expected_free_time(self.traffic, ChannelState.FREE, float(t)) for t in times]
        )
        db = np.array(
            [expected_free_time(self.traffic, ChannelState.BUSY, float(t)) for t in times]
        )
        p00 = np.array(
            [
                transition_prob(self.traffic, ChannelState.FREE, ChannelState.FREE, self.t_s + float(t))
                for t in times
            ]
        )
        p10 = np.array(
            [
                transition_prob(self.traffic, ChannelState.BUSY, ChannelState.FREE, self.t_s + float(t))
                for t in times
            ]
        )
        return df, db, p00, p10

    def threshold_tails(self, thresholds: np.ndarray):
        """Upper-tail probabilities of the metric beyond each threshold."""
        tail_free = np.exp(-thresholds)
        a = math.sqrt(2.0 * self.metric.gamma0)
        tail_busy = np.array([marcum_q1(a, math.sqrt(2.0 * float(t))) for t in thresholds])
        return tail_free, tail_busy


# ---------------------------------------------------------------------------
# axis lattices


def _base_axis(lo, hi, n):
    return np.linspace(lo, hi, n)


def _axis_around(center, span, n, lo, hi):
    """n points with spacing span/(n-1), containing `center`, inside [lo, hi]."""
    step = span / (n - 1)
    max_left = int(math.floor((center - lo) / step + 1e-9))
    max_right = int(math.floor((hi - center) / step + 1e-9))
    left = min(max_left, max(n // 2, n - 1 - max_right))
    if left + max_right < n - 1:
        return np.linspace(lo, hi, n)
    vals = center + step * np.arange(-left, n - left)
    return np.clip(vals, lo, hi)


def _inject(axis: np.ndarray, extras) -> np.ndarray:
    vals = [v for v in extras if v is not None]
    if not vals:
        return axis
    return np.unique(np.concatenate([axis, np.asarray(vals, dtype=float)]))


# ---------------------------------------------------------------------------
# vectorized objectives


def _perfect_objective(tables, alpha, p_axis, t_axis):
    """Objective over the (p_free, t_free, p_busy, t_busy) lattice."""
    c0, c1, ok = tables.power(p_axis)
    df, db, p00, p10 = tables.time(t_axis)
    ts = tables.t_s
    r0 = tables.link.r_primary

    a = p00[:, None]  # [jF, jB]
    b = p10[None, :]
    pss = b / (1.0 - a + b)
    mu = pss * (ts + t_axis)[:, None] + (1.0 - pss) * (ts + t_axis)[None, :]

    wf_f = pss * df[:, None]
    wo_f = pss * (t_axis - df)[:, None]
    wf_b = (1.0 - pss) * db[None, :]
    wo_b = (1.0 - pss) * (t_axis - db)[None, :]

    # term_f[iF, jF, jB], term_b[iB, jF, jB]
    term_f = (1.0 - alpha) * (
        wf_f[None] * c0[:, None, None] + wo_f[None] * c1[:, None, None]
    ) + alpha * r0 * wo_f[None] * ok[:, None, None]
    term_b = (1.0 - alpha) * (
        wf_b[None] * c0[:, None, None] + wo_b[None] * c1[:, None, None]
    ) + alpha * r0 * wo_b[None] * ok[:, None, None]

    obj = (term_f[:, :, None, :] + term_b.transpose(1, 0, 2)[None]) / mu[None, :, None, :]
    return obj  # [iF, jF, iB, jB]


def _soft1_objective(tables, alpha, h_axis, t_axis, p_axis):
    """Objective over the (threshold, t1, t2, p1, p2) lattice."""
    c0, c1, ok = tables.power(p_axis)
    df, db, p00, p10 = tables.time(t_axis)
    tail_f, tail_b = tables.threshold_tails(h_axis)
    ts = tables.t_s
    r0 = tables.link.r_primary

    e2 = tail_f[:, None, None]  # [h, j1, j2]
    e1 = 1.0 - e2
    v2 = tail_b[:, None, None]
    v1 = 1.0 - v2

    a = e1 * p00[None, :, None] + e2 * p00[None, None, :]
    b = v1 * p10[None, :, None] + v2 * p10[None, None, :]
    pss = b / (1.0 - a + b)
    len1 = (ts + t_axis)[None, :, None]
    len2 = (ts + t_axis)[None, None, :]
    mu = pss * (e1 * len1 + e2 * len2) + (1.0 - pss) * (v1 * len1 + v2 * len2)

    wf1 = pss * e1 * df[None, :, None] + (1.0 - pss) * v1 * db[None, :, None]
    wo1 = pss * e1 * (t_axis - df)[None, :, None] + (1.0 - pss) * v1 * (t_axis - db)[None, :, None]
    wf2 = pss * e2 * df[None, None, :] + (1.0 - pss) * v2 * db[None, None, :]
    wo2 = pss * e2 * (t_axis - df)[None, None, :] + (1.0 - pss) * v2 * (t_axis - db)[None, None, :]

    gain = (1.0 - alpha) * c0, (1.0 - alpha) * c1, alpha * r0 * ok
    term1 = (
        wf1[..., None] * gain[0] + wo1[..., None] * gain[1] + wo1[..., None] * gain[2]
    )  # [h, j1, j2, i1]
    term2 = wf2[..., None] * gain[0] + wo2[..., None] * gain[1] + wo2[..., None] * gain[2]

    obj = (term1[..., :, None] + term2[..., None, :]) / mu[..., None, None]
    return obj  # [h, j1, j2, i1, i2]


def _soft_batch_objective(tables, alpha, thr, powers, durations):
    """Objective for a batch of soft policies given as value arrays.

    thr: [B, S], powers/durations: [B, S+1]; returns [B].
    """
    b_n, s = thr.shape
    ts = tables.t_s
    r0 = tables.link.r_primary
    flat_p = np.unique(powers)
    flat_t = np.unique(durations)
    flat_h = np.unique(thr)
    c0_u, c1_u, ok_u = tables.power(flat_p)
    df_u, db_u, p00_u, p10_u = tables.time(flat_t)
    tail_f_u, tail_b_u = tables.threshold_tails(flat_h)

    ip = np.searchsorted(flat_p, powers)
    it = np.searchsorted(flat_t, durations)
    ih = np.searchsorted(flat_h, thr)
    c0, c1, ok = c0_u[ip], c1_u[ip], ok_u[ip]
    df, db, p00, p10 = df_u[it], db_u[it], p00_u[it], p10_u[it]

    ones = np.ones((b_n, 1))
    zeros = np.zeros((b_n, 1))
    tails_f = np.concatenate([ones, tail_f_u[ih], zeros], axis=1)  # [B, S+2]
    tails_b = np.concatenate([ones, tail_b_u[ih], zeros], axis=1)
    eps = tails_f[:, :-1] - tails_f[:, 1:]  # [B, S+1]
    theta = tails_b[:, :-1] - tails_b[:, 1:]

    a = np.sum(eps * p00, axis=1)
    b = np.sum(theta * p10, axis=1)
    pss = (b / (1.0 - a + b))[:, None]
    mu = np.sum((pss * eps + (1.0 - pss) * theta) * (ts + durations), axis=1)

    w_free = pss * eps * df + (1.0 - pss) * theta * db
    w_over = pss * eps * (durations - df) + (1.0 - pss) * theta * (durations - db)
    num = np.sum(
        (1.0 - alpha) * (w_free * c0 + w_over * c1) + alpha * r0 * w_over * ok, axis=1
    )
    return num / mu


# ---------------------------------------------------------------------------
# tie-breaking


def _perfect_key(p_axis, t_axis, idx):
    i_f, j_f, i_b, j_b = idx
    return (p_axis[i_b], p_axis[i_f], t_axis[j_b], t_axis[j_f])


def _pick_perfect(obj, p_axis, t_axis):
    best = float(np.max(obj))
    tied = np.argwhere(obj >= best - _TIE_TOL)
    keys = [(_perfect_key(p_axis, t_axis, tuple(ix)), tuple(ix)) for ix in tied]
    _, idx = min(keys)
    i_f, j_f, i_b, j_b = idx
    policy = PerfectPolicy(
        p_free=float(p_axis[i_f]),
        t_free=float(t_axis[j_f]),
        p_busy=float(p_axis[i_b]),
        t_busy=float(t_axis[j_b]),
    )
    return policy, float(obj[idx])


def _soft_key(powers, durations, thr, seed_thr):
    key = tuple(reversed(powers)) + tuple(reversed(durations))
    if seed_thr is not None:
        key += tuple(abs(t - s) for t, s in zip(thr, seed_thr))
    return key + tuple(-t for t in thr)


def _pick_soft1(obj, h_axis, t_axis, p_axis, seed_thr):
    best = float(np.max(obj))
    tied = np.argwhere(obj >= best - _TIE_TOL)
    entries = []
    for ix in map(tuple, tied):
        h, j1, j2, i1, i2 = ix
        powers = (float(p_axis[i1]), float(p_axis[i2]))
        durations = (float(t_axis[j1]), float(t_axis[j2]))
        thr = (float(h_axis[h]),)
        entries.append((_soft_key(powers, durations, thr, seed_thr), thr, powers, durations, ix))
    _, thr, powers, durations, ix = min(entries)
    policy = SoftPolicy(ThresholdSet(thr), powers, durations)
    return policy, float(obj[ix])


# ---------------------------------------------------------------------------
# public entry points


def optimize_perfect(
    traffic: TrafficModel,
    link: LinkBudget,
    t_s: float,
    alpha: float,
    grid: GridSpec = GridSpec(),
    seed_policy: PerfectPolicy | None = None,
) -> OptResult:
    """Exhaustive lattice search plus refinement over the four perfect-sensing
    parameters.  `seed_policy` coordinates are merged into the base lattice
    (used by alpha sweeps for warm starts)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    tables = _Tables(traffic, link, t_s)
    p_axis = _base_axis(0.0, link.p_max, grid.power_points)
    t_axis = _base_axis(0.0, grid.t_cap, grid.time_points)
    if seed_policy is not None:
        p_axis = _inject(p_axis, [seed_policy.p_free, seed_policy.p_busy])
        t_axis = _inject(t_axis, [seed_policy.t_free, seed_policy.t_busy])

    if len(p_axis) ** 2 * len(t_axis) ** 2 > grid.max_grid_evals:
        raise EvaluationBudgetError(
            f"perfect grid of {len(p_axis)**2 * len(t_axis)**2} points exceeds "
            f"max_grid_evals={grid.max_grid_evals}"
        )

    count = 0
    incumbent = None
    incumbent_obj = -math.inf
    trace = []
    p_span = link.p_max
    t_span = grid.t_cap
    for rnd in range(grid.refine_rounds + 1):
        if rnd > 0:
            p_span *= 0.5
            t_span *= 0.5
            p_axis = _axis_around(incumbent.p_free, p_span, grid.power_points, 0.0, link.p_max)
            p_axis_b = _axis_around(incumbent.p_busy, p_span, grid.power_points, 0.0, link.p_max)
            t_axis = _axis_around(incumbent.t_free, t_span, grid.time_points, 0.0, grid.t_cap)
            t_axis_b = _axis_around(incumbent.t_busy, t_span, grid.time_points, 0.0, grid.t_cap)
            cand, cand_obj, n_pts = _perfect_round(
                tables, alpha, p_axis, t_axis, p_axis_b, t_axis_b
            )
        else:
            full = _perfect_objective(tables, alpha, p_axis, t_axis)
            cand, cand_obj = _pick_perfect(full, p_axis, t_axis)
            n_pts = full.size
        count += n_pts
        if cand_obj > incumbent_obj + _TIE_TOL or incumbent is None:
            incumbent, incumbent_obj = cand, cand_obj
        trace.append(incumbent_obj)

    return OptResult(
        best_policy=incumbent,
        evaluation=evaluate(traffic, link, t_s, alpha, incumbent),
        evaluations_count=count,
        grid_trace=tuple(trace),
    )


def _perfect_round(tables, alpha, pf_axis, tf_axis, pb_axis, tb_axis):
    """One refinement round where busy/free axes refine around their own centers."""
    c0f, c1f, okf = tables.power(pf_axis)
    c0b, c1b, okb = tables.power(pb_axis)
    dff, _, p00f, _ = tables.time(tf_axis)
    _, dbb, _, p10b = tables.time(tb_axis)
    ts = tables.t_s
    r0 = tables.link.r_primary
    alpha_c = 1.0 - alpha

    a = p00f[:, None]
    b = p10b[None, :]
    pss = b / (1.0 - a + b)
    mu = pss * (ts + tf_axis)[:, None] + (1.0 - pss) * (ts + tb_axis)[None, :]
    wf_f = pss * dff[:, None]
    wo_f = pss * (tf_axis - dff)[:, None]
    wf_b = (1.0 - pss) * dbb[None, :]
    wo_b = (1.0 - pss) * (tb_axis - dbb)[None, :]

    term_f = alpha_c * (wf_f[None] * c0f[:, None, None] + wo_f[None] * c1f[:, None, None])
    term_f += alpha * r0 * wo_f[None] * okf[:, None, None]
    term_b = alpha_c * (wf_b[None] * c0b[:, None, None] + wo_b[None] * c1b[:, None, None])
    term_b += alpha * r0 * wo_b[None] * okb[:, None, None]

    obj = (term_f[:, :, None, :] + term_b.transpose(1, 0, 2)[None]) / mu[None, :, None, :]
    best = float(np.max(obj))
    tied = np.argwhere(obj >= best - _TIE_TOL)
    keys = []
    for ix in map(tuple, tied):
        i_f, j_f, i_b, j_b = ix
        keys.append(((pb_axis[i_b], pf_axis[i_f], tb_axis[j_b], tf_axis[j_f]), ix))
    _, idx = min(keys)
    i_f, j_f, i_b, j_b = idx
    policy = PerfectPolicy(
        p_free=float(pf_axis[i_f]),
        t_free=float(tf_axis[j_f]),
        p_busy=float(pb_axis[i_b]),
        t_busy=float(tb_axis[j_b]),
    )
    return policy, float(obj[idx]), obj.size


def optimize_soft(
    traffic: TrafficModel,
    link: LinkBudget,
    metric: SoftMetricModel,
    t_s: float,
    alpha: float,
    s_levels: int = 1,
    grid: GridSpec = GridSpec(),
    seed_policy: SoftPolicy | None = None,
    strategy: str = "auto",
) -> OptResult:
    """Search over S thresholds plus S+1 (power, duration) actions.

    S = 1 uses the full lattice plus refinement; S >= 2 uses multi-start
    coordinate descent seeded from the (S-1)-threshold optimum.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if s_levels < 1:
        raise ValueError("s_levels must be >= 1")
    if strategy not in ("auto", "full", "descent"):
        raise ValueError(f"unknown strategy {strategy!r}")

    gamma_max = grid.resolved_gamma_max(metric)
    full_size = (
        grid.threshold_points**s_levels
        * grid.time_points ** (s_levels + 1)
        * grid.power_points ** (s_levels + 1)
    )
    if strategy == "auto":
        strategy = "full" if s_levels == 1 else "descent"
    if strategy == "full":
        if full_size > grid.max_grid_evals:
            raise EvaluationBudgetError(
                f"soft grid with S={s_levels} has {full_size} points, exceeding "
                f"max_grid_evals={grid.max_grid_evals}; use the descent strategy"
            )
        if s_levels != 1:
            raise EvaluationBudgetError(
                "full-grid soft search is implemented for S=1 only; use descent"
            )
        return _optimize_soft1_full(
            traffic, link, metric, t_s, alpha, grid, gamma_max, seed_policy
        )
    return _optimize_soft_descent(
        traffic, link, metric, t_s, alpha, s_levels, grid, gamma_max, seed_policy
    )


def _optimize_soft1_full(traffic, link, metric, t_s, alpha, grid, gamma_max, seed_policy):
    tables = _Tables(traffic, link, t_s, metric)
    h_lo = gamma_max * 1e-9
    h_axis = _base_axis(0.0, gamma_max, grid.threshold_points + 1)[1:]
    p_axis = _base_axis(0.0, link.p_max, grid.power_points)
    t_axis = _base_axis(0.0, grid.t_cap, grid.time_points)
    seed_thr = None
    if seed_policy is not None:
        seed_thr = tuple(seed_policy.thresholds.thresholds)
        h_axis = _inject(h_axis, seed_thr)
        p_axis = _inject(p_axis, seed_policy.powers)
        t_axis = _inject(t_axis, seed_policy.durations)

    count = 0
    incumbent = None
    incumbent_obj = -math.inf
    trace = []
    h_span = gamma_max
    p_span = link.p_max
    t_span = grid.t_cap
    for rnd in range(grid.refine_rounds + 1):
        if rnd > 0:
            h_span *= 0.5
            p_span *= 0.5
            t_span *= 0.5
            h_axis = _axis_around(
                incumbent.thresholds.thresholds[0], h_span, grid.threshold_points, h_lo, gamma_max
            )
            t1 = _axis_around(incumbent.durations[0], t_span, grid.time_points, 0.0, grid.t_cap)
            t2 = _axis_around(incumbent.durations[1], t_span, grid.time_points, 0.0, grid.t_cap)
            p1 = _axis_around(incumbent.powers[0], p_span, grid.power_points, 0.0, link.p_max)
            p2 = _axis_around(incumbent.powers[1], p_span, grid.power_points, 0.0, link.p_max)
            cand, cand_obj, n_pts = _soft1_round(
                tables, alpha, h_axis, t1, t2, p1, p2, seed_thr
            )
        else:
            obj = _soft1_objective(tables, alpha, h_axis, t_axis, p_axis)
            cand, cand_obj = _pick_soft1(obj, h_axis, t_axis, p_axis, seed_thr)
            n_pts = obj.size
        count += n_pts
        if incumbent is None or cand_obj > incumbent_obj + _TIE_TOL:
            incumbent, incumbent_obj = cand, cand_obj
        trace.append(incumbent_obj)

    return OptResult(
        best_policy=incumbent,
        evaluation=evaluate(traffic, link, t_s, alpha, incumbent, metric),
        evaluations_count=count,
        grid_trace=tuple(trace),
    )


def _soft1_round(tables, alpha, h_axis, t1_axis, t2_axis, p1_axis, p2_axis, seed_thr):
    """Refinement round with per-level power/duration axes."""
    c01, c11, ok1 = tables.power(p1_axis)
    c02, c12, ok2 = tables.power(p2_axis)
    df1, db1, p001, p101 = tables.time(t1_axis)
    df2, db2, p002, p102 = tables.time(t2_axis)
    tail_f, tail_b = tables.threshold_tails(h_axis)
    ts = tables.t_s
    r0 = tables.link.r_primary

    e2 = tail_f[:, None, None]
    e1 = 1.0 - e2
    v2 = tail_b[:, None, None]
    v1 = 1.0 - v2
    a = e1 * p001[None, :, None] + e2 * p002[None, None, :]
    b = v1 * p101[None, :, None] + v2 * p102[None, None, :]
    pss = b / (1.0 - a + b)
    len1 = (ts + t1_axis)[None, :, None]
    len2 = (ts + t2_axis)[None, None, :]
    mu = pss * (e1 * len1 + e2 * len2) + (1.0 - pss) * (v1 * len1 + v2 * len2)

    wf1 = pss * e1 * df1[None, :, None] + (1.0 - pss) * v1 * db1[None, :, None]
    wo1 = pss * e1 * (t1_axis - df1)[None, :, None] + (1.0 - pss) * v1 * (t1_axis - db1)[None, :, None]
    wf2 = pss * e2 * df2[None, None, :] + (1.0 - pss) * v2 * db2[None, None, :]
    wo2 = pss * e2 * (t2_axis - df2)[None, None, :] + (1.0 - pss) * v2 * (t2_axis - db2)[None, None, :]

    term1 = (
        wf1[..., None] * ((1.0 - alpha) * c01)
        + wo1[..., None] * ((1.0 - alpha) * c11 + alpha * r0 * ok1)
    )
    term2 = (
        wf2[..., None] * ((1.0 - alpha) * c02)
        + wo2[..., None] * ((1.0 - alpha) * c12 + alpha * r0 * ok2)
    )
    obj = (term1[..., :, None] + term2[..., None, :]) / mu[..., None, None]

    best = float(np.max(obj))
    tied = np.argwhere(obj >= best - _TIE_TOL)
    entries = []
    for ix in map(tuple, tied):
        h, j1, j2, i1, i2 = ix
        powers = (float(p1_axis[i1]), float(p2_axis[i2]))
        durations = (float(t1_axis[j1]), float(t2_axis[j2]))
        thr = (float(h_axis[h]),)
        entries.append((_soft_key(powers, durations, thr, seed_thr), thr, powers, durations, ix))
    _, thr, powers, durations, ix = min(entries)
    policy = SoftPolicy(ThresholdSet(thr), powers, durations)
    return policy, float(obj[ix]), obj.size


def _embed_policy(policy: SoftPolicy, gamma_max: float) -> SoftPolicy:
    """Lift an S-threshold policy to S+1 thresholds with identical objective.

    One level is split in two with duplicated actions, so the added
    threshold carries no behavioral weight and the objective is unchanged.
    """
    old = policy.thresholds.thresholds
    top = old[-1]
    if gamma_max - top > 1e-6 * gamma_max:
        new_thr = old + (top + 0.5 * (gamma_max - top),)
        powers = policy.powers + (policy.powers[-1],)
        durations = policy.durations + (policy.durations[-1],)
    else:
        new_thr = (0.5 * old[0],) + old
        powers = (policy.powers[0],) + policy.powers
        durations = (policy.durations[0],) + policy.durations
    return SoftPolicy(ThresholdSet(new_thr), powers, durations)


def _optimize_soft_descent(
    traffic, link, metric, t_s, alpha, s_levels, grid, gamma_max, seed_policy
):
    tables = _Tables(traffic, link, t_s, metric)
    h_axis = _base_axis(0.0, gamma_max, grid.threshold_points + 1)[1:]
    p_axis = _base_axis(0.0, link.p_max, grid.power_points)
    t_axis = _base_axis(0.0, grid.t_cap, grid.time_points)

    seeds = []
    count = 0
    if s_levels >= 2:
        prior = optimize_soft(
            traffic, link, metric, t_s, alpha, s_levels - 1, grid, strategy="auto"
        )
        count += prior.evaluations_count
        seeds.append(_embed_policy(prior.best_policy, gamma_max))
    if seed_policy is not None:
        seeds.append(seed_policy)
    seed_thr = tuple(seed_policy.thresholds.thresholds) if seed_policy is not None else None

    for s in seeds:
        h_axis = _inject(h_axis, s.thresholds.thresholds)
        p_axis = _inject(p_axis, s.powers)
        t_axis = _inject(t_axis, s.durations)

    rng = np.random.default_rng(_DESCENT_SEED + s_levels)
    starts = list(seeds)
    for _ in range(_DESCENT_STARTS):
        thr_idx = np.sort(rng.choice(len(h_axis), size=s_levels, replace=False))
        starts.append(
            SoftPolicy(
                ThresholdSet(h_axis[thr_idx]),
                p_axis[rng.integers(0, len(p_axis), size=s_levels + 1)],
                t_axis[rng.integers(0, len(t_axis), size=s_levels + 1)],
            )
        )

    best = None
    best_obj = -math.inf
    trace = []
    for rnd in range(grid.refine_rounds + 1):
        shrink = 0.5**rnd
        if rnd == 0:
            axes = (h_axis, p_axis, t_axis)
        else:
            # refine every axis around the incumbent's coordinates
            thr0 = best.thresholds.thresholds
            h_ref = [
                _axis_around(v, gamma_max * shrink, grid.threshold_points, gamma_max * 1e-9, gamma_max)
                for v in thr0
            ]
            h_new = np.unique(np.concatenate(h_ref))
            p_ref = [
                _axis_around(v, link.p_max * shrink, grid.power_points, 0.0, link.p_max)
                for v in best.powers
            ]
            t_ref = [
                _axis_around(v, grid.t_cap * shrink, grid.time_points, 0.0, grid.t_cap)
                for v in best.durations
            ]
            axes = (h_new, np.unique(np.concatenate(p_ref)), np.unique(np.concatenate(t_ref)))
            starts = [best]
        for start in starts:
            cand, cand_obj, n = _descend(tables, alpha, s_levels, start, axes, seed_thr)
            count += n
            if best is None or cand_obj > best_obj + _TIE_TOL:
                best, best_obj = cand, cand_obj
            elif cand_obj > best_obj - _TIE_TOL:
                # tie across starts: lexicographic preference
                key_new = _soft_key(cand.powers, cand.durations, cand.thresholds.thresholds, seed_thr)
                key_old = _soft_key(best.powers, best.durations, best.thresholds.thresholds, seed_thr)
                if key_new < key_old:
                    best = cand
        trace.append(best_obj)

    return OptResult(
        best_policy=best,
        evaluation=evaluate(traffic, link, t_s, alpha, best, metric),
        evaluations_count=count,
        grid_trace=tuple(trace),
    )


def _descend(tables, alpha, s_levels, start, axes, seed_thr):
    h_axis, p_axis, t_axis = axes
    thr = list(start.thresholds.thresholds)
    powers = list(start.powers)
    durations = list(start.durations)
    count = 0

    def current_obj():
        nonlocal count
        count += 1
        return float(
            _soft_batch_objective(
                tables,
                alpha,
                np.array([thr]),
                np.array([powers]),
                np.array([durations]),
            )[0]
        )

    obj = current_obj()
    for _ in range(_MAX_PASSES):
        improved = False
        for axis_kind, slot in (
            [("thr", i) for i in range(s_levels)]
            + [("p", i) for i in range(s_levels + 1)]
            + [("t", i) for i in range(s_levels + 1)]
        ):
            if axis_kind == "thr":
                lo = thr[slot - 1] if slot > 0 else 0.0
                hi = thr[slot + 1] if slot + 1 < s_levels else math.inf
                values = h_axis[(h_axis > lo) & (h_axis < hi)]
                if len(values) == 0:
                    continue
                batch_thr = np.tile(thr, (len(values), 1))
                batch_thr[:, slot] = values
                batch_p = np.tile(powers, (len(values), 1))
                batch_t = np.tile(durations, (len(values), 1))
            elif axis_kind == "p":
                values = p_axis
                batch_thr = np.tile(thr, (len(values), 1))
                batch_p = np.tile(powers, (len(values), 1))
                batch_p[:, slot] = values
                batch_t = np.tile(durations, (len(values), 1))
            else:
                values = t_axis
                batch_thr = np.tile(thr, (len(values), 1))
                batch_p = np.tile(powers, (len(values), 1))
                batch_t = np.tile(durations, (len(values), 1))
                batch_t[:, slot] = values
            objs = _soft_batch_objective(tables, alpha, batch_thr, batch_p, batch_t)
            count += len(values)
            k = int(np.argmax(objs))
            if objs[k] > obj + _TIE_TOL:
                obj = float(objs[k])
                if axis_kind == "thr":
                    thr[slot] = float(values[k])
                elif axis_kind == "p":
                    powers[slot] = float(values[k])
                else:
                    durations[slot] = float(values[k])
                improved = True
        if not improved:
            break
    policy = SoftPolicy(ThresholdSet(thr), powers, durations)
    return policy, obj, count


def sweep_alpha(
    mode: str,
    alphas,
    traffic: TrafficModel,
    link: LinkBudget,
    t_s: float,
    grid: GridSpec = GridSpec(),
    metric: SoftMetricModel | None = None,
    s_levels: int = 1,
) -> list[OptResult]:
    """One optimization per alpha, processed in ascending order with the
    previous optimum injected as a warm-start seed for the next."""
    alphas = list(alphas)
    if any(not 0.0 <= a <= 1.0 for a in alphas):
        raise ValueError("alphas must lie in [0, 1]")
    if sorted(alphas) != alphas:
        raise ValueError("alphas must be sorted ascending")
    if mode not in ("perfect", "soft"):
        raise ValueError(f"mode must be 'perfect' or 'soft', got {mode!r}")
    if mode == "soft" and metric is None:
        raise ValueError("soft sweeps need a SoftMetricModel")

    results = []
    seed = None
    for alpha in alphas:
        if mode == "perfect":
            res = optimize_perfect(traffic, link, t_s, alpha, grid, seed_policy=seed)
        else:
            res = optimize_soft(
                traffic, link, metric, t_s, alpha, s_levels, grid, seed_policy=seed
            )
        results.append(res)
        seed = res.best_policy
    return results
