"""Steady state, mean cycle and weighted rates for both sensing modes."""

import math

import numpy as np
import pytest

from cogduty.link import outage_prob
from cogduty.sensing import SoftMetricModel, ThresholdSet
from cogduty.throughput import (
    PerfectPolicy,
    SoftPolicy,
    evaluate,
    mean_cycle,
    policy_levels,
    steady_state_free,
)
from cogduty.traffic import ChannelState, TrafficModel, transition_prob

T_S = 0.05


def iterate_recursion(traffic, t_s, policy, start=0.5, metric=None):
    """Fixed point by direct iteration of the sensing-epoch recursion."""
    eps, theta, _, durations = policy_levels(policy, metric)
    a = sum(
        e * transition_prob(traffic, ChannelState.FREE, ChannelState.FREE, t_s + t)
        for e, t in zip(eps, durations)
    )
    b = sum(
        th * transition_prob(traffic, ChannelState.BUSY, ChannelState.FREE, t_s + t)
        for th, t in zip(theta, durations)
    )
    pi = start
    for _ in range(1_000_000):
        nxt = pi * a + (1.0 - pi) * b
        if abs(nxt - pi) < 1e-16:
            return nxt
        pi = nxt
    return pi


class TestSteadyState:
    def test_equal_durations_sample_stationary(self, traffic):
        # symmetric revisit times make sensing epochs a stationary sample
        for t in (0.5, 2.0, 20.0):
            policy = PerfectPolicy(3.0, t, 1.0, t)
            assert steady_state_free(traffic, T_S, policy) == pytest.approx(
                5.0 / 9.0, abs=1e-12
            )

    def test_asymmetric_fixed_point(self, traffic):
        policy = PerfectPolicy(0.0, 20.0, 0.0, 0.0)
        p_ss = steady_state_free(traffic, T_S, policy)
        assert p_ss == pytest.approx(0.0270616097, abs=1e-9)
        assert p_ss == pytest.approx(iterate_recursion(traffic, T_S, policy), abs=1e-12)

    def test_fixed_point_residual(self, traffic, metric3):
        rng = np.random.default_rng(21)
        for _ in range(20):
            policy = PerfectPolicy(*rng.uniform(0.0, 10.0, 2), *rng.uniform(0.0, 20.0, 2))
            # residual of pi = pi*A + (1-pi)*B at the returned value
            eps, theta, _, durations = policy_levels(policy, None)
            a = sum(
                e * transition_prob(traffic, ChannelState.FREE, ChannelState.FREE, T_S + t)
                for e, t in zip(eps, durations)
            )
            b = sum(
                th * transition_prob(traffic, ChannelState.BUSY, ChannelState.FREE, T_S + t)
                for th, t in zip(theta, durations)
            )
            p_ss = steady_state_free(traffic, T_S, policy)
            assert abs(p_ss - (p_ss * a + (1.0 - p_ss) * b)) <= 1e-12

    def test_soft_single_level_equals_perfect(self, traffic, metric3):
        soft = SoftPolicy(ThresholdSet(()), (4.0,), (7.0,))
        perfect = PerfectPolicy(4.0, 7.0, 4.0, 7.0)
        assert steady_state_free(traffic, T_S, soft, metric3) == pytest.approx(
            steady_state_free(traffic, T_S, perfect), abs=1e-12
        )

    def test_requires_positive_sensing_time(self, traffic):
        with pytest.raises(ValueError):
            steady_state_free(traffic, 0.0, PerfectPolicy(1.0, 1.0, 1.0, 1.0))


class TestMeanCycle:
    def test_equal_durations(self, traffic):
        policy = PerfectPolicy(1.0, 2.0, 1.0, 2.0)
        eps, theta, _, durations = policy_levels(policy, None)
        p_ss = steady_state_free(traffic, T_S, policy)
        assert mean_cycle(T_S, durations, eps, theta, p_ss) == pytest.approx(2.05, abs=1e-12)

    def test_asymmetric(self, traffic):
        policy = PerfectPolicy(0.0, 20.0, 0.0, 0.0)
        eps, theta, _, durations = policy_levels(policy, None)
        p_ss = steady_state_free(traffic, T_S, policy)
        mu = mean_cycle(T_S, durations, eps, theta, p_ss)
        assert mu == pytest.approx(0.05 + 20.0 * p_ss, abs=1e-12)
        assert mu == pytest.approx(0.5912321941, abs=1e-9)

    def test_floor(self, traffic, metric3):
        rng = np.random.default_rng(22)
        for _ in range(20):
            cuts = tuple(np.sort(rng.uniform(0.2, 9.0, 2)))
            policy = SoftPolicy(
                ThresholdSet(cuts), tuple(rng.uniform(0, 10, 3)), tuple(rng.uniform(0, 20, 3))
            )
            p_ss = steady_state_free(traffic, T_S, policy, metric3)
            eps, theta, _, durations = policy_levels(policy, metric3)
            assert mean_cycle(T_S, durations, eps, theta, p_ss) >= T_S


class TestEvaluate:
    def test_silent_secondary(self, traffic, channel_b):
        # zero power everywhere: the primary still earns its busy overlap
        policy = PerfectPolicy(0.0, 20.0, 0.0, 20.0)
        ev = evaluate(traffic, channel_b, T_S, 0.5, policy)
        assert ev.rate_secondary == 0.0
        u = traffic.utilization
        oracle = 4.5 * (u * 20.0 / 20.05) * (1.0 - outage_prob(channel_b, 0.0))
        assert ev.rate_primary == pytest.approx(oracle, rel=1e-12)
        assert ev.rate_primary == pytest.approx(1.4827916030, abs=1e-9)

    def test_no_transmission_windows(self, traffic, channel_b):
        ev = evaluate(traffic, channel_b, T_S, 0.3, PerfectPolicy(5.0, 0.0, 5.0, 0.0))
        assert ev.rate_secondary == 0.0
        assert ev.rate_primary == 0.0
        assert ev.mean_cycle == pytest.approx(T_S, abs=1e-15)

    def test_objective_composition(self, traffic, channel_b):
        policy = PerfectPolicy(10.0, 5.0, 2.0, 5.0)
        ev = evaluate(traffic, channel_b, T_S, 0.3, policy)
        assert ev.objective == pytest.approx(
            0.7 * ev.rate_secondary + 0.3 * ev.rate_primary, abs=1e-12
        )
        assert ev.mean_cycle >= T_S
        assert 0.0 < ev.p_ss < 1.0

    def test_alpha_linearity(self, traffic, channel_b, metric3):
        policy = SoftPolicy(ThresholdSet((1.2,)), (10.0, 4.0), (8.0, 3.0))
        evals = {a: evaluate(traffic, channel_b, T_S, a, policy, metric3) for a in (0.2, 0.7)}
        for a, ev in evals.items():
            assert ev.rate_secondary == pytest.approx(evals[0.2].rate_secondary, abs=1e-12)
            assert ev.rate_primary == pytest.approx(evals[0.2].rate_primary, abs=1e-12)
            assert ev.objective == pytest.approx(
                (1.0 - a) * ev.rate_secondary + a * ev.rate_primary, abs=1e-12
            )

    def test_time_budget_identity(self, traffic, channel_b, metric3):
        rng = np.random.default_rng(23)
        for _ in range(10):
            cut = float(rng.uniform(0.3, 8.0))
            policy = SoftPolicy(
                ThresholdSet((cut,)), tuple(rng.uniform(0, 10, 2)), tuple(rng.uniform(0, 20, 2))
            )
            ev = evaluate(traffic, channel_b, T_S, 0.5, policy, metric3)
            eps, theta, _, durations = policy_levels(policy, metric3)
            budget = (
                ev.p_ss * sum(e * t for e, t in zip(eps, durations))
                + (1.0 - ev.p_ss) * sum(th * t for th, t in zip(theta, durations))
                + T_S
            )
            assert budget == pytest.approx(ev.mean_cycle, abs=1e-12)

    def test_soft_single_level_equals_perfect(self, traffic, channel_b, metric3):
        soft = SoftPolicy(ThresholdSet(()), (6.0,), (11.0,))
        perfect = PerfectPolicy(6.0, 11.0, 6.0, 11.0)
        ev_s = evaluate(traffic, channel_b, T_S, 0.4, soft, metric3)
        ev_p = evaluate(traffic, channel_b, T_S, 0.4, perfect)
        assert ev_s.rate_secondary == pytest.approx(ev_p.rate_secondary, abs=1e-12)
        assert ev_s.rate_primary == pytest.approx(ev_p.rate_primary, abs=1e-12)
        assert ev_s.objective == pytest.approx(ev_p.objective, abs=1e-12)

    def test_alpha_domain(self, traffic, channel_b):
        with pytest.raises(ValueError):
            evaluate(traffic, channel_b, T_S, 1.5, PerfectPolicy(1.0, 1.0, 1.0, 1.0))

    def test_soft_needs_metric(self, traffic, channel_b):
        policy = SoftPolicy(ThresholdSet((1.0,)), (1.0, 1.0), (1.0, 1.0))
        with pytest.raises(ValueError):
            evaluate(traffic, channel_b, T_S, 0.5, policy)


class TestPolicyValidation:
    def test_perfect_negative(self):
        with pytest.raises(ValueError):
            PerfectPolicy(-1.0, 1.0, 1.0, 1.0)

    def test_soft_length_mismatch(self):
        with pytest.raises(ValueError):
            SoftPolicy(ThresholdSet((1.0,)), (1.0,), (1.0, 1.0))
