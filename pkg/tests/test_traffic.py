"""On/off traffic model: closed forms vs quadrature and Monte Carlo."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from cogduty.traffic import (
    ChannelState,
    TrafficModel,
    duration_pdf,
    expected_free_time,
    transition_prob,
    utilization,
)

FREE, BUSY = ChannelState.FREE, ChannelState.BUSY


class TestModel:
    def test_derived_rates(self, traffic):
        assert traffic.lambda_on == 0.25
        assert traffic.lambda_off == 0.2
        assert traffic.total_rate == pytest.approx(0.45, abs=1e-15)

    @pytest.mark.parametrize(
        "t_on,t_off,u", [(4.0, 5.0, 4.0 / 9.0), (3.0, 3.0, 0.5), (1.0, 9.0, 0.1)]
    )
    def test_utilization(self, t_on, t_off, u):
        assert utilization(TrafficModel(t_on, t_off)) == pytest.approx(u, abs=1e-15)

    @pytest.mark.parametrize("t_on,t_off", [(0.0, 5.0), (-1.0, 5.0), (4.0, math.inf)])
    def test_invalid(self, t_on, t_off):
        with pytest.raises(ValueError):
            TrafficModel(t_on, t_off)


class TestDurationPdf:
    def test_busy_at_zero(self, traffic):
        assert duration_pdf(traffic, BUSY, 0.0) == pytest.approx(0.25, abs=1e-15)

    def test_free_at_mean(self, traffic):
        assert duration_pdf(traffic, FREE, 5.0) == pytest.approx(0.2 * math.exp(-1.0), rel=1e-12)

    def test_normalization(self, traffic):
        for state in (FREE, BUSY):
            total = quad(lambda t: duration_pdf(traffic, state, t), 0.0, np.inf)[0]
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_domain(self, traffic):
        with pytest.raises(ValueError):
            duration_pdf(traffic, FREE, -0.1)


class TestTransitions:
    def test_no_time_elapsed(self, traffic):
        assert transition_prob(traffic, FREE, FREE, 0.0) == 1.0
        assert transition_prob(traffic, BUSY, FREE, 0.0) == 0.0

    def test_examples(self, traffic):
        # direct evaluation, verified against exp(-0.9) to full precision
        assert transition_prob(traffic, FREE, FREE, 2.0) == pytest.approx(
            5.0 / 9.0 + 4.0 / 9.0 * math.exp(-0.9), rel=1e-14
        )
        assert transition_prob(traffic, BUSY, FREE, 2.0) == pytest.approx(
            5.0 / 9.0 * (1.0 - math.exp(-0.9)), rel=1e-14
        )

    def test_rows_sum_to_one(self, traffic):
        rng = np.random.default_rng(3)
        for t in rng.uniform(0.0, 40.0, size=50):
            for frm in (FREE, BUSY):
                total = transition_prob(traffic, frm, FREE, float(t)) + transition_prob(
                    traffic, frm, BUSY, float(t)
                )
                assert total == pytest.approx(1.0, abs=1e-15)

    def test_long_run_limit(self, traffic):
        for frm in (FREE, BUSY):
            assert transition_prob(traffic, frm, FREE, 1e3) == pytest.approx(
                5.0 / 9.0, abs=1e-12
            )

    def test_chapman_kolmogorov(self, traffic):
        rng = np.random.default_rng(4)
        for s, t in rng.uniform(0.0, 15.0, size=(60, 2)):
            s, t = float(s), float(t)
            lhs = transition_prob(traffic, FREE, FREE, s + t)
            rhs = transition_prob(traffic, FREE, FREE, s) * transition_prob(
                traffic, FREE, FREE, t
            ) + transition_prob(traffic, FREE, BUSY, s) * transition_prob(traffic, BUSY, FREE, t)
            assert lhs == pytest.approx(rhs, abs=1e-12)


class TestExpectedFreeTime:
    def test_empty_window(self, traffic):
        assert expected_free_time(traffic, FREE, 0.0) == 0.0
        assert expected_free_time(traffic, BUSY, 0.0) == 0.0

    def test_against_quadrature(self, traffic):
        # delta is the integral of the matching transition probability
        for sensed in (FREE, BUSY):
            oracle = quad(lambda s: transition_prob(traffic, sensed, FREE, s), 0.0, 2.0)[0]
            assert expected_free_time(traffic, sensed, 2.0) == pytest.approx(oracle, abs=1e-10)
        assert expected_free_time(traffic, FREE, 2.0) == pytest.approx(1.6972151509, abs=1e-9)
        assert expected_free_time(traffic, BUSY, 2.0) == pytest.approx(0.3784810614, abs=1e-9)

    def test_ordering(self, traffic):
        u = traffic.utilization
        rng = np.random.default_rng(5)
        for t in rng.uniform(0.0, 30.0, size=100):
            t = float(t)
            d_free = expected_free_time(traffic, FREE, t)
            d_busy = expected_free_time(traffic, BUSY, t)
            assert 0.0 <= d_busy <= (1.0 - u) * t + 1e-12
            assert (1.0 - u) * t - 1e-12 <= d_free <= t

    def test_mixing_identity(self, traffic):
        # stationary average free time is exact: (1-u) df + u db = (1-u) t
        u = traffic.utilization
        rng = np.random.default_rng(6)
        for t in rng.uniform(0.0, 40.0, size=100):
            t = float(t)
            mixed = (1.0 - u) * expected_free_time(traffic, FREE, t) + u * expected_free_time(
                traffic, BUSY, t
            )
            assert mixed == pytest.approx((1.0 - u) * t, abs=1e-10)

    def test_derivative_is_transition_prob(self, traffic):
        rng = np.random.default_rng(7)
        h = 1e-5
        for t in rng.uniform(0.1, 20.0, size=50):
            t = float(t)
            deriv = (
                expected_free_time(traffic, FREE, t + h) - expected_free_time(traffic, FREE, t - h)
            ) / (2.0 * h)
            assert deriv == pytest.approx(transition_prob(traffic, FREE, FREE, t), abs=1e-6)

    def test_domain(self, traffic):
        with pytest.raises(ValueError):
            expected_free_time(traffic, FREE, -1.0)


class TestMonteCarlo:
    """Wave-vectorized two-state renewal simulation as an independent oracle."""

    @staticmethod
    def _simulate_windows(traffic, start_free: bool, t: float, n: int, seed: int):
        """Free time accumulated in [0, t] for n replications started in a
        known state; returns (free_time_per_rep, free_at_t_indicator)."""
        rng = np.random.default_rng(seed)
        now = np.zeros(n)
        free_time = np.zeros(n)
        is_free = np.full(n, start_free)
        active = np.ones(n, dtype=bool)
        while active.any():
            means = np.where(is_free, traffic.t_off_mean, traffic.t_on_mean)
            holds = rng.exponential(1.0, size=n) * means
            end = np.minimum(now + holds, t)
            free_time += np.where(active & is_free, end - now, 0.0)
            now = np.where(active, end, now)
            flips = active & (now < t)
            is_free = np.where(flips, ~is_free, is_free)
            active = flips | (active & (now < t))
        return free_time, is_free

    def test_transition_and_mean_free_time(self, traffic):
        n = 100_000
        t = 2.0
        free_time, free_end = self._simulate_windows(traffic, True, t, n, seed=8)

        p00_hat = free_end.mean()
        se = math.sqrt(p00_hat * (1.0 - p00_hat) / n)
        p00 = transition_prob(traffic, FREE, FREE, t)
        assert abs(p00_hat - p00) <= 3.0 * se

        d_hat = free_time.mean()
        d_se = free_time.std(ddof=1) / math.sqrt(n)
        assert abs(d_hat - expected_free_time(traffic, FREE, t)) <= 3.0 * d_se

    def test_busy_start(self, traffic):
        n = 100_000
        t = 2.0
        free_time, free_end = self._simulate_windows(traffic, False, t, n, seed=9)
        p10_hat = free_end.mean()
        se = math.sqrt(p10_hat * (1.0 - p10_hat) / n)
        assert abs(p10_hat - transition_prob(traffic, BUSY, FREE, t)) <= 3.0 * se
        d_se = free_time.std(ddof=1) / math.sqrt(n)
        assert abs(free_time.mean() - expected_free_time(traffic, BUSY, t)) <= 3.0 * d_se
