"""Metric distributions, quantization levels and the metric sampler."""

import math

import numpy as np
import pytest

from cogduty.numerics import QuadratureSpec, integrate_semi_infinite
from cogduty.sensing import SoftMetricModel, ThresholdSet, classify, level_probs, sample_metric
from cogduty.traffic import ChannelState

FREE, BUSY = ChannelState.FREE, ChannelState.BUSY
TIGHT = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14, max_subdivisions=200)


class TestThresholdSet:
    def test_single_level(self):
        ts = ThresholdSet(())
        assert ts.levels == 1
        assert ts.edges() == [(0.0, math.inf)]

    def test_edges(self):
        ts = ThresholdSet((0.8, 2.5))
        assert ts.levels == 3
        assert ts.edges() == [(0.0, 0.8), (0.8, 2.5), (2.5, math.inf)]

    @pytest.mark.parametrize("bad", [(1.0, 1.0), (2.0, 1.0), (0.0,), (-1.0,), (math.inf,)])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            ThresholdSet(bad)


class TestLevelProbs:
    def test_single_level_is_certain(self, metric3):
        for state in (FREE, BUSY):
            assert level_probs(metric3, ThresholdSet(()), state) == (1.0,)

    def test_free_one_threshold(self, metric3):
        lo, hi = level_probs(metric3, ThresholdSet((1.0,)), FREE)
        assert lo == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)
        assert hi == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_busy_one_threshold_vs_quadrature(self, metric3):
        lo, hi = level_probs(metric3, ThresholdSet((1.0,)), BUSY)
        oracle_lo = 1.0 - integrate_semi_infinite(lambda g: metric3.f1(g), 1.0, TIGHT)
        assert lo == pytest.approx(oracle_lo, abs=1e-8)
        assert hi == pytest.approx(1.0 - oracle_lo, abs=1e-8)

    def test_sum_to_one(self, metric3, metric10):
        rng = np.random.default_rng(11)
        for metric in (metric3, metric10):
            for _ in range(20):
                cuts = np.sort(rng.uniform(0.1, 12.0, size=rng.integers(1, 5)))
                ts = ThresholdSet(tuple(cuts))
                for state in (FREE, BUSY):
                    probs = level_probs(metric, ts, state)
                    assert all(0.0 <= p <= 1.0 for p in probs)
                    assert sum(probs) == pytest.approx(1.0, abs=1e-10)

    def test_detector_tradeoff(self, metric3):
        # one threshold: false alarm eps_2 falls with t, miss theta_1 rises
        ts_grid = np.linspace(0.2, 8.0, 25)
        false_alarm = [level_probs(metric3, ThresholdSet((float(t),)), FREE)[1] for t in ts_grid]
        miss = [level_probs(metric3, ThresholdSet((float(t),)), BUSY)[0] for t in ts_grid]
        assert all(b < a for a, b in zip(false_alarm, false_alarm[1:]))
        assert all(b > a for a, b in zip(miss, miss[1:]))


class TestClassify:
    @pytest.mark.parametrize(
        "thresholds,gamma,level",
        [
            ((1.0,), 0.5, 1),
            ((1.0,), 1.0, 2),  # boundary goes to the upper level
            ((0.8, 2.5), 1.7, 2),
            ((0.8, 2.5), 99.0, 3),
            ((), 5.0, 1),
        ],
    )
    def test_levels(self, thresholds, gamma, level):
        assert classify(ThresholdSet(thresholds), gamma) == level

    def test_domain(self):
        with pytest.raises(ValueError):
            classify(ThresholdSet((1.0,)), -0.1)


class TestSampleMetric:
    def test_free_mean(self, metric3):
        rng = np.random.default_rng(12)
        draws = sample_metric(metric3, FREE, rng, size=1_000_000)
        assert draws.mean() == pytest.approx(1.0, abs=0.004)

    def test_busy_mean(self, metric3):
        rng = np.random.default_rng(13)
        draws = sample_metric(metric3, BUSY, rng, size=1_000_000)
        assert draws.mean() == pytest.approx(1.0 + 3.0, abs=0.01)

    def test_busy_tail_vs_quadrature(self, metric3):
        rng = np.random.default_rng(14)
        n = 1_000_000
        draws = sample_metric(metric3, BUSY, rng, size=n)
        frac = float(np.mean(draws <= 1.0))
        oracle = 1.0 - integrate_semi_infinite(lambda g: metric3.f1(g), 1.0, TIGHT)
        se = math.sqrt(oracle * (1.0 - oracle) / n)
        assert abs(frac - oracle) <= 3.0 * se

    @pytest.mark.parametrize("gamma0", [3.0, 10.0])
    def test_level_frequencies(self, gamma0):
        metric = SoftMetricModel(gamma0)
        ts = ThresholdSet((1.0, 4.0, 9.0))
        rng = np.random.default_rng(15)
        n = 1_000_000
        for state in (FREE, BUSY):
            draws = sample_metric(metric, state, rng, size=n)
            counts = np.bincount(np.searchsorted(ts.thresholds, draws, side="right"), minlength=4)
            probs = level_probs(metric, ts, state)
            for count, p in zip(counts, probs):
                se = math.sqrt(max(p * (1.0 - p), 1e-12) / n)
                assert abs(count / n - p) <= 3.0 * se + 1e-9

    def test_scalar_draw(self, metric3):
        rng = np.random.default_rng(16)
        value = sample_metric(metric3, BUSY, rng)
        assert np.isscalar(value) or value.shape == ()
        assert value >= 0.0


class TestMetricPdfs:
    def test_f0_normalization(self, metric3):
        total = integrate_semi_infinite(metric3.f0, 0.0, TIGHT)
        assert total == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("gamma0", [0.5, 3.0, 10.0])
    def test_f1_normalization(self, gamma0):
        metric = SoftMetricModel(gamma0)
        total = integrate_semi_infinite(metric.f1, 0.0, TIGHT)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_invalid_model(self):
        with pytest.raises(ValueError):
            SoftMetricModel(-1.0)
