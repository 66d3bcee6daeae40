import pytest

from cogduty import LinkBudget, SoftMetricModel, TrafficModel


def make_link(g_sp: float) -> LinkBudget:
    return LinkBudget(
        p_primary=100.0,
        r_primary=4.5,
        noise_p=1.0,
        noise_s=1.0,
        mean_gain_pp=3.0,
        mean_gain_ss=2.0,
        mean_gain_ps=0.03,
        mean_gain_sp=g_sp,
        p_max=10.0,
    )


@pytest.fixture(scope="session")
def traffic():
    return TrafficModel(t_on_mean=4.0, t_off_mean=5.0)


@pytest.fixture(scope="session")
def channel_a():
    return make_link(2.0)


@pytest.fixture(scope="session")
def channel_b():
    return make_link(0.2)


@pytest.fixture(scope="session")
def metric3():
    return SoftMetricModel(gamma0=3.0)


@pytest.fixture(scope="session")
def metric10():
    return SoftMetricModel(gamma0=10.0)
