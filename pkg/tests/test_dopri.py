import numpy as np
import pytest

from mistscd import dopri


def test_exponential_decay():
    rates = np.array([0.5, 1.0, 3.0])
    res = dopri.integrate_lanes(lambda lanes, y: -rates[lanes, None] * y, np.ones((3, 1)), 2.0,
                                rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(res.y[:, 0], np.exp(-2.0 * rates), rtol=1e-8)
    assert np.all(res.status == dopri.OK)
    np.testing.assert_array_equal(res.t, 2.0)


def test_harmonic_oscillator_period():
    def rhs(lanes, y):
        return np.stack([y[:, 1], -y[:, 0]], axis=1)

    res = dopri.integrate_lanes(rhs, np.array([[1.0, 0.0]]), 2 * np.pi, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(res.y[0], [1.0, 0.0], atol=1e-8)


def test_lanes_are_independent():
    rng = np.random.default_rng(0)
    w = rng.uniform(0.5, 5.0, 16)

    def rhs(lanes, y):
        return np.stack([w[lanes] * y[:, 1], -w[lanes] * y[:, 0] - 0.1 * y[:, 1] ** 3], axis=1)

    y0 = rng.normal(size=(16, 2))
    full = dopri.integrate_lanes(rhs, y0, 5.0)
    for i in (0, 7, 15):
        def one(lanes, y, i=i):
            return rhs(np.full(len(lanes), i), y)
        single = dopri.integrate_lanes(one, y0[i:i + 1], 5.0)
        assert np.array_equal(single.y[0], full.y[i])
        assert single.accepted[0] == full.accepted[i]


def test_domain_exit_stops_lane():
    res = dopri.integrate_lanes(lambda lanes, y: np.ones_like(y), np.zeros((2, 1)), 10.0,
                                in_domain=lambda y: y[:, 0] < 3.0)
    assert np.all(res.status == dopri.LEFT_DOMAIN)
    assert np.all(res.t < 10.0) and np.all(res.y[:, 0] >= 3.0)


def test_step_underflow_reported():
    # finite-time blow-up at t = 1
    res = dopri.integrate_lanes(lambda lanes, y: y**2, np.ones((1, 1)), 2.0, min_step_ratio=1e-9)
    assert res.status[0] == dopri.STEP_UNDERFLOW
    assert res.t[0] == pytest.approx(1.0, abs=1e-3)


def test_history_recorded():
    res = dopri.integrate_lanes(lambda lanes, y: -y, np.ones((1, 1)), 1.0, record=True)
    ts = [h[0][0] for h in res.history]
    assert ts[0] == 0.0 and ts[-1] == 1.0
    assert np.all(np.diff(ts) > 0)
    assert len(ts) == res.accepted[0] + 1
