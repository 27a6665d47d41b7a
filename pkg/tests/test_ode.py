import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from epikit.errors import NegativePopulation, NonFinite
from epikit.ode import integrate_rk4, integrate_rk4_at, rk4_step


def test_zero_rhs_keeps_state_constant():
    ts = integrate_rk4(lambda t, y: np.zeros_like(y), [1.0, 2.0, 3.0], 5.0, 0.1)
    assert np.all(ts.y == np.array([1.0, 2.0, 3.0]))


def test_exponential_decay_over_one_lifetime():
    g = 1 / 14
    ts = integrate_rk4(lambda t, y: -g * y, [1.0], 14.0, 0.1)
    assert ts.t[-1] == pytest.approx(14.0)
    assert abs(ts.y[-1, 0] - math.exp(-1.0)) < 1e-8


def test_last_sample_is_largest_multiple_not_past_end():
    ts = integrate_rk4(lambda t, y: -y, [1.0], 1.03, 0.1)
    assert len(ts) == 11
    assert ts.t[-1] == pytest.approx(1.0)


def test_halving_dt_cuts_error_sixteenfold():
    def rhs(t, y):
        return np.array([y[1], -y[0] - 0.1 * y[0] ** 3])

    ref = integrate_rk4(rhs, [1.0, 0.0], 10.0, 0.001).y[-1]
    e1 = np.abs(integrate_rk4(rhs, [1.0, 0.0], 10.0, 0.1).y[-1] - ref).max()
    e2 = np.abs(integrate_rk4(rhs, [1.0, 0.0], 10.0, 0.05).y[-1] - ref).max()
    assert 13.0 < e1 / e2 < 19.0


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_non_finite_state_raises():
    with pytest.raises(NonFinite):
        integrate_rk4(lambda t, y: y * y, [1.0], 5.0, 0.5)


def test_small_undershoot_is_clamped_and_deep_undershoot_raises():
    # a constant sink drives the state to -0.5 in one step
    ts = integrate_rk4(lambda t, y: -np.ones_like(y), [0.5], 1.0, 1.0, nonneg_slack=1.0)
    assert ts.y[-1, 0] == 0.0
    with pytest.raises(NegativePopulation):
        integrate_rk4(lambda t, y: -np.ones_like(y), [0.5], 1.0, 1.0, nonneg_slack=1e-9)


def test_sampling_at_arbitrary_times_hits_them_exactly():
    times = [0.3, 1.0, 2.75]
    out = integrate_rk4_at(lambda t, y: -y, [1.0], times, 0.01)
    assert np.allclose(out[:, 0], np.exp(-np.array(times)), rtol=1e-10)


def test_rk4_step_is_exact_for_cubic_in_time():
    y = rk4_step(lambda t, y: np.array([3 * t * t]), 0.0, np.array([0.0]), 2.0)
    assert y[0] == pytest.approx(8.0)


@given(rate=st.floats(0.01, 2.0), y0=st.floats(0.1, 1e6))
def test_linear_decay_matches_exponential(rate, y0):
    ts = integrate_rk4(lambda t, y: -rate * y, [y0], 5.0, 0.01)
    assert ts.y[-1, 0] == pytest.approx(y0 * math.exp(-5.0 * rate), rel=1e-7)
