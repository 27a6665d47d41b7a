import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from epikit.models import (C, D, E, I, R, S, CompartmentState, ConstantQuarantine, ControlSchedule,
                           LogisticQuarantine, PiecewiseLinearQuarantine, QuarantineParams,
                           SeirParams, beta_at, derived_stats, linearized_seir_rhs,
                           quarantine_sir_rhs, r_eff_series, seir_rhs, simulate, sir_final_size,
                           sir_rhs)
from epikit.ode import integrate_rk4

FIG4 = SeirParams(0.5, 1 / 24, 1 / 14, 0.25, 1e4)
EBOLA = SeirParams(0.266, 0.072, 0.0533, 0.396, 1e6 + 1)
EBOLA_CONTROL = ControlSchedule(0.266, 1.0, 0.00648)


def fig4_init():
    return CompartmentState(1e4 - 10, 0, 10, 0, 0, 10)


params = st.builds(SeirParams, beta0=st.floats(0.05, 2.0), sigma=st.floats(0.02, 1.0),
                   gamma=st.floats(0.02, 1.0), f=st.floats(0.0, 1.0), n=st.floats(100, 1e7))


def test_state_round_trips_through_array():
    s = CompartmentState(1, 2, 3, 4, 5, 6, t=2.0)
    assert CompartmentState.from_array(s.as_array(), 2.0) == s
    assert s.total == 15


def test_params_validate():
    with pytest.raises(ValueError):
        SeirParams(0.5, 0.1, 0.1, 1.5, 100)
    with pytest.raises(ValueError):
        SeirParams(0.5, 0.1, 0.0, 0.1, 100)


def test_seir_rhs_terms():
    d = seir_rhs([900, 50, 50, 0, 0, 50], SeirParams(0.5, 0.2, 0.1, 0.25, 1000), 0.5)
    inf = 0.5 * 900 * 50 / 1000
    assert d[S] == pytest.approx(-inf)
    assert d[E] == pytest.approx(inf - 10)
    assert d[I] == pytest.approx(10 - 5)
    assert d[R] == pytest.approx(0.75 * 5)
    assert d[D] == pytest.approx(0.25 * 5)
    assert d[C] == pytest.approx(10)


def test_linearized_model_grows_exponentially():
    p = SeirParams(0.5, 1 / 24, 1 / 14, 0.25, 1000)
    traj = simulate("seir_linear", p, [1000, 0, 10, 0, 0, 10], 100, 0.05)
    i = traj.column("I")
    late = np.log(i[traj.t >= 50])
    slope = np.polyfit(traj.t[traj.t >= 50], late, 1)[0]
    assert slope > 0.05
    assert np.allclose(np.diff(late) / 0.05, slope, rtol=0.02)


def test_linearized_rhs_ignores_depletion():
    p = SeirParams(0.5, 0.2, 0.1, 0.25, 1000)
    a = linearized_seir_rhs([0, 5, 5, 0, 0, 0], p, 0.5)
    b = linearized_seir_rhs([-1e9, 5, 5, 0, 0, 0], p, 0.5)
    assert np.allclose(a[1:], b[1:])


def test_sir_final_size_matches_simulation():
    p = SeirParams(0.5, 1.0, 0.25, 0.0, 1e4)
    traj = simulate("sir", p, [1e4 - 5, 0, 5, 0, 0, 5], 400, 0.1)
    z = sir_final_size(2.0)
    assert abs(z - 1 + math.exp(-2 * z)) < 1e-12
    assert traj.y[-1, C] / 1e4 == pytest.approx(z, abs=2e-3)


def test_sir_rhs_splits_removal_by_f():
    d = sir_rhs([900, 0, 100, 0, 0, 100], SeirParams(0.5, 1.0, 0.2, 0.3, 1000))
    assert d[R] == pytest.approx(0.7 * 20)
    assert d[D] == pytest.approx(0.3 * 20)
    assert d[S] + d[I] + d[R] + d[D] == pytest.approx(0.0)


@given(params)
def test_conservation_along_seir_trajectories(p):
    y0 = [p.n * 0.999, 0, p.n * 0.001, 0, 0, p.n * 0.001]
    traj = simulate("seir", p, y0, 120, 0.1)
    total = traj.y[:, :5].sum(axis=1)
    assert np.max(np.abs(total - p.n)) / p.n < 1e-9


@given(params)
def test_cumulative_counts_are_monotone_and_consistent(p):
    y0 = np.array([p.n - 10, 0, 10, 0, 0, 10])
    traj = simulate("seir", p, y0, 120, 0.1)
    assert np.all(np.diff(traj.y[:, C]) >= -1e-9 * p.n)
    assert np.all(np.diff(traj.y[:, D]) >= -1e-9 * p.n)
    lhs = traj.y[:, C] - y0[C]
    rhs = (traj.y[:, R] + traj.y[:, D] + traj.y[:, I]) - (y0[R] + y0[D] + y0[I])
    # C counts entries into I, so it also tracks E draining
    assert np.all(np.abs(lhs - rhs) < 1e-6 * p.n)


@given(beta0=st.floats(0.01, 3), t0=st.floats(0, 50), alpha=st.floats(0, 1),
       gap=st.floats(0.1, 100), t=st.floats(0, 200), dt=st.floats(0, 10))
def test_control_rate_never_rises_while_active(beta0, t0, alpha, gap, t, dt):
    sch = ControlSchedule(beta0, t0, alpha, t0 + gap)
    a, b = t, t + dt
    if t0 <= a and b < t0 + gap:
        assert beta_at(sch, b) <= beta_at(sch, a) * (1 + 1e-12)
    assert beta_at(sch, t) <= beta0


def test_control_removal_restores_beta0():
    sch = ControlSchedule(0.5, 28, 0.125, 60)
    assert beta_at(sch, 27.9) == 0.5
    assert beta_at(sch, 59.9) == pytest.approx(0.5 * math.exp(-0.125 * 31.9))
    assert beta_at(sch, 60) == 0.5


def test_ebola_derived_statistics():
    st_ = derived_stats(EBOLA, EBOLA_CONTROL)
    assert st_.r0 == pytest.approx(4.99, abs=0.01)
    assert st_.half_life_infectious == pytest.approx(13.0, abs=0.05)
    assert st_.half_life_transmission == pytest.approx(2.61, abs=0.01)
    assert st_.control_response_time == pytest.approx(107, abs=0.5)
    assert st_.half_life_incubation == pytest.approx(math.log(2) / 0.072)
    assert math.isinf(derived_stats(EBOLA).control_response_time)


def test_r_eff_starts_at_r0_and_stays_flat_without_depletion():
    traj = simulate("seir", FIG4, [1e4 - 1e-6, 0, 1e-6, 0, 0, 1e-6], 5, 0.05)
    reff = r_eff_series(traj, FIG4)
    assert reff.r_eff[0] == pytest.approx(7.0, rel=1e-9)
    assert np.allclose(reff.r_eff, 7.0, rtol=1e-6)
    assert reff.crossing_time is None


def test_ebola_r_eff_falls_below_one_long_after_control_onset():
    traj = simulate("seir", EBOLA, [1e6, 0, 1, 0, 0, 1], 700, 0.05, EBOLA_CONTROL)
    reff = r_eff_series(traj, EBOLA, EBOLA_CONTROL)
    assert reff.crossing_time is not None
    assert reff.crossing_time - EBOLA_CONTROL.t0 > 200


def test_fig4_deaths_near_2100():
    traj = simulate("seir", FIG4, fig4_init(), 600)
    assert 0.8 * 2100 <= traj.y[-1, D] <= 1.2 * 2100


def test_seir_rk4_convergence_order():
    def end(dt):
        return simulate("seir", FIG4, fig4_init(), 200, dt).y[-1]

    ref = end(0.0125)
    e1 = np.abs(end(0.4) - ref).max()
    e2 = np.abs(end(0.2) - ref).max()
    assert 3.7 <= math.log2(e1 / e2) <= 4.3


def _qp(q, beta=0.5, gamma=0.25):
    return QuarantineParams(beta, gamma, q, 1000.0)


def test_zero_quarantine_reduces_to_sir():
    y = [900, 0, 100, 0, 0, 100]
    dq = quarantine_sir_rhs(y, _qp(ConstantQuarantine(0.0)))
    ds = sir_rhs(y, SeirParams(0.5, 1.0, 0.25, 0.0, 1000))
    assert dq[S] == ds[S] and dq[I] == ds[I] and dq[C] == ds[C]
    assert dq[R] == pytest.approx(0.25 * 100)
    assert dq[D] == 0.0


def test_full_quarantine_doubles_removal():
    y = [900, 0, 100, 0, 0, 100]
    d0 = quarantine_sir_rhs(y, _qp(ConstantQuarantine(0.0)))
    d1 = quarantine_sir_rhs(y, _qp(ConstantQuarantine(1.0)))
    inf = 0.5 * 900 * 100 / 1000
    assert (inf - d1[I]) == pytest.approx(2 * (inf - d0[I]))


@given(q=st.floats(0, 2), gamma=st.floats(0.05, 0.5), scale=st.floats(0.3, 3.0))
def test_quarantine_dynamics_depend_only_on_r0_in_scaled_time(q, gamma, scale):
    r0 = 2.5
    y0 = [990, 0, 10, 0, 0, 10]

    def run(g):
        qp = _qp(ConstantQuarantine(q), r0 * g, g)
        rhs = lambda t, y: quarantine_sir_rhs(y, qp, t)  # noqa: E731
        return integrate_rk4(rhs, y0, 10.0 / g, 0.02 / g).y[-1]

    assert np.allclose(run(gamma), run(gamma * scale), rtol=1e-8, atol=1e-8)


def test_quarantine_shapes():
    assert LogisticQuarantine(0.8, 10, 1.0)(10) == pytest.approx(0.4)
    pw = PiecewiseLinearQuarantine((0, 10), (0, 1))
    assert pw(5) == pytest.approx(0.5) and pw(-1) == 0 and pw(20) == 1
    with pytest.raises(ValueError):
        PiecewiseLinearQuarantine((0, 1), (0, -1))
