import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from epikit.errors import Extinction
from epikit.models import SeirParams, simulate
from epikit.spatial import SpatialParams
from epikit.stochastic import (OccupancyState, Reaction, ReactionSystem, build_sir_reactions,
                               ensemble_stats, gillespie_delta_t, gillespie_run, gillespie_select,
                               replicate_rng, resample_locf, run_ensemble, species_index)

SIR = SpatialParams(0.5, 0.25)


def test_single_cell_has_four_channels_and_rates_map_from_densities():
    p = SpatialParams(0.5, 0.25, 0.01, 0.02, 0.1)
    sys_ = build_sir_reactions(p, 1, cell_volume=2.0, population_scale=100.0)
    assert [r.label for r in sys_.reactions] == ["infect", "remove", "death_S", "birth_S"]
    assert sys_.reactions[0].rate == pytest.approx(0.5 / 200.0)
    assert sys_.reactions[3].rate == pytest.approx(0.02 * 200.0)
    assert sys_.death_fraction == 0.1


def test_ten_cell_chain_has_reflective_hops():
    sys_ = build_sir_reactions(SpatialParams(0.5, 0.25, d_s=1.0, d_i=1.0), 10, cell_volume=0.5)
    assert len(sys_) == 40 + 36
    hops = [r for r in sys_.reactions if r.label.startswith("hop")]
    assert all(r.rate == pytest.approx(4.0) for r in hops)
    assert not any(r.cell == 0 and r.label.endswith("left") for r in hops)
    assert not any(r.cell == 9 and r.label.endswith("right") for r in hops)


def test_propensity_is_mass_action():
    rx = Reaction("x", 0.5, (0, 1), ((0, -1), (1, 1)))
    assert rx.propensity([10, 3]) == pytest.approx(15.0)
    assert Reaction("b", 2.0, (), ((0, 1),)).propensity([0]) == 2.0


def test_waiting_time_and_selection():
    assert gillespie_delta_t(2.0, math.exp(-1.0)) == pytest.approx(0.5)
    with pytest.raises(Extinction):
        gillespie_delta_t(0.0, 0.5)
    props = [1.0, 0.0, 3.0]
    assert gillespie_select(props, 0.0) == 0
    assert gillespie_select(props, 0.24) == 0
    assert gillespie_select(props, 0.26) == 2
    assert gillespie_select(props, 0.999999) == 2
    with pytest.raises(Extinction):
        gillespie_select([0.0, 0.0], 0.3)


@given(st.lists(st.floats(0, 10), min_size=1, max_size=8).filter(lambda a: sum(a) > 0),
       st.floats(0, 1, exclude_max=True))
def test_selected_channel_brackets_the_target(props, r2):
    j = gillespie_select(props, r2)
    cum = np.cumsum(props)
    assert props[j] > 0
    lo = cum[j - 1] if j else 0.0
    assert lo <= r2 * cum[-1] <= cum[j] + 1e-12


def test_run_stops_at_extinction_and_keeps_totals_consistent():
    sys_ = build_sir_reactions(SpatialParams(0.5, 0.25, g=0.3), 1, population_scale=100.0)
    res = gillespie_run(sys_, OccupancyState([95, 5], c_total=5), 1e6, seed=3)
    assert res.extinct and res.final.i_total == 0
    tot = res.totals
    assert np.all(tot[:, 0] + tot[:, 1] + tot[:, 2] + tot[:, 3] == 100)
    assert np.all(tot[:, 4] == 100 - tot[:, 0])
    assert np.all(np.diff(res.t) > 0)


@given(st.integers(0, 2 ** 31))
def test_hops_conserve_particles_on_a_closed_chain(seed):
    p = SpatialParams(0.0, 0.0, d_s=1.0, d_i=2.0)
    sys_ = build_sir_reactions(p, 5)
    init = OccupancyState(np.array([3, 1] * 5))
    res = gillespie_run(sys_, init, 2.0, seed=seed)
    assert res.final.s_total == 15 and res.final.i_total == 5
    assert np.all(res.final.counts >= 0)


def test_pure_death_mean_decays_exponentially():
    sys_ = build_sir_reactions(SpatialParams(0.0, 0.5), 1)
    grid = np.array([0.0, 1.0, 2.0])
    samples = run_ensemble(sys_, OccupancyState([0, 200]), 2.0, 400, 7, grid)
    st_ = ensemble_stats(samples, grid)
    expect = 200 * np.exp(-0.5 * grid)
    assert np.all(np.abs(st_.mean[:, 1] - expect) <= 4 * st_.se[:, 1] + 1e-12)


def test_inter_event_times_are_exponential():
    # a lone birth channel has constant propensity
    sys_ = ReactionSystem([Reaction("birth", 3.0, (), ((0, 1),))], 1)
    res = gillespie_run(sys_, OccupancyState([0, 0]), 2000.0, seed=11)
    gaps = np.diff(res.t)
    assert stats.kstest(gaps, "expon", args=(0, 1 / 3.0)).pvalue > 0.001


def test_ensembles_are_reproducible_and_worker_independent():
    sys_ = build_sir_reactions(SIR, 1, population_scale=300.0)
    init = OccupancyState([290, 10], c_total=10)
    grid = np.linspace(0, 10, 11)
    a = run_ensemble(sys_, init, 10.0, 6, 42, grid, workers=1)
    b = run_ensemble(sys_, init, 10.0, 6, 42, grid, workers=2)
    c = run_ensemble(sys_, init, 10.0, 6, 43, grid)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    r0 = replicate_rng(42, 0).random(3)
    assert np.array_equal(r0, replicate_rng(42, 0).random(3))
    assert not np.array_equal(r0, replicate_rng(42, 1).random(3))


def test_locf_resampling():
    t = np.array([0.0, 1.5, 2.0])
    v = np.array([[1.0], [2.0], [3.0]])
    out = resample_locf(t, v, [0.0, 1.0, 1.5, 1.9, 5.0])
    assert out[:, 0].tolist() == [1.0, 1.0, 2.0, 2.0, 3.0]


def test_ensemble_stats_of_results_and_arrays_agree():
    sys_ = build_sir_reactions(SIR, 1, population_scale=200.0)
    init = OccupancyState([190, 10])
    grid = np.arange(0, 6.0)
    runs = [gillespie_run(sys_, init, 5.0, rng=replicate_rng(5, i)) for i in range(5)]
    a = ensemble_stats(runs, grid)
    b = ensemble_stats(run_ensemble(sys_, init, 5.0, 5, 5, grid), grid)
    assert np.allclose(a.mean, b.mean) and np.allclose(a.se, b.se)
    with pytest.raises(ValueError):
        ensemble_stats(np.zeros((1, 3, 5)))


@pytest.mark.slow
def test_mean_field_deviation_shrinks_with_population():
    """Relative gap between ensemble mean and ODE at the epidemic peak."""
    grid = np.array([0.0, 15.0])
    devs = []
    for n in (100, 1000, 10000):
        i0 = n // 50
        sys_ = build_sir_reactions(SIR, 1, population_scale=float(n))
        samples = run_ensemble(sys_, OccupancyState([n - i0, i0]), 15.0, 200, 1, grid)
        ode = simulate("sir", SeirParams(0.5, 1.0, 0.25, 0.0, n), [n - i0, 0, i0, 0, 0, i0], 15.0, 0.01)
        devs.append(abs(samples[:, -1, 1].mean() - ode.y[-1, 2]) / ode.y[-1, 2])
    assert devs[0] > devs[1] > devs[2]
