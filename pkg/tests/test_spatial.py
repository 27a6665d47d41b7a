import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from epikit.errors import BadResolution, NegativeDensity
from epikit.ode import integrate_rk4
from epikit.spatial import (ETDRK4, DensityFields, SpatialParams, etdrk4_step, front_position,
                            gaussian_seed_fields, homogeneous_fields, integrate_totals, make_grid,
                            run_spatial)

FIG8B = SpatialParams(0.5, 0.25, 0.01, 0.01, 0.1)
FIG9 = SpatialParams(0.5, 0.25, 0.01, 0.01, 0.1, 10.0, 2.0)


@pytest.mark.parametrize("n", [32, 100, 96])
def test_grid_requires_power_of_two_at_least_64(n):
    with pytest.raises(BadResolution):
        make_grid(1.0, n)


def test_dealias_mask_keeps_lower_two_thirds():
    g = make_grid(1.0, 96 * 2 // 3 * 2)  # 128
    mask = g.dealias_mask
    assert mask.sum() == 128 // 3 + 1
    assert mask[: 128 // 3 + 1].all() and not mask[128 // 3 + 1:].any()


def test_homogeneous_run_matches_ode():
    g = make_grid(1.0, 64)
    series = run_spatial(homogeneous_fields(g, 0.999, 0.001), FIG8B, g, 60.0, dt=0.05)

    def rhs(t, y):
        s, i = y
        inf = FIG8B.lam * s * i
        return np.array([FIG8B.f_source - FIG8B.nu * s - inf, inf - FIG8B.mu * i])

    ode = integrate_rk4(rhs, [0.999, 0.001], 60.0, 0.01)
    assert series.totals[-1, 0] == pytest.approx(ode.y[-1, 0], rel=1e-6)
    assert series.totals[-1, 2] == pytest.approx(ode.y[-1, 1], rel=1e-6)


def test_closed_population_is_conserved_and_cumulative_fields_grow():
    g = make_grid(100.0, 128, -50.0)
    p = SpatialParams(0.5, 0.25, 0.0, 0.0, 0.1, 10.0, 2.0)
    init = gaussian_seed_fields(g, 95.0, 5.0)
    series = run_spatial(init, p, g, 20.0, dt=0.02, snapshot_every=1.0)
    tot = series.totals
    living_and_removed = tot[:, 0] + tot[:, 2] + tot[:, 3] + tot[:, 4]
    assert np.allclose(living_and_removed, 100.0, rtol=1e-6)
    assert np.all(np.diff(tot[:, 5]) >= 0) and np.all(np.diff(tot[:, 4]) >= 0)
    assert np.allclose(tot[:, 4], 0.1 * tot[:, 5], atol=1e-9)
    assert np.allclose(tot[:, 3], 0.9 * tot[:, 5], atol=1e-9)


def test_seed_fields_have_requested_totals():
    g = make_grid(100.0, 512, -50.0)
    f = gaussian_seed_fields(g, 95.0, 5.0, center=0.0, width=2.0)
    tot = integrate_totals(f, g)
    assert tot.s == pytest.approx(95.0) and tot.i == pytest.approx(5.0)
    assert g.x[np.argmax(f.phi_i)] == pytest.approx(0.0)


def test_single_step_is_real_and_keeps_shape():
    g = make_grid(10.0, 64)
    f = gaussian_seed_fields(g, 50.0, 1.0, center=5.0)
    out = etdrk4_step(f, FIG9, g, 0.05)
    assert out.phi_i.dtype == np.float64 and out.phi_i.shape == (64,)
    assert out.t == pytest.approx(0.05)


def test_negative_density_is_reported():
    g = make_grid(1.0, 64)
    f = DensityFields(np.full(64, 1.0), np.full(64, 0.1))
    f.phi_i[3] = -1.0
    with pytest.raises(NegativeDensity):
        run_spatial(f, FIG8B, g, 0.1, dt=0.05)


def test_front_spreads_outward():
    g = make_grid(100.0, 256, -50.0)
    series = run_spatial(gaussian_seed_fields(g, 95.0, 5.0), FIG9, g, 20.0, dt=0.02,
                         snapshot_every=10.0)
    early = front_position(series.phi_i[0], g)
    late = front_position(series.phi_i[-1], g)
    assert late > early + 10.0


@given(amp=st.floats(0.0, 0.5), mode=st.integers(1, 10))
def test_pure_diffusion_damps_each_mode_exactly(amp, mode):
    g = make_grid(2 * math.pi, 64)
    p = SpatialParams(0.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.7)
    phi = 1.0 + amp * np.cos(mode * g.x)
    out = run_spatial(DensityFields(phi, phi.copy()), p, g, 1.0, dt=0.1).final
    assert np.allclose(out.phi_i, 1.0 + amp * math.exp(-0.7 * mode ** 2) * np.cos(mode * g.x), atol=1e-12)
    assert np.allclose(out.phi_s, 1.0 + amp * math.exp(-0.3 * mode ** 2) * np.cos(mode * g.x), atol=1e-12)


def test_solver_coefficients_are_finite_for_zero_linear_part():
    g = make_grid(1.0, 64)
    solver = ETDRK4(SpatialParams(0.5, 0.0), g, 0.1)
    assert np.all(np.isfinite(solver.q)) and solver.q[0, 0] == pytest.approx(0.05)
