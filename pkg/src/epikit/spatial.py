"""Continuum SIR densities on a periodic 1-D domain.

    d(phi_I)/dt = (D_I lap - mu) phi_I + lam phi_S phi_I
    d(phi_S)/dt = (D_S lap - nu) phi_S - lam phi_S phi_I + f

Time stepping is ETDRK4 (Cox & Matthews) with the phi-function coefficients
evaluated by contour averaging (Kassam & Trefethen). Fields live in real FFT
space, so densities are real by construction, and the top third of the
spectrum is zeroed on every nonlinear evaluation. Recovered, dead and
cumulative densities are quadratures of phi_I and are accumulated with the
trapezoid rule between steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import BadResolution, NegativeDensity, NonFinite
from .models import CompartmentState

CONTOUR_POINTS = 32
NEGATIVE_TOL = 1e-6


@dataclass(frozen=True)
class Grid1D:
    length_l: float
    n_points: int
    origin: float = 0.0

    @property
    def h(self) -> float:
        return self.length_l / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        return self.origin + self.h * np.arange(self.n_points)

    @cached_property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in FFT order (zero mode first)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.h)

    @cached_property
    def k_real(self) -> np.ndarray:
        """Non-negative wavenumbers matching ``numpy.fft.rfft`` output."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.n_points, d=self.h)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True for retained modes, ``|j| <= n/3``, in rfft order."""
        j = np.arange(self.n_points // 2 + 1)
        return j <= self.n_points / 3.0


def make_grid(length_l: float, n_points: int, origin: float = 0.0) -> Grid1D:
    n = int(n_points)
    if n < 64 or n & (n - 1):
        raise BadResolution(f"n_points={n_points} must be a power of two >= 64")
    if not length_l > 0:
        raise ValueError("length_l must be positive")
    return Grid1D(float(length_l), n, float(origin))


@dataclass(frozen=True)
class SpatialParams:
    lam: float
    mu: float
    nu: float = 0.0
    f_source: float = 0.0
    g: float = 0.0
    d_s: float = 0.0
    d_i: float = 0.0

    def __post_init__(self):
        vals = (self.lam, self.mu, self.nu, self.f_source, self.g, self.d_s, self.d_i)
        if min(vals) < 0:
            raise ValueError("spatial parameters must be non-negative")
        if self.g > 1:
            raise ValueError("death fraction g must lie in [0, 1]")


@dataclass
class DensityFields:
    phi_s: np.ndarray
    phi_i: np.ndarray
    phi_r: np.ndarray | None = None
    phi_d: np.ndarray | None = None
    phi_c: np.ndarray | None = None
    t: float = 0.0

    def __post_init__(self):
        self.phi_s = np.asarray(self.phi_s, dtype=float)
        self.phi_i = np.asarray(self.phi_i, dtype=float)
        for name in ("phi_r", "phi_d", "phi_c"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros_like(self.phi_s))

    def copy(self) -> "DensityFields":
        return DensityFields(self.phi_s.copy(), self.phi_i.copy(), self.phi_r.copy(),
                             self.phi_d.copy(), self.phi_c.copy(), self.t)


def homogeneous_fields(grid: Grid1D, phi_s: float, phi_i: float) -> DensityFields:
    return DensityFields(np.full(grid.n_points, float(phi_s)), np.full(grid.n_points, float(phi_i)))


def gaussian_seed_fields(grid: Grid1D, susceptible_total: float, infected_total: float,
                         center: float = 0.0, width: float = 2.0) -> DensityFields:
    """Uniform susceptibles plus a Gaussian bump of infected, both given as head counts."""
    dx = (grid.x - center + 0.5 * grid.length_l) % grid.length_l - 0.5 * grid.length_l
    bump = np.exp(-0.5 * (dx / width) ** 2)
    bump *= infected_total / (bump.sum() * grid.h)
    phi_s = np.full(grid.n_points, susceptible_total / grid.length_l)
    return DensityFields(phi_s, bump)


def _phi_coefficients(lin_dt: np.ndarray, dt: float):
    roots = np.exp(2j * np.pi * (np.arange(CONTOUR_POINTS) + 0.5) / CONTOUR_POINTS)
    lr = lin_dt[..., None] + roots
    elr = np.exp(lr)
    lr3 = lr ** 3
    q = dt * np.mean((np.exp(lr / 2.0) - 1.0) / lr, axis=-1).real
    f1 = dt * np.mean((-4.0 - lr + elr * (4.0 - 3.0 * lr + lr * lr)) / lr3, axis=-1).real
    f2 = dt * np.mean((2.0 + lr + elr * (lr - 2.0)) / lr3, axis=-1).real
    f3 = dt * np.mean((-4.0 - 3.0 * lr - lr * lr + elr * (4.0 - lr)) / lr3, axis=-1).real
    return q, f1, f2, f3


class ETDRK4:
    """Precomputed ETDRK4 stepper for one (params, grid, dt) triple.

    The spectral state has shape ``(2, n//2 + 1)``: row 0 is phi_I, row 1 phi_S.
    """

    def __init__(self, p: SpatialParams, grid: Grid1D, dt: float):
        if not dt > 0:
            raise ValueError("dt must be positive")
        self.p, self.grid, self.dt = p, grid, dt
        k2 = grid.k_real ** 2
        lin = np.stack([-p.d_i * k2 - p.mu, -p.d_s * k2 - p.nu])
        self.exp_full = np.exp(lin * dt)
        self.exp_half = np.exp(lin * dt / 2.0)
        self.q, self.f1, self.f2, self.f3 = _phi_coefficients(lin * dt, dt)
        self.mask = grid.dealias_mask.astype(float)
        # constant source enters only the zero mode of the unnormalized rfft
        self.source_hat = np.zeros(grid.k_real.size, dtype=complex)
        self.source_hat[0] = p.f_source * grid.n_points

    def to_spectral(self, phi_i: np.ndarray, phi_s: np.ndarray) -> np.ndarray:
        return np.stack([np.fft.rfft(phi_i), np.fft.rfft(phi_s)]) * self.mask

    def to_physical(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = self.grid.n_points
        return np.fft.irfft(v[0], n), np.fft.irfft(v[1], n)

    def nonlinear(self, v: np.ndarray) -> np.ndarray:
        phi_i, phi_s = self.to_physical(v)
        coupling = np.fft.rfft(self.p.lam * phi_s * phi_i)
        return np.stack([coupling, self.source_hat - coupling]) * self.mask

    def step(self, v: np.ndarray) -> np.ndarray:
        nv = self.nonlinear(v)
        a = self.exp_half * v + self.q * nv
        na = self.nonlinear(a)
        b = self.exp_half * v + self.q * na
        nb = self.nonlinear(b)
        c = self.exp_half * a + self.q * (2.0 * nb - nv)
        nc = self.nonlinear(c)
        return self.exp_full * v + self.f1 * nv + 2.0 * self.f2 * (na + nb) + self.f3 * nc


def _check(phi_i: np.ndarray, phi_s: np.ndarray, t: float, rho0: float) -> None:
    if not (np.all(np.isfinite(phi_i)) and np.all(np.isfinite(phi_s))):
        raise NonFinite(f"non-finite density at t={t:g}")
    low = min(phi_i.min(), phi_s.min())
    if low < -NEGATIVE_TOL * rho0:
        raise NegativeDensity(f"density {low:g} below -{NEGATIVE_TOL:g} * rho0 at t={t:g}")


def _density_scale(fields: DensityFields) -> float:
    rho0 = float(np.mean(fields.phi_s + fields.phi_i))
    return rho0 if rho0 > 0 else 1.0


def _advance(solver: ETDRK4, fields: DensityFields, v: np.ndarray, rho0: float):
    p, dt = solver.p, solver.dt
    v_new = solver.step(v)
    phi_i, phi_s = solver.to_physical(v_new)
    t = fields.t + dt
    _check(phi_i, phi_s, t, rho0)
    removal = 0.5 * dt * p.mu * (fields.phi_i + phi_i)
    out = DensityFields(phi_s, phi_i, fields.phi_r + (1.0 - p.g) * removal,
                        fields.phi_d + p.g * removal, fields.phi_c + removal, t)
    return out, v_new


def etdrk4_step(fields: DensityFields, p: SpatialParams, grid: Grid1D, dt: float,
                solver: ETDRK4 | None = None) -> DensityFields:
    """Advance ``fields`` by one ETDRK4 step of length ``dt``.

    Pass a prebuilt ``solver`` to reuse coefficients across many steps.
    """
    solver = solver or ETDRK4(p, grid, dt)
    v = solver.to_spectral(fields.phi_i, fields.phi_s)
    out, _ = _advance(solver, fields, v, _density_scale(fields))
    return out


@dataclass
class SpatialSeries:
    t: np.ndarray
    totals: np.ndarray  # rows of (S, E, I, R, D, C) head counts
    snapshot_t: np.ndarray
    phi_s: np.ndarray  # (n_snapshots, n_points)
    phi_i: np.ndarray
    final: DensityFields
    grid: Grid1D = field(repr=False, default=None)


def integrate_totals(fields: DensityFields, grid: Grid1D) -> CompartmentState:
    h = grid.h
    return CompartmentState(
        s=float(fields.phi_s.sum() * h),
        e=0.0,
        i=float(fields.phi_i.sum() * h),
        r=float(fields.phi_r.sum() * h),
        d=float(fields.phi_d.sum() * h),
        c=float(fields.phi_c.sum() * h),
        t=fields.t,
    )


def run_spatial(init: DensityFields, p: SpatialParams, grid: Grid1D, t_end: float,
                dt: float = 0.01, snapshot_every: float | None = None) -> SpatialSeries:
    """Integrate to the last multiple of ``dt`` not past ``t_end``.

    Totals are recorded every step; field snapshots every ``snapshot_every``
    days (default: about 200 snapshots over the run).
    """
    if init.phi_s.shape != (grid.n_points,) or init.phi_i.shape != (grid.n_points,):
        raise ValueError("initial fields do not match the grid")
    solver = ETDRK4(p, grid, dt)
    n_steps = int(np.floor((t_end - init.t) / dt + 1e-9))
    every = snapshot_every if snapshot_every is not None else max(dt, (t_end - init.t) / 200.0)
    stride = max(1, int(round(every / dt)))
    rho0 = _density_scale(init)

    v = solver.to_spectral(init.phi_i, init.phi_s)
    phi_i, phi_s = solver.to_physical(v)
    fields = replace(init.copy(), phi_s=phi_s, phi_i=phi_i)
    _check(phi_i, phi_s, fields.t, rho0)

    totals = np.empty((n_steps + 1, 6))
    totals[0] = integrate_totals(fields, grid).as_array()
    snap_t, snap_s, snap_i = [fields.t], [fields.phi_s], [fields.phi_i]
    for k in range(1, n_steps + 1):
        fields, v = _advance(solver, fields, v, rho0)
        fields.t = init.t + k * dt
        totals[k] = integrate_totals(fields, grid).as_array()
        if k % stride == 0:
            snap_t.append(fields.t)
            snap_s.append(fields.phi_s)
            snap_i.append(fields.phi_i)
    times = init.t + dt * np.arange(n_steps + 1)
    return SpatialSeries(times, totals, np.array(snap_t), np.array(snap_s), np.array(snap_i),
                         fields, grid)


def front_position(phi_i: np.ndarray, grid: Grid1D, center: float = 0.0,
                   threshold: float | None = None) -> float:
    """Largest distance from ``center`` at which ``phi_i`` exceeds ``threshold``.

    The default threshold is 10% of the field maximum.
    """
    thr = 0.1 * phi_i.max() if threshold is None else threshold
    dx = np.abs((grid.x - center + 0.5 * grid.length_l) % grid.length_l - 0.5 * grid.length_l)
    above = phi_i > thr
    return float(dx[above].max()) if above.any() else 0.0
