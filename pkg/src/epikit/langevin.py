"""Euler-Maruyama integration of the SIR Langevin equations.

Drift is the reaction-diffusion right-hand side (spectral Laplacian). The
noise amplitudes are ``sqrt(2 sigma)`` on phi_I and ``-sqrt(sigma/2)(1, i)`` on
phi_S with ``sigma = -lam phi_I phi_S``. For positive densities sigma is
negative, so the amplitudes are imaginary and the fields turn complex;
observables are the real parts. ``real_noise=True`` swaps in ``|sigma|`` and
drops the ``i theta2`` term, giving a conventional real SDE with the same
``<eta_I eta_S> = -|sigma|`` cross-correlation.

Per step and cell the Wiener increment is ``sqrt(dt / h**d) * theta`` with
``theta`` standard normal (``d = 1`` here).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComplexDrift, NonFinite
from .spatial import DensityFields, Grid1D, SpatialParams

IMAG_FRACTION = 0.1
IMAG_FLOOR = 1e-3  # relative to the field's largest real part


@dataclass
class LangevinFields:
    phi_s: np.ndarray
    phi_i: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.phi_s = np.asarray(self.phi_s, dtype=complex)
        self.phi_i = np.asarray(self.phi_i, dtype=complex)

    @classmethod
    def from_density(cls, fields: DensityFields) -> "LangevinFields":
        return cls(fields.phi_s.astype(complex), fields.phi_i.astype(complex), fields.t)


def _laplacian(phi: np.ndarray, k2: np.ndarray) -> np.ndarray:
    # real and imaginary parts separately, so a real field stays exactly real
    n = phi.size
    re = np.fft.irfft(-k2 * np.fft.rfft(phi.real), n)
    if not np.any(phi.imag):
        return re.astype(complex)
    return re + 1j * np.fft.irfft(-k2 * np.fft.rfft(phi.imag), n)


def drift(fields: LangevinFields, p: SpatialParams, grid: Grid1D) -> tuple[np.ndarray, np.ndarray]:
    k2 = grid.k_real ** 2
    coupling = p.lam * fields.phi_s * fields.phi_i
    d_i = p.d_i * _laplacian(fields.phi_i, k2) - p.mu * fields.phi_i + coupling
    d_s = p.d_s * _laplacian(fields.phi_s, k2) - p.nu * fields.phi_s - coupling + p.f_source
    return d_i, d_s


def noise_increments(fields: LangevinFields, p: SpatialParams, grid: Grid1D, dt: float,
                     rng: np.random.Generator, real_noise: bool = False):
    """One step of noise ``(d eta_I, d eta_S)`` per cell."""
    sigma = -p.lam * fields.phi_i * fields.phi_s
    scale = np.sqrt(dt / grid.h)
    theta1 = rng.standard_normal(grid.n_points)
    theta2 = rng.standard_normal(grid.n_points)
    if real_noise:
        sigma = np.abs(sigma)
        return np.sqrt(2.0 * sigma) * theta1 * scale, -np.sqrt(sigma / 2.0) * theta1 * scale
    d_eta_i = np.sqrt(2.0 * sigma) * theta1 * scale
    d_eta_s = -np.sqrt(sigma / 2.0) * (theta1 + 1j * theta2) * scale
    return d_eta_i, d_eta_s


def _check(fields: LangevinFields, imag: bool = True) -> None:
    for phi in (fields.phi_i, fields.phi_s):
        if not np.all(np.isfinite(phi)):
            raise NonFinite(f"non-finite Langevin field at t={fields.t:g}")
        if not imag:
            continue
        re = np.abs(phi.real)
        floor = IMAG_FLOOR * max(re.max(), 1e-300)
        if np.any(np.abs(phi.imag) > IMAG_FRACTION * np.maximum(re, floor)):
            raise ComplexDrift(f"imaginary part exceeds {IMAG_FRACTION:.0%} of the real part "
                               f"at t={fields.t:g}")


def langevin_step(fields: LangevinFields, p: SpatialParams, grid: Grid1D, dt: float,
                  rng: np.random.Generator | None = None, *, noise: bool = True,
                  real_noise: bool = False, check: bool = True) -> LangevinFields:
    d_i, d_s = drift(fields, p, grid)
    phi_i = fields.phi_i + dt * d_i
    phi_s = fields.phi_s + dt * d_s
    if noise:
        if rng is None:
            raise ValueError("a random generator is required when noise is on")
        n_i, n_s = noise_increments(fields, p, grid, dt, rng, real_noise)
        phi_i = phi_i + n_i
        phi_s = phi_s + n_s
    out = LangevinFields(phi_s, phi_i, fields.t + dt)
    if check:
        _check(out, imag=noise and not real_noise)
    return out


@dataclass
class LangevinSeries:
    t: np.ndarray
    totals: np.ndarray  # rows of (S, I) real-part head counts
    final: LangevinFields


def run_langevin(init: LangevinFields, p: SpatialParams, grid: Grid1D, t_end: float, dt: float,
                 seed: int | None = None, *, noise: bool = True, real_noise: bool = False,
                 check: bool = True) -> LangevinSeries:
    rng = np.random.default_rng(seed)
    n_steps = int(np.floor((t_end - init.t) / dt + 1e-9))
    fields = init
    totals = np.empty((n_steps + 1, 2))
    totals[0] = (fields.phi_s.real.sum() * grid.h, fields.phi_i.real.sum() * grid.h)
    for k in range(1, n_steps + 1):
        fields = langevin_step(fields, p, grid, dt, rng, noise=noise, real_noise=real_noise,
                               check=check)
        fields.t = init.t + k * dt
        totals[k] = (fields.phi_s.real.sum() * grid.h, fields.phi_i.real.sum() * grid.h)
    return LangevinSeries(init.t + dt * np.arange(n_steps + 1), totals, fields)
