"""Homogeneous steady states and linear stability of the spatial SIR model.

Perturbations ``dPhi exp(i(kx - wt))`` about a steady state give
``det G^{-1}(k, w) = -w**2 - i B_k w + C_k``. Its roots are
``w = -i B_k/2 +/- i sqrt(B_k**2/4 - C_k)``, so a mode grows when
``Im w > 0`` and oscillates when ``Re w != 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleState
from .spatial import SpatialParams

LINE_TOL = 1e-9


@dataclass(frozen=True)
class SteadyState:
    branch: str  # "red" (infection-free) or "blue" (endemic)
    phi_i: float
    phi_s: float
    feasible: bool


def steady_states(p: SpatialParams) -> tuple[SteadyState, SteadyState]:
    if not (p.lam > 0 and p.mu > 0 and p.nu > 0):
        raise ValueError("steady states need lam, mu, nu > 0")
    red = SteadyState("red", 0.0, p.f_source / p.nu, True)
    blue_i = p.f_source / p.mu - p.nu / p.lam
    blue = SteadyState("blue", blue_i, p.mu / p.lam, blue_i >= 0)
    return red, blue


def steady_residual(p: SpatialParams, state: SteadyState) -> tuple[float, float]:
    """Homogeneous right-hand sides at ``state``; both vanish at a steady state."""
    coupling = p.lam * state.phi_s * state.phi_i
    return (coupling - p.mu * state.phi_i,
            p.f_source - p.nu * state.phi_s - coupling)


@dataclass(frozen=True)
class DispersionPoint:
    k: float
    b_k: float
    c_k: float
    omega_plus: complex
    omega_minus: complex

    @property
    def growth_rate(self) -> float:
        """Largest ``Im w``; positive means the mode grows."""
        return max(self.omega_plus.imag, self.omega_minus.imag)


def _coeffs(p: SpatialParams, state: SteadyState):
    lin = p.d_i * (p.nu + p.lam * state.phi_i) + p.d_s * (p.mu - p.lam * state.phi_s)
    const = p.lam * (p.mu * state.phi_i - p.nu * state.phi_s) + p.mu * p.nu
    return lin, const


def b_coeff(p: SpatialParams, state: SteadyState, k):
    return (p.d_i + p.d_s) * np.square(k) + p.lam * (state.phi_i - state.phi_s) + p.mu + p.nu


def c_coeff(p: SpatialParams, state: SteadyState, k):
    lin, const = _coeffs(p, state)
    k2 = np.square(k)
    return p.d_i * p.d_s * k2 * k2 + lin * k2 + const


def dispersion(p: SpatialParams, state: SteadyState, k: float) -> DispersionPoint:
    b = float(b_coeff(p, state, k))
    c = float(c_coeff(p, state, k))
    root = 1j * cmath.sqrt(b * b / 4.0 - c)
    return DispersionPoint(float(k), b, c, -0.5j * b + root, -0.5j * b - root)


def det_ginv(p: SpatialParams, state: SteadyState, k: float, omega: complex) -> complex:
    """Determinant of the linearized operator, built entry by entry."""
    k2 = k * k
    a11 = -1j * omega + p.d_i * k2 + p.mu - p.lam * state.phi_s
    a12 = -p.lam * state.phi_i
    a21 = p.lam * state.phi_s
    a22 = -1j * omega + p.d_s * k2 + p.nu + p.lam * state.phi_i
    return a11 * a22 - a12 * a21


def dispersion_table(p: SpatialParams, state: SteadyState, ks) -> np.ndarray:
    """Rows of ``(k, B_k, C_k, Re w+, Im w+, Re w-, Im w-)``."""
    rows = []
    for k in np.asarray(ks, dtype=float):
        d = dispersion(p, state, k)
        rows.append((k, d.b_k, d.c_k, d.omega_plus.real, d.omega_plus.imag,
                     d.omega_minus.real, d.omega_minus.imag))
    return np.array(rows)


@dataclass(frozen=True)
class HopfResult:
    oscillatory: bool
    omega0: tuple[complex, complex]
    b0: float
    c0: float


def hopf_check(p: SpatialParams, state: SteadyState) -> HopfResult:
    """Flag the ``B_0 = 0, C_0 < 0`` condition and report the k = 0 roots."""
    d = dispersion(p, state, 0.0)
    scale = max(1.0, p.mu + p.nu + p.lam * (abs(state.phi_i) + abs(state.phi_s)))
    flag = abs(d.b_k) <= LINE_TOL * scale and d.c_k < 0
    return HopfResult(flag, (d.omega_plus, d.omega_minus), d.b_k, d.c_k)


@dataclass(frozen=True)
class TuringResult:
    on_line: bool
    k_c: float
    line_residual: float
    c_at_kc: float
    vertex_k2: float
    c_min: float


def turing_residual(p: SpatialParams, state: SteadyState) -> float:
    """Signed relative distance of ``D_I/D_S`` from the branch's Turing line."""
    if p.d_s <= 0 or p.d_i <= 0:
        raise ValueError("Turing analysis needs positive diffusion constants")
    ratio = p.d_i / p.d_s
    if state.branch == "red":
        target = (p.mu - p.lam * state.phi_s) / p.nu
    else:
        f = p.f_source
        target = 4.0 * p.mu ** 2 * (p.lam * f - p.mu * p.nu) / (p.lam ** 2 * f ** 2)
    return (target - ratio) / ratio


def turing_analysis(p: SpatialParams, state: SteadyState) -> TuringResult:
    """Turing-line membership and critical wavenumber.

    ``k_c = sqrt(C_0 / (4 D_I D_S))`` (NaN when ``C_0 < 0``), which reduces to
    ``nu / (2 D_S)`` on the red line. ``vertex_k2`` and ``c_min`` locate the
    true minimum of ``C`` as a parabola in ``k**2``; when ``vertex_k2 < 0`` the
    minimum over real ``k`` sits at ``k = 0``.
    """
    if state.branch == "blue" and not state.feasible:
        raise InfeasibleState(f"blue state has phi_i = {state.phi_i:g} < 0")
    residual = turing_residual(p, state)
    lin, const = _coeffs(p, state)
    prod = p.d_i * p.d_s
    k_c = math.sqrt(const / (4.0 * prod)) if const >= 0 else math.nan
    vertex = -lin / (2.0 * prod)
    return TuringResult(
        on_line=abs(residual) <= LINE_TOL,
        k_c=k_c,
        line_residual=residual,
        c_at_kc=float(c_coeff(p, state, k_c)) if not math.isnan(k_c) else math.nan,
        vertex_k2=vertex,
        c_min=const - lin * lin / (4.0 * prod),
    )


def turing_curves(lam: float, diffusion_ratio: float, n: int = 200) -> dict[str, np.ndarray]:
    """Red and blue Turing lines in the (nu, mu) plane with ``f = nu``.

    Red: ``mu = lam + nu * D_I/D_S``. Blue: ``nu = 4 mu**2 (lam - mu) / (lam**2 D_I/D_S)``
    for ``0 < mu < lam``.
    """
    mu_blue = np.linspace(lam / n, lam * (1.0 - 1.0 / n), n)
    nu_blue = 4.0 * mu_blue ** 2 * (lam - mu_blue) / (lam ** 2 * diffusion_ratio)
    nu_red = np.linspace(nu_blue.max() / n, nu_blue.max(), n)
    return {
        "red_nu": nu_red,
        "red_mu": lam + nu_red * diffusion_ratio,
        "blue_nu": nu_blue,
        "blue_mu": mu_blue,
    }
