"""Closed-form solution of the linearized SEIR equations.

The exposed/infectious pair obeys ``d/dt (E, I) = M (E, I)`` with
``M = [[-sigma, beta], [sigma, -gamma]]``. The solution is expanded on the
eigenvectors of ``M**2`` with ``cosh``/``sinh`` time dependence, and the
expansion coefficients are read off with a pair of dual vectors. ``F``, ``C``,
``R`` and ``D`` follow by integrating ``E`` and ``I`` in closed form.

Square roots are taken on the principal complex branch. The branch does not
matter: the ``sinh`` coefficient is the initial slope divided by the same
root, so ``C1 cosh(lt) + C2 sinh(lt)`` is identical for ``l`` and ``-l``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrum
from .models import SeirParams

_SERIES_CUTOFF = 1e-4
_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class LinearSeirEigen:
    lambda_plus: complex
    lambda_minus: complex
    Lambda_plus: float
    Lambda_minus: float
    a_term: float
    b_term: float
    r_term: float
    chi_plus: np.ndarray
    chi_minus: np.ndarray
    psi_plus: np.ndarray
    psi_minus: np.ndarray


def eigensystem(p: SeirParams, beta: float | None = None) -> LinearSeirEigen:
    b = p.beta0 if beta is None else beta
    s, g = p.sigma, p.gamma
    r = np.sqrt((g - s) ** 2 + 4.0 * b * s)
    if r < 1e-12 * (g + s):
        raise DegenerateSpectrum(f"r = {r:g} gives a repeated eigenvalue")
    a_term = 0.5 * (g * g + 2.0 * b * s + s * s)
    b_term = 0.5 * (g + s) * r
    lam_p, lam_m = a_term + b_term, a_term - b_term
    u_p = (g - s - r) / (2.0 * s)
    u_m = (g - s + r) / (2.0 * s)
    return LinearSeirEigen(
        lambda_plus=cmath.sqrt(lam_p),
        lambda_minus=cmath.sqrt(lam_m),
        Lambda_plus=lam_p,
        Lambda_minus=lam_m,
        a_term=a_term,
        b_term=b_term,
        r_term=r,
        chi_plus=np.array([u_p, 1.0]),
        chi_minus=np.array([u_m, 1.0]),
        psi_plus=np.array([1.0, -u_p]),
        psi_minus=np.array([1.0, -u_m]),
    )


def _cosh(lam: complex, t: np.ndarray) -> np.ndarray:
    return np.cosh(lam * t)


def _sinh_over(lam: complex, t: np.ndarray) -> np.ndarray:
    """sinh(lam t) / lam, finite as lam -> 0."""
    x = lam * t
    small = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    out = np.where(small, t * (1.0 + x * x / 6.0), np.sinh(safe) / np.where(small, 1.0, lam))
    return out


def _cosh_m1_over2(lam: complex, t: np.ndarray) -> np.ndarray:
    """(cosh(lam t) - 1) / lam**2, finite as lam -> 0."""
    x = lam * t
    small = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    big = (np.cosh(safe) - 1.0) / np.where(small, 1.0, lam * lam)
    return np.where(small, t * t * (0.5 + x * x / 24.0), big)


def _real(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z)
    scale = np.maximum(np.abs(z), 1.0)
    if np.any(np.abs(z.imag) > _IMAG_TOL * scale):
        raise ArithmeticError("closed form left an imaginary residue")
    return z.real


@dataclass(frozen=True)
class LinearSeirSolution:
    """Expansion ``chi+ [C1 cosh + C2 sinh](l+ t) + chi- [D1 cosh + D2 sinh](l- t)``.

    ``c2_rate`` and ``d2_rate`` are ``l+ C2`` and ``l- D2``, the dual
    projections of the initial slope; they stay finite when a root vanishes.
    """

    eigen: LinearSeirEigen
    c1: float
    d1: float
    c2_rate: float
    d2_rate: float
    params: SeirParams
    beta: float
    init: tuple[float, float, float]
    accum0: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def c2(self) -> complex:
        return self.c2_rate / self.eigen.lambda_plus

    @property
    def d2(self) -> complex:
        return self.d2_rate / self.eigen.lambda_minus


def solve_linear_seir(
    p: SeirParams,
    e0: float,
    i0: float,
    f0: float,
    *,
    c0: float = 0.0,
    r0: float = 0.0,
    d0: float = 0.0,
    beta: float | None = None,
) -> LinearSeirSolution:
    b = p.beta0 if beta is None else beta
    eig = eigensystem(p, b)
    w = p.sigma / eig.r_term
    x0 = np.array([e0, i0])
    xdot0 = np.array([-p.sigma * e0 + b * i0, p.sigma * e0 - p.gamma * i0])
    return LinearSeirSolution(
        eigen=eig,
        c1=float(-w * eig.psi_minus @ x0),
        d1=float(w * eig.psi_plus @ x0),
        c2_rate=float(-w * eig.psi_minus @ xdot0),
        d2_rate=float(w * eig.psi_plus @ xdot0),
        params=p,
        beta=b,
        init=(float(e0), float(i0), float(f0)),
        accum0=(float(c0), float(r0), float(d0)),
    )


def evaluate(sol: LinearSeirSolution, t) -> tuple[np.ndarray, np.ndarray]:
    """(E(t), I(t)) for scalar or array ``t``."""
    t = np.asarray(t, dtype=float)
    eig = sol.eigen
    mode_p = sol.c1 * _cosh(eig.lambda_plus, t) + sol.c2_rate * _sinh_over(eig.lambda_plus, t)
    mode_m = sol.d1 * _cosh(eig.lambda_minus, t) + sol.d2_rate * _sinh_over(eig.lambda_minus, t)
    e = eig.chi_plus[0] * mode_p + eig.chi_minus[0] * mode_m
    i = eig.chi_plus[1] * mode_p + eig.chi_minus[1] * mode_m
    return _real(e), _real(i)


def _integrals(sol: LinearSeirSolution, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    eig = sol.eigen
    int_p = sol.c1 * _sinh_over(eig.lambda_plus, t) + sol.c2_rate * _cosh_m1_over2(eig.lambda_plus, t)
    int_m = sol.d1 * _sinh_over(eig.lambda_minus, t) + sol.d2_rate * _cosh_m1_over2(eig.lambda_minus, t)
    int_e = eig.chi_plus[0] * int_p + eig.chi_minus[0] * int_m
    int_i = eig.chi_plus[1] * int_p + eig.chi_minus[1] * int_m
    return _real(int_e), _real(int_i)


def integrated_populations(sol: LinearSeirSolution, t):
    """(F, C, R, D) at ``t`` from the exact time integrals of E and I."""
    t = np.asarray(t, dtype=float)
    int_e, int_i = _integrals(sol, t)
    p = sol.params
    c0, r0, d0 = sol.accum0
    f_dev = sol.init[2] - sol.beta * int_i
    c = c0 + p.sigma * int_e
    r = r0 + (1.0 - p.f) * p.gamma * int_i
    d = d0 + p.f * p.gamma * int_i
    return f_dev, c, r, d


def full_state(sol: LinearSeirSolution, t) -> np.ndarray:
    """Rows of ``(F, E, I, R, D, C)`` matching the compartment layout."""
    e, i = evaluate(sol, t)
    f_dev, c, r, d = integrated_populations(sol, t)
    return np.stack(np.broadcast_arrays(f_dev, e, i, r, d, c), axis=-1)
