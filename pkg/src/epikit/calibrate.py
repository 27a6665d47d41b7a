"""Least-squares calibration with forward sensitivities and gradient descent.

For ``y' = f(t, y, p)`` the sensitivities ``s = dy/dp`` obey
``s' = (df/dy) s + df/dp`` with ``s(0) = dy0/dp``. State and sensitivities are
integrated together as one RK4 system, so a single solve gives both the loss
``L = sum_i sum_j (y_j(t_i) - d_j(i))**2`` and its gradient
``dL/dp_k = 2 sum_i sum_j (y_j(t_i) - d_j(i)) s_jk(t_i)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NonFinite, Stalled
from .models import ControlSchedule, beta_at
from .ode import integrate_rk4_at

FIT_DT = 0.05
MAX_HALVINGS = 40
ROUNDOFF = 1e-9
FLAT_RATIO = 1e-4  # identifiable fits sit near 1e-2, constant data near 1e-6


@dataclass(frozen=True)
class OdeModel:
    """Right-hand side plus its Jacobians in state and parameters."""

    name: str
    state_names: tuple[str, ...]
    param_names: tuple[str, ...]
    f: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    dfdy: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    dfdp: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    y0: Callable[[np.ndarray], np.ndarray]
    dy0dp: Callable[[np.ndarray], np.ndarray] | None = None
    # optional fast path for the flattened (y, s) system; must agree with f, dfdy, dfdp
    augmented: Callable[[float, np.ndarray, np.ndarray], np.ndarray] | None = None

    @property
    def n_state(self) -> int:
        return len(self.state_names)

    @property
    def n_param(self) -> int:
        return len(self.param_names)

    def initial_sensitivity(self, p: np.ndarray) -> np.ndarray:
        if self.dy0dp is None:
            return np.zeros((self.n_state, self.n_param))
        return np.asarray(self.dy0dp(p), dtype=float)


def sir_fit_model(n: float, i0: float = 5.0, with_cases: bool = False) -> OdeModel:
    """SIR with ``y = (I, S)`` and ``p = (beta, gamma)``; ``I0`` and ``N`` fixed.

    ``with_cases`` appends cumulative cases ``C' = beta S I / N`` with
    ``C(0) = I0`` as a third state, for fitting case counts.
    """

    def f(t, y, p):
        inf = p[0] * y[0] * y[1] / n
        out = [inf - p[1] * y[0], -inf]
        return np.array(out + [inf] if with_cases else out)

    def dfdy(t, y, p):
        a, b = p[0] * y[1] / n, p[0] * y[0] / n
        if not with_cases:
            return np.array([[a - p[1], b], [-a, -b]])
        return np.array([[a - p[1], b, 0.0], [-a, -b, 0.0], [a, b, 0.0]])

    def dfdp(t, y, p):
        q = y[0] * y[1] / n
        rows = [[q, -y[0]], [-q, 0.0]]
        return np.array(rows + [[q, 0.0]] if with_cases else rows)

    def augmented(t, z, p):
        # dfdy @ s + dfdp unrolled on scalars; the row for C is the negated S row
        beta, gamma = float(p[0]), float(p[1])
        zl = z.tolist()
        i, s = zl[0], zl[1]
        k = 3 if with_cases else 2
        si = zl[k:k + 2]
        ss = zl[k + 2:k + 4]
        a, b, q = beta * s / n, beta * i / n, i * s / n
        inf = beta * q
        ds_b = a * si[0] + b * ss[0]
        ds_g = a * si[1] + b * ss[1]
        row_i = [ds_b - gamma * si[0] + q, ds_g - gamma * si[1] - i]
        row_s = [-ds_b - q, -ds_g]
        if with_cases:
            return np.array([inf - gamma * i, -inf, inf] + row_i + row_s + [ds_b + q, ds_g])
        return np.array([inf - gamma * i, -inf] + row_i + row_s)

    y_init = [i0, n - i0] + ([i0] if with_cases else [])
    names = ("I", "S", "C") if with_cases else ("I", "S")
    return OdeModel("sir", names, ("beta", "gamma"), f, dfdy, dfdp, lambda p: np.array(y_init),
                    augmented=augmented)


def seir_fit_model(n: float, i0: float = 1.0, e0: float = 0.0, t0: float = 0.0) -> OdeModel:
    """SEIR on ``(S, E, I, R, D, C)`` with ``p = (beta0, sigma, gamma, f, alpha)``.

    The transmission rate is ``beta0`` before ``t0`` and decays at ``alpha`` after.
    """

    def beta(t, p):
        return beta_at(ControlSchedule(p[0], t0, max(p[4], 0.0)), t)

    def f(t, y, p):
        b = beta(t, p)
        s, e, i = y[0], y[1], y[2]
        inf = b * s * i / n
        rem = p[2] * i
        return np.array([-inf, inf - p[1] * e, p[1] * e - rem, (1 - p[3]) * rem, p[3] * rem, p[1] * e])

    def dfdy(t, y, p):
        b = beta(t, p)
        s, i = y[0], y[2]
        j = np.zeros((6, 6))
        j[0, 0], j[0, 2] = -b * i / n, -b * s / n
        j[1, 0], j[1, 1], j[1, 2] = b * i / n, -p[1], b * s / n
        j[2, 1], j[2, 2] = p[1], -p[2]
        j[3, 2] = (1 - p[3]) * p[2]
        j[4, 2] = p[3] * p[2]
        j[5, 1] = p[1]
        return j

    def dfdp(t, y, p):
        b = beta(t, p)
        s, e, i = y[0], y[1], y[2]
        q = s * i / n
        db0 = b / p[0]
        dalpha = -(t - t0) * b if t >= t0 else 0.0
        m = np.zeros((6, 5))
        m[0, 0], m[1, 0] = -q * db0, q * db0
        m[0, 4], m[1, 4] = -q * dalpha, q * dalpha
        m[1, 1], m[2, 1], m[5, 1] = -e, e, e
        m[2, 2], m[3, 2], m[4, 2] = -i, (1 - p[3]) * i, p[3] * i
        m[3, 3], m[4, 3] = -p[2] * i, p[2] * i
        return m

    y_init = np.array([n - i0 - e0, e0, i0, 0.0, 0.0, i0 + e0])
    return OdeModel("seir", ("S", "E", "I", "R", "D", "C"),
                    ("beta0", "sigma", "gamma", "f", "alpha"), f, dfdy, dfdp,
                    lambda p: y_init.copy())


BUILTIN_MODELS = {"sir": sir_fit_model, "seir": seir_fit_model}


@dataclass
class SensitivityState:
    y: np.ndarray
    s: np.ndarray


def sensitivity_rhs(state: SensitivityState, p, model: OdeModel, t: float = 0.0) -> SensitivityState:
    p = np.asarray(p, dtype=float)
    return SensitivityState(model.f(t, state.y, p),
                            model.dfdy(t, state.y, p) @ state.s + model.dfdp(t, state.y, p))


def _augmented(model: OdeModel, p: np.ndarray):
    n = model.n_state
    if model.augmented is not None:
        return lambda t, z: model.augmented(t, z, p)

    def rhs(t, z):
        y = z[:n]
        s = z[n:].reshape(n, -1)
        ds = model.dfdy(t, y, p) @ s + model.dfdp(t, y, p)
        return np.concatenate([model.f(t, y, p), ds.ravel()])

    return rhs


def solve_with_sensitivities(model: OdeModel, p, times, dt: float = FIT_DT):
    """``(y, s)`` at ``times`` with shapes ``(N_d, N_m)`` and ``(N_d, N_m, N_p)``."""
    p = np.asarray(p, dtype=float)
    z0 = np.concatenate([model.y0(p), model.initial_sensitivity(p).ravel()])
    z = integrate_rk4_at(_augmented(model, p), z0, times, dt)
    n = model.n_state
    return z[:, :n], z[:, n:].reshape(len(z), n, model.n_param)


def solve(model: OdeModel, p, times, dt: float = FIT_DT) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return integrate_rk4_at(lambda t, y: model.f(t, y, p), model.y0(p), times, dt)


@dataclass
class FitProblem:
    """Observed columns ``data[:, j]`` match state component ``observed[j]``.

    In ``log_space`` both model and data are floored at 1 before the log.
    """

    model: OdeModel
    times: np.ndarray
    data: np.ndarray
    observed: tuple[int, ...]
    log_space: bool = False
    dt: float = FIT_DT

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.data = np.asarray(self.data, dtype=float).reshape(len(self.times), -1)
        if self.data.shape[1] != len(self.observed):
            raise ValueError("one data column per observed component")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.data.size < self.model.n_param:
            raise ValueError("fewer data points than parameters")


def _transform(x: np.ndarray, log_space: bool) -> np.ndarray:
    return np.log(np.maximum(x, 1.0)) if log_space else x


def residuals(problem: FitProblem, p) -> np.ndarray:
    y = solve(problem.model, p, problem.times, problem.dt)[:, problem.observed]
    if not np.all(np.isfinite(y)):
        raise NonFinite("model trajectory diverged")
    return _transform(y, problem.log_space) - _transform(problem.data, problem.log_space)


def loss(problem: FitProblem, p) -> float:
    r = residuals(problem, p)
    return float(np.sum(r * r))


def residuals_and_jacobian(problem: FitProblem, p) -> tuple[np.ndarray, np.ndarray]:
    """Flattened residuals ``(N_d N_m,)`` and their Jacobian ``(N_d N_m, N_p)``."""
    y, s = solve_with_sensitivities(problem.model, p, problem.times, problem.dt)
    obs = list(problem.observed)
    y, s = y[:, obs], s[:, obs, :]
    if problem.log_space:
        # d log(max(y, 1)) / dp is zero on the floor
        s = s * np.where(y > 1.0, 1.0 / np.maximum(y, 1.0), 0.0)[..., None]
    r = _transform(y, problem.log_space) - _transform(problem.data, problem.log_space)
    return r.ravel(), s.reshape(-1, s.shape[-1])


def loss_and_gradient(problem: FitProblem, p) -> tuple[float, np.ndarray]:
    r, jac = residuals_and_jacobian(problem, p)
    return float(r @ r), 2.0 * (r @ jac)


def gradient(problem: FitProblem, p) -> np.ndarray:
    return loss_and_gradient(problem, p)[1]


@dataclass
class FitResult:
    p: np.ndarray
    loss_curve: list[float]
    iterations: int
    converged: bool
    gradient: np.ndarray
    warnings: list[str] = field(default_factory=list)

    @property
    def loss(self) -> float:
        return self.loss_curve[-1]


def gradient_descent(value_and_grad, p0, h_step: float = 1e-3, max_iters: int = 500,
                     tol: float = 1e-12, loss_floor: float = 0.0, adaptive: bool = True) -> FitResult:
    """Minimize with steps ``dp = -h grad L``.

    ``h`` is halved until the step lowers the loss, so every accepted step
    strictly decreases it. If 40 halvings fail the run raises Stalled, unless
    every trial stayed within round-off of the current loss. With
    ``adaptive`` the trial ``h`` for the next iteration is the
    Barzilai-Borwein ratio ``|dp|^2 / (dp . d grad)``, which keeps
    ill-scaled problems from crawling. Stops when ``|dL| < tol L``, when
    ``L <= loss_floor`` or after ``max_iters``.
    """
    p = np.asarray(p0, dtype=float).copy()
    cur, g = value_and_grad(p)
    curve = [cur]
    h = h_step
    it = 0
    converged = cur <= loss_floor or not np.any(g)
    while not converged and it < max_iters:
        best = math.inf
        for _ in range(MAX_HALVINGS):
            trial = p - h * g
            try:
                # overflowing trials are rejected below, so their warnings are noise
                with np.errstate(over="ignore", invalid="ignore"):
                    new, g_new = value_and_grad(trial)
            except (NonFinite, FloatingPointError, OverflowError):
                new = math.inf
            if not math.isfinite(new):
                new = math.inf
            if new < cur:
                break
            best = min(best, new)
            h *= 0.5
        else:
            if best - cur <= ROUNDOFF * cur:
                # loss already sits on its round-off floor
                converged = True
                break
            raise Stalled(f"no decrease after {MAX_HALVINGS} halvings at iteration {it}")
        it += 1
        drop = cur - new
        step, dg = trial - p, g_new - g
        p, g, cur = trial, g_new, new
        curve.append(cur)
        if drop < tol * cur or cur <= loss_floor or not np.any(g):
            converged = True
            break
        if adaptive:
            curv = float(step @ dg)
            h = float(step @ step) / curv if curv > 0 else 2.0 * h
    return FitResult(p, curve, it, converged, g)


def fit_gradient_descent(problem: FitProblem, p0, h_step: float = 1e-3, max_iters: int = 500,
                         tol: float = 1e-12, **kw) -> FitResult:
    return gradient_descent(lambda q: loss_and_gradient(problem, q), p0, h_step, max_iters, tol, **kw)


def fit_gauss_newton(problem: FitProblem, p0, max_iters: int = 100, tol: float = 1e-12) -> FitResult:
    """Gauss-Newton steps from the same sensitivities, with halving backtracking.

    Opt-in alternative for strongly correlated parameters, where plain
    gradient descent needs many thousands of iterations.
    """
    p = np.asarray(p0, dtype=float).copy()
    r, jac = residuals_and_jacobian(problem, p)
    cur = float(r @ r)
    curve = [cur]
    it = 0
    converged = cur == 0.0
    while not converged and it < max_iters:
        delta = np.linalg.lstsq(jac, r, rcond=None)[0]
        h = 1.0
        best = math.inf
        for _ in range(MAX_HALVINGS):
            trial = p - h * delta
            try:
                r_new, jac_new = residuals_and_jacobian(problem, trial)
                new = float(r_new @ r_new)
            except (NonFinite, FloatingPointError, OverflowError):
                new = math.inf
            if new < cur:
                break
            best = min(best, new)
            h *= 0.5
        else:
            if best - cur <= ROUNDOFF * cur:
                converged = True
                break
            raise Stalled(f"no decrease after {MAX_HALVINGS} halvings at iteration {it}")
        it += 1
        drop = cur - new
        p, r, jac, cur = trial, r_new, jac_new, new
        curve.append(cur)
        if drop < tol * cur or cur == 0.0:
            converged = True
    return FitResult(p, curve, it, converged, 2.0 * (r @ jac))


FIT_METHODS = {"gd": fit_gradient_descent, "gauss-newton": fit_gauss_newton}


# Fermi-Dirac (logistic-in-log) growth curve


@dataclass(frozen=True)
class FermiDiracParams:
    a: float
    t0: float
    gamma_fd: float

    def __post_init__(self):
        if not self.gamma_fd > 0:
            raise ValueError("gamma_fd must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.t0, self.gamma_fd])

    @property
    def asymptote(self) -> float:
        return math.exp(self.a)


def _logistic(x):
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))), np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))


def fermi_dirac_eval(fd: FermiDiracParams, t):
    """Cases ``exp(a / (1 + exp(-gamma (t - t0))))``."""
    return np.exp(fd.a * _logistic(fd.gamma_fd * (np.asarray(t, dtype=float) - fd.t0)))


def fermi_dirac_jacobian(p, t) -> tuple[np.ndarray, np.ndarray]:
    """Values and ``d cases / d (a, t0, gamma)``, shapes ``(n,)`` and ``(n, 3)``."""
    a, t0, g = p
    t = np.asarray(t, dtype=float)
    sig = _logistic(g * (t - t0))
    val = np.exp(a * sig)
    dsig = a * sig * (1.0 - sig)
    jac = np.stack([sig, -g * dsig, (t - t0) * dsig], axis=-1) * val[:, None]
    return val, jac


def _fd_loss_grad(p, t, y, fit_log):
    val, jac = fermi_dirac_jacobian(p, t)
    if fit_log:
        m = np.log(np.maximum(val, 1.0))
        jac = jac * np.where(val > 1.0, 1.0 / val, 0.0)[:, None]
        r = m - np.log(np.maximum(y, 1.0))
    else:
        r = val - y
    return float(r @ r), 2.0 * r @ jac, jac


def fermi_dirac_guess(t, cases) -> np.ndarray:
    """Start values from the data: plateau, half-height time and slope."""
    t = np.asarray(t, dtype=float)
    logc = np.log(np.maximum(np.asarray(cases, dtype=float), 1.0))
    a = max(logc.max(), 1e-3)
    half = int(np.argmin(np.abs(logc - a / 2)))
    t0 = t[half]
    lo = int(np.argmin(np.abs(logc - 0.25 * a)))
    hi = int(np.argmin(np.abs(logc - 0.75 * a)))
    width = abs(t[hi] - t[lo])
    g = 2.0 * math.log(3.0) / width if width > 0 else 4.0 / max(float(np.ptp(t)), 1.0)
    return np.array([a, t0, g])


def fit_fermi_dirac(t, cases, fit_log: bool = False, p0=None, h_step: float = 1e-6,
                    max_iters: int = 5000, tol: float = 1e-14) -> tuple[FermiDiracParams, FitResult]:
    """Least-squares Fermi-Dirac fit to cumulative cases, in linear or log space."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(cases, dtype=float)
    if t.size < 10:
        raise ValueError("need at least 10 points")
    if np.any(y <= 0):
        raise ValueError("cases must be positive")
    start = fermi_dirac_guess(t, y) if p0 is None else np.asarray(p0, dtype=float)

    def value_and_grad(p):
        if not p[2] > 0:
            return math.inf, np.zeros(3)
        v, g, _ = _fd_loss_grad(p, t, y, fit_log)
        return v, g

    res = gradient_descent(value_and_grad, start, h_step, max_iters, tol)
    _, _, jac = _fd_loss_grad(res.p, t, y, fit_log)
    # columns scaled by |p| so the test is unit-free
    sv = np.linalg.svd(jac * np.abs(res.p), compute_uv=False)
    if sv[-1] <= FLAT_RATIO * sv[0]:
        msg = "flat direction: parameters are not jointly identifiable from this data"
        res.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return FermiDiracParams(*res.p), res


def central_difference_gradient(fn: Callable[[np.ndarray], float], p, rel_step: float = 1e-6) -> np.ndarray:
    """Central finite differences with steps ``rel_step * |p_k|``."""
    p = np.asarray(p, dtype=float)
    out = np.empty_like(p)
    for k in range(p.size):
        h = rel_step * max(abs(p[k]), 1e-8)
        up, dn = p.copy(), p.copy()
        up[k] += h
        dn[k] -= h
        out[k] = (fn(up) - fn(dn)) / (2.0 * h)
    return out


def make_synthetic(model: OdeModel, p_true: Sequence[float], times, observed: Sequence[int],
                   dt: float = FIT_DT) -> np.ndarray:
    return solve(model, p_true, times, dt)[:, list(observed)]
