"""Compartment models: SEIR, linearized SEIR, SIR and quarantine SIR.

Every model shares one state layout, ``(S, E, I, R, D, C)``:

* ``S`` susceptible (for the linearized model this slot holds ``F = S - N``)
* ``E`` exposed, always zero for the SIR variants
* ``I`` infectious
* ``R`` recovered (all removed for the quarantine model)
* ``D`` dead; for the quarantine model this slot holds the quarantined ``T``
* ``C`` cumulative infections
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .ode import TimeSeries, integrate_rk4

STATE_NAMES = ("S", "E", "I", "R", "D", "C")
S, E, I, R, D, C = range(6)

LN2 = math.log(2.0)
NEG_SLACK = 1e-9
DEFAULT_DT = 0.05

MODELS = ("seir", "seir_linear", "sir", "sir_quarantine")


@dataclass(frozen=True)
class CompartmentState:
    s: float
    e: float = 0.0
    i: float = 0.0
    r: float = 0.0
    d: float = 0.0
    c: float = 0.0
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.e, self.i, self.r, self.d, self.c], dtype=float)

    def __array__(self, dtype=None, copy=None):
        return self.as_array() if dtype is None else self.as_array().astype(dtype)

    @classmethod
    def from_array(cls, y: Sequence[float], t: float = 0.0) -> "CompartmentState":
        return cls(*(float(v) for v in y[:6]), t=float(t))

    @property
    def total(self) -> float:
        """S + E + I + R + D, the conserved head count of the full SEIR model."""
        return self.s + self.e + self.i + self.r + self.d


@dataclass(frozen=True)
class SeirParams:
    beta0: float
    sigma: float
    gamma: float
    f: float
    n: float

    def __post_init__(self):
        if not (self.beta0 > 0 and self.sigma > 0 and self.gamma > 0):
            raise ValueError("beta0, sigma and gamma must be positive")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError("fatality fraction f must lie in [0, 1]")
        if not self.n > 0:
            raise ValueError("population n must be positive")


@dataclass(frozen=True)
class ControlSchedule:
    """Transmission rate held at ``beta0`` until ``t0``, then decaying at ``alpha``.

    If ``removal_time`` is set the controls are lifted there and the rate jumps
    back to ``beta0``.
    """

    beta0: float
    t0: float = 0.0
    alpha: float = 0.0
    removal_time: float | None = None

    def __post_init__(self):
        if self.alpha < 0 or self.t0 < 0:
            raise ValueError("alpha and t0 must be non-negative")
        if self.removal_time is not None and not self.removal_time > self.t0:
            raise ValueError("removal_time must come after t0")


def beta_at(schedule: ControlSchedule, t: float) -> float:
    if t < schedule.t0:
        return schedule.beta0
    if schedule.removal_time is not None and t >= schedule.removal_time:
        return schedule.beta0
    return schedule.beta0 * math.exp(-schedule.alpha * (t - schedule.t0))


# quarantine fraction q(t) shapes; plain dataclasses so they pickle


@dataclass(frozen=True)
class ConstantQuarantine:
    q: float

    def __call__(self, t: float) -> float:
        return self.q


@dataclass(frozen=True)
class LogisticQuarantine:
    q_max: float
    t_mid: float
    rate: float

    def __call__(self, t: float) -> float:
        return self.q_max / (1.0 + math.exp(-self.rate * (t - self.t_mid)))


@dataclass(frozen=True)
class PiecewiseLinearQuarantine:
    """Linear interpolation through ``(times, values)``, held flat outside."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.values) or not self.times:
            raise ValueError("times and values must be non-empty and equally long")
        if min(self.values) < 0:
            raise ValueError("quarantine fraction must be non-negative")

    def __call__(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))


@dataclass(frozen=True)
class QuarantineParams:
    beta: float
    gamma: float
    q_fn: Callable[[float], float]
    n: float


@dataclass(frozen=True)
class DerivedStats:
    r0: float
    i0_incub: float
    half_life_transmission: float
    half_life_incubation: float
    half_life_infectious: float
    control_response_time: float

    def as_dict(self) -> dict[str, float]:
        return {
            "r0": self.r0,
            "i0_incub": self.i0_incub,
            "half_life_transmission": self.half_life_transmission,
            "half_life_incubation": self.half_life_incubation,
            "half_life_infectious": self.half_life_infectious,
            "control_response_time": self.control_response_time,
        }


def seir_rhs(state, p: SeirParams, beta: float) -> np.ndarray:
    s, e, i, _, _, _ = np.asarray(state, dtype=float)[:6]
    infect = beta * s * i / p.n
    removed = p.gamma * i
    return np.array([
        -infect,
        infect - p.sigma * e,
        p.sigma * e - removed,
        (1.0 - p.f) * removed,
        p.f * removed,
        p.sigma * e,
    ])


def linearized_seir_rhs(state, p: SeirParams, beta: float) -> np.ndarray:
    """Early-epidemic SEIR with ``S ~ N``; the first slot holds ``F = S - N``."""
    _, e, i, _, _, _ = np.asarray(state, dtype=float)[:6]
    removed = p.gamma * i
    return np.array([
        -beta * i,
        beta * i - p.sigma * e,
        p.sigma * e - removed,
        (1.0 - p.f) * removed,
        p.f * removed,
        p.sigma * e,
    ])


def sir_rhs(state, p: SeirParams, beta: float | None = None) -> np.ndarray:
    """Strict SIR; ``C`` accumulates infections so ``C = N - S`` when started consistently."""
    s, _, i, _, _, _ = np.asarray(state, dtype=float)[:6]
    b = p.beta0 if beta is None else beta
    infect = b * s * i / p.n
    removed = p.gamma * i
    return np.array([
        -infect,
        0.0,
        infect - removed,
        (1.0 - p.f) * removed,
        p.f * removed,
        infect,
    ])


def quarantine_sir_rhs(state, qp: QuarantineParams, t: float = 0.0) -> np.ndarray:
    """SIR with an extra quarantine outflow ``gamma q(t) I`` into the D slot."""
    s, _, i, _, _, _ = np.asarray(state, dtype=float)[:6]
    q = qp.q_fn(t)
    if q < 0:
        raise ValueError(f"quarantine fraction q({t:g}) = {q:g} is negative")
    infect = qp.beta * s * i / qp.n
    return np.array([
        -infect,
        0.0,
        infect - qp.gamma * (1.0 + q) * i,
        qp.gamma * i,
        qp.gamma * q * i,
        infect,
    ])


def make_rhs(model: str, p, schedule: ControlSchedule | None = None):
    """Bind a model right-hand side to ``rhs(t, y)`` form.

    ``p`` is :class:`SeirParams` for every model except ``sir_quarantine``,
    which takes :class:`QuarantineParams`.
    """
    if model == "sir_quarantine":
        return lambda t, y: quarantine_sir_rhs(y, p, t)
    sched = schedule if schedule is not None else ControlSchedule(p.beta0)
    fn = {"seir": seir_rhs, "seir_linear": linearized_seir_rhs, "sir": sir_rhs}.get(model)
    if fn is None:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    return lambda t, y: fn(y, p, beta_at(sched, t))


def simulate(
    model: str,
    p,
    init: CompartmentState | Sequence[float],
    t_end: float,
    dt: float = DEFAULT_DT,
    schedule: ControlSchedule | None = None,
) -> TimeSeries:
    """Integrate one of :data:`MODELS` from ``init`` to ``t_end``.

    Population models clamp undershoot smaller than ``1e-9 * N``; the
    linearized model has a signed first slot and is left unclamped.
    """
    rhs = make_rhs(model, p, schedule)
    y0 = np.asarray(init, dtype=float)
    if model == "seir_linear":
        return integrate_rk4(rhs, y0, t_end, dt, names=STATE_NAMES)
    return integrate_rk4(rhs, y0, t_end, dt, names=STATE_NAMES, nonneg_slack=NEG_SLACK * p.n)


def rates_along(model: str, p, traj: TimeSeries, schedule: ControlSchedule | None = None) -> np.ndarray:
    """Instantaneous right-hand side at every sample, shape ``(len(traj), 6)``."""
    rhs = make_rhs(model, p, schedule)
    return np.array([rhs(t, y) for t, y in zip(traj.t, traj.y)])


def derived_stats(p: SeirParams, schedule: ControlSchedule | None = None) -> DerivedStats:
    alpha = schedule.alpha if schedule is not None else 0.0
    return DerivedStats(
        r0=p.beta0 / p.gamma,
        i0_incub=p.sigma / p.gamma,
        half_life_transmission=LN2 / p.beta0,
        half_life_incubation=LN2 / p.sigma,
        half_life_infectious=LN2 / p.gamma,
        control_response_time=LN2 / alpha if alpha > 0 else math.inf,
    )


@dataclass
class ReffSeries:
    t: np.ndarray
    r_eff: np.ndarray
    crossing_time: float | None


def r_eff_series(traj: TimeSeries, p: SeirParams, schedule: ControlSchedule | None = None) -> ReffSeries:
    """``beta(t) S / (gamma N(t))`` with ``N(t) = S + E + I + R`` the living population.

    ``crossing_time`` is the first downward crossing of 1, linearly
    interpolated between samples, or ``None``.
    """
    sched = schedule if schedule is not None else ControlSchedule(p.beta0)
    y = traj.y
    living = y[:, S] + y[:, E] + y[:, I] + y[:, R]
    betas = np.array([beta_at(sched, t) for t in traj.t])
    reff = betas * y[:, S] / (p.gamma * living)
    crossing = None
    below = np.nonzero((reff[:-1] >= 1.0) & (reff[1:] < 1.0))[0]
    if below.size:
        k = below[0]
        frac = (reff[k] - 1.0) / (reff[k] - reff[k + 1])
        crossing = float(traj.t[k] + frac * (traj.t[k + 1] - traj.t[k]))
    return ReffSeries(traj.t.copy(), reff, crossing)


def sir_final_size(r0: float, tol: float = 1e-14) -> float:
    """Root ``z`` in (0, 1] of ``z = 1 - exp(-r0 z)`` by bisection (0 when r0 <= 1)."""
    if r0 <= 1.0:
        return 0.0
    lo, hi = 1e-12, 1.0
    g = lambda z: z - 1.0 + math.exp(-r0 * z)  # noqa: E731
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
