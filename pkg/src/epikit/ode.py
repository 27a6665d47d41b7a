"""Fixed-step classic Runge-Kutta integration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NegativePopulation, NonFinite

Rhs = Callable[[float, np.ndarray], np.ndarray]


@dataclass
class TimeSeries:
    """Sampled trajectory: ``y[k]`` is the state at ``t[k]``."""

    t: np.ndarray
    y: np.ndarray
    names: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        return self.y[:, self.names.index(name)]

    def at(self, t: float) -> np.ndarray:
        """State at the sample closest to ``t``."""
        k = int(np.argmin(np.abs(self.t - t)))
        return self.y[k]


def rk4_step(rhs: Rhs, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _guard(y: np.ndarray, t: float, nonneg_slack, nonneg_mask) -> np.ndarray:
    if not np.all(np.isfinite(y)):
        raise NonFinite(f"non-finite state at t={t:g}")
    if nonneg_slack is not None:
        view = y if nonneg_mask is None else y[nonneg_mask]
        low = view.min()
        if low < 0.0:
            if low < -nonneg_slack:
                raise NegativePopulation(f"population {low:g} below -{nonneg_slack:g} at t={t:g}")
            if nonneg_mask is None:
                np.maximum(y, 0.0, out=y)
            else:
                y[nonneg_mask] = np.maximum(y[nonneg_mask], 0.0)
    return y


def integrate_rk4(
    rhs: Rhs,
    y0: Sequence[float] | np.ndarray,
    t_end: float,
    dt: float,
    *,
    t0: float = 0.0,
    names: tuple[str, ...] = (),
    nonneg_slack: float | None = None,
    nonneg_mask: np.ndarray | None = None,
) -> TimeSeries:
    """Integrate ``dy/dt = rhs(t, y)`` with classic RK4 at a fixed step.

    Samples are taken every step; the last one sits at the largest multiple of
    ``dt`` not exceeding ``t_end``. When ``nonneg_slack`` is given, components
    selected by ``nonneg_mask`` (all by default) that undershoot zero by less
    than the slack are clamped to zero, and deeper undershoot raises
    :class:`NegativePopulation`.
    """
    if dt <= 0 or t_end <= t0:
        raise ValueError("need dt > 0 and t_end > t0")
    n_steps = int(np.floor((t_end - t0) / dt + 1e-9))
    if n_steps == 0:
        raise ValueError(f"dt={dt:g} exceeds the horizon {t_end - t0:g}")
    y = np.array(y0, dtype=float)
    out = np.empty((n_steps + 1, y.size))
    out[0] = y
    t = t0
    for k in range(1, n_steps + 1):
        y = rk4_step(rhs, t, y, dt)
        t = t0 + k * dt
        out[k] = _guard(y, t, nonneg_slack, nonneg_mask)
    times = t0 + dt * np.arange(n_steps + 1)
    return TimeSeries(times, out, names)


def integrate_rk4_at(
    rhs: Rhs,
    y0: Sequence[float] | np.ndarray,
    times: Sequence[float] | np.ndarray,
    dt: float,
    *,
    t0: float = 0.0,
) -> np.ndarray:
    """RK4 solution sampled exactly at ``times`` (increasing, all >= ``t0``).

    Each gap is covered with the fewest equal steps no longer than ``dt``.
    Returns an array of shape ``(len(times), len(y0))``.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0) or (times.size and times[0] < t0):
        raise ValueError("times must be strictly increasing and start at or after t0")
    y = np.array(y0, dtype=float)
    out = np.empty((times.size, y.size))
    t = t0
    for i, target in enumerate(times):
        gap = target - t
        if gap > 0:
            n = max(1, int(np.ceil(gap / dt - 1e-9)))
            h = gap / n
            for _ in range(n):
                y = rk4_step(rhs, t, y, h)
                t += h
            if not np.all(np.isfinite(y)):
                raise NonFinite(f"non-finite state at t={target:g}")
        t = target
        out[i] = y
    return out
