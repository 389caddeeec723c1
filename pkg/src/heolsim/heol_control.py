"""Outer-loop tracking controller: nominal feedforward plus model-free PD.

Per axis, the loop is closed around the double-integrator error dynamics

    e'' = F + dw

where ``e`` is the position tracking error, ``dw`` the feedback part of the
commanded acceleration and ``F`` lumps every unmodeled effect (disturbances,
model mismatch, inner-loop lag).  ``F`` is estimated online from a sliding
window of samples by :func:`estimate_F` and canceled by the feedback law
(:func:`ipd_delta`), so constant disturbances leave no steady-state error.

Two feedback variants are provided: the plain form uses the measured error
rate, while the integral substitution ``Y = e + Kd * int(e)`` removes the
rate term entirely (:func:`riachy_signal` / :func:`ipd_delta_riachy`).

The estimator kernel is ``K(s) = (T-s)^2 * s^2 / 2`` on a window of length
``T``:

    F_hat = (60/T^5) * int_0^T [ K''(s) * g(t-T+s) - K(s) * dw(t-T+s) ] ds

with ``K''(s) = (T-s)^2 - 4*(T-s)*s + s^2``.  Integrating by parts twice
(boundary terms vanish since K and K' are zero at both ends) shows this
equals the K-weighted average of ``g'' - dw``, i.e. exactly F whenever
``g'' - dw`` is constant over the window, with no knowledge of initial
conditions.  The sign of the ``dw`` term follows from that identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .flat_guidance import BrunovskyInputs
from .reference_trajectory import ReferencePoint

__all__ = [
    "WindowNotWarm",
    "IpdGains",
    "HeolConfig",
    "SampleWindow",
    "HeolAxisState",
    "WITH_DERIVATIVE",
    "RIACHY",
    "nominal_control",
    "estimate_F",
    "ipd_delta",
    "riachy_signal",
    "ipd_delta_riachy",
    "heol_step",
]

WITH_DERIVATIVE = "with_derivative"
RIACHY = "riachy"

_TIME_TOL = 1e-9


class WindowNotWarm(RuntimeError):
    """The sample window does not yet cover a full estimation horizon."""


@dataclass(frozen=True)
class IpdGains:
    """Shared feedback gains; s^2 + Kd*s + Kp must be Hurwitz."""

    Kp: float = 1.0
    Kd: float = 2.0

    def __post_init__(self):
        if self.Kp <= 0.0 or self.Kd <= 0.0:
            raise ValueError("feedback gains must be positive")


@dataclass(frozen=True)
class HeolConfig:
    """Tuning of the outer loop.

    ``T`` is the estimation horizon, ``dt`` the controller period.  The
    window must hold enough samples for the quadrature to make sense,
    hence ``T >= 10*dt``.
    """

    gains: IpdGains = IpdGains()
    T: float = 0.5
    variant: str = WITH_DERIVATIVE
    dt: float = 1e-3

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("controller period must be positive")
        if self.T < 10.0 * self.dt:
            raise ValueError("estimation horizon must span at least 10 periods")
        if self.variant not in (WITH_DERIVATIVE, RIACHY):
            raise ValueError(f"unknown feedback variant {self.variant!r}")

    def window_capacity(self) -> int:
        """Samples needed to span the horizon, oldest included."""
        ratio = self.T / self.dt
        n = round(ratio)
        if abs(ratio - n) > 1e-6:
            n = math.ceil(ratio)
        return n + 1


class SampleWindow:
    """Fixed-capacity ring of timestamped (signal, feedback) samples.

    Timestamps must be strictly increasing.  The newest sample's feedback
    value may be filled in after insertion (it gets zero kernel weight at
    the window edge, so the estimate at insertion time is unaffected).
    """

    __slots__ = (
        "_cap", "_ts", "_g", "_dw", "_head", "_size", "_g_sum",
        "_step", "_uniform", "_coef_T", "_c1", "_c1_sum", "_c2",
    )

    def __init__(self, capacity: int):
        if capacity < 2:
            raise ValueError("window capacity must be at least 2")
        self._cap = capacity
        self._ts = np.zeros(capacity)
        self._g = np.zeros(capacity)
        self._dw = np.zeros(capacity)
        self._head = 0          # next write slot; oldest sample once full
        self._size = 0
        self._g_sum = 0.0       # running sum for mean-centering
        self._step = 0.0
        self._uniform = True
        self._coef_T = None     # horizon the cached quadrature vectors match
        self._c1 = None
        self._c1_sum = 0.0
        self._c2 = None

    @property
    def capacity(self) -> int:
        return self._cap

    def __len__(self) -> int:
        return self._size

    @property
    def is_full(self) -> bool:
        return self._size == self._cap

    @property
    def oldest_time(self) -> float:
        if self._size == 0:
            raise IndexError("window is empty")
        idx = self._head if self.is_full else 0
        return float(self._ts[idx])

    @property
    def newest_time(self) -> float:
        if self._size == 0:
            raise IndexError("window is empty")
        return float(self._ts[self._head - 1])

    def span(self) -> float:
        return self.newest_time - self.oldest_time if self._size >= 2 else 0.0

    def append(self, t: float, g: float, dw: float = 0.0) -> None:
        size = self._size
        ts = self._ts
        h = self._head
        if size:
            newest = ts[h - 1]
            if t <= newest:
                raise ValueError("sample timestamps must be strictly increasing")
            step = t - newest
            if size == 1:
                self._step = step
            elif self._uniform and abs(step - self._step) > _TIME_TOL * max(
                abs(self._step), 1.0
            ):
                self._uniform = False
        if size == self._cap:
            self._g_sum -= self._g[h]
        else:
            self._size = size + 1
        ts[h] = t
        self._g[h] = g
        self._dw[h] = dw
        self._g_sum += g
        self._head = (h + 1) % self._cap

    def set_last_delta_w(self, dw: float) -> None:
        """Backfill the feedback value of the newest sample."""
        if self._size == 0:
            raise IndexError("window is empty")
        self._dw[self._head - 1] = dw

    def ordered(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Copies of (timestamps, signal, feedback), oldest to newest."""
        if not self.is_full:
            sl = slice(0, self._size)
            return self._ts[sl].copy(), self._g[sl].copy(), self._dw[sl].copy()
        h = self._head
        return (
            np.concatenate((self._ts[h:], self._ts[:h])),
            np.concatenate((self._g[h:], self._g[:h])),
            np.concatenate((self._dw[h:], self._dw[:h])),
        )


def _kernel_weights(sigma: np.ndarray, T: float) -> tuple[np.ndarray, np.ndarray]:
    """Signal and feedback kernels evaluated on window-relative times."""
    rev = T - sigma
    w1 = rev * rev - 4.0 * rev * sigma + sigma * sigma
    w2 = 0.5 * rev * rev * sigma * sigma
    return w1, w2


def _fast_coefficients(window: SampleWindow, T: float) -> None:
    """Cache kernel-times-trapezoid vectors for a full uniform window."""
    n = window._cap
    dt = window._step
    sigma = np.arange(n) * dt
    w1, w2 = _kernel_weights(sigma, T)
    tw = np.full(n, dt)
    tw[0] = tw[-1] = 0.5 * dt
    scale = 60.0 / T**5
    window._c1 = scale * w1 * tw
    window._c1_sum = float(window._c1.sum())
    window._c2 = scale * w2 * tw
    window._coef_T = T


def estimate_F(window: SampleWindow, T: float, now: float) -> float:
    """Sliding-window estimate of the lumped residual acceleration.

    Composite trapezoidal quadrature of the kernel integral over
    ``[now - T, now]``.  The signal is recentered by its window mean before
    the quadrature: the kernel annihilates constants exactly, so this
    leaves the estimate unchanged analytically while removing the O(dt^2)
    quadrature bias a large constant offset would otherwise contribute
    (the integral-substitution variant accumulates such offsets).

    Raises :class:`WindowNotWarm` until the stored samples cover the full
    horizon ending at ``now``.  Samples newer than ``now`` are ignored.
    """
    if T <= 0.0:
        raise ValueError("estimation horizon must be positive")
    tol = _TIME_TOL * max(T, 1.0)
    size = window._size
    if size < 2:
        raise WindowNotWarm("fewer than two samples stored")
    start = now - T

    # Fast path: full uniform grid aligned with [now - T, now], which is the
    # steady state of a fixed-rate controller.  Dot products against cached
    # kernel/trapezoid vectors, mean-centering folded in via the kernel sum.
    cap = window._cap
    if size == cap and window._uniform:
        ts = window._ts
        h = window._head
        newest = ts[h - 1]
        if abs(newest - now) <= tol and abs(newest - ts[h] - T) <= tol:
            if window._coef_T != T:
                _fast_coefficients(window, T)
            g = window._g
            dw = window._dw
            c1 = window._c1
            c2 = window._c2
            k = cap - h
            acc = (
                np.dot(c1[:k], g[h:]) + np.dot(c1[k:], g[:h])
                - np.dot(c2[:k], dw[h:]) - np.dot(c2[k:], dw[:h])
            )
            return float(acc) - (window._g_sum / cap) * window._c1_sum

    ts, g, dw = window.ordered()
    causal = ts <= now + tol
    ts, g, dw = ts[causal], g[causal], dw[causal]
    if ts.size < 2 or ts[-1] < now - tol or ts[0] > start + tol:
        raise WindowNotWarm(
            f"window does not cover [{start:.6g}, {now:.6g}]"
        )
    i0 = int(np.searchsorted(ts, start - tol))
    if ts[i0] > start + tol:
        # Oldest retained sample sits strictly inside the horizon; linearly
        # interpolate a boundary node at exactly now - T.
        frac = (start - ts[i0 - 1]) / (ts[i0] - ts[i0 - 1])
        g0 = g[i0 - 1] + frac * (g[i0] - g[i0 - 1])
        dw0 = dw[i0 - 1] + frac * (dw[i0] - dw[i0 - 1])
        sigma = np.concatenate(([0.0], ts[i0:] - start))
        g = np.concatenate(([g0], g[i0:]))
        dw = np.concatenate(([dw0], dw[i0:]))
    else:
        sigma = ts[i0:] - start
        sigma[0] = max(sigma[0], 0.0)
        g = g[i0:]
        dw = dw[i0:]
    w1, w2 = _kernel_weights(sigma, T)
    integrand = w1 * (g - g.mean()) - w2 * dw
    steps = np.diff(sigma)
    return 60.0 / T**5 * float(
        np.dot(0.5 * (integrand[1:] + integrand[:-1]), steps)
    )


@dataclass
class HeolAxisState:
    """Per-axis controller memory (single-owner, not thread-safe)."""

    window: SampleWindow
    integral_acc: float = 0.0
    prev_error: float | None = None
    last_F_hat: float = 0.0

    @classmethod
    def for_config(cls, cfg: HeolConfig) -> "HeolAxisState":
        return cls(window=SampleWindow(cfg.window_capacity()))


def nominal_control(ref: ReferencePoint) -> tuple[float, float]:
    """Feedforward accelerations: the reference accelerations themselves."""
    return ref.x_d[2], ref.y_d[2]


def ipd_delta(e: float, e_dot: float, F_hat: float, gains: IpdGains) -> float:
    """Feedback acceleration increment from error, error rate and estimate."""
    return -(gains.Kp * e + gains.Kd * e_dot + F_hat)


def riachy_signal(state: HeolAxisState, e: float, Kd: float, dt: float) -> float:
    """Integral substitution Y = e + Kd * int(e), removing the rate term.

    Updates the running trapezoidal integral held in ``state``.  Since
    Y'' = e'' + Kd*e', running the window estimator on Y yields the lumped
    residual augmented by Kd*e', which the rate-free feedback law cancels.
    """
    if dt <= 0.0:
        raise ValueError("integration step must be positive")
    if state.prev_error is not None:
        state.integral_acc += 0.5 * dt * (state.prev_error + e)
    state.prev_error = e
    return e + Kd * state.integral_acc


def ipd_delta_riachy(e: float, Fcal_hat: float, Kp: float) -> float:
    """Rate-free feedback increment using the augmented estimate."""
    return -(Fcal_hat + Kp * e)


def _axis_step(
    t: float,
    e: float,
    e_dot: float,
    w_star: float,
    cfg: HeolConfig,
    axis: HeolAxisState,
) -> float:
    gains = cfg.gains
    if cfg.variant == RIACHY:
        g = riachy_signal(axis, e, gains.Kd, cfg.dt)
    else:
        g = e
    axis.window.append(t, g, 0.0)
    try:
        f_hat = estimate_F(axis.window, cfg.T, t)
    except WindowNotWarm:
        f_hat = 0.0
    if cfg.variant == RIACHY:
        dw = ipd_delta_riachy(e, f_hat, gains.Kp)
    else:
        dw = ipd_delta(e, e_dot, f_hat, gains)
    axis.window.set_last_delta_w(dw)
    # Sign flip: the window estimates the residual of e'' = F + dw with
    # e = ref - plant, so an additive plant disturbance d appears as F = -d.
    # The reported value is the plant-side estimate that converges to d.
    axis.last_F_hat = -f_hat
    return w_star - dw


def heol_step(
    ref: ReferencePoint,
    meas: tuple[float, float, float, float],
    cfg: HeolConfig,
    axis_x: HeolAxisState,
    axis_y: HeolAxisState,
) -> BrunovskyInputs:
    """One controller tick for both axes.

    Args:
        ref: reference sample at the tick time (``ref.t`` timestamps the
            window samples).
        meas: measured ``(x, y, vx, vy)`` with inertial-frame velocities.
        cfg: shared tuning; one gain pair serves both axes.
        axis_x / axis_y: per-axis memory, mutated in place.  Each axis also
            records the plant-disturbance estimate in ``last_F_hat``.

    Returns the accelerations to command to the integrator chains,
    ``w = w* - dw``.  While either window is cold its estimate contribution
    is zero, leaving plain feedforward-plus-PD behavior.
    """
    x, y, vx, vy = meas
    wx_star, wy_star = nominal_control(ref)
    wx = _axis_step(ref.t, ref.x_d[0] - x, ref.x_d[1] - vx, wx_star, cfg, axis_x)
    wy = _axis_step(ref.t, ref.y_d[0] - y, ref.y_d[1] - vy, wy_star, cfg, axis_y)
    return BrunovskyInputs(wx=wx, wy=wy)
