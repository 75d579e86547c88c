"""Compiled fixed-step integrators for the nondimensional surge equation.

All kernels integrate the first-order system

    y' = v
    v' = r_bar - sin(y) - sum_k abar[k-1] * v^k      (k = 1..5)

with classical RK4 at a fixed step.  They are numba-compiled because the
asymptotic classifiers may need up to 1e7 steps per trajectory and the
shooting solvers call the propagator inside finite-difference Jacobians.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# classification / crossing status codes shared with surge.py
UNDECIDED = 0
CAPTURED = 1
ROTATING = 2
DIVERGED = 3
CROSSED = 4
NO_CROSSING = 5

TWO_PI = 2.0 * math.pi


@njit(cache=True)
def _accel(y: float, v: float, r_bar: float, abar: np.ndarray) -> float:
    damping = 0.0
    p = 1.0
    for k in range(abar.shape[0]):
        p *= v
        damping += abar[k] * p
    return r_bar - math.sin(y) - damping


@njit(cache=True)
def _rk4_step(y: float, v: float, h: float, r_bar: float, abar: np.ndarray):
    k1y = v
    k1v = _accel(y, v, r_bar, abar)
    k2y = v + 0.5 * h * k1v
    k2v = _accel(y + 0.5 * h * k1y, v + 0.5 * h * k1v, r_bar, abar)
    k3y = v + 0.5 * h * k2v
    k3v = _accel(y + 0.5 * h * k2y, v + 0.5 * h * k2v, r_bar, abar)
    k4y = v + h * k3v
    k4v = _accel(y + h * k3y, v + h * k3v, r_bar, abar)
    yn = y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    vn = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return yn, vn


@njit(cache=True)
def final_state(y0: float, v0: float, tau: float, dtau: float,
                r_bar: float, abar: np.ndarray):
    """State after integrating a (signed) duration tau.

    Whole steps of magnitude dtau are taken, then one fractional step, so
    the result depends smoothly on tau (needed by shooting Jacobians).
    """

    y = y0
    v = v0
    if tau == 0.0:
        return y, v
    sign = 1.0 if tau > 0.0 else -1.0
    h = sign * dtau
    n_full = int(abs(tau) / dtau)
    for _ in range(n_full):
        y, v = _rk4_step(y, v, h, r_bar, abar)
    rem = tau - sign * n_full * dtau
    if rem != 0.0:
        y, v = _rk4_step(y, v, rem, r_bar, abar)
    return y, v


@njit(cache=True)
def trajectory(y0: float, v0: float, n_steps: int, stride: int, dtau: float,
               r_bar: float, abar: np.ndarray, v_div: float):
    """Sampled trajectory: arrays (tau, y, v) every `stride` steps.

    Returns (taus, ys, vs, status); status is DIVERGED when |v| exceeded
    v_div (arrays truncated at the last recorded sample), else UNDECIDED.
    """

    n_out = n_steps // stride + 1
    taus = np.empty(n_out)
    ys = np.empty(n_out)
    vs = np.empty(n_out)
    taus[0] = 0.0
    ys[0] = y0
    vs[0] = v0
    y = y0
    v = v0
    idx = 1
    status = UNDECIDED
    for i in range(1, n_steps + 1):
        y, v = _rk4_step(y, v, dtau, r_bar, abar)
        if abs(v) > v_div:
            status = DIVERGED
            break
        if i % stride == 0 and idx < n_out:
            taus[idx] = i * dtau
            ys[idx] = y
            vs[idx] = v
            idx += 1
    return taus[:idx], ys[:idx], vs[:idx], status


@njit(cache=True)
def classify(y0: float, v0: float, dtau: float, tau_max: float,
             r_bar: float, abar: np.ndarray, y_stable: float,
             capture_tol: float, period_rtol: float, v_div: float):
    """Asymptotic fate of one trajectory.

    Returns (code, tau) with code CAPTURED when the state enters the
    capture_tol phase-distance ball around the stable equilibrium (mod
    2*pi), ROTATING when three successive 2*pi-level crossings in one
    direction (three wave passages) have period-converged intervals,
    DIVERGED when |v| exceeds v_div, and UNDECIDED at tau_max.
    y_stable = nan disables the capture test (no equilibria).
    """

    y = y0
    v = v0
    tau = 0.0
    check_capture = not math.isnan(y_stable)

    down_level = y0 - TWO_PI
    up_level = y0 + TWO_PI
    down_times = np.empty(3)
    up_times = np.empty(3)
    n_down = 0
    n_up = 0

    n_steps = int(tau_max / dtau)
    for _ in range(n_steps):
        y_prev = y
        y, v = _rk4_step(y, v, dtau, r_bar, abar)
        tau += dtau

        if abs(v) > v_div:
            return DIVERGED, tau

        if check_capture:
            dy = (y - y_stable + math.pi) % TWO_PI - math.pi
            if dy * dy + v * v < capture_tol * capture_tol:
                return CAPTURED, tau

        while y < down_level:
            t_cross = tau - dtau * (y - down_level) / (y - y_prev)
            if n_down < 3:
                down_times[n_down] = t_cross
            else:
                down_times[0] = down_times[1]
                down_times[1] = down_times[2]
                down_times[2] = t_cross
            n_down += 1
            down_level -= TWO_PI
            if n_down >= 3:
                d1 = down_times[1] - down_times[0]
                d2 = down_times[2] - down_times[1]
                if abs(d2 - d1) <= period_rtol * d2:
                    return ROTATING, tau
        while y > up_level:
            t_cross = tau - dtau * (y - up_level) / (y - y_prev)
            if n_up < 3:
                up_times[n_up] = t_cross
            else:
                up_times[0] = up_times[1]
                up_times[1] = up_times[2]
                up_times[2] = t_cross
            n_up += 1
            up_level += TWO_PI
            if n_up >= 3:
                d1 = up_times[1] - up_times[0]
                d2 = up_times[2] - up_times[1]
                if abs(d2 - d1) <= period_rtol * d2:
                    return ROTATING, tau

    return UNDECIDED, tau


@njit(cache=True)
def section_crossing(y0: float, v0: float, y_level: float, direction: int,
                     dtau: float, tau_max: float,
                     r_bar: float, abar: np.ndarray, v_div: float):
    """First crossing of y = y_level, integrating with signed step dtau.

    direction: -1 counts only downward crossings (y decreasing through the
    level), +1 only upward, 0 either.  Returns (status, elapsed, v_cross)
    where elapsed is the unsigned duration to the (linearly interpolated)
    crossing.
    """

    y = y0
    v = v0
    h = dtau
    n_steps = int(tau_max / abs(dtau))
    for i in range(n_steps):
        y_prev = y
        v_prev = v
        y, v = _rk4_step(y, v, h, r_bar, abar)
        if abs(v) > v_div:
            return DIVERGED, (i + 1) * abs(h), v
        crossed_down = y_prev > y_level >= y
        crossed_up = y_prev < y_level <= y
        if (direction <= 0 and crossed_down) or (direction >= 0 and crossed_up):
            frac = (y_level - y_prev) / (y - y_prev)
            elapsed = (i + frac) * abs(h)
            v_cross = v_prev + frac * (v - v_prev)
            return CROSSED, elapsed, v_cross
    return NO_CROSSING, n_steps * abs(h), v
