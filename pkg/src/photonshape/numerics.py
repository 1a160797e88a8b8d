"""Low-level integration helpers shared by the forward and inverse solvers."""
from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "centered_diff",
    "cubic_midpoints",
    "exp_kernel_convolve",
    "cumulative_trapezoid",
    "cumulative_simpson",
]


def centered_diff(y: np.ndarray, dt: float) -> np.ndarray:
    """Second-order derivative of uniformly sampled data (one-sided at ends)."""
    d = np.empty_like(np.asarray(y))
    d[1:-1] = (y[2:] - y[:-2]) / (2.0 * dt)
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dt)
    d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * dt)
    return d


def _pad_cubic(u: np.ndarray) -> np.ndarray:
    """Pad with one ghost sample per side by cubic extrapolation."""
    if len(u) < 4:
        raise ValueError("need at least 4 samples")
    up = np.empty(len(u) + 2, dtype=u.dtype)
    up[1:-1] = u
    up[0] = 4.0 * u[0] - 6.0 * u[1] + 4.0 * u[2] - u[3]
    up[-1] = 4.0 * u[-1] - 6.0 * u[-2] + 4.0 * u[-3] - u[-4]
    return up


def cubic_midpoints(u: np.ndarray) -> np.ndarray:
    """Fourth-order midpoint values u(t_n + dt/2) from a 4-point stencil.

    Returns one value per interval. Edge intervals use cubic extrapolation of
    the ghost sample so the order is uniform up to the boundaries.
    """
    up = _pad_cubic(u)
    return (-up[:-3] + 9.0 * up[1:-2] + 9.0 * up[2:-1] - up[3:]) / 16.0


def exp_kernel_convolve(u: np.ndarray, dt: float, lam: complex) -> np.ndarray:
    """v(t_n) = int_0^{t_n} u(t') exp(-lam (t_n - t')) dt' by product integration.

    The integrand's smooth factor is represented by a cubic through four
    neighbouring samples on every interval and integrated exactly against the
    exponential, so the scheme stays stable for strongly decaying kernels and
    converges at fourth order.
    """
    u = np.asarray(u, dtype=complex)
    if len(u) < 4:
        raise ValueError("need at least 4 samples")
    decay = np.exp(-lam * dt)
    # moments M_m = int_0^dt s^m exp(-lam (dt - s)) ds
    if abs(lam) * dt < 1e-8:
        m0, m1, m2, m3 = dt, dt**2 / 2.0, dt**3 / 3.0, dt**4 / 4.0
    else:
        m0 = (1.0 - decay) / lam
        m1 = (dt - m0) / lam
        m2 = (dt**2 - 2.0 * m1) / lam
        m3 = (dt**3 - 3.0 * m2) / lam
    up = _pad_cubic(u)
    um1, u0, u1, u2 = up[:-3], up[1:-2], up[2:-1], up[3:]
    # cubic p(s) through (-dt, um1), (0, u0), (dt, u1), (2dt, u2)
    c0 = u0
    c1 = (-2.0 * um1 - 3.0 * u0 + 6.0 * u1 - u2) / (6.0 * dt)
    c2 = (um1 - 2.0 * u0 + u1) / (2.0 * dt**2)
    c3 = (-um1 + 3.0 * u0 - 3.0 * u1 + u2) / (6.0 * dt**3)
    inc = c0 * m0 + c1 * m1 + c2 * m2 + c3 * m3
    v = np.zeros(len(u), dtype=complex)
    # one-pole recurrence v_{n+1} = decay * v_n + inc_n
    v[1:] = lfilter(np.array([1.0 + 0j]), np.array([1.0 + 0j, -decay]), inc)
    return v


def cumulative_trapezoid(y: np.ndarray, dt: float) -> np.ndarray:
    out = np.zeros(len(y), dtype=np.result_type(y, float))
    np.cumsum(0.5 * dt * (y[1:] + y[:-1]), out=out[1:])
    return out


def cumulative_simpson(y: np.ndarray, dt: float) -> np.ndarray:
    from scipy.integrate import cumulative_simpson as _cs

    out = np.zeros(len(y), dtype=float)
    out[1:] = _cs(np.asarray(y, dtype=float), dx=dt)
    return out
