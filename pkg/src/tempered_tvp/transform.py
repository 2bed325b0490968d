"""Tempered <-> plain Caputo conjugation and the Volterra residual oracle.

The tempered Caputo derivative of order 0 < alpha < 1 is the plain Caputo
derivative conjugated by exponentials,

    D^{alpha,lam} y(t) = exp(-lam t) D^alpha (exp(lam t) y(t)),

so a tempered problem for ``y`` is a plain Caputo problem for
``u = exp(lam t) y`` with right-hand side ``g(s, u) = exp(lam s) f(s, exp(-lam s) u)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gamma
from typing import Callable

import numpy as np

from .core import (InvalidArgumentError, IvpSpec, OutOfRangeError, TemperedOrder,
                   Trajectory)


@dataclass(frozen=True)
class CaputoIvpSpec:
    """Plain Caputo IVP  D^alpha u = g(s, u),  u(0) = u0  on [0, horizon]."""

    alpha: float
    g: Callable
    u0: float
    horizon: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise InvalidArgumentError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.horizon > 0:
            raise InvalidArgumentError(f"horizon must be positive, got {self.horizon}")


def to_caputo(spec: IvpSpec) -> CaputoIvpSpec:
    lam = spec.order.lam
    f = spec.f.eval

    if lam == 0.0:
        g = f
    else:
        def g(s, u):
            return np.exp(lam * s) * f(s, np.exp(-lam * s) * u)

    return CaputoIvpSpec(spec.order.alpha, g, spec.y0, spec.horizon)


def from_caputo(u_traj: Trajectory, lam: float) -> Trajectory:
    t = u_traj.grid.nodes
    return Trajectory(u_traj.grid, np.exp(-lam * t) * u_traj.values)


def trapezoid_moments(alpha: float, k: int) -> np.ndarray:
    """Product-trapezoid weights a_{j,k}, j = 0..k, for the kernel (t_k - s)^(alpha-1).

    ``h**alpha / gamma(alpha + 2) * sum(a * x)`` is the Riemann-Liouville
    integral of the piecewise-linear interpolant of ``x`` at t_k = k*h.
    """
    if k == 0:
        return np.zeros(1)
    a = np.empty(k + 1)
    m = np.arange(1, k, dtype=float)[::-1]          # k - j for j = 1..k-1
    p = alpha + 1.0
    a[0] = (k - 1) ** p - (k - 1 - alpha) * k ** alpha
    a[1:k] = (m + 1) ** p - 2.0 * m ** p + (m - 1) ** p
    a[k] = 1.0
    return a


def tempered_integral(samples: Trajectory, order: TemperedOrder, t_index: int) -> float:
    """Product-trapezoid tempered Riemann-Liouville integral at node ``t_index``.

    The factor exp(-lam (t_k - s)) is sampled at the nodes and interpolated
    together with the data; (t_k - s)^(alpha-1) is integrated exactly.
    """
    n = samples.grid.n
    if not (0 <= t_index <= n):
        raise OutOfRangeError(f"t_index {t_index} outside 0..{n}")
    if t_index == 0:
        return 0.0
    h = samples.grid.h
    alpha, lam = order.alpha, order.lam
    t = samples.grid.nodes[: t_index + 1]
    damp = np.exp(-lam * (t[-1] - t))
    w = trapezoid_moments(alpha, t_index)
    return float(h ** alpha / gamma(alpha + 2.0) * np.dot(w, damp * samples.values[: t_index + 1]))


def tempered_integral_all(samples: Trajectory, order: TemperedOrder) -> np.ndarray:
    """``tempered_integral`` at every node (O(N^2))."""
    return np.array([tempered_integral(samples, order, k) for k in range(samples.grid.n + 1)])


def l1_weights(alpha: float, n: int) -> np.ndarray:
    """b_m = (m+1)^(1-alpha) - m^(1-alpha), m = 0..n-1."""
    m = np.arange(n, dtype=float)
    return (m + 1.0) ** (1.0 - alpha) - m ** (1.0 - alpha)


def tempered_derivative_l1(y_traj: Trajectory, order: TemperedOrder, t_index: int) -> float:
    """L1 approximation of the tempered Caputo derivative at node ``t_index``."""
    n = y_traj.grid.n
    if t_index == 0:
        raise OutOfRangeError("derivative history is empty at t_index = 0")
    if not (1 <= t_index <= n):
        raise OutOfRangeError(f"t_index {t_index} outside 1..{n}")
    alpha, lam = order.alpha, order.lam
    h = y_traj.grid.h
    t = y_traj.grid.nodes[: t_index + 1]
    u = np.exp(lam * t) * y_traj.values[: t_index + 1]
    b = l1_weights(alpha, t_index)[::-1]             # b_{k-1-j}, j = 0..k-1
    d = h ** (-alpha) / gamma(2.0 - alpha) * np.dot(b, np.diff(u))
    return float(np.exp(-lam * t[-1]) * d)


def volterra_residual(y_traj: Trajectory, spec: IvpSpec) -> float:
    """Max nodal defect of ``y_traj`` in the equivalent Volterra equation

        y(t) = y0 exp(-lam t) + I^{alpha,lam}[f(., y(.))](t).
    """
    grid = y_traj.grid
    if abs(grid.t_end - spec.horizon) > 1e-9 * spec.horizon:
        raise InvalidArgumentError(
            f"trajectory ends at {grid.t_end}, spec horizon is {spec.horizon}")
    t = grid.nodes
    fy = Trajectory(grid, spec.f.eval(t, y_traj.values) * np.ones_like(t))
    integral = tempered_integral_all(fy, spec.order)
    r = y_traj.values - spec.y0 * np.exp(-spec.order.lam * t) - integral
    return float(np.max(np.abs(r)))
