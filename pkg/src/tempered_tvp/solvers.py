"""IVP discretizations for tempered Caputo problems.

Every solver works on the transformed plain-Caputo problem for
``u = exp(lam t) y`` and maps the result back.  Three schemes:

* ``BackwardDifference``: implicit L1 scheme, order 2 - alpha.
* ``PredictorCorrector``: fractional Adams-Bashforth-Moulton (PECE), order
  min(2, 1 + alpha).
* ``NonpolyCollocation``: collocation for the Volterra form of the problem in
  a space of half-integer powers of t on each panel.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .core import (DivergenceError, InvalidArgumentError, IvpSpec, NewtonError,
                   NumericalError, Trajectory, build_grid)
from .transform import CaputoIvpSpec, from_caputo, l1_weights, to_caputo

DEFAULT_POINTS = {1: (1.0 / 3.0, 1.0), 2: (0.25, 0.5, 0.75, 1.0)}

JACOBI_NODES = 32
LEGENDRE_NODES = 16


class CollocationError(NumericalError):
    def __init__(self, panel: int, reason: str):
        super().__init__(f"collocation failed on panel {panel}: {reason}")
        self.panel = panel


@dataclass(frozen=True)
class BackwardDifference:
    name = "bdq"


@dataclass(frozen=True)
class PredictorCorrector:
    name = "abm"


@dataclass(frozen=True)
class NonpolyCollocation:
    """Collocation in span{t^(j/2): j < 2m} per panel.

    ``points`` are the relative collocation abscissae c_i in (0, 1]; there
    must be exactly 2m of them.
    """

    order_m: int = 1
    points: Optional[Tuple[float, ...]] = None
    name = "colloc"

    def __post_init__(self):
        if self.order_m not in (1, 2):
            raise InvalidArgumentError(f"order_m must be 1 or 2, got {self.order_m}")
        pts = DEFAULT_POINTS[self.order_m] if self.points is None else tuple(
            float(c) for c in self.points)
        if len(pts) != 2 * self.order_m:
            raise InvalidArgumentError(
                f"order_m={self.order_m} needs {2 * self.order_m} collocation points, got {len(pts)}")
        if not (pts[0] > 0 and pts[-1] <= 1 and all(b > a for a, b in zip(pts, pts[1:]))):
            raise InvalidArgumentError(
                f"collocation points must be strictly increasing in (0, 1], got {pts}")
        object.__setattr__(self, "points", pts)


MethodChoice = Union[BackwardDifference, PredictorCorrector, NonpolyCollocation]


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-12
    max_iter: int = 50

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidArgumentError(f"Newton tol must be positive, got {self.tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidArgumentError(f"Newton max_iter must be >= 1, got {self.max_iter}")


def parse_method(name: str, order_m: int = 1, points=None) -> MethodChoice:
    """Map a short name (bdq/abm/colloc, or 1/2/3) to a MethodChoice."""
    key = str(name).lower()
    if key in ("bdq", "1", "backward", "backwarddifference"):
        return BackwardDifference()
    if key in ("abm", "2", "pc", "predictorcorrector"):
        return PredictorCorrector()
    if key in ("colloc", "3", "collocation", "nonpolycollocation"):
        return NonpolyCollocation(order_m, points)
    raise InvalidArgumentError(f"unknown method {name!r}")


# -- weights ---------------------------------------------------------------

def _check_weight_args(alpha, n, j, jmax):
    if not (0.0 < alpha <= 1.0):
        raise InvalidArgumentError(f"alpha must lie in (0, 1], got {alpha}")
    if n < 0 or j < 0 or j > jmax:
        raise InvalidArgumentError(f"need 0 <= j <= {jmax}, got n={n}, j={j}")


def abm_predictor_weights(alpha: float, n: int, j: int, h: float) -> float:
    """b_{j,n+1} = h^alpha / alpha * ((n+1-j)^alpha - (n-j)^alpha)."""
    _check_weight_args(alpha, n, j, n)
    return h ** alpha / alpha * ((n + 1 - j) ** alpha - (n - j) ** alpha)


def abm_corrector_weights(alpha: float, n: int, j: int, h: float) -> float:
    """a_{j,n+1} = h^alpha / (alpha (alpha+1)) * c_j, product-trapezoid weights."""
    _check_weight_args(alpha, n, j, n + 1)
    p = alpha + 1.0
    if j == 0:
        c = n ** p - (n - alpha) * (n + 1) ** alpha
    elif j == n + 1:
        c = 1.0
    else:
        c = (n - j + 2) ** p + (n - j) ** p - 2.0 * (n - j + 1) ** p
    return h ** alpha / (alpha * p) * c


# -- kernels on the plain Caputo problem -------------------------------------

def _check_state(k, x):
    if not np.all(np.isfinite(x)):
        raise DivergenceError(k, float(np.atleast_1d(x)[~np.isfinite(np.atleast_1d(x))][0]))


def _fd_step(u):
    return 1e-7 * np.maximum(1.0, np.abs(u))


def _bdq_u(cs: CaputoIvpSpec, n: int, newton: NewtonConfig) -> np.ndarray:
    alpha, g = cs.alpha, cs.g
    grid = build_grid(cs.horizon, n)
    h = grid.h
    t = grid.nodes
    u = np.empty(n + 1)
    u[0] = cs.u0
    b = l1_weights(alpha, n)
    c = h ** (-alpha) / gamma(2.0 - alpha)
    for k in range(1, n + 1):
        # sum_{j<k-1} b_{k-1-j} (u_{j+1} - u_j); the j = k-1 term has b_0 = 1
        hist = np.dot(b[k - 1:0:-1], np.diff(u[:k])) if k > 1 else 0.0
        prev = u[k - 1]
        x = prev
        res = np.inf
        for it in range(1, newton.max_iter + 1):
            gx = g(t[k], x)
            res = c * (hist + x - prev) - gx
            d = _fd_step(x)
            jac = c - (g(t[k], x + d) - g(t[k], x - d)) / (2.0 * d)
            if not np.isfinite(res) or not np.isfinite(jac) or jac == 0:
                _check_state(k, np.array([res, jac]))
                raise NewtonError(k, float(abs(res)), it)
            dx = res / jac
            x = x - dx
            if abs(dx) <= newton.tol * max(1.0, abs(x)):
                break
        else:
            raise NewtonError(k, float(abs(res)), newton.max_iter)
        _check_state(k, x)
        u[k] = x
    return u


def _abm_u(cs: CaputoIvpSpec, n: int) -> np.ndarray:
    alpha, g, u0 = cs.alpha, cs.g, cs.u0
    grid = build_grid(cs.horizon, n)
    h = grid.h
    t = grid.nodes
    u = np.empty(n + 1)
    gu = np.empty(n + 1)
    u[0] = u0
    gu[0] = g(t[0], u0)
    _check_state(0, gu[0])
    cp = h ** alpha / gamma(alpha + 1.0)
    cc = h ** alpha / gamma(alpha + 2.0)
    p = alpha + 1.0
    for m in range(n):
        r = (m + 1.0 - np.arange(m + 1))              # n+1-j for j = 0..m
        bw = r ** alpha - (r - 1.0) ** alpha
        pred = u0 + cp * np.dot(bw, gu[: m + 1])
        aw = np.empty(m + 1)
        aw[0] = m ** p - (m - alpha) * (m + 1) ** alpha
        if m > 0:
            q = r[1:]                                 # n-j+1 for j = 1..m
            aw[1:] = (q + 1.0) ** p + (q - 1.0) ** p - 2.0 * q ** p
        _check_state(m + 1, pred)
        u[m + 1] = u0 + cc * (np.dot(aw, gu[: m + 1]) + g(t[m + 1], pred))
        gu[m + 1] = g(t[m + 1], u[m + 1])
        _check_state(m + 1, np.array([u[m + 1], gu[m + 1]]))
    return u


def _lagrange(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Lagrange basis on ``nodes`` evaluated at ``x``: shape (len(x), len(nodes))."""
    x = np.atleast_1d(x)
    k = len(nodes)
    out = np.ones((len(x), k))
    for i in range(k):
        for j in range(k):
            if j != i:
                out[:, i] *= (x - nodes[j]) / (nodes[i] - nodes[j])
    return out


def _colloc_u(cs: CaputoIvpSpec, n: int, method: NonpolyCollocation,
              newton: NewtonConfig) -> np.ndarray:
    # On each panel, u and g(s, u) are represented in span{s^(j/2), j < 2m},
    # i.e. polynomials of degree 2m-1 in v = sqrt(s).  Interpolation uses the
    # Lagrange basis in v through the collocation abscissae.
    alpha, g, u0 = cs.alpha, cs.g, cs.u0
    grid = build_grid(cs.horizon, n)
    h = grid.h
    c = np.asarray(method.points)
    K = len(c)
    ga = gamma(alpha)
    xj, wj = roots_jacobi(JACOBI_NODES, alpha - 1.0, 0.0)
    xl, wl = roots_legendre(LEGENDRE_NODES)
    yj = 0.5 * (1.0 + xj)
    yl = 0.5 * (1.0 + xl)

    hist_s, hist_w, hist_g = [], [], []
    u = np.empty(n + 1)
    u[0] = u0
    for p in range(n):
        tp = p * h
        tau = tp + c * h
        vn = np.sqrt(tau)
        if hist_s:
            S = np.concatenate(hist_s)
            W = np.concatenate(hist_w)
            Gh = np.concatenate(hist_g)
            H = ((tau[:, None] - S[None, :]) ** (alpha - 1.0) * W[None, :]) @ Gh
        else:
            H = np.zeros(K)

        # moments M[i, l] = int_{tp}^{tau_i} (tau_i - s)^(alpha-1) L_l(sqrt(s)) ds
        M = np.empty((K, K))
        for i in range(K):
            if p == 0:
                # s = tau y^2 removes the sqrt(s) kink at the origin
                sq = tau[i] * yj * yj
                wq = tau[i] ** alpha * 2.0 ** (1.0 - alpha) * wj * (1.0 + yj) ** (alpha - 1.0) * yj
            else:
                d = tau[i] - tp
                sq = tp + d * yj
                wq = (0.5 * d) ** alpha * wj
            M[i] = wq @ _lagrange(vn, np.sqrt(sq))

        U = np.full(K, u[p])
        for it in range(1, newton.max_iter + 1):
            gc = g(tau, U)
            d = _fd_step(U)
            gd = (g(tau, U + d) - g(tau, U - d)) / (2.0 * d)
            F = U - u0 - (H + M @ gc) / ga
            J = np.eye(K) - M * gd[None, :] / ga
            if not (np.all(np.isfinite(F)) and np.all(np.isfinite(J))):
                raise DivergenceError(p + 1, float(np.max(np.abs(F))))
            try:
                dU = np.linalg.solve(J, F)
            except np.linalg.LinAlgError:
                raise CollocationError(p, "singular collocation matrix") from None
            U = U - dU
            if np.max(np.abs(dU)) <= newton.tol * max(1.0, float(np.max(np.abs(U)))):
                break
        else:
            raise NewtonError(p + 1, float(np.max(np.abs(F))), newton.max_iter)

        gc = g(tau, U)
        if p == 0:
            s = h * yl * yl
            w = wl * h * yl
        else:
            s = tp + h * yl
            w = 0.5 * h * wl
        hist_s.append(s)
        hist_w.append(w)
        hist_g.append(_lagrange(vn, np.sqrt(s)) @ gc)
        u[p + 1] = (_lagrange(vn, np.sqrt(tp + h)) @ U)[0]
        _check_state(p + 1, u[p + 1])
    return u


# -- public solvers -----------------------------------------------------------

def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n}")
    return int(n)


def _finish(spec: IvpSpec, n: int, u: np.ndarray) -> Trajectory:
    grid = build_grid(spec.horizon, n)
    y = from_caputo(Trajectory(grid, u), spec.order.lam).values.copy()
    y[0] = spec.y0
    return Trajectory(grid, y)


def solve_ivp_bdq(spec: IvpSpec, n: int, newton: NewtonConfig = NewtonConfig()) -> Trajectory:
    n = _check_n(n)
    with np.errstate(over="ignore", invalid="ignore"):
        return _finish(spec, n, _bdq_u(to_caputo(spec), n, newton))


def solve_ivp_abm(spec: IvpSpec, n: int) -> Trajectory:
    n = _check_n(n)
    with np.errstate(over="ignore", invalid="ignore"):
        return _finish(spec, n, _abm_u(to_caputo(spec), n))


def solve_ivp_collocation(spec: IvpSpec, n: int,
                          method: NonpolyCollocation = NonpolyCollocation(),
                          newton: NewtonConfig = NewtonConfig()) -> Trajectory:
    if not isinstance(method, NonpolyCollocation):
        raise InvalidArgumentError(f"collocation solver needs NonpolyCollocation, got {method!r}")
    n = _check_n(n)
    with np.errstate(over="ignore", invalid="ignore"):
        return _finish(spec, n, _colloc_u(to_caputo(spec), n, method, newton))


def solve_caputo(cs: CaputoIvpSpec, n: int, method: MethodChoice,
                 newton: NewtonConfig = NewtonConfig()) -> Trajectory:
    """Solve a plain Caputo IVP directly (no tempering transform)."""
    n = _check_n(n)
    if isinstance(method, BackwardDifference):
        u = _bdq_u(cs, n, newton)
    elif isinstance(method, PredictorCorrector):
        u = _abm_u(cs, n)
    elif isinstance(method, NonpolyCollocation):
        u = _colloc_u(cs, n, method, newton)
    else:
        raise InvalidArgumentError(f"unknown method {method!r}")
    return Trajectory(build_grid(cs.horizon, n), u)


def solve_ivp(spec: IvpSpec, n: int, method: MethodChoice,
              newton: NewtonConfig = NewtonConfig()) -> Trajectory:
    if isinstance(method, BackwardDifference):
        return solve_ivp_bdq(spec, n, newton)
    if isinstance(method, PredictorCorrector):
        return solve_ivp_abm(spec, n)
    if isinstance(method, NonpolyCollocation):
        return solve_ivp_collocation(spec, n, method, newton)
    raise InvalidArgumentError(f"unknown method {method!r}")
