"""Well-posedness constants and continuous-dependence bounds.

With K = 2 a^alpha exp(lam a) / Gamma(alpha + 1), the fixed-point map of the
terminal value problem is a contraction on the ball of radius
gamma = K ||f|| whenever L K < 1, and beta = 1 - L K then controls how the
solution reacts to changes in the data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import gamma as _gamma
from typing import Sequence, Tuple

import numpy as np

from .core import InvalidArgumentError, NumericalError, TemperedOrder, TvpSpec

SAMPLES = 201


class NoContractionError(NumericalError):
    def __init__(self, beta: float):
        super().__init__(f"beta = {beta:.6g} <= 0: the contraction estimate does not apply")
        self.beta = beta


def _k(a: float, order: TemperedOrder) -> float:
    if not a > 0:
        raise InvalidArgumentError(f"a must be positive, got {a}")
    return 2.0 * a ** order.alpha * math.exp(order.lam * a) / _gamma(order.alpha + 1.0)


def gamma_bound(a: float, order: TemperedOrder, f_sup: float) -> float:
    """Radius 2 a^alpha ||f|| exp(lam a) / Gamma(1 + alpha)."""
    if not f_sup >= 0:
        raise InvalidArgumentError(f"f_sup must be nonnegative, got {f_sup}")
    return _k(a, order) * f_sup


def lipschitz_threshold(a: float, order: TemperedOrder) -> float:
    """Largest admissible Lipschitz constant, Gamma(alpha+1) / (2 a^alpha exp(lam a))."""
    return 1.0 / _k(a, order)


def beta_constant(a: float, order: TemperedOrder, L: float) -> float:
    if not L >= 0:
        raise InvalidArgumentError(f"L must be nonnegative, got {L}")
    return 1.0 - L * _k(a, order)


def dependence_bound_terminal(delta_ya: float, beta: float) -> float:
    """Bound on ||y - z|| when the weighted terminal values differ by delta_ya."""
    if not beta > 0:
        raise NoContractionError(beta)
    return abs(delta_ya) / beta


def dependence_bound_rhs(f_dev: float, a: float, order: TemperedOrder, beta: float) -> float:
    """Bound on ||y - z|| when the right-hand sides differ by f_dev in sup norm."""
    if not beta > 0:
        raise NoContractionError(beta)
    if not f_dev >= 0:
        raise InvalidArgumentError(f"f_dev must be nonnegative, got {f_dev}")
    return _k(a, order) * f_dev / beta


def dependence_rate_check(observations: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of log(dev) against log(eps)."""
    obs = [(float(e), float(d)) for e, d in observations]
    if len(obs) < 2 or len({e for e, _ in obs}) < 2:
        raise InvalidArgumentError("need at least two observations with distinct eps")
    if any(e <= 0 or d <= 0 for e, d in obs):
        raise InvalidArgumentError("eps and deviations must be positive")
    x = np.log([e for e, _ in obs])
    y = np.log([d for _, d in obs])
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class WellPosednessReport:
    gamma: float
    lipschitz_threshold: float
    lipschitz: float
    beta: float
    contraction_holds: bool
    domain_rect: Tuple[float, float, float, float]   # t0, t1, y_lo, y_hi
    f_sup: float
    lipschitz_estimated: bool
    sup_estimated: bool


def _sample_sup(f, a, y_lo, y_hi):
    t = np.linspace(0.0, a, SAMPLES)
    y = np.linspace(y_lo, y_hi, SAMPLES)
    T, Y = np.meshgrid(t, y, indexing="ij")
    with np.errstate(all="ignore"):
        v = np.abs(f(T, Y) * np.ones_like(T))
    return float(np.nanmax(v)), T, Y


def _sample_lipschitz(f, T, Y):
    with np.errstate(all="ignore"):
        F = f(T, Y) * np.ones_like(T)
        dy = np.diff(Y, axis=1)
        q = np.abs(np.diff(F, axis=1)) / dy
    return float(np.nanmax(q)) if q.size else 0.0


def well_posedness(tvp: TvpSpec, y_radius: float = None) -> WellPosednessReport:
    """Evaluate the contraction constants for ``tvp``.

    Missing ||f|| and L are estimated on a 201 x 201 lattice over the
    rectangle [0, a] x [c - r, c + r], c = exp(-lam a) ya.  When ||f|| is
    sampled, r is ``y_radius`` (default 1) because gamma itself depends on
    ||f||; otherwise r = gamma.
    """
    a, order, f = tvp.a, tvp.order, tvp.f
    c = tvp.target
    sup_est = f.sup_estimate is None
    if sup_est:
        r = 1.0 if y_radius is None else y_radius
        f_sup, T, Y = _sample_sup(f.eval, a, c - r, c + r)
    else:
        f_sup = f.sup_estimate
    g = gamma_bound(a, order, f_sup)
    if not sup_est:
        r = g if y_radius is None else y_radius
    rect = (0.0, a, c - r, c + r)
    lip_est = f.lipschitz_estimate is None
    if lip_est:
        _, T, Y = _sample_sup(f.eval, a, c - r, c + r)
        L = _sample_lipschitz(f.eval, T, Y)
    else:
        L = f.lipschitz_estimate
    thr = lipschitz_threshold(a, order)
    beta = beta_constant(a, order, L)
    return WellPosednessReport(g, thr, L, beta, bool(beta > 0), rect, f_sup, lip_est, sup_est)
