"""Shared domain types: tempered orders, problem definitions, grids, trajectories."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class TvpError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(TvpError, ValueError):
    pass


class OutOfRangeError(InvalidArgumentError):
    pass


class NumericalError(TvpError):
    """A numerical procedure failed (divergence, Newton, bracketing...)."""


class DivergenceError(NumericalError):
    def __init__(self, step: int, value: float):
        super().__init__(f"non-finite state {value!r} at step {step}")
        self.step = step
        self.value = value


class NewtonError(NumericalError):
    def __init__(self, step: int, residual: float, iterations: int):
        super().__init__(
            f"Newton iteration did not converge at step {step} after "
            f"{iterations} iterations (last residual {residual:.3e})")
        self.step = step
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class TemperedOrder:
    """Fractional order ``alpha`` in (0, 1) and tempering rate ``lam`` >= 0."""

    alpha: float
    lam: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise InvalidArgumentError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (self.lam >= 0.0 and math.isfinite(self.lam)):
            raise InvalidArgumentError(f"lambda must be finite and >= 0, got {self.lam}")


RhsCallable = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RhsFunction:
    """Right-hand side f(t, y) plus optional analytical information.

    ``eval`` must broadcast over numpy arrays (all solvers call it with
    arrays as well as scalars).
    """

    eval: RhsCallable
    lipschitz_estimate: Optional[float] = None
    exact_solution: Optional[Callable[[np.ndarray], np.ndarray]] = None
    sup_estimate: Optional[float] = None

    def __call__(self, t, y):
        return self.eval(t, y)

    def __post_init__(self):
        for name in ("lipschitz_estimate", "sup_estimate"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise InvalidArgumentError(f"{name} must be nonnegative, got {v}")


@dataclass(frozen=True)
class IvpSpec:
    order: TemperedOrder
    f: RhsFunction
    y0: float
    horizon: float

    def __post_init__(self):
        if not self.horizon > 0:
            raise InvalidArgumentError(f"horizon must be positive, got {self.horizon}")
        if not math.isfinite(self.y0):
            raise InvalidArgumentError(f"y0 must be finite, got {self.y0}")


@dataclass(frozen=True)
class TvpSpec:
    """Terminal value problem with weighted condition exp(lam*a) * y(a) = ya."""

    order: TemperedOrder
    f: RhsFunction
    a: float
    ya: float
    horizon: Optional[float] = None

    def __post_init__(self):
        if self.horizon is None:
            object.__setattr__(self, "horizon", self.a)
        if not (0 < self.a <= self.horizon):
            raise InvalidArgumentError(
                f"need 0 < a <= horizon, got a={self.a}, horizon={self.horizon}")
        if not math.isfinite(self.ya):
            raise InvalidArgumentError(f"ya must be finite, got {self.ya}")

    @property
    def target(self) -> float:
        """The unweighted terminal value y(a) = exp(-lam*a) * ya."""
        return math.exp(-self.order.lam * self.a) * self.ya

    def ivp(self, y0: float, horizon: Optional[float] = None) -> IvpSpec:
        return IvpSpec(self.order, self.f, y0, self.a if horizon is None else horizon)


@dataclass(frozen=True)
class UniformGrid:
    h: float
    n: int

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise InvalidArgumentError(f"step must be positive, got {self.h}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgumentError(f"step count must be a positive integer, got {self.n}")

    @property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(self.n + 1, dtype=float)

    @property
    def t_end(self) -> float:
        return self.n * self.h

    def index_of(self, t: float, rtol: float = 1e-9) -> int:
        """Index of the node equal to ``t``; raise if ``t`` is not a node."""
        k = round(t / self.h)
        if not (0 <= k <= self.n) or abs(k * self.h - t) > rtol * max(1.0, abs(t)):
            raise InvalidArgumentError(f"t={t} is not a node of grid h={self.h}, n={self.n}")
        return k


def build_grid(t_end: float, n: int) -> UniformGrid:
    if not (t_end > 0 and math.isfinite(t_end)):
        raise InvalidArgumentError(f"t_end must be positive, got {t_end}")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n}")
    return UniformGrid(t_end / n, int(n))


def steps_to(t: float, h: float, rtol: float = 1e-9) -> int:
    """Number of steps of size ``h`` that land exactly on ``t``."""
    k = round(t / h)
    if k < 1 or abs(k * h - t) > rtol * t:
        raise InvalidArgumentError(f"t={t} is not an integer multiple of h={h}")
    return k


@dataclass(frozen=True)
class Trajectory:
    grid: UniformGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise InvalidArgumentError(
                f"expected {self.grid.n + 1} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("trajectory values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def __len__(self):
        return len(self.values)


def trajectory_value_at(traj: Trajectory, t: float) -> float:
    """Piecewise-linear read-out; exact at the nodes."""
    g = traj.grid
    if not (0.0 <= t <= g.t_end * (1 + 1e-12)):
        raise OutOfRangeError(f"t={t} outside [0, {g.t_end}]")
    x = t / g.h
    k = min(round(x), g.n)
    if abs(x - k) <= 1e-12 * max(1.0, x):
        return float(traj.values[k])
    i = min(int(math.floor(x)), g.n - 1)
    w = x - i
    return float((1.0 - w) * traj.values[i] + w * traj.values[i + 1])
