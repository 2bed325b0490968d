"""Terminal value problems by shooting on y(0) with bisection.

Solutions of the forward problem do not cross, so y^h(a) is increasing in
y(0) and a sign change of the terminal residual brackets the root.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .core import InvalidArgumentError, NumericalError, Trajectory, TvpSpec, steps_to
from .solvers import MethodChoice, NewtonConfig, PredictorCorrector, solve_ivp

MAX_EXPANSIONS = 60


class BracketError(NumericalError):
    def __init__(self, lo, hi, r_lo, r_hi):
        super().__init__(
            f"no sign change of the terminal residual on [{lo:.6g}, {hi:.6g}] "
            f"(residuals {r_lo:.6g}, {r_hi:.6g})")
        self.lo, self.hi = lo, hi
        self.r_lo, self.r_hi = r_lo, r_hi


class BisectionError(NumericalError):
    pass


@dataclass(frozen=True)
class ShootingConfig:
    epsilon: float = 1e-10
    max_bisections: int = 200
    bracket_initial_radius: Optional[float] = None
    bracket_growth: float = 2.0
    ivp_n: int = 160
    method: MethodChoice = field(default_factory=PredictorCorrector)
    newton: NewtonConfig = field(default_factory=NewtonConfig)

    def __post_init__(self):
        problems = []
        if not self.epsilon > 0:
            problems.append(f"epsilon must be positive, got {self.epsilon}")
        if not self.bracket_growth > 1:
            problems.append(f"bracket_growth must exceed 1, got {self.bracket_growth}")
        if self.bracket_initial_radius is not None and not self.bracket_initial_radius > 0:
            problems.append(f"bracket_initial_radius must be positive, got {self.bracket_initial_radius}")
        if int(self.ivp_n) != self.ivp_n or self.ivp_n < 1:
            problems.append(f"ivp_n must be a positive integer, got {self.ivp_n}")
        if int(self.max_bisections) != self.max_bisections or self.max_bisections < 1:
            problems.append(f"max_bisections must be >= 1, got {self.max_bisections}")
        if problems:
            raise InvalidArgumentError("; ".join(problems))


@dataclass(frozen=True)
class TvpSolution:
    y0: float
    trajectory: Trajectory
    terminal_mismatch: float
    bisection_count: int
    bracket: Tuple[float, float]


def shooting_residual(tvp: TvpSpec, y0: float, n: int, method: MethodChoice,
                      newton: NewtonConfig = NewtonConfig()) -> float:
    """y^h(a) - exp(-lam a) ya for the forward solve from ``y0`` with n steps on [0, a]."""
    traj = solve_ivp(tvp.ivp(y0), n, method, newton)
    return float(traj.values[-1] - tvp.target)


def _residual(tvp, cfg, y0):
    return shooting_residual(tvp, y0, cfg.ivp_n, cfg.method, cfg.newton)


def find_bracket(tvp: TvpSpec, cfg: ShootingConfig) -> Tuple[float, float]:
    lo, hi, _, _ = _bracket(tvp, cfg)
    return lo, hi


def _safe_residual(tvp, cfg, y0):
    try:
        return _residual(tvp, cfg, y0)
    except NumericalError:
        return None


def _bracket(tvp, cfg):
    # Start from (c - r, c + r) around c = ya, the answer for f = 0.  An
    # endpoint whose forward solve blows up is pulled halfway towards the
    # other endpoint.  Without a sign change the interval is pushed outwards
    # on the side where the root must lie (the residual increases with y0).
    c = tvp.ya
    r = cfg.bracket_initial_radius or max(1.0, abs(c))
    lo, hi = c - r, c + r
    r_lo = r_hi = None
    for attempt in range(MAX_EXPANSIONS + 1):
        if r_lo is None:
            r_lo = _safe_residual(tvp, cfg, lo)
        if r_hi is None:
            r_hi = _safe_residual(tvp, cfg, hi)
        if r_lo is None or r_hi is None:
            mid = 0.5 * (lo + hi)
            if r_lo is None:
                lo = mid
            if r_hi is None:
                hi = mid
            if r_lo is None and r_hi is None:
                raise BracketError(lo, hi, float("nan"), float("nan"))
            continue
        if r_lo * r_hi <= 0:
            if r_lo > r_hi:
                raise BracketError(lo, hi, r_lo, r_hi)
            return lo, hi, r_lo, r_hi
        if attempt == MAX_EXPANSIONS:
            break
        step = (cfg.bracket_growth - 1.0) * (hi - lo)
        if r_hi < 0:
            lo, r_lo = hi, r_hi
            hi, r_hi = hi + step, None
        else:
            hi, r_hi = lo, r_lo
            lo, r_lo = lo - step, None
    raise BracketError(lo, hi, float("nan") if r_lo is None else r_lo,
                       float("nan") if r_hi is None else r_hi)


def solve_tvp(tvp: TvpSpec, cfg: ShootingConfig = ShootingConfig()) -> TvpSolution:
    n_total = cfg.ivp_n * tvp.horizon / tvp.a
    if abs(n_total - round(n_total)) > 1e-9 * n_total:
        raise InvalidArgumentError(
            f"horizon {tvp.horizon} is not reachable with step a/{cfg.ivp_n}")
    n_total = int(round(n_total))

    count = 0
    try:
        r_centre = _residual(tvp, cfg, tvp.ya)
    except NumericalError:
        r_centre = None
    if r_centre == 0.0:
        y0 = lo = hi = tvp.ya
    else:
        lo, hi, r_lo, r_hi = _bracket(tvp, cfg)
        while hi - lo > cfg.epsilon:
            if count >= cfg.max_bisections:
                raise BisectionError(
                    f"bisection did not reach width {cfg.epsilon} within "
                    f"{cfg.max_bisections} steps (width {hi - lo:.3e})")
            mid = 0.5 * (lo + hi)
            r_mid = _residual(tvp, cfg, mid)
            count += 1
            if r_mid == 0.0:
                lo = hi = mid
                break
            if r_mid < 0:
                lo = mid
            else:
                hi = mid
        y0 = 0.5 * (lo + hi)

    traj = solve_ivp(tvp.ivp(y0, tvp.horizon), n_total, cfg.method, cfg.newton)
    k_a = steps_to(tvp.a, traj.grid.h)
    mismatch = abs(float(traj.values[k_a]) - tvp.target)
    if not math.isfinite(mismatch):
        raise NumericalError("terminal mismatch is not finite")
    return TvpSolution(y0, traj, mismatch, count, (lo, hi))
