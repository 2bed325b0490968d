"""Shooting solvers for tempered fractional terminal value problems of Caputo type."""
from .core import (DivergenceError, InvalidArgumentError, IvpSpec, NewtonError, NumericalError,
                   OutOfRangeError, RhsFunction, TemperedOrder, Trajectory, TvpError, TvpSpec,
                   UniformGrid, build_grid, trajectory_value_at)
from .shooting import ShootingConfig, TvpSolution, solve_tvp
from .solvers import (BackwardDifference, NewtonConfig, NonpolyCollocation, PredictorCorrector,
                      solve_ivp)

__all__ = [
    "BackwardDifference", "DivergenceError", "InvalidArgumentError", "IvpSpec", "NewtonConfig",
    "NewtonError", "NonpolyCollocation", "NumericalError", "OutOfRangeError", "PredictorCorrector",
    "RhsFunction", "ShootingConfig", "TemperedOrder", "Trajectory", "TvpError", "TvpSolution",
    "TvpSpec", "UniformGrid", "build_grid", "solve_ivp", "solve_tvp", "trajectory_value_at",
]
