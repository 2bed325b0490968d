import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tempered_tvp.core import (InvalidArgumentError, IvpSpec, OutOfRangeError, RhsFunction,
                               TemperedOrder, Trajectory, TvpSpec, UniformGrid, build_grid,
                               steps_to, trajectory_value_at)


def zero_rhs():
    return RhsFunction(lambda t, y: 0.0 * y)


def test_order_validation():
    TemperedOrder(0.5, 2.0)
    for alpha, lam in [(0.0, 1.0), (1.0, 1.0), (0.5, -0.1), (0.5, math.inf), (math.nan, 0.0)]:
        with pytest.raises(InvalidArgumentError):
            TemperedOrder(alpha, lam)


def test_build_grid_examples():
    g = build_grid(0.5, 20)
    assert g.h == pytest.approx(0.025)
    assert g.nodes[-1] == pytest.approx(0.5)
    np.testing.assert_array_equal(build_grid(1.0, 1).nodes, [0.0, 1.0])
    np.testing.assert_allclose(build_grid(0.5, 3).nodes, [0, 1 / 6, 1 / 3, 0.5])


@pytest.mark.parametrize("t_end,n", [(0.0, 4), (-1.0, 4), (1.0, 0), (1.0, -3), (1.0, 2.5)])
def test_build_grid_rejects(t_end, n):
    with pytest.raises(InvalidArgumentError):
        build_grid(t_end, n)


@given(st.floats(1e-3, 1e3), st.integers(1, 4096))
def test_grid_closure(t_end, n):
    g = build_grid(t_end, n)
    assert abs(g.nodes[-1] - t_end) <= 4 * np.finfo(float).eps * t_end
    assert np.all(np.diff(g.nodes) > 0)


def test_trajectory_value_at_examples():
    g = UniformGrid(1.0, 2)
    assert trajectory_value_at(Trajectory(g, [3.0, 3.0, 3.0]), 1.3) == 3.0
    assert trajectory_value_at(Trajectory(UniformGrid(0.1, 1), [0.0, 1.0]), 0.05) == pytest.approx(0.5)
    assert trajectory_value_at(Trajectory(g, [0.0, 1.0, 4.0]), 1.5) == pytest.approx(2.5)
    with pytest.raises(OutOfRangeError):
        trajectory_value_at(Trajectory(g, [0.0, 1.0, 4.0]), 2.5)


@given(st.integers(1, 500), st.integers(0, 500), st.floats(1e-3, 10.0))
def test_value_at_nodes_is_exact(n, i, t_end):
    i = i % (n + 1)
    g = build_grid(t_end, n)
    vals = np.sin(np.arange(n + 1) * 1.7) + 2.0
    traj = Trajectory(g, vals)
    assert trajectory_value_at(traj, g.nodes[i]) == vals[i]


def test_trajectory_invariants():
    g = build_grid(1.0, 2)
    with pytest.raises(InvalidArgumentError):
        Trajectory(g, [0.0, 1.0])
    with pytest.raises(InvalidArgumentError):
        Trajectory(g, [0.0, np.nan, 1.0])
    traj = Trajectory(g, [0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        traj.values[0] = 5.0


def test_specs():
    order = TemperedOrder(0.5, 2.0)
    tvp = TvpSpec(order, zero_rhs(), 0.5, 1.0)
    assert tvp.horizon == 0.5
    assert tvp.target == pytest.approx(math.exp(-1.0))
    assert tvp.ivp(0.3).y0 == 0.3
    with pytest.raises(InvalidArgumentError):
        TvpSpec(order, zero_rhs(), 0.5, 1.0, horizon=0.4)
    with pytest.raises(InvalidArgumentError):
        IvpSpec(order, zero_rhs(), math.inf, 1.0)
    with pytest.raises(InvalidArgumentError):
        RhsFunction(lambda t, y: y, lipschitz_estimate=-1.0)


def test_steps_to():
    assert steps_to(0.5, 0.025) == 20
    with pytest.raises(InvalidArgumentError):
        steps_to(0.5, 0.3)
