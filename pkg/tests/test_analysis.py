import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from tempered_tvp.analysis import (NoContractionError, beta_constant, dependence_bound_rhs,
                                   dependence_bound_terminal, dependence_rate_check, gamma_bound,
                                   lipschitz_threshold, well_posedness)
from tempered_tvp.core import InvalidArgumentError, TemperedOrder
from tempered_tvp.experiments import example4_coefficient, registry_build

mpmath.mp.dps = 30
HALF = TemperedOrder(0.5, 2.0)

# published perturbation rows
LAMBDA_DEV_H20 = [2.2715e-1, 2.1483e-2, 2.1364e-3, 2.1352e-4, 2.1351e-5]
BC_DEV_H160 = [2.5716e-1, 2.5529e-2, 2.5519e-3, 2.5509e-4, 2.5509e-5]
EPS = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5]


def test_gamma_bound_examples():
    assert gamma_bound(0.5, HALF, 0.0) == 0.0
    exact = float(2 / mpmath.gamma(mpmath.mpf(3) / 2))
    assert gamma_bound(1.0, TemperedOrder(0.5, 0.0), 1.0) == pytest.approx(exact, rel=1e-13)
    assert exact == pytest.approx(2.2567583342, abs=1e-10)
    exact = float(2 * mpmath.sqrt(0.5) * mpmath.e / mpmath.gamma(1.5))
    assert gamma_bound(0.5, HALF, 1.0) == pytest.approx(exact, rel=1e-13)
    assert exact == pytest.approx(4.3378, abs=1e-4)
    with pytest.raises(InvalidArgumentError):
        gamma_bound(0.5, HALF, -1.0)


def test_threshold_examples():
    exact = float(mpmath.gamma(1.5) / (2 * mpmath.sqrt(0.5) * mpmath.e))
    assert lipschitz_threshold(0.5, HALF) == pytest.approx(exact, rel=1e-13)
    assert exact == pytest.approx(0.23053, abs=1e-5)
    for alpha in (0.25, 0.5, 0.9):
        assert lipschitz_threshold(1.0, TemperedOrder(alpha)) == pytest.approx(math.gamma(alpha + 1) / 2)
    assert example4_coefficient(0.5, 2.0) < lipschitz_threshold(0.5, HALF)


def test_beta_examples():
    assert beta_constant(0.5, HALF, 0.0) == 1.0
    assert beta_constant(0.5, HALF, example4_coefficient(0.5, 2.0)) == pytest.approx(1 / 3, abs=1e-15)


@given(st.floats(0.01, 10), st.floats(0.05, 0.95), st.floats(0, 5))
def test_threshold_zeroes_beta(a, alpha, lam):
    order = TemperedOrder(alpha, lam)
    assert abs(beta_constant(a, order, lipschitz_threshold(a, order))) <= 4 * np.finfo(float).eps


@given(st.floats(0.01, 5), st.floats(0.05, 0.95), st.floats(0, 5), st.floats(0, 10),
       st.floats(1.01, 2.0))
def test_monotonicity(a, alpha, lam, f_sup, k):
    order = TemperedOrder(alpha, lam)
    bigger = TemperedOrder(alpha, lam * k + 0.01)
    g = gamma_bound(a, order, f_sup)
    assert gamma_bound(a * k, order, f_sup) >= g
    assert gamma_bound(a, bigger, f_sup) >= g
    assert gamma_bound(a, order, f_sup * k + 0.01) > g
    assert lipschitz_threshold(a, bigger) < lipschitz_threshold(a, order)
    if a >= 1:
        assert lipschitz_threshold(a * k, order) < lipschitz_threshold(a, order)


def test_dependence_bounds():
    assert dependence_bound_terminal(0.0, 1 / 3) == 0.0
    assert dependence_bound_terminal(0.1, 1 / 3) == pytest.approx(0.3)
    assert dependence_bound_terminal(-0.1, 1 / 3) == pytest.approx(0.3)
    assert dependence_bound_rhs(0.0, 0.5, HALF, 1 / 3) == 0.0
    b = dependence_bound_rhs(0.1, 0.5, HALF, 1 / 3)
    assert b == pytest.approx(3 * gamma_bound(0.5, HALF, 1.0) * 0.1)
    assert b == pytest.approx(1.301, abs=1e-3)
    assert 7.88e-2 <= b
    assert dependence_bound_rhs(0.2, 0.5, HALF, 1 / 3) == pytest.approx(2 * b)
    for beta in (0.0, -0.5):
        with pytest.raises(NoContractionError):
            dependence_bound_terminal(0.1, beta)
        with pytest.raises(NoContractionError):
            dependence_bound_rhs(0.1, 0.5, HALF, beta)


@given(st.floats(1e-8, 10), st.floats(0.01, 1))
def test_bounds_vanish_only_at_zero(dev, beta):
    assert dependence_bound_terminal(dev, beta) > 0
    assert dependence_bound_rhs(dev, 0.5, HALF, beta) > 0


def test_rate_check():
    assert dependence_rate_check(list(zip(EPS, LAMBDA_DEV_H20))) == pytest.approx(1.0, abs=0.01)
    assert dependence_rate_check(list(zip(EPS, BC_DEV_H160))) == pytest.approx(1.0, abs=0.01)
    assert dependence_rate_check([(e, 3.7 * e) for e in EPS]) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InvalidArgumentError):
        dependence_rate_check([(0.1, 0.2)])
    with pytest.raises(InvalidArgumentError):
        dependence_rate_check([(0.1, 0.2), (0.1, 0.3)])


def test_report_example4():
    rep = well_posedness(registry_build(4, 0.5, 2.0))
    assert rep.beta == pytest.approx(1 / 3)
    assert rep.contraction_holds
    assert not rep.lipschitz_estimated and not rep.sup_estimated
    t0, t1, lo, hi = rep.domain_rect
    assert (t0, t1) == (0.0, 0.5)
    assert hi - lo == pytest.approx(2 * rep.gamma)


@pytest.mark.parametrize("name", [1, 2, 3, 4])
@pytest.mark.parametrize("alpha", [0.25, 0.5])
def test_report_consistency(name, alpha):
    rep = well_posedness(registry_build(name, alpha, 2.0))
    assert rep.contraction_holds == (rep.lipschitz < rep.lipschitz_threshold) == (rep.beta > 0)


def test_sampled_constants_example2():
    rep = well_posedness(registry_build(2, 0.5, 2.0))
    assert rep.lipschitz_estimated and rep.sup_estimated
    # |d/dy 3 y^2| = 6 |y| peaks at the edge of the rectangle
    assert rep.lipschitz == pytest.approx(6 * rep.domain_rect[3], rel=0.01)
