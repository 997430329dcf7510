"""Lower-bound certificates for weighted areas."""

import numpy as np
import pytest

from axifb.catenoid import BoundCheck, bound_a2, bound_e1, bound_y, excess_delta
from axifb.errors import DomainError, InputError


def test_excess_delta_values():
    assert excess_delta(4) == pytest.approx((1.0 - 2.0 ** -0.5) / 4.0, rel=1e-14)
    assert excess_delta(5) == pytest.approx((1.0 - 2.0 ** (-1.0 / 3.0)) / 6.0, rel=1e-14)
    with pytest.raises(DomainError):
        excess_delta(2)


def test_bound_inputs_validated():
    with pytest.raises(InputError):
        bound_e1(0.5, 100.0, 1.0)
    with pytest.raises(InputError):
        bound_y(2.0, 10.0, 1.0, 1.0)
    with pytest.raises(InputError):
        bound_a2(100.0, 150.0, 1.0, 2.0, 4)


def test_bound_check_slack():
    check = BoundCheck(
        lhs_min=10.0, rhs=10.5, baseline=9.0, lhs_excess=1.0, rhs_excess=1.5,
        gap=-0.5, n_competitors=3, best_family="catenoid", best_neck=1.0,
    )
    assert check.holds()
    assert not check.holds(slack=0.1)
    assert check.to_dict()["n_competitors"] == 3


@pytest.mark.slow
def test_bound_e1_holds():
    check = bound_e1(1.0, 100.0, 1.0)
    assert check.holds()
    assert np.isfinite(check.gap)
    assert check.n_competitors > 1


@pytest.mark.slow
def test_bound_y_holds():
    assert bound_y(2.0, 40.0, 1.0, 1.0).holds()


@pytest.mark.slow
def test_bound_a2_holds():
    assert bound_a2(100.0, 1e4, 1.0, 2.0, 4).holds()


@pytest.mark.slow
def test_parallel_restarts_match_serial():
    serial = bound_e1(1.0, 50.0, 1.0, workers=1)
    parallel = bound_e1(1.0, 50.0, 1.0, workers=2)
    assert parallel.lhs_min == pytest.approx(serial.lhs_min, rel=1e-9)
