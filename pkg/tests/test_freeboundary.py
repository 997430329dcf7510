"""Boundary extraction, asymptotic fits and the blow-up on synthetic fronts."""

import numpy as np
import pytest

from axifb.errors import BlowupError, DomainError, FitError, InputError
from axifb.freeboundary import (
    BoundaryCurve,
    FitModel,
    Side,
    blowup,
    extract,
    fit_asymptote,
    max_interior_gradient,
    rho_from_curve,
    separation,
    theorem_shape_checks,
)
from axifb.grid import build_domain
from axifb.potential import feps_eval


@pytest.fixture(scope="module")
def fine_grid(spec, profile):
    """Same cylinder as the small grid with hz well below eps/4."""
    return build_domain(3, 8.0, 1.0, 0.1, 32, 192, spec, profile)


@pytest.fixture
def front(fine_grid, translate):
    return translate(fine_grid, 2.5 + 0.3 * fine_grid.hz)


def test_sharp_extraction_of_flat_front(front):
    c = 2.5 + 0.3 * front.grid.hz
    plus = extract(front, Side.PLUS)
    minus = extract(front, Side.MINUS)
    assert len(plus) == len(minus) == front.grid.nr + 1
    assert np.allclose(plus.z, c + 1.0, atol=1e-2)
    assert np.allclose(minus.z, c - 1.0, atol=1e-2)
    assert plus.theta == pytest.approx(0.05)


def test_unsharpened_extraction_sits_on_the_level(front):
    c = 2.5 + 0.3 * front.grid.hz
    raw = extract(front, Side.PLUS, sharp=False)
    assert np.allclose(raw.z, c + front.grid.profile.t_eps, atol=1e-2)
    assert not raw.sharp


def test_extraction_rejects_bad_offset(front):
    with pytest.raises(DomainError):
        extract(front, Side.PLUS, theta=1.5)


def test_separation_of_flat_front(front):
    assert separation(front) == pytest.approx(2.0, abs=2e-2)


def _curve(r, z, a=100.0):
    return BoundaryCurve(side=Side.MINUS, r=np.asarray(r), z=np.asarray(z), theta=0.05, a=a)


def test_log_fit_recovers_slope():
    r = np.linspace(1.0, 100.0, 200)
    fit = fit_asymptote(_curve(r, 1.3 * np.log(r) + 0.5), 3)
    assert fit.model == FitModel.LOG
    assert fit.params["k"] == pytest.approx(1.3, rel=1e-10)
    assert fit.params["b"] == pytest.approx(0.5, abs=1e-9)
    assert fit.rms < 1e-10
    assert fit.window == pytest.approx((30.0, 80.0))
    assert fit.to_dict()["model"] == "log"


def test_power_fit_recovers_constants():
    r = np.linspace(1.0, 100.0, 200)
    fit = fit_asymptote(_curve(r, 2.0 - 3.0 / r ** 2), 5)
    assert fit.model == FitModel.POWER
    assert fit.params["c"] == pytest.approx(2.0, rel=1e-9)
    assert fit.params["c_prime"] == pytest.approx(3.0, rel=1e-6)
    assert fit.params["exponent"] == -2.0


def test_fit_failures():
    r = np.linspace(1.0, 100.0, 200)
    with pytest.raises(FitError):
        fit_asymptote(_curve(r, np.log(r)), 3, model=FitModel.POWER)
    sparse = np.linspace(1.0, 100.0, 12)
    with pytest.raises(FitError):
        fit_asymptote(_curve(sparse, np.log(sparse)), 3)


def test_rho_tie_breaks_on_smallest_radius():
    rho, r, z = rho_from_curve(_curve([3.0, 4.0, 0.0], [4.0, 3.0, 5.0]))
    assert (rho, r, z) == (5.0, 0.0, 5.0)
    with pytest.raises(BlowupError):
        rho_from_curve(_curve([], []))


def test_blowup_of_flat_front(front):
    result = blowup(front)
    c = 2.5 + 0.3 * front.grid.hz
    assert result.rho == pytest.approx(c - 1.0, abs=1e-2)
    assert result.psi.shape == (len(result.x_r), len(result.x_z))
    assert np.all(result.psi >= 0.0)
    assert result.x_r[-1] == pytest.approx(4.0)
    assert result.gradient_level == pytest.approx(-0.6)
    slope = np.sqrt(feps_eval(-0.6, front.grid.spec))
    assert result.gradient_mean == pytest.approx(slope, abs=1e-2)
    assert result.n_boundary > 0
    assert set(result.stats()) >= {"rho", "gradient_mean", "n_boundary"}


def test_blowup_shape_checks(front):
    checks = theorem_shape_checks(blowup(front), 3)
    assert checks["monotone_ok"]
    assert abs(checks["max_dpsi_dr"]) <= 1e-9
    assert checks["flux_bounded"]
    assert checks["g_at_1"] == pytest.approx(1.0, abs=1e-9)


def test_blowup_failures(fine_grid, translate):
    low = translate(fine_grid, 1.5)
    with pytest.raises(BlowupError):
        blowup(low)
    with pytest.raises(InputError):
        blowup(translate(fine_grid, 2.5), window_scale=0.0)


def test_interior_gradient_of_profile(front):
    assert max_interior_gradient(front) <= 1.0 + 1e-9
    assert max_interior_gradient(front) > 0.9
