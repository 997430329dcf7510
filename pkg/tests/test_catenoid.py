"""Catenoid profiles, areas and curvature."""

import numpy as np
import pytest
from scipy.special import gamma

from axifb.catenoid import (
    AnalyticGraph,
    Catenoid,
    CatenoidConvention,
    PlanarCurve,
    asymptotic_height,
    catenoid_area,
    catenoid_area_excess,
    catenoid_eval,
    catenoid_graph,
    catenoid_inverse,
    catenoid_point,
    catenoid_slope,
    catenoid_through,
    excess_delta,
    fit_asymptote_constants,
    flat_area,
    flux_profile,
    mean_curvature,
    ode_residual,
    weighted_area,
)
from axifb.errors import DomainError, InputError


def test_three_dimensional_catenoid_is_arccosh():
    c = Catenoid(3, 1.0)
    assert catenoid_eval(c, np.cosh(2.0)) == pytest.approx(2.0, rel=1e-14)
    assert catenoid_eval(c, 1.0) == 0.0
    assert catenoid_inverse(c, -1.5) == pytest.approx(np.cosh(1.5), rel=1e-14)


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_inverse_round_trip(n):
    c = Catenoid(n, 1.3)
    r = np.linspace(1.4, 30.0, 50)
    assert np.allclose(catenoid_inverse(c, catenoid_eval(c, r)), r, rtol=1e-10)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_profile_solves_catenoid_ode(n):
    c = Catenoid(n, 1.0)
    z = np.linspace(0.2, 0.8 * min(c.height_limit, 3.0), 20)
    assert np.max(np.abs(ode_residual(c, z))) <= 1e-5


def test_slope_matches_finite_difference():
    c = Catenoid(4, 1.0)
    r = np.linspace(1.5, 10.0, 30)
    h = 1e-6
    fd = (np.asarray(catenoid_eval(c, r + h)) - np.asarray(catenoid_eval(c, r - h))) / (2.0 * h)
    assert np.allclose(fd, catenoid_slope(c, r), rtol=1e-6)
    assert np.isinf(catenoid_slope(c, 1.0))


def test_below_neck_rejected():
    with pytest.raises(DomainError):
        catenoid_eval(Catenoid(3, 2.0), 1.0)


def test_asymptotic_height_four_dimensions():
    c4 = gamma(0.25) * np.sqrt(np.pi) / (4.0 * gamma(0.75))
    assert asymptotic_height(4) == pytest.approx(c4, rel=1e-9)
    with pytest.raises(DomainError):
        asymptotic_height(3)


def test_asymptotic_convention():
    c = Catenoid(5, 2.0, CatenoidConvention.ASYMPTOTIC)
    assert c.height_limit == pytest.approx(2.0, rel=1e-12)
    assert catenoid_eval(c, 1e4) == pytest.approx(2.0, abs=1e-6)
    with pytest.raises(DomainError):
        Catenoid(3, 1.0, CatenoidConvention.ASYMPTOTIC)
    with pytest.raises(DomainError):
        catenoid_inverse(c, 2.0)


def test_point_parametrization():
    c = Catenoid(4, 1.0)
    r, z = catenoid_point(c, np.array([0.0, 0.5, 1.0]))
    assert r[0] == pytest.approx(1.0)
    assert np.allclose(catenoid_eval(c, r), z, atol=1e-12)


def test_scaled_catenoid():
    c = Catenoid(3, 1.0).scaled(2.0)
    assert c.neck == 2.0
    assert catenoid_eval(c, 2.0 * np.cosh(1.0)) == pytest.approx(2.0, rel=1e-14)


def test_power_law_constants():
    c_n, c_prime = fit_asymptote_constants(5)
    assert c_n == pytest.approx(asymptotic_height(5), rel=1e-4)
    assert c_prime > 0.0


def test_catenoid_area_closed_form():
    area = catenoid_area(Catenoid(3, 1.0), 1.0, 10.0)
    assert area == pytest.approx(0.5 * np.arccosh(10.0) + 50.0 * np.sqrt(0.99), rel=1e-12)


@pytest.mark.parametrize("n", [4, 5])
def test_parametric_and_graph_areas_agree(n):
    c = Catenoid(n, 1.0)
    curve = PlanarCurve.from_graph(
        AnalyticGraph(value=lambda r: catenoid_eval(c, r), slope=lambda r: catenoid_slope(c, r)),
        np.linspace(1.0, 20.0, 64),
    )
    assert weighted_area(curve, 1.5, 20.0, n) == pytest.approx(catenoid_area(c, 1.5, 20.0), rel=1e-8)


def test_area_excess_without_cancellation():
    c = Catenoid(3, 1.0)
    direct = catenoid_area(c, 1.0, 10.0) - 50.0
    assert catenoid_area_excess(c, 10.0) == pytest.approx(direct, rel=1e-10)


@pytest.mark.parametrize("neck", [1.0, 2.0])
def test_excess_lemma_four_dimensions(neck):
    delta = excess_delta(4)
    assert delta == pytest.approx((1.0 - 2.0 ** -0.5) / 4.0)
    assert catenoid_area_excess(Catenoid(4, neck), 1e3) >= 0.5 * delta * neck ** 3


def test_flat_segment_area():
    curve = PlanarCurve(np.linspace(1.0, 5.0, 9), np.full(9, 0.7))
    assert weighted_area(curve, 1.0, 5.0, 4) == pytest.approx(flat_area(1.0, 5.0, 4), rel=1e-12)


def test_curve_validation():
    with pytest.raises(InputError):
        PlanarCurve(np.array([1.0, 0.5, 2.0]), np.zeros(3))
    with pytest.raises(InputError):
        PlanarCurve(np.array([0.0, 1.0]), np.zeros(2))
    curve = PlanarCurve(np.linspace(1.0, 2.0, 5), np.zeros(5))
    with pytest.raises(InputError):
        weighted_area(curve, 0.5, 2.0, 3)


@pytest.mark.parametrize("n", [3, 4])
def test_catenoid_is_minimal(n):
    c = Catenoid(n, 1.0)
    curve = PlanarCurve.from_graph(catenoid_graph(c), np.linspace(1.2, 12.0, 200))
    flux = flux_profile(curve, n)
    assert np.allclose(flux, 1.0, rtol=1e-10)
    assert np.max(np.abs(mean_curvature(curve, n))) <= 1e-9


def test_mean_curvature_of_sampled_bowl():
    r = np.linspace(0.5, 3.0, 200)
    curve = PlanarCurve(r, 0.5 * r ** 2)
    down = mean_curvature(curve, 3)
    assert np.all(down < 0.0)
    assert np.allclose(mean_curvature(curve, 3, normal="up"), -down)
    with pytest.raises(InputError):
        mean_curvature(PlanarCurve(r[:4], r[:4]), 3)


def test_catenoid_through_recovers_member():
    points = ((2.0, np.arccosh(2.0)), (5.0, np.arccosh(5.0)))
    sigma, shift = catenoid_through(*points)
    assert sigma == pytest.approx(1.0, rel=1e-8)
    assert shift == pytest.approx(0.0, abs=1e-8)
    assert catenoid_through((2.0, 1.0), (5.0, 0.5)) is None
