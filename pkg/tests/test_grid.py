"""Domain layout, finite-volume operators and level sets."""

import numpy as np
import pytest

from axifb.errors import DomainError, InputError
from axifb.grid import (
    Field,
    apply_operator,
    boundary_omega,
    build_domain,
    catenoid_height,
    coarea_lower_bound,
    energy,
    field_at,
    gradient_components,
    gradient_magnitude,
    inner,
    laplacian,
    level_area,
    level_contours,
    lipschitz_estimate,
    min_level_area,
    residual_norm,
    signed_distance,
    stiffness,
    stiffness_matrix,
)
from axifb.potential import e_eps, subsolution_build


def test_catenoid_height():
    assert catenoid_height(3, 1.0, 8.0) == pytest.approx(np.arccosh(8.0))
    with pytest.raises(DomainError):
        catenoid_height(3, 1.0, 1.5)
    assert 0.0 < catenoid_height(4, 1.0, 50.0) < 1.0


def test_domain_layout(small_grid):
    grid = small_grid
    assert grid.shape == (33, 33)
    assert grid.b_eps == pytest.approx(grid.z_cat + 2.0 + grid.delta_eps)
    assert grid.hr == pytest.approx(0.25)
    assert grid.r[-1] == 8.0 and grid.z[-1] == grid.b_eps
    assert grid.mass.sum() == pytest.approx(0.5 * 8.0 ** 2 * grid.b_eps, rel=1e-12)
    assert not grid.free[-1, :].any() and not grid.free[:, -1].any()
    assert grid.free[:-1, :-1].all()


def test_domain_validation(spec, profile):
    with pytest.raises(DomainError):
        build_domain(2, 8.0, 1.0, 0.1, 32, 32, spec, profile)
    with pytest.raises(DomainError):
        build_domain(3, 8.0, 1.0, 0.1, 8, 32, spec, profile)
    with pytest.raises(InputError):
        build_domain(3, 8.0, 1.0, 0.05, 32, 32, spec, profile)


@pytest.mark.parametrize("n", [3, 4])
def test_laplacian_exact_on_quadratics(spec, profile, n):
    a = 8.0 if n == 3 else 40.0
    k = 1.0 if n == 3 else 0.5
    grid = build_domain(n, a, k, 0.1, 24, 20, spec, profile)
    rr, zz = grid.mesh()
    lap = laplacian(grid, rr ** 2)
    assert np.allclose(lap[:-1, :], 2.0 * (n - 1), rtol=1e-10)
    lap = laplacian(grid, zz.copy())
    assert np.allclose(lap[:, 1:-1], 0.0, atol=1e-10)


def test_laplacian_symmetric(small_grid):
    rng = np.random.default_rng(3)
    u, v = rng.normal(size=(2,) + small_grid.shape)
    lhs = inner(small_grid, laplacian(small_grid, u), v)
    rhs = inner(small_grid, u, laplacian(small_grid, v))
    assert lhs == pytest.approx(rhs, rel=1e-10)
    assert inner(small_grid, laplacian(small_grid, u), u) <= 0.0


def test_operator_is_half_energy_gradient(small_grid, translate):
    u = translate(small_grid, 0.5 * small_grid.b_eps)
    rng = np.random.default_rng(7)
    v = rng.normal(scale=0.01, size=small_grid.shape) * (np.abs(u.values) < 0.8)
    t = 1e-5
    plus = energy(u.with_values(u.values + t * v))
    minus = energy(u.with_values(u.values - t * v))
    directional = (plus - minus) / (2.0 * t)
    assert directional == pytest.approx(2.0 * inner(small_grid, apply_operator(u), v), rel=1e-5)


def test_energy_of_pure_phase(small_grid):
    ones = Field(small_grid, np.ones(small_grid.shape))
    assert energy(ones) == 0.0
    assert residual_norm(ones) == 0.0


def test_field_validation(small_grid):
    with pytest.raises(InputError):
        Field(small_grid, np.full(small_grid.shape, 1.5))
    with pytest.raises(InputError):
        Field(small_grid, np.zeros((3, 3)))


def test_boundary_data(small_grid, small_boundary):
    column = small_boundary.column
    assert column[-1] == pytest.approx(1.0, abs=1e-12)
    assert column[0] < -0.999
    assert np.all(np.diff(column) >= -1e-12)
    assert np.all(small_boundary.row == column[-1])


def test_boundary_needs_matching_subsolution(small_grid):
    w = subsolution_build(small_grid.spec, small_grid.profile, small_grid.z_cat)
    with pytest.raises(InputError):
        boundary_omega(small_grid, w)


def test_flat_level_area(small_grid, translate):
    c = 0.5 * small_grid.b_eps + 0.3 * small_grid.hz
    u = translate(small_grid, c)
    contours = level_contours(u, 0.0)
    assert len(contours) == 1
    assert np.ptp(contours[0][:, 1]) <= 1e-12
    assert contours[0][0, 1] == pytest.approx(c, abs=0.05 * small_grid.hz)
    assert level_area(u, 0.0) == pytest.approx(32.0, rel=1e-9)
    assert min_level_area(u, -0.5, 0.5) == pytest.approx(32.0, rel=1e-9)
    with pytest.raises(DomainError):
        level_area(u, 1.0)


def test_coarea_bound_of_flat_front(small_grid, translate):
    u = translate(small_grid, 0.5 * small_grid.b_eps)
    bound = coarea_lower_bound(u)
    assert bound == pytest.approx(32.0 * e_eps(small_grid.spec), rel=1e-2)


def test_signed_distance_to_flat_line(small_grid):
    c = 0.5 * small_grid.b_eps
    points = np.column_stack([small_grid.r, np.full(small_grid.nr + 1, c)])
    _, zz = small_grid.mesh()
    dist = signed_distance(small_grid, points, zz > c)
    assert np.allclose(dist, np.where(zz > c, 1.0, -1.0) * np.abs(zz - c), atol=1e-12)


def test_interpolation_and_gradient(small_grid, translate):
    rr, zz = small_grid.mesh()
    linear = Field(small_grid, (zz - 0.5 * small_grid.b_eps) / small_grid.b_eps)
    r = np.array([0.3, 4.1, 7.9])
    z = np.array([0.2, 1.7, 4.0])
    assert np.allclose(field_at(linear, r, z), (z - 0.5 * small_grid.b_eps) / small_grid.b_eps)
    assert np.allclose(gradient_magnitude(linear), 1.0 / small_grid.b_eps)
    du_dr, du_dz = gradient_components(translate(small_grid, 2.0))
    assert np.max(np.abs(du_dr)) == 0.0
    assert np.all(du_dz[:, 1:-1] >= 0.0)


def test_stiffness_matrix_matches_operator(small_grid, translate):
    u = translate(small_grid, 2.0)
    k = stiffness_matrix(small_grid)
    assert k.shape == (u.values.size, u.values.size)
    assert np.allclose(k @ u.values.ravel(), stiffness(small_grid, u.values).ravel(), atol=1e-12)
    assert abs(k - k.T).max() == 0.0
    assert np.allclose(k @ np.ones(u.values.size), 0.0, atol=1e-12)


def test_lipschitz_estimate(small_grid, translate):
    rr, zz = small_grid.mesh()
    ramp = Field(small_grid, 0.05 * zz - 0.1)
    assert lipschitz_estimate(ramp) == pytest.approx(0.05)
    lower, upper = translate(small_grid, 3.0), translate(small_grid, 1.5)
    tilted = Field(small_grid, np.asarray(small_grid.profile.value(0.6 * (zz - 2.0) - 0.8 * (rr - 4.0))))
    kink = Field(small_grid, np.maximum(np.minimum(tilted.values, upper.values), lower.values))
    bound = max(lipschitz_estimate(f) for f in (lower, upper, tilted))
    assert lipschitz_estimate(kink) <= bound + 1e-12
    assert bound <= 1.0 + 1e-9
