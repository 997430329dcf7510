"""Shared fixtures: potentials, profiles and a small three-dimensional domain."""

import numpy as np
import pytest

from axifb.grid import Field, boundary_omega, build_domain, omega_field
from axifb.potential import build_potential, heteroclinic_build, subsolution_build


@pytest.fixture(scope="session")
def spec():
    return build_potential(0.1)


@pytest.fixture(scope="session")
def profile(spec):
    return heteroclinic_build(spec)


@pytest.fixture(scope="session")
def spec_fine():
    return build_potential(0.05)


@pytest.fixture(scope="session")
def profile_fine(spec_fine):
    return heteroclinic_build(spec_fine)


@pytest.fixture(scope="session")
def small_grid(spec, profile):
    """n = 3, k = 1, a = 8, eps = 0.1 on 32 x 32 cells."""
    return build_domain(3, 8.0, 1.0, 0.1, 32, 32, spec, profile)


@pytest.fixture(scope="session")
def small_subsolution(small_grid):
    grid = small_grid
    return subsolution_build(grid.spec, grid.profile, grid.z_cat - grid.eps, grid.delta_eps)


@pytest.fixture(scope="session")
def small_boundary(small_grid, small_subsolution):
    return boundary_omega(small_grid, small_subsolution)


@pytest.fixture
def omega(small_grid, small_boundary):
    return omega_field(small_grid, small_boundary)


@pytest.fixture
def translate():
    """Factory for H_eps(z - c) on every column."""

    def make(grid, c: float, boundary=None) -> Field:
        _, zz = grid.mesh()
        return Field(grid, np.asarray(grid.profile.value(zz - c)), boundary)

    return make
