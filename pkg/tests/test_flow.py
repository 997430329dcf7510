"""Time stepping of the Allen-Cahn gradient flow."""

import numpy as np
import pytest

from axifb.errors import StabilityError
from axifb.flow import (
    DT_SAFETY,
    STABILIZED_DT,
    FlowConfig,
    GradientFlow,
    Scheme,
    Termination,
    admissible_dt,
    advance,
    build_vertical_initial,
    check_monotone,
    check_ordering,
    corner_catenoid,
    relax,
    stabilization,
    steepest_neck,
    step,
)
from axifb.grid import Field, energy

STEEPEST_RATIO = 1.810170


@pytest.mark.parametrize("scheme", [Scheme.IMEX, Scheme.EXPLICIT])
def test_admissible_dt_bounds(small_grid, scheme):
    dt = admissible_dt(small_grid, scheme)
    assert 0.0 < dt <= min(small_grid.hr, small_grid.hz) ** 2 / 4.0
    if scheme == Scheme.EXPLICIT:
        assert dt <= 0.5 * small_grid.eps ** 2
    flow = GradientFlow(small_grid, FlowConfig(scheme=scheme))
    assert flow.dt == pytest.approx(DT_SAFETY * dt)


def test_oversized_step_rejected(small_grid):
    limit = admissible_dt(small_grid, Scheme.EXPLICIT)
    with pytest.raises(StabilityError):
        GradientFlow(small_grid, FlowConfig(scheme=Scheme.EXPLICIT, dt=2.0 * limit))
    with pytest.raises(StabilityError):
        GradientFlow(small_grid, FlowConfig(dt=-1.0))


@pytest.mark.parametrize("scheme", list(Scheme))
def test_steps_keep_boundary_and_range(omega, scheme):
    u = step(omega, FlowConfig(scheme=scheme))
    assert np.all(np.abs(u.values) <= 1.0)
    assert np.array_equal(u.values[-1, :], omega.values[-1, :])
    assert np.array_equal(u.values[:, -1], omega.values[:, -1])


@pytest.mark.parametrize("scheme", list(Scheme))
def test_energy_non_increasing(omega, scheme):
    flow = GradientFlow(omega.grid, FlowConfig(scheme=scheme))
    u = omega
    energies = [energy(u)]
    for _ in range(40):
        u = flow.step(u)
        energies.append(energy(u))
    assert np.all(np.diff(energies) <= 1e-10 * energies[0])


def test_comparison_principle(small_grid, small_boundary, omega):
    raised = np.where(small_grid.free, np.maximum(omega.values, 0.5), omega.values)
    upper = Field(small_grid, raised, small_boundary)
    gap = check_ordering(omega, upper, FlowConfig(), 30)
    assert gap >= -1e-12


def test_relax_reports_checkpoints(omega):
    seen = []
    cfg = FlowConfig(steady_tol=0.0, max_steps=20, checkpoint_every=5)
    flow = GradientFlow(omega.grid, cfg)
    u, report = flow.relax(omega, callback=lambda n, field, res: seen.append((n, res)))
    assert [n for n, _ in seen] == [5, 10, 15, 20]
    assert report.steps == 20
    assert report.terminated_by == Termination.T_MAX
    assert not report.steady
    assert len(report.energies) == 6
    assert np.all(np.diff(report.energies) <= 1e-10 * report.energies[0])
    assert report.to_dict()["terminated_by"] == "t_max"


def test_relax_stops_at_time_cap(omega):
    cfg = FlowConfig(steady_tol=0.0, t_max=0.02)
    _, report = relax(omega, cfg)
    assert report.steps * report.dt >= 0.02
    assert (report.steps - 1) * report.dt < 0.02


def test_monotone_check_on_flat_front(small_grid, translate):
    dz_min, dr_max = check_monotone(translate(small_grid, 2.0))
    assert dz_min >= 0.0
    assert dr_max == 0.0


def test_steepest_neck_three_dimensions(small_grid):
    assert steepest_neck(small_grid) == pytest.approx(small_grid.a / STEEPEST_RATIO, rel=1e-4)


def test_corner_catenoid_meets_boundary(small_grid):
    sigma = steepest_neck(small_grid)
    points, graph = corner_catenoid(small_grid, sigma)
    assert graph[-1] == pytest.approx(small_grid.z_cat, rel=1e-10)
    assert np.all(np.diff(graph) >= 0.0)
    assert np.all(np.diff(points[:, 0]) > 0.0)


def test_vertical_initial_dominates(omega, small_boundary):
    u2 = build_vertical_initial(omega, omega.grid.profile)
    assert np.all(u2.values >= omega.values)
    assert np.array_equal(u2.values[-1, :], small_boundary.column)
    assert np.array_equal(u2.values[:, -1], small_boundary.row)


def test_advance_matches_repeated_steps(omega):
    cfg = FlowConfig()
    u = omega
    for _ in range(3):
        u = step(u, cfg)
    assert np.array_equal(advance(omega, cfg, 3).values, u.values)


def test_stabilized_default_step(small_grid):
    assert admissible_dt(small_grid, Scheme.STABILIZED) == float("inf")
    flow = GradientFlow(small_grid, FlowConfig(scheme=Scheme.STABILIZED))
    assert flow.dt == pytest.approx(STABILIZED_DT / stabilization(small_grid))
    assert stabilization(small_grid) == pytest.approx(0.5 * small_grid.spec.curvature_max)


@pytest.mark.parametrize("dt", [0.05, 1.0, 50.0])
def test_stabilized_large_steps(small_grid, small_boundary, omega, dt):
    cfg = FlowConfig(scheme=Scheme.STABILIZED, dt=dt, check_step_energy=True)
    raised = np.where(small_grid.free, np.maximum(omega.values, 0.5), omega.values)
    upper = Field(small_grid, raised, small_boundary)
    assert check_ordering(omega, upper, cfg, 20) >= -1e-12
    u = advance(upper, cfg, 20)
    assert np.all(np.abs(u.values) <= 1.0)
    assert np.array_equal(u.values[-1, :], small_boundary.column)
    assert np.array_equal(u.values[:, -1], small_boundary.row)


def test_stabilized_keeps_pure_phase(small_grid):
    plus = Field(small_grid, np.ones(small_grid.shape))
    out = step(plus, FlowConfig(scheme=Scheme.STABILIZED, dt=1.0))
    assert np.allclose(out.values, 1.0, atol=1e-12)


def test_step_energy_check(omega):
    flow = GradientFlow(omega.grid, FlowConfig(check_step_energy=True))
    flow.step(omega)
    checker = np.indices(omega.grid.shape).sum(axis=0) % 2 - 0.5
    rough = np.where(omega.grid.free, np.clip(omega.values + 0.2 * checker, -1.0, 1.0), omega.values)
    flow.step_values = lambda u: rough
    with pytest.raises(StabilityError, match="energy increased"):
        flow.step(omega)
