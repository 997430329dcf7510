"""Acceptance-scale runs on the default grids; select with ``-m slow``."""

import numpy as np
import pytest

from axifb.flow import GradientFlow, Scheme, check_ordering
from axifb.grid import energy
from axifb.mountainpass import build_path, minimax
from axifb.pipeline import STAGES, RunConfig, domain_from_config, relax_anchors, run_pipeline
from axifb.potential import e_eps

pytestmark = pytest.mark.slow

SMOKE_SECONDS = 300.0


@pytest.fixture(scope="module")
def smoke_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("smoke")
    return run_pipeline(RunConfig(output_dir=str(out))), out


def _checks(report):
    return {c.name: c for c in report.checks}


def test_smoke_run_completes(smoke_run):
    report, _ = smoke_run
    assert set(STAGES) <= set(report.stages)
    assert sum(report.wall_clock.values()) < SMOKE_SECONDS


@pytest.mark.parametrize(
    "name",
    [
        "u1_steady",
        "u2_steady",
        "u1_below_u2",
        "u2_initial_energy",
        "u2_initial_dz",
        "u2_initial_dr",
        "c_star_above_anchors",
        "c_star_above_flat",
        "coarea_lower_bound",
        "lower_bound_coarea",
        "energy_non_increasing",
        "mean_curvature_sign",
        "fitted_log_slope",
        "fit_rms_halves",
        "boundary_gradient",
        "interior_gradient",
        "psi_monotone",
        "g_at_1",
    ],
)
def test_smoke_check_passes(smoke_run, name):
    check = _checks(smoke_run[0])[name]
    assert check.passed, f"{name}: measured {check.measured}, bound {check.bound}"


def test_smoke_history_non_increasing(smoke_run):
    history = [h["c_star"] for h in smoke_run[0].stages["minimax"]["history"]]
    slack = 1e-10 * abs(history[0])
    assert all(b <= a + slack for a, b in zip(history[:-1], history[1:]))


def test_pipeline_is_deterministic(smoke_run, tmp_path):
    _, first = smoke_run
    run_pipeline(RunConfig(output_dir=str(tmp_path)))
    for name in ("u1.bin", "u2.bin", "pass.bin"):
        assert (first / name).read_bytes() == (tmp_path / name).read_bytes()


@pytest.mark.parametrize("scheme", list(Scheme))
def test_long_flow_dissipates(scheme):
    grid, u = domain_from_config(RunConfig())
    flow = GradientFlow(grid, RunConfig(scheme=str(scheme)).flow_config())
    e0 = energy(u)
    slack = 1e-10 * abs(e0)
    previous = e0
    for _ in range(10_000):
        u = flow.step(u)
        current = energy(u)
        assert current <= previous + slack
        previous = current


@pytest.mark.parametrize("scheme", list(Scheme))
def test_random_pairs_stay_ordered(scheme):
    grid, u0 = domain_from_config(RunConfig())
    cfg = RunConfig(scheme=str(scheme)).flow_config()
    rng = np.random.default_rng(7)
    for _ in range(20):
        lower = rng.uniform(-1.0, 1.0, grid.shape)
        upper = np.clip(lower + rng.uniform(0.0, 0.5, grid.shape), -1.0, 1.0)
        ua = u0.with_values(np.where(grid.free, lower, u0.values))
        ub = u0.with_values(np.where(grid.free, upper, u0.values))
        assert check_ordering(ua, ub, cfg, 200) >= -1e-12


def test_pass_above_anchors_and_flat():
    cfg = RunConfig(eps=0.05, a=16.0, nr=256, nz=192)
    u1, u2 = relax_anchors(cfg)
    path = build_path(u1, u2, cfg.members - 1)
    result = minimax(path, cfg.flow_config(), cfg.rounds, cfg.refine, cfg.block_time, cfg.workers)
    assert result.c_star > max(energy(u1), energy(u2))
    flat = e_eps(u1.grid.spec) * cfg.a ** 2 / 2.0
    assert result.c_star - flat > 0.0
