"""Run configuration handling, report bookkeeping and stage wrapping."""

import json

import pytest

import numpy as np

from axifb.errors import ConfigError, StageError
from axifb.flow import Scheme, build_vertical_initial
from axifb.grid import Field
from axifb.mountainpass import build_path
from axifb.pipeline import (
    PipelineReport,
    RunConfig,
    config_from_dict,
    domain_from_config,
    emit_config,
    emit_report,
    parse_config,
    path_bound_checks,
    relax_anchors,
    run_pipeline,
    vertical_initial_checks,
)


def test_defaults():
    cfg = config_from_dict({})
    assert cfg == RunConfig()
    assert cfg.flow_config().scheme == Scheme.STABILIZED


def test_unknown_keys_listed():
    with pytest.raises(ConfigError) as err:
        config_from_dict({"bogus": 1, "also_bogus": 2, "n": 3})
    assert err.value.keys == ["also_bogus", "bogus"]


def test_wrong_types_listed():
    with pytest.raises(ConfigError) as err:
        config_from_dict({"nr": "many", "strict_resolution": "yes", "a": True})
    assert err.value.keys == ["a", "nr", "strict_resolution"]


def test_step_energy_flag_reaches_flow():
    assert not RunConfig().flow_config().check_step_energy
    cfg = config_from_dict({"check_step_energy": True})
    assert cfg.flow_config().check_step_energy
    with pytest.raises(ConfigError) as err:
        config_from_dict({"check_step_energy": 1})
    assert err.value.keys == ["check_step_energy"]


def test_integral_floats_accepted():
    cfg = config_from_dict({"nr": 64.0, "a": 10, "dt": None})
    assert cfg.nr == 64 and isinstance(cfg.nr, int)
    assert cfg.a == 10.0 and isinstance(cfg.a, float)


@pytest.mark.parametrize(
    "data, key",
    [
        ({"a": -1.0}, "a"),
        ({"eps": 0.5}, "eps"),
        ({"n": 2}, "n"),
        ({"scheme": "rk4"}, "scheme"),
        ({"fit_lo": 0.9, "fit_hi": 0.5}, "fit_lo"),
        ({"members": 1}, "members"),
        ({"dt": 0.0}, "dt"),
    ],
)
def test_out_of_range_values(data, key):
    with pytest.raises(ConfigError) as err:
        config_from_dict(data)
    assert key in err.value.keys


def test_degenerate_catenoid_rejected():
    with pytest.raises(ConfigError) as err:
        config_from_dict({"n": 3, "a": 2.0, "k": 1.0})
    assert err.value.keys == ["a", "k"]


def test_config_file_round_trip(tmp_path):
    cfg = config_from_dict({"n": 4, "k": 0.5, "a": 30.0, "scheme": "explicit", "workers": 2})
    path = emit_config(cfg, tmp_path / "run.yaml")
    assert parse_config(path) == cfg


def test_json_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"eps": 0.05, "nz": 200}))
    cfg = parse_config(path)
    assert cfg.eps == 0.05 and cfg.nz == 200


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "missing.yaml")
    broken = tmp_path / "broken.yaml"
    broken.write_text("a: [1, 2\n")
    with pytest.raises(ConfigError):
        parse_config(broken)
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        parse_config(listing)


def test_domain_resolution_guard(spec, profile):
    cfg = RunConfig(nr=16, nz=16, strict_resolution=True)
    with pytest.raises(ConfigError) as err:
        domain_from_config(cfg, spec, profile)
    assert err.value.keys == ["nz"]
    grid, u0 = domain_from_config(RunConfig(nr=16, nz=16), spec, profile)
    assert u0.boundary is not None
    assert grid.shape == (17, 17)


def test_report_bookkeeping(tmp_path):
    report = PipelineReport(config=RunConfig().to_dict())
    report.stages["minimax"] = {"c_star": 130.0}
    report.check("first", True, 1.0, "> 0")
    report.check("second", False, -1.0, "> 0")
    assert not report.passed
    summary = report.summary()
    assert summary["c_star"] == 130.0
    assert (summary["checks_passed"], summary["checks_failed"]) == (1, 1)
    data = json.loads(emit_report(report, tmp_path / "report.json").read_text())
    assert data["summary"]["checks_failed"] == 1
    assert [c["status"] for c in data["checks"]] == ["PASS", "FAIL"]
    assert data["config"]["n"] == 3


def test_stage_failure_is_tagged(tmp_path):
    cfg = RunConfig(nr=16, nz=16, scheme="explicit", dt=10.0, output_dir=str(tmp_path / "run"))
    seen = []
    with pytest.raises(StageError) as err:
        run_pipeline(cfg, on_stage=seen.append)
    assert err.value.stage == "relax_u1"
    assert seen == ["profile", "domain", "relax_u1"]
    assert (tmp_path / "run" / "config.yaml").exists()
    assert (tmp_path / "run" / "profile.csv").exists()


def test_vertical_initial_checks(omega, profile):
    report = PipelineReport(config=RunConfig().to_dict())
    vertical_initial_checks(report, build_vertical_initial(omega, profile), RunConfig())
    checks = {c.name: c for c in report.checks}
    assert set(checks) == {"u2_initial_energy", "u2_initial_dz", "u2_initial_dr"}
    assert checks["u2_initial_dz"].passed and checks["u2_initial_dr"].passed
    assert report.stages["build_u2"]["energy"] == checks["u2_initial_energy"].measured


def test_path_bound_checks(small_grid):
    minus = Field(small_grid, -np.ones(small_grid.shape))
    plus = Field(small_grid, np.ones(small_grid.shape))
    path = build_path(minus, plus, 8)
    report = PipelineReport(config=RunConfig().to_dict())
    path_bound_checks(report, path, RunConfig())
    assert [c.name for c in report.checks] == ["lower_bound_coarea"]
    assert report.stages["minimax"]["lower_bound"]["energy"] == report.checks[0].measured
    skipped = PipelineReport(config={})
    path_bound_checks(skipped, path, RunConfig(n=4, k=0.5, a=30.0))
    assert skipped.checks == []


def test_relax_anchors():
    cfg = RunConfig(nr=16, nz=16, max_steps=10, steady_tol=1e-30)
    u1, u2 = relax_anchors(cfg)
    assert u1.grid is u2.grid
    assert u1.values.shape == (17, 17)
    assert u2.boundary is not None
    again = relax_anchors(cfg, u1, u2)
    assert again[0] is u1 and again[1] is u2
