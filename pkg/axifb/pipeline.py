"""Run configuration and the end-to-end construction pipeline."""

import logging
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np
import yaml

from axifb.catenoid import PlanarCurve, mean_curvature
from axifb.errors import ConfigError, DomainError, StageError, WorkbenchError
from axifb.exporter import write_curve_csv, write_field, write_profile_csv
from axifb.flow import FlowConfig, GradientFlow, Scheme, build_vertical_initial, check_monotone
from axifb.freeboundary import (
    FitModel,
    Side,
    blowup,
    extract,
    fit_asymptote,
    max_interior_gradient,
    separation,
    theorem_shape_checks,
)
from axifb.grid import Field, boundary_omega, build_domain, coarea_lower_bound, energy, omega_field
from axifb.mountainpass import (
    PathFamily,
    build_path,
    lemma_a_gap,
    lower_bound_check,
    minimax,
    pass_residual,
    path_energy_constant,
)
from axifb.potential import build_potential, delta_eps, e_eps, heteroclinic_build, subsolution_build
from axifb.reporter import create_json_report
from axifb.utils import ensure_dir, load_yaml, save_yaml

logger = logging.getLogger(__name__)

# one-sided difference quotients of the u_2 initial state
MONOTONE_TOL = 1e-4

STAGES = (
    "profile", "domain", "relax_u1", "build_u2", "relax_u2",
    "path", "minimax", "extract", "fit", "blowup",
)


@dataclass
class RunConfig:
    n: int = 3
    k: float = 1.0
    eps: float = 0.1
    a: float = 8.0
    nr: int = 128
    nz: int = 96
    scheme: str = "stabilized"
    dt: Optional[float] = None
    steady_tol: Optional[float] = None
    max_steps: int = 1_000_000
    checkpoint_every: int = 500
    members: int = 33
    rounds: int = 40
    refine: int = 2
    block_time: float = 0.5
    fit_lo: float = 0.3
    fit_hi: float = 0.8
    blowup_scale: float = 4.0
    workers: int = 1
    strict_resolution: bool = False
    check_step_energy: bool = False
    output_dir: str = "runs"

    def flow_config(self) -> FlowConfig:
        return FlowConfig(
            dt=self.dt,
            scheme=Scheme(self.scheme),
            steady_tol=self.steady_tol,
            max_steps=self.max_steps,
            checkpoint_every=self.checkpoint_every,
            check_step_energy=self.check_step_energy,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_INT_KEYS = {"n", "nr", "nz", "max_steps", "checkpoint_every", "members", "rounds", "refine", "workers"}
_FLOAT_KEYS = {"k", "eps", "a", "block_time", "fit_lo", "fit_hi", "blowup_scale"}
_OPTIONAL_FLOAT_KEYS = {"dt", "steady_tol"}
_BOOL_KEYS = {"strict_resolution", "check_step_energy"}


def _coerce(key: str, value: Any) -> Any:
    if key in _INT_KEYS:
        if isinstance(value, bool):
            raise TypeError
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise TypeError
        return value
    if key in _FLOAT_KEYS or key in _OPTIONAL_FLOAT_KEYS:
        if value is None and key in _OPTIONAL_FLOAT_KEYS:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError
        return float(value)
    if key in _BOOL_KEYS:
        if not isinstance(value, bool):
            raise TypeError
        return value
    if not isinstance(value, str):
        raise TypeError
    return value


def config_from_dict(data: Dict[str, Any]) -> RunConfig:
    """Validate a flat mapping against the RunConfig schema.

    Raises:
        ConfigError: listing unknown keys, wrongly typed keys or values out of range
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError("unknown configuration keys", unknown)

    values, bad_type = {}, []
    for key, value in data.items():
        try:
            values[key] = _coerce(key, value)
        except TypeError:
            bad_type.append(key)
    if bad_type:
        raise ConfigError("wrongly typed configuration values", bad_type)
    cfg = RunConfig(**values)

    bad = [
        key for key in sorted(_INT_KEYS | _FLOAT_KEYS | _OPTIONAL_FLOAT_KEYS)
        if getattr(cfg, key) is not None and getattr(cfg, key) <= 0
    ]
    if cfg.n < 3:
        bad.append("n")
    if cfg.eps > 0.25:
        bad.append("eps")
    if cfg.scheme not in {s.value for s in Scheme}:
        bad.append("scheme")
    if not (0.0 < cfg.fit_lo < cfg.fit_hi <= 1.0):
        bad.extend(["fit_lo", "fit_hi"])
    if cfg.members < 2:
        bad.append("members")
    if cfg.n == 3 and cfg.a <= 2.0 * cfg.k:
        bad.extend(["a", "k"])
    if bad:
        raise ConfigError("configuration values out of range", set(bad))
    return cfg


def parse_config(path: Union[str, Path]) -> RunConfig:
    """Read a YAML or JSON run configuration; missing keys take their defaults."""
    try:
        data = load_yaml(path)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return config_from_dict(data)


def emit_config(cfg: RunConfig, path: Union[str, Path]) -> Path:
    return save_yaml(cfg.to_dict(), path)


@dataclass
class Assertion:
    name: str
    passed: bool
    measured: float
    bound: Any

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def row(self):
        return (self.name, self.status, self.measured, self.bound)

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "measured": self.measured, "bound": self.bound}


@dataclass
class PipelineReport:
    config: Dict[str, Any]
    stages: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    checks: List[Assertion] = field(default_factory=list)
    wall_clock: Dict[str, float] = field(default_factory=dict)
    artifacts: Dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, measured: float, bound: Any) -> None:
        self.checks.append(Assertion(name, bool(passed), float(measured), bound))
        if not passed:
            logger.warning("check %s failed: measured %.6g, bound %s", name, measured, bound)

    def summary(self) -> Dict[str, Any]:
        mp = self.stages.get("minimax", {})
        fit = self.stages.get("fit", {})
        return {
            "c_star": mp.get("c_star"),
            "fit": fit.get("params"),
            "checks_passed": sum(c.passed for c in self.checks),
            "checks_failed": sum(not c.passed for c in self.checks),
            "total_seconds": sum(self.wall_clock.values()),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "stages": self.stages,
            "checks": [c.to_dict() for c in self.checks],
            "wall_clock": self.wall_clock,
            "artifacts": self.artifacts,
        }


def emit_report(report: PipelineReport, path: Union[str, Path]) -> Path:
    return create_json_report(report.to_dict(), path, summary=report.summary())


def domain_from_config(cfg: RunConfig, spec=None, profile=None):
    """Grid and the omega initial field for a configuration.

    Returns:
        (grid, u0) where u0 carries the Dirichlet data
    """
    spec = spec if spec is not None else build_potential(cfg.eps)
    profile = profile if profile is not None else heteroclinic_build(spec)
    grid = build_domain(cfg.n, cfg.a, cfg.k, cfg.eps, cfg.nr, cfg.nz, spec, profile)
    if grid.hz > 0.25 * cfg.eps:
        if cfg.strict_resolution:
            raise ConfigError(f"hz={grid.hz:.4g} exceeds eps/4 under strict_resolution", ["nz"])
        logger.warning("hz=%.4g > eps/4; results are under-resolved in z", grid.hz)
    w = subsolution_build(spec, profile, grid.z_cat - grid.eps, grid.delta_eps)
    return grid, omega_field(grid, boundary_omega(grid, w))


def relax_anchors(cfg: RunConfig, u1: Optional[Field] = None, u2: Optional[Field] = None):
    """The two steady anchors, relaxing whichever is not supplied.

    u_1 is relaxed from omega and u_2 from the vertical initial state built
    on u_1, as in the ``relax_u1`` to ``relax_u2`` stages.

    Returns:
        (u1, u2) on one grid
    """
    if u1 is None:
        grid, u0 = domain_from_config(cfg)
        u1, rep = GradientFlow(grid, cfg.flow_config()).relax(u0)
        logger.info("relaxed u1 in %d steps (steady=%s)", rep.steps, rep.steady)
    if u2 is None:
        u2, rep = GradientFlow(u1.grid, cfg.flow_config()).relax(build_vertical_initial(u1, u1.grid.profile))
        logger.info("relaxed u2 in %d steps (steady=%s)", rep.steps, rep.steady)
    return u1, u2


@contextmanager
def _stage(report: PipelineReport, name: str, on_stage: Optional[Callable[[str], None]]):
    if on_stage is not None:
        on_stage(name)
    logger.info("stage %s", name)
    start = time.perf_counter()
    try:
        yield
    except ConfigError:
        raise
    except WorkbenchError as exc:
        raise StageError(name, exc) from exc
    finally:
        report.wall_clock[name] = time.perf_counter() - start


def vertical_initial_checks(report: PipelineReport, big_u2: Field, cfg: RunConfig) -> None:
    """Energy bound (n = 3) and monotonicity signs of the u_2 initial state."""
    e_big = energy(big_u2)
    dz_min, dr_max = check_monotone(big_u2)
    report.stages["build_u2"] = {"energy": e_big, "min_dz": dz_min, "max_dr": dr_max}
    if cfg.n == 3:
        cap = 10.0 * cfg.k * cfg.a * np.log(cfg.a)
        report.check("u2_initial_energy", e_big <= cap, e_big, f"<= 10 k a ln a = {cap:.6g}")
    report.check("u2_initial_dz", dz_min >= -MONOTONE_TOL, dz_min, f">= -{MONOTONE_TOL:g}")
    report.check("u2_initial_dr", dr_max <= MONOTONE_TOL, dr_max, f"<= {MONOTONE_TOL:g}")


def path_bound_checks(report: PipelineReport, path: PathFamily, cfg: RunConfig) -> None:
    """Coarea lower bound (n = 3) or the flat-interface gap (n > 3) on the final path."""
    if cfg.n == 3:
        try:
            lb = lower_bound_check(path)
        except DomainError as exc:
            report.check("lower_bound_coarea", False, float("nan"), str(exc))
            return
        report.stages.setdefault("minimax", {})["lower_bound"] = lb.to_dict()
        report.check(
            "lower_bound_coarea", lb.energy >= 0.99 * lb.coarea_bound, lb.energy,
            f">= 0.99 * {lb.coarea_bound:.6g}",
        )
    elif cfg.k > 1.0:
        try:
            gap = lemma_a_gap(path)
        except DomainError as exc:
            report.check("flat_energy_gap", False, float("nan"), str(exc))
            return
        report.stages.setdefault("minimax", {})["flat_energy_gap"] = gap
        report.check("flat_energy_gap", gap > 0.0, gap, "> 0")
    else:
        logger.info("flat-interface gap check needs k > 1; skipped for k=%g", cfg.k)


def run_pipeline(
    cfg: RunConfig,
    on_stage: Optional[Callable[[str], None]] = None,
) -> PipelineReport:
    """Profile, domain, both anchors, path, minimax, extraction, fit and blow-up.

    Args:
        cfg: Validated run configuration
        on_stage: Called with each stage name as it starts

    Returns:
        PipelineReport; artifacts are written under ``cfg.output_dir``
    """
    out = ensure_dir(cfg.output_dir)
    report = PipelineReport(config=cfg.to_dict())
    emit_config(cfg, out / "config.yaml")
    flow_cfg = cfg.flow_config()

    with _stage(report, "profile", on_stage):
        spec = build_potential(cfg.eps)
        profile = heteroclinic_build(spec)
        ee = e_eps(spec)
        meta = {"e_eps": ee, "delta_eps": delta_eps(spec, profile)}
        report.artifacts["profile"] = str(write_profile_csv(profile, out / "profile.csv", meta))
        report.stages["profile"] = {"eps": cfg.eps, "t_eps": profile.t_eps, **meta}

    with _stage(report, "domain", on_stage):
        grid, u0 = domain_from_config(cfg, spec, profile)
        report.stages["domain"] = grid.describe()

    with _stage(report, "relax_u1", on_stage):
        flow = GradientFlow(grid, flow_cfg)
        u1, rep1 = flow.relax(u0)
        report.artifacts["u1"] = str(write_field(u1, out / "u1.bin"))
        report.stages["relax_u1"] = {"energy": energy(u1), **rep1.to_dict()}
        report.check("u1_steady", rep1.steady, rep1.residuals[-1], f"<= {rep1.steady_tol:.3g}")

    with _stage(report, "build_u2", on_stage):
        big_u2 = build_vertical_initial(u1, profile)
        vertical_initial_checks(report, big_u2, cfg)

    with _stage(report, "relax_u2", on_stage):
        u2, rep2 = flow.relax(big_u2)
        report.artifacts["u2"] = str(write_field(u2, out / "u2.bin"))
        report.stages["relax_u2"] = {"energy": energy(u2), **rep2.to_dict()}
        report.check("u2_steady", rep2.steady, rep2.residuals[-1], f"<= {rep2.steady_tol:.3g}")
        order = float(np.min(u2.values - u1.values))
        report.check("u1_below_u2", order >= -1e-12, order, ">= -1e-12")

    with _stage(report, "path", on_stage):
        path = build_path(u1, u2, cfg.members - 1)
        report.stages["path"] = {"members": len(path.members), "max_gradient": path.max_gradient()}

    with _stage(report, "minimax", on_stage):
        result = minimax(path, flow_cfg, cfg.rounds, cfg.refine, cfg.block_time, cfg.workers)
        pass_state = result.pass_state
        flat = ee * cfg.a ** (cfg.n - 1) / (cfg.n - 1)
        bound = coarea_lower_bound(pass_state, 0.0, 1.0)
        report.artifacts["pass_state"] = str(write_field(pass_state, out / "pass.bin"))
        report.stages["minimax"] = {
            "c_star": result.c_star,
            "argmax_s": result.argmax_s,
            "energy_u1": result.energy_u1,
            "energy_u2": result.energy_u2,
            "flat_energy": flat,
            "path_constant": path_energy_constant(result.path),
            "pass_residual": pass_residual(result),
            "coarea_bound": bound,
            "history": [h.to_dict() for h in result.history],
        }
        report.check("c_star_above_anchors", result.bracket_gap > 0.0, result.bracket_gap, "> 0")
        report.check("c_star_above_flat", result.c_star > flat, result.c_star - flat, "> 0")
        report.check("coarea_lower_bound", energy(pass_state) >= 0.99 * bound, energy(pass_state), f">= 0.99 * {bound:.6g}")
        c_hist = [h.max_energy for h in result.history]
        slack = 1e-10 * max(abs(result.history[0].max_energy_before_flow), 1.0)
        report.check(
            "energy_non_increasing",
            all(h.max_energy <= h.max_energy_before_flow + slack for h in result.history)
            and all(b <= a + slack for a, b in zip(c_hist[:-1], c_hist[1:])),
            len(result.history), "per round and across rounds",
        )
        path_bound_checks(report, result.path, cfg)

    r_lo, r_hi = cfg.fit_lo * cfg.a, cfg.fit_hi * cfg.a
    with _stage(report, "extract", on_stage):
        minus = extract(pass_state, Side.MINUS)
        plus = extract(pass_state, Side.PLUS)
        planar = minus.to_planar()
        keep = planar.r <= r_hi
        inner = PlanarCurve(r=planar.r[keep], z=planar.z[keep])
        curvature = mean_curvature(inner, cfg.n, normal="down")
        report.artifacts["f_minus"] = str(write_curve_csv(inner.r, inner.z, out / "f_minus.csv", curvature))
        report.artifacts["f_plus"] = str(write_curve_csv(plus.r, plus.z, out / "f_plus.csv"))
        gap = separation(pass_state, window=(r_lo, r_hi))
        h_min = float(np.min(curvature))
        report.stages["extract"] = {
            "minus_samples": len(minus),
            "plus_samples": len(plus),
            "separation": gap,
            "min_mean_curvature": h_min,
        }
        report.check("mean_curvature_sign", h_min >= -0.05, h_min, ">= -0.05")
        report.check("boundary_separation", abs(gap - 2.0) <= 0.2, gap, "2 +- 10%")

    with _stage(report, "fit", on_stage):
        model = FitModel.LOG if cfg.n == 3 else FitModel.POWER
        fit = fit_asymptote(minus, cfg.n, (r_lo, r_hi), model)
        report.stages["fit"] = fit.to_dict()
        if cfg.n == 3:
            k_hat = fit.params["k"]
            report.check("fitted_log_slope", abs(k_hat - cfg.k) <= 0.15 * cfg.k, k_hat, f"{cfg.k} +- 15%")
            near = fit_asymptote(minus, cfg.n, (0.2 * cfg.a, 0.4 * cfg.a), model)
            far = fit_asymptote(minus, cfg.n, (0.4 * cfg.a, 0.8 * cfg.a), model)
            ratio = far.rms / near.rms if near.rms > 0.0 else float("nan")
            report.stages["fit"]["rms_ratio"] = ratio
            report.check("fit_rms_halves", abs(ratio - 0.5) <= 0.15, ratio, "0.5 +- 30%")

    with _stage(report, "blowup", on_stage):
        bl = blowup(pass_state, cfg.blowup_scale)
        shape = theorem_shape_checks(bl, cfg.n)
        interior = max_interior_gradient(pass_state)
        np.savez(out / "blowup.npz", x_r=bl.x_r, x_z=bl.x_z, psi=bl.psi,
                 boundary_r=bl.boundary_r, boundary_z=bl.boundary_z)
        report.artifacts["blowup"] = str(out / "blowup.npz")
        report.stages["blowup"] = {**bl.stats(), **shape, "max_interior_gradient": interior}
        report.check("boundary_gradient", 0.85 <= bl.gradient_mean <= 1.15, bl.gradient_mean, "[0.85, 1.15]")
        report.check("interior_gradient", interior <= 1.05, interior, "<= 1.05")
        report.check("psi_monotone", shape["monotone_ok"], shape["min_dpsi_dz"], f"tol {shape['tolerance']:.3g}")
        h = max(cfg.a / cfg.nr, grid.hz) / bl.rho
        g1 = shape["g_at_1"]
        report.check("g_at_1", bool(np.isfinite(g1) and abs(g1) <= 2.0 * h), g1, f"|g(1)| <= {2.0 * h:.3g}")

    report.artifacts["report"] = str(emit_report(report, out / "report.json"))
    logger.info("pipeline finished: %d/%d checks passed", sum(c.passed for c in report.checks), len(report.checks))
    return report
