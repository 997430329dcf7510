"""Parabolic gradient flow u_t = Lap u - F'_eps(u)/2 on the cylinder."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import splu

from axifb.catenoid import Catenoid, catenoid_eval, catenoid_point
from axifb.errors import InputError, StabilityError
from axifb.grid import (
    AxiGrid,
    Field,
    energy,
    laplacian,
    laplacian_diagonal,
    residual_norm,
    signed_distance,
    stiffness_matrix,
)
from axifb.potential import HeteroclinicProfile, feps_deriv, feps_second

logger = logging.getLogger(__name__)

ENERGY_SLACK = 1e-10
DT_SAFETY = 0.9
# default stabilized step in units of 1/S
STABILIZED_DT = 4.0


class Scheme(Enum):
    """Time discretization.

    ``stabilized`` treats the Laplacian implicitly and the reaction
    explicitly with a linear stabilization S(u_new - u_old), S = max F''/2.
    The system matrix is an M-matrix and the right-hand side is monotone in
    u_old, so the comparison principle and energy decay hold for every dt.
    """
    EXPLICIT = "explicit"
    IMEX = "imex"
    STABILIZED = "stabilized"

    def __str__(self):
        return self.value


class Termination(Enum):
    STEADY = "steady"
    T_MAX = "t_max"

    def __str__(self):
        return self.value


@dataclass
class FlowConfig:
    """Time-stepping settings; ``None`` picks the grid-derived default."""
    dt: Optional[float] = None
    scheme: Scheme = Scheme.IMEX
    steady_tol: Optional[float] = None
    max_steps: int = 1_000_000
    t_max: Optional[float] = None
    checkpoint_every: int = 500
    check_every: int = 10
    check_energy: bool = True
    # compare energies around every single step, not only at checkpoints
    check_step_energy: bool = False


@dataclass
class FlowReport:
    """Checkpoint history of one relaxation."""
    dt: float
    steady_tol: float
    times: List[float] = field(default_factory=list)
    energies: List[float] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    steps: int = 0
    terminated_by: Termination = Termination.T_MAX

    @property
    def steady(self) -> bool:
        return self.terminated_by == Termination.STEADY

    def record(self, t: float, e: float, res: float) -> None:
        self.times.append(t)
        self.energies.append(e)
        self.residuals.append(res)

    def to_dict(self) -> dict:
        return {
            "dt": self.dt,
            "steady_tol": self.steady_tol,
            "steps": self.steps,
            "steady": self.steady,
            "terminated_by": str(self.terminated_by),
            "times": self.times,
            "energies": self.energies,
            "residuals": self.residuals,
        }


def stabilization(grid: AxiGrid) -> float:
    """S = max(F''_eps, 0) / 2, the Lipschitz bound of the reaction term."""
    return 0.5 * max(grid.spec.curvature_max, 0.0)


def admissible_dt(grid: AxiGrid, scheme: Scheme) -> float:
    """Largest step keeping the scheme monotone, dissipative and inside [-1, 1]."""
    if scheme == Scheme.STABILIZED:
        return math.inf
    d_max = float(np.max(laplacian_diagonal(grid)[grid.free]))
    h2 = min(grid.hr, grid.hz) ** 2 / 4.0
    spec = grid.spec
    if scheme == Scheme.EXPLICIT:
        return min(h2, 0.5 * grid.eps ** 2, 1.0 / (d_max + 0.5 * max(spec.curvature_max, 0.0)))
    return min(h2, 1.0 / (d_max + abs(min(spec.curvature_min, 0.0))))


def default_dt(grid: AxiGrid, scheme: Scheme) -> float:
    if scheme == Scheme.STABILIZED:
        s = stabilization(grid)
        return STABILIZED_DT / s if s > 0.0 else min(grid.hr, grid.hz)
    return DT_SAFETY * admissible_dt(grid, scheme)


def default_steady_tol(grid: AxiGrid) -> float:
    return 1e-10 * grid.a ** (grid.dim - 1)


class _StabilizedSolver:
    """Prefactorized (M (1/dt + S) + K) restricted to the free nodes."""

    def __init__(self, grid: AxiGrid, dt: float):
        self.grid = grid
        self.shift = 1.0 / dt + stabilization(grid)
        self.mass = grid.mass.ravel()
        self.free = grid.free.ravel()
        fixed = ~self.free
        k = stiffness_matrix(grid)
        system = sparse.diags(self.shift * self.mass) + k
        self._coupling = k[self.free][:, fixed]
        self._lu = splu(sparse.csc_matrix(system[self.free][:, self.free]))
        logger.debug("factorized stabilized system: %d unknowns, shift %.4g", int(self.free.sum()), self.shift)

    def solve(self, values: np.ndarray) -> np.ndarray:
        v = values.ravel()
        spec = self.grid.spec
        rhs = self.mass * (self.shift * v - 0.5 * feps_deriv(v, spec))
        out = v.copy()
        out[self.free] = self._lu.solve(rhs[self.free] - self._coupling @ v[~self.free])
        return out.reshape(values.shape)


def _implicit_reaction(rhs: np.ndarray, dt: float, grid: AxiGrid) -> np.ndarray:
    """Solve v + (dt/2) F'(v) = rhs pointwise in [-1, 1] by safeguarded Newton."""
    spec = grid.spec
    v = np.clip(rhs, -1.0, 1.0)
    lo = np.full_like(v, -1.0)
    hi = np.full_like(v, 1.0)
    for _ in range(50):
        g = v + 0.5 * dt * feps_deriv(v, spec) - rhs
        if np.max(np.abs(g)) < 1e-14:
            break
        lo = np.where(g < 0.0, v, lo)
        hi = np.where(g > 0.0, v, hi)
        gp = 1.0 + 0.5 * dt * feps_second(v, spec)
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = v - g / gp
        bad = ~np.isfinite(trial) | (trial < lo) | (trial > hi)
        v = np.where(bad, 0.5 * (lo + hi), trial)
    return v


class GradientFlow:
    """Time stepper bound to one grid and configuration."""

    def __init__(self, grid: AxiGrid, cfg: FlowConfig):
        self.grid = grid
        self.cfg = cfg
        limit = admissible_dt(grid, cfg.scheme)
        if cfg.dt is None:
            self.dt = default_dt(grid, cfg.scheme)
        elif cfg.dt <= 0.0:
            raise StabilityError(f"time step must be positive, got {cfg.dt}")
        elif cfg.dt > limit * (1.0 + 1e-12):
            raise StabilityError(
                f"dt={cfg.dt:.4g} exceeds the admissible {cfg.scheme} step {limit:.4g}"
            )
        else:
            self.dt = cfg.dt
        self.steady_tol = cfg.steady_tol if cfg.steady_tol is not None else default_steady_tol(grid)
        self._solver = _StabilizedSolver(grid, self.dt) if cfg.scheme == Scheme.STABILIZED else None

    def step_values(self, u: Field) -> np.ndarray:
        grid, dt = self.grid, self.dt
        if self._solver is not None:
            new = self._solver.solve(u.values)
        elif self.cfg.scheme == Scheme.EXPLICIT:
            lap = laplacian(grid, u.values)
            new = u.values + dt * (lap - 0.5 * feps_deriv(u.values, grid.spec))
        else:
            lap = laplacian(grid, u.values)
            new = _implicit_reaction(u.values + dt * lap, dt, grid)
        if np.max(np.abs(new)) > 1.0 + 1e-12:
            raise StabilityError("step left [-1, 1]; the time step is too large")
        # round-off of the linear solve
        new = np.clip(new, -1.0, 1.0)
        new = np.where(grid.free, new, u.values)
        if u.boundary is not None:
            u.boundary.impose(new)
        return new

    def step(self, u: Field) -> Field:
        """One step; with ``check_step_energy`` an energy increase raises StabilityError."""
        out = u.with_values(self.step_values(u))
        if self.cfg.check_step_energy:
            before, after = energy(u), energy(out)
            if after > before + ENERGY_SLACK * max(abs(before), 1.0):
                raise StabilityError(f"energy increased from {before:.12g} to {after:.12g} in one step")
        return out

    def advance(self, u: Field, n_steps: int) -> Field:
        for _ in range(n_steps):
            u = self.step(u)
        return u

    def relax(
        self,
        u0: Field,
        callback: Optional[Callable[[int, Field, float], None]] = None,
    ) -> Tuple[Field, FlowReport]:
        """Flow until the residual drops below the steady tolerance or a cap is hit.

        ``callback(step, u, residual)`` runs at every energy checkpoint.
        """
        cfg = self.cfg
        report = FlowReport(dt=self.dt, steady_tol=self.steady_tol)
        u = u0
        e0 = energy(u)
        e_prev = e0
        report.record(0.0, e0, residual_norm(u))
        slack = ENERGY_SLACK * max(abs(e0), 1.0)
        step = 0
        while step < cfg.max_steps:
            if cfg.t_max is not None and step * self.dt >= cfg.t_max:
                break
            u = self.step(u)
            step += 1
            if step % cfg.check_every == 0 and residual_norm(u) < self.steady_tol:
                report.terminated_by = Termination.STEADY
                break
            if step % cfg.checkpoint_every == 0:
                e = energy(u)
                if cfg.check_energy and e > e_prev + slack:
                    raise StabilityError(
                        f"energy increased from {e_prev:.12g} to {e:.12g} at step {step}"
                    )
                e_prev = e
                res = residual_norm(u)
                report.record(step * self.dt, e, res)
                logger.debug("step %d: E=%.10g residual=%.3e", step, e, res)
                if callback is not None:
                    callback(step, u, res)
        report.steps = step
        e = energy(u)
        res = residual_norm(u)
        if cfg.check_energy and e > e_prev + slack:
            raise StabilityError(f"energy increased from {e_prev:.12g} to {e:.12g}")
        if res < self.steady_tol:
            report.terminated_by = Termination.STEADY
        report.record(step * self.dt, e, res)
        if report.steady:
            logger.info("steady after %d steps: E=%.10g residual=%.3e", step, e, res)
        else:
            logger.warning("flow stopped at step %d before reaching steady_tol (residual %.3e)", step, res)
        return u, report


def step(u: Field, cfg: FlowConfig) -> Field:
    """One time step with the configured scheme."""
    return GradientFlow(u.grid, cfg).step(u)


def advance(u: Field, cfg: FlowConfig, n_steps: int) -> Field:
    return GradientFlow(u.grid, cfg).advance(u, n_steps)


def relax(u0: Field, cfg: FlowConfig) -> Tuple[Field, FlowReport]:
    return GradientFlow(u0.grid, cfg).relax(u0)


def check_ordering(ua: Field, ub: Field, cfg: FlowConfig, n_steps: int) -> float:
    """Flow both fields and return min over nodes and steps of ub - ua."""
    if ua.grid is not ub.grid:
        raise InputError("ordering check needs fields on the same grid")
    flow = GradientFlow(ua.grid, cfg)
    gap = float(np.min(ub.values - ua.values))
    for _ in range(n_steps):
        ua, ub = flow.step(ua), flow.step(ub)
        gap = min(gap, float(np.min(ub.values - ua.values)))
    return gap


def check_monotone(u: Field) -> Tuple[float, float]:
    """(min d_z u, max d_r u) from one-sided differences."""
    grid = u.grid
    dz = np.diff(u.values, axis=1) / grid.hz
    dr = np.diff(u.values, axis=0) / grid.hr
    return float(np.min(dz)), float(np.max(dr))


def corner_catenoid(grid: AxiGrid, sigma: float):
    """Nodal graph z = d + catenoid_sigma(max(r, sigma)) through (a, z_cat).

    Returns the polyline (flat part plus catenoid branch) and the graph
    values at the grid radii.
    """
    c = Catenoid(grid.dim, sigma)
    d = grid.z_cat - float(catenoid_eval(c, grid.a))
    m = grid.dim - 2
    s_top = np.arccosh((2.0 * grid.a / sigma) ** m) / m
    s = np.linspace(0.0, s_top, 4000)
    r_cat, z_cat = catenoid_point(c, s)
    points = np.vstack([
        np.column_stack([np.linspace(0.0, sigma, 64)[:-1], np.full(63, d)]),
        np.column_stack([r_cat, z_cat + d]),
    ])
    graph = d + np.asarray(catenoid_eval(c, np.maximum(grid.r, sigma)))
    return points, graph


def steepest_neck(grid: AxiGrid) -> float:
    """Neck sigma maximizing the catenoid's rise from its neck to r = a."""
    res = minimize_scalar(
        lambda x: -float(catenoid_eval(Catenoid(grid.dim, x * grid.a), grid.a)),
        bounds=(1e-4, 1.0), method="bounded", options={"xatol": 1e-10},
    )
    return float(res.x * grid.a)


def catenoid_member(grid: AxiGrid, profile: HeteroclinicProfile, sigma: float) -> np.ndarray:
    """H_eps of the signed distance to the corner catenoid with neck sigma."""
    points, graph = corner_catenoid(grid, sigma)
    above = grid.z[None, :] > graph[:, None]
    return np.asarray(profile.value(signed_distance(grid, points, above)))


def build_vertical_initial(u1: Field, profile: HeteroclinicProfile) -> Field:
    """U_2 = max(u_1, H_eps(zeta)) with zeta the signed distance to the steepest corner catenoid."""
    grid = u1.grid
    sigma = steepest_neck(grid)
    values = np.maximum(u1.values, catenoid_member(grid, profile, sigma))
    if u1.boundary is not None:
        u1.boundary.impose(values)
    out = u1.with_values(values)
    if grid.dim == 3:
        bound = 10.0 * grid.k * grid.a * np.log(grid.a)
        e = energy(out)
        logger.info("U_2 energy %.6g against 10 k a ln a = %.6g (sigma=%.4g)", e, bound, sigma)
    return out
