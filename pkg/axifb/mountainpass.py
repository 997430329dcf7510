"""Mountain-pass paths between the two steady states and the minimax level."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate

from axifb.errors import ConstructionError, DomainError, MountainPassError
from axifb.flow import FlowConfig, GradientFlow, catenoid_member, steepest_neck
from axifb.grid import (
    AxiGrid,
    Field,
    coarea_lower_bound,
    energy,
    field_at,
    lipschitz_estimate,
    min_level_area,
    residual_norm,
)
from axifb.potential import e_eps, feps_eval

logger = logging.getLogger(__name__)

ORDER_TOL = 1e-10
ENERGY_SLACK = 1e-10
SWEEP_END = 0.85
GRADIENT_BOUND = 1.2


@dataclass
class PathFamily:
    """Members ordered pointwise in s, from u_1 at s = 0 to u_2 at s = 1."""
    s: np.ndarray
    members: List[Field]

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        if len(self.s) != len(self.members) or len(self.members) < 2:
            raise ConstructionError("path needs matching parameters and at least two members")
        if np.any(np.diff(self.s) <= 0.0):
            raise ConstructionError("path parameters must increase")

    @property
    def grid(self) -> AxiGrid:
        return self.members[0].grid

    @property
    def u1(self) -> Field:
        return self.members[0]

    @property
    def u2(self) -> Field:
        return self.members[-1]

    def order_gap(self) -> float:
        """min over adjacent members of the pointwise gap."""
        return min(
            float(np.min(b.values - a.values)) for a, b in zip(self.members[:-1], self.members[1:])
        )

    def max_gradient(self) -> float:
        """Largest discrete Lipschitz quotient over all members."""
        return max(lipschitz_estimate(m) for m in self.members)


@dataclass
class HistoryEntry:
    round: int
    max_energy: float
    max_energy_before_flow: float
    argmax_s: float
    n_members: int
    energies: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "c_star": self.max_energy,
            "max_energy_before_flow": self.max_energy_before_flow,
            "argmax_s": self.argmax_s,
            "n_members": self.n_members,
            "energies": self.energies,
        }


@dataclass
class MinimaxResult:
    c_star: float
    argmax_s: float
    pass_state: Field
    energy_u1: float
    energy_u2: float
    path: PathFamily
    energies: np.ndarray
    history: List[HistoryEntry] = field(default_factory=list)

    @property
    def bracket_gap(self) -> float:
        return self.c_star - max(self.energy_u1, self.energy_u2)


def _energies(members: List[Field], workers: int) -> np.ndarray:
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return np.array(list(pool.map(energy, members)))


def build_path(
    u1: Field,
    u2: Field,
    m: int,
    k: Optional[float] = None,
    grid: Optional[AxiGrid] = None,
) -> PathFamily:
    """Sweep the corner catenoid family from u_1's interface to u_2's.

    Members s <= 0.85 compose H_eps with the signed distance to the catenoid
    through (a, z_cat) whose neck grows geometrically from 0.02 k to the
    steepest neck; the rest blend linearly into u_2. Every member is clipped
    between u_1 and u_2 and the family is made pointwise monotone in s.

    Clipping, running maxima and blending never raise the Lipschitz quotient
    above that of the catenoid members and the endpoints, so a quotient past
    ``GRADIENT_BOUND`` means the endpoints themselves are too steep.
    """
    grid = grid if grid is not None else u1.grid
    k = grid.k if k is None else k
    if m < 2:
        raise ConstructionError(f"path needs at least 3 members, got m={m}")
    if float(np.min(u2.values - u1.values)) < -ORDER_TOL:
        raise ConstructionError("build_path needs u1 <= u2")
    profile = grid.profile
    sigma_end = steepest_neck(grid)
    sigma_start = min(0.02 * k, 0.5 * sigma_end)

    s = np.linspace(0.0, 1.0, m + 1)
    values = [u1.values]
    sweep_last = None
    for sj in s[1:-1]:
        if sj <= SWEEP_END:
            t = sj / SWEEP_END
            sigma = sigma_start * (sigma_end / sigma_start) ** t
            raw = catenoid_member(grid, profile, sigma)
            sweep_last = raw
        else:
            base = sweep_last if sweep_last is not None else catenoid_member(grid, profile, sigma_end)
            lam = (sj - SWEEP_END) / (1.0 - SWEEP_END)
            raw = (1.0 - lam) * base + lam * u2.values
        member = np.clip(raw, u1.values, u2.values)
        member = np.maximum(member, values[-1])
        if u1.boundary is not None:
            u1.boundary.impose(member)
        values.append(member)
    values.append(u2.values)

    path = PathFamily(s=s, members=[u1.with_values(v) for v in values])
    gap = path.order_gap()
    if gap < -ORDER_TOL:
        raise ConstructionError(f"path is not monotone in s (gap {gap:.3e})")
    steepest = path.max_gradient()
    if steepest > GRADIENT_BOUND:
        raise ConstructionError(
            f"path members are too steep: Lipschitz quotient {steepest:.4f} > {GRADIENT_BOUND}"
        )
    logger.info(
        "path with %d members, necks %.4g..%.4g, max |grad| %.4f",
        m + 1, sigma_start, sigma_end, steepest,
    )
    return path


def flow_path(path: PathFamily, cfg: FlowConfig, t: float, workers: int = 1) -> PathFamily:
    """Flow every interior member for time t; the steady endpoints stay fixed."""
    if t < 0.0:
        raise DomainError(f"flow time must be non-negative, got {t}")
    if t == 0.0:
        return path
    flow = GradientFlow(path.grid, cfg)
    n_steps = max(1, int(round(t / flow.dt)))
    inner = path.members[1:-1]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        flowed = list(pool.map(lambda u: flow.advance(u, n_steps), inner))
    out = PathFamily(s=path.s.copy(), members=[path.u1] + flowed + [path.u2])
    gap = out.order_gap()
    if gap < -ORDER_TOL:
        raise MountainPassError(f"path order lost during flow (gap {gap:.3e})")
    return out


def _refine(path: PathFamily, energies: np.ndarray, j: int, refine: int) -> Tuple[PathFamily, np.ndarray]:
    """Insert convex combinations of the argmax member and its neighbours.

    Combinations whose energy exceeds the current maximum are left out, so
    refinement never raises the max over the family.
    """
    top = float(np.max(energies))
    cap = top + ENERGY_SLACK * max(abs(top), 1.0)
    s = list(path.s)
    members = list(path.members)
    new_e = list(energies)
    skipped = 0
    for lo in (j, j - 1):
        if lo < 0 or lo + 1 >= len(members):
            continue
        a, b = members[lo], members[lo + 1]
        inserted_s, inserted, inserted_e = [], [], []
        for i in range(1, refine + 1):
            lam = i / (refine + 1)
            candidate = a.with_values((1.0 - lam) * a.values + lam * b.values)
            e = energy(candidate)
            if e > cap:
                skipped += 1
                continue
            inserted_s.append((1.0 - lam) * s[lo] + lam * s[lo + 1])
            inserted.append(candidate)
            inserted_e.append(e)
        s[lo + 1:lo + 1] = inserted_s
        members[lo + 1:lo + 1] = inserted
        new_e[lo + 1:lo + 1] = inserted_e
    if skipped:
        logger.debug("refinement skipped %d combinations above the max energy", skipped)
    return PathFamily(s=np.array(s), members=members), np.array(new_e)


def minimax(
    path: PathFamily,
    cfg: FlowConfig,
    rounds: int = 40,
    refine: int = 2,
    block_time: float = 2.0,
    workers: int = 1,
    max_members: Optional[int] = None,
) -> MinimaxResult:
    """Alternate path flow and refinement near the argmax until the max plateaus.

    Args:
        path: Initial path
        cfg: Flow settings shared by every member
        rounds: Maximum number of flow rounds
        refine: Members inserted on each side of the argmax per round
        block_time: Flow time per round
        workers: Threads for member flows
        max_members: Stop refining past this size (default four times the initial)

    Returns:
        MinimaxResult
    """
    grid = path.grid
    tol = 1e-6 * grid.a ** (grid.dim - 1)
    cap = max_members if max_members is not None else 4 * len(path.members)
    e_u1, e_u2 = energy(path.u1), energy(path.u2)
    energies = _energies(path.members, workers)
    history: List[HistoryEntry] = []
    slack = ENERGY_SLACK * max(abs(float(np.max(energies))), 1.0)
    for rnd in range(1, rounds + 1):
        before = float(np.max(energies))
        path = flow_path(path, cfg, block_time, workers=workers)
        energies = _energies(path.members, workers)
        j = int(np.argmax(energies))
        after = float(energies[j])
        if after > before + slack:
            raise MountainPassError(f"max energy rose during flow: {before:.10g} -> {after:.10g}")
        if history and after > history[-1].max_energy + slack:
            raise MountainPassError(
                f"c* rose between rounds: {history[-1].max_energy:.10g} -> {after:.10g}"
            )
        history.append(HistoryEntry(rnd, after, before, float(path.s[j]), len(path.members), energies.tolist()))
        logger.info("round %d: max E %.10g at s=%.4f (%d members)", rnd, after, path.s[j], len(path.members))
        # before is the max of this same family ahead of the flow; refinement never raises it
        if before - after < tol:
            break
        if len(path.members) + 2 * refine <= cap and 0 < j < len(path.members) - 1:
            path, energies = _refine(path, energies, j, refine)

    j = int(np.argmax(energies))
    result = MinimaxResult(
        c_star=float(energies[j]),
        argmax_s=float(path.s[j]),
        pass_state=path.members[j],
        energy_u1=e_u1,
        energy_u2=e_u2,
        path=path,
        energies=energies,
        history=history,
    )
    if result.bracket_gap <= 0.0:
        raise MountainPassError(
            f"c*={result.c_star:.10g} does not exceed max(E(u1), E(u2))="
            f"{max(e_u1, e_u2):.10g}; the domain is likely too small"
        )
    return result


def pass_residual(result: MinimaxResult) -> float:
    """Elliptic residual of the pass state."""
    return residual_norm(result.pass_state)


def crossing_member(path: PathFamily, r: float, z: float, value: float = 0.0) -> Tuple[Field, float]:
    """Convex combination of adjacent members taking ``value`` at (r, z), with its s."""
    at = np.array([float(field_at(m, r, z)) for m in path.members])
    idx = np.nonzero((at[:-1] <= value) & (at[1:] >= value))[0]
    if len(idx) == 0:
        raise DomainError(f"no path member takes the value {value} at ({r}, {z})")
    j = int(idx[0])
    span = at[j + 1] - at[j]
    lam = 0.0 if span <= 0.0 else (value - at[j]) / span
    a, b = path.members[j], path.members[j + 1]
    s = (1.0 - lam) * path.s[j] + lam * path.s[j + 1]
    return a.with_values((1.0 - lam) * a.values + lam * b.values), float(s)


@dataclass
class LowerBoundReport:
    s: float
    energy: float
    coarea_bound: float
    min_area_positive: float
    flat_area: float
    bottom_potential: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def lower_bound_check(path: PathFamily, k: Optional[float] = None) -> LowerBoundReport:
    """Quantities of the lower-bound argument for the member vanishing at (k, (k/10) ln a)."""
    grid = path.grid
    k = grid.k if k is None else k
    member, s = crossing_member(path, k, 0.1 * k * np.log(grid.a), 0.0)
    n = grid.dim
    bottom = feps_eval(member.values[:, 0], grid.spec) * np.power(grid.r, n - 2)
    return LowerBoundReport(
        s=s,
        energy=energy(member),
        coarea_bound=coarea_lower_bound(member, 0.0, 1.0),
        min_area_positive=min_level_area(member, 0.0, 1.0),
        flat_area=grid.a ** (n - 1) / (n - 1),
        bottom_potential=float(integrate.trapezoid(bottom, grid.r)),
    )


def lemma_a_gap(path: PathFamily, k: Optional[float] = None) -> float:
    """E of the member equal to -1 + eps at (k - 1, 0), minus the flat-interface energy."""
    grid = path.grid
    if grid.dim <= 3:
        raise DomainError("the gap check applies to n > 3")
    k = grid.k if k is None else k
    if k <= 1.0:
        raise DomainError(f"the gap check needs k > 1, got {k}")
    member, _ = crossing_member(path, k - 1.0, 0.0, -1.0 + grid.eps)
    flat = e_eps(grid.spec) * grid.a ** (grid.dim - 1) / (grid.dim - 1)
    return energy(member) - flat


def path_energy_constant(path: PathFamily, grid: Optional[AxiGrid] = None) -> float:
    """max_s E minus the leading terms of the path energy bound."""
    grid = grid if grid is not None else path.grid
    ee = e_eps(grid.spec)
    top = float(np.max([energy(m) for m in path.members]))
    lead = ee * grid.a ** (grid.dim - 1) / (grid.dim - 1)
    if grid.dim == 3:
        lead += 0.5 * ee * grid.k ** 2 * np.log(grid.a)
    return top - lead
