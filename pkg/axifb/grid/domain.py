"""The truncated cylinder, its boundary data and discrete fields."""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from axifb.catenoid import Catenoid, CatenoidConvention, catenoid_eval
from axifb.errors import DomainError, InputError
from axifb.potential import (
    HeteroclinicProfile,
    PotentialSpec,
    SubsolutionProfile,
    delta_eps,
)

logger = logging.getLogger(__name__)

MIN_CELLS = 16
VALUE_TOL = 1e-12


@dataclass
class AxiGrid:
    """Uniform node grid on [0, a] x [0, b_eps] in the (r, z) half-plane.

    Nodes are indexed [i, j] with r_i = i hr and z_j = j hz. Each node owns a
    control volume weighted by r^(n-2); ``mass`` holds those weights and
    ``kr``/``kz`` the edge stiffnesses of the finite-volume Laplacian.
    Dirichlet nodes are the column r = a and the row z = b_eps.
    """
    dim: int
    a: float
    k: float
    eps: float
    nr: int
    nz: int
    b_eps: float
    delta_eps: float
    z_cat: float
    spec: PotentialSpec = field(repr=False)
    profile: HeteroclinicProfile = field(repr=False)

    def __post_init__(self):
        n = self.dim
        self.hr = self.a / self.nr
        self.hz = self.b_eps / self.nz
        self.r = np.linspace(0.0, self.a, self.nr + 1)
        self.z = np.linspace(0.0, self.b_eps, self.nz + 1)
        self.r[-1], self.z[-1] = self.a, self.b_eps

        faces = np.concatenate([[0.0], 0.5 * (self.r[1:] + self.r[:-1]), [self.a]])
        self.volume = (faces[1:] ** (n - 1) - faces[:-1] ** (n - 1)) / (n - 1)
        self.length = np.full(self.nz + 1, self.hz)
        self.length[[0, -1]] = 0.5 * self.hz
        self.mass = self.volume[:, None] * self.length[None, :]
        self.kr = (faces[1:-1] ** (n - 2) / self.hr)[:, None] * self.length[None, :]
        self.kz = np.repeat((self.volume / self.hz)[:, None], self.nz, axis=1)

        self.free = np.ones((self.nr + 1, self.nz + 1), dtype=bool)
        self.free[-1, :] = False
        self.free[:, -1] = False

    @property
    def shape(self):
        return (self.nr + 1, self.nz + 1)

    def mesh(self):
        return np.meshgrid(self.r, self.z, indexing="ij")

    def describe(self) -> dict:
        return {
            "n": self.dim,
            "a": self.a,
            "k": self.k,
            "eps": self.eps,
            "nr": self.nr,
            "nz": self.nz,
            "hr": self.hr,
            "hz": self.hz,
            "b_eps": self.b_eps,
            "delta_eps": self.delta_eps,
            "z_cat": self.z_cat,
        }


@dataclass
class BoundaryData:
    """omega on L_1 (the column r = a) and L_2 (the row z = b_eps)."""
    column: np.ndarray
    row: np.ndarray

    def impose(self, values: np.ndarray) -> np.ndarray:
        values[-1, :] = self.column
        values[:, -1] = self.row
        return values


@dataclass
class Field:
    """Nodal values on a grid, optionally carrying Dirichlet data."""
    grid: AxiGrid
    values: np.ndarray
    boundary: Optional[BoundaryData] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise InputError(f"field shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise InputError("field values must be finite")
        if np.any(np.abs(self.values) > 1.0 + VALUE_TOL):
            raise InputError("field values must lie in [-1, 1]")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.boundary)

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values, self.boundary)


def catenoid_height(n: int, k: float, a: float) -> float:
    """z_cat(a): k arccosh(a/k) for n = 3, the asymptotic-k catenoid at a otherwise."""
    if n == 3:
        if a <= 2.0 * k:
            raise DomainError(f"need a > 2k, got a={a}, k={k}")
        return float(k * np.arccosh(a / k))
    c = Catenoid(n, k, CatenoidConvention.ASYMPTOTIC)
    if a <= c.neck:
        raise DomainError(f"need a above the catenoid neck {c.neck:.6g}, got a={a}")
    return float(catenoid_eval(c, a))


def build_domain(
    n: int,
    a: float,
    k: float,
    eps: float,
    nr: int,
    nz: int,
    spec: PotentialSpec,
    profile: HeteroclinicProfile,
) -> AxiGrid:
    """Lay out the cylinder with top b_eps = z_cat(a) + 2 + delta_eps.

    Args:
        n: Ambient dimension (>= 3)
        a: Outer radius
        k: Catenoid parameter (neck for n = 3, limiting height for n > 3)
        eps: Regularization parameter, must match ``spec``
        nr: Radial cell count
        nz: Vertical cell count
        spec: Potential
        profile: Heteroclinic profile built from ``spec``

    Returns:
        AxiGrid
    """
    if n < 3:
        raise DomainError(f"dimension must be at least 3, got {n}")
    if nr < MIN_CELLS or nz < MIN_CELLS:
        raise DomainError(f"need at least {MIN_CELLS} cells per direction, got {nr}x{nz}")
    if k <= 0.0:
        raise DomainError(f"k must be positive, got {k}")
    if spec.eps != eps or profile.eps != eps:
        raise InputError("potential, profile and grid disagree on eps")
    z_cat = catenoid_height(n, k, a)
    if z_cat <= 2.0 + eps:
        logger.warning(
            "z_cat(a)=%.4g <= 2 + eps: boundary data cannot be built for this (a, k)", z_cat
        )
    delta = delta_eps(spec, profile)
    b_eps = z_cat + 2.0 + delta
    grid = AxiGrid(
        dim=n, a=float(a), k=float(k), eps=float(eps), nr=int(nr), nz=int(nz),
        b_eps=b_eps, delta_eps=delta, z_cat=z_cat, spec=spec, profile=profile,
    )
    if grid.hz > 0.25 * eps:
        logger.info("hz=%.4g exceeds eps/4=%.4g", grid.hz, 0.25 * eps)
    logger.debug("domain %s", grid.describe())
    return grid


def boundary_omega(grid: AxiGrid, w: SubsolutionProfile) -> BoundaryData:
    """omega(z) = w(z - z_cat) on the Dirichlet part of the boundary."""
    expected = grid.z_cat - grid.eps
    if abs(w.l - expected) > 1e-12 * max(1.0, expected) or w.eps != grid.eps:
        raise InputError(f"subsolution half-length {w.l} does not match z_cat - eps = {expected}")
    offsets = np.clip(grid.z - grid.z_cat, w.lower, w.upper)
    column = np.clip(np.asarray(w.value(offsets), dtype=float), -1.0, 1.0)
    row = np.full(grid.nr + 1, column[-1])
    return BoundaryData(column=column, row=row)


def omega_field(grid: AxiGrid, boundary: BoundaryData) -> Field:
    """omega extended to the whole cylinder as a function of z only."""
    values = np.repeat(boundary.column[None, :], grid.nr + 1, axis=0)
    return Field(grid, boundary.impose(values), boundary)
