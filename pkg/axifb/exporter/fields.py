"""Binary and CSV dumps of discrete fields.

Binary layout: one little-endian header record (n, a, b_eps, Nr, Nz, eps, k)
packed as ``<q d d q q d d`` followed by the (Nr+1) x (Nz+1) nodal values as
row-major ``<f8``, index [i, j] with r_i = i a/Nr and z_j = j b_eps/Nz.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from axifb.errors import InputError
from axifb.grid import AxiGrid, Field, boundary_omega, build_domain
from axifb.potential import build_potential, heteroclinic_build, subsolution_build

logger = logging.getLogger(__name__)

HEADER_DTYPE = np.dtype([
    ("n", "<i8"),
    ("a", "<f8"),
    ("b_eps", "<f8"),
    ("nr", "<i8"),
    ("nz", "<i8"),
    ("eps", "<f8"),
    ("k", "<f8"),
])
VALUE_DTYPE = np.dtype("<f8")


@dataclass(frozen=True)
class FieldHeader:
    n: int
    a: float
    b_eps: float
    nr: int
    nz: int
    eps: float
    k: float

    @classmethod
    def from_grid(cls, grid: AxiGrid) -> "FieldHeader":
        return cls(grid.dim, grid.a, grid.b_eps, grid.nr, grid.nz, grid.eps, grid.k)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nr + 1, self.nz + 1)


def write_field(u: Field, path: Union[str, Path]) -> Path:
    """Dump a field in the binary layout; returns the path written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    h = FieldHeader.from_grid(u.grid)
    record = np.array([(h.n, h.a, h.b_eps, h.nr, h.nz, h.eps, h.k)], dtype=HEADER_DTYPE)
    with open(path, "wb") as f:
        f.write(record.tobytes())
        f.write(np.ascontiguousarray(u.values, dtype=VALUE_DTYPE).tobytes())
    logger.debug("wrote field %s (%dx%d)", path, h.nr + 1, h.nz + 1)
    return path


def read_field(path: Union[str, Path]) -> Tuple[FieldHeader, np.ndarray]:
    """Header and raw values of a binary field dump."""
    raw = Path(path).read_bytes()
    if len(raw) < HEADER_DTYPE.itemsize:
        raise InputError(f"{path}: truncated header")
    rec = np.frombuffer(raw[:HEADER_DTYPE.itemsize], dtype=HEADER_DTYPE)[0]
    header = FieldHeader(
        n=int(rec["n"]), a=float(rec["a"]), b_eps=float(rec["b_eps"]),
        nr=int(rec["nr"]), nz=int(rec["nz"]), eps=float(rec["eps"]), k=float(rec["k"]),
    )
    body = raw[HEADER_DTYPE.itemsize:]
    expected = header.shape[0] * header.shape[1] * VALUE_DTYPE.itemsize
    if len(body) != expected:
        raise InputError(f"{path}: expected {expected} value bytes, found {len(body)}")
    values = np.frombuffer(body, dtype=VALUE_DTYPE).reshape(header.shape).copy()
    return header, values


def grid_from_header(header: FieldHeader) -> AxiGrid:
    spec = build_potential(header.eps)
    profile = heteroclinic_build(spec)
    grid = build_domain(header.n, header.a, header.k, header.eps, header.nr, header.nz, spec, profile)
    if abs(grid.b_eps - header.b_eps) > 1e-9 * max(1.0, header.b_eps):
        raise InputError(f"dump b_eps={header.b_eps} does not match the rebuilt domain ({grid.b_eps})")
    return grid


def load_field(path: Union[str, Path], grid: Optional[AxiGrid] = None) -> Field:
    """Read a dump back as a Field, rebuilding the grid and its boundary data.

    Boundary data is attached when the domain admits one (z_cat > 2 + eps).
    """
    header, values = read_field(path)
    if grid is None:
        grid = grid_from_header(header)
    elif grid.shape != header.shape:
        raise InputError(f"dump shape {header.shape} does not match grid {grid.shape}")
    boundary = None
    if grid.z_cat - grid.eps > 2.0:
        w = subsolution_build(grid.spec, grid.profile, grid.z_cat - grid.eps, grid.delta_eps)
        boundary = boundary_omega(grid, w)
    return Field(grid, values, boundary)


def write_field_csv(u: Field, path: Union[str, Path]) -> Path:
    """Snapshot as r,z,u rows in node order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rr, zz = u.grid.mesh()
    table = np.column_stack([rr.ravel(), zz.ravel(), u.values.ravel()])
    np.savetxt(path, table, delimiter=",", header="r,z,u", comments="", fmt="%.17g")
    return path
