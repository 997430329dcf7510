"""CSV output for one-dimensional profiles and extracted curves."""

import json
import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from axifb.errors import InputError
from axifb.potential import HeteroclinicProfile

logger = logging.getLogger(__name__)


def write_profile_csv(profile: HeteroclinicProfile, path: Union[str, Path], extra: Optional[dict] = None) -> Path:
    """Profile samples x,H,Hp behind a ``# {json}`` line holding eps and t_eps."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {"eps": profile.eps, "t_eps": profile.t_eps, "tail_coeff": profile.tail_coeff}
    meta.update(extra or {})
    with open(path, "w") as f:
        f.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        f.write("x,H,Hp\n")
        np.savetxt(f, profile.samples, delimiter=",", fmt="%.17g")
    return path


def read_profile_csv(path: Union[str, Path]) -> Tuple[dict, np.ndarray]:
    with open(path) as f:
        first = f.readline()
        if not first.startswith("# "):
            raise InputError(f"{path}: missing '# {{json}}' header line")
        meta = json.loads(first[2:])
        samples = np.loadtxt(f, delimiter=",", skiprows=1, ndmin=2)
    return meta, samples


def write_curve_csv(
    r: np.ndarray,
    z: np.ndarray,
    path: Union[str, Path],
    curvature: Optional[np.ndarray] = None,
) -> Path:
    """Curve samples as r,z or r,z,H; ``curvature`` is padded with NaN at the ends."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    r, z = np.asarray(r, dtype=float), np.asarray(z, dtype=float)
    if r.shape != z.shape:
        raise InputError("r and z must have the same length")
    columns, header = [r, z], "r,z"
    if curvature is not None:
        h = np.full_like(r, np.nan)
        curvature = np.asarray(curvature, dtype=float)
        offset = (len(r) - len(curvature)) // 2
        h[offset:offset + len(curvature)] = curvature
        columns.append(h)
        header += ",H"
    np.savetxt(path, np.column_stack(columns), delimiter=",", header=header, comments="", fmt="%.17g")
    return path


def read_curve_csv(path: Union[str, Path]) -> Tuple[np.ndarray, np.ndarray]:
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if table.shape[1] < 2:
        raise InputError(f"{path}: need at least r and z columns")
    return table[:, 0], table[:, 1]
