"""Level sets of discrete fields, signed distances and the coarea lower bound."""

import logging
from typing import List

import numpy as np
from scipy.spatial import cKDTree
from skimage import measure

from axifb.errors import DomainError, InputError
from axifb.grid.domain import AxiGrid, Field
from axifb.potential import feps_eval

logger = logging.getLogger(__name__)

# candidate segments per node in signed_distance
NEAREST_SEGMENTS = 32


def level_contours(u: Field, s: float) -> List[np.ndarray]:
    """Marching-squares polylines of {u = s} as arrays of (r, z) points."""
    if not abs(s) < 1.0:
        raise DomainError(f"level must satisfy |s| < 1, got {s}")
    grid = u.grid
    out = []
    for contour in measure.find_contours(u.values, level=s):
        out.append(np.column_stack([contour[:, 0] * grid.hr, contour[:, 1] * grid.hz]))
    return out


def polyline_area(points: np.ndarray, n: int) -> float:
    """Weighted length of a polyline in the (r, z) plane, weight r^(n-2) at segment midpoints."""
    seg = np.diff(points, axis=0)
    mid_r = 0.5 * (points[1:, 0] + points[:-1, 0])
    return float(np.sum(np.hypot(seg[:, 0], seg[:, 1]) * np.power(mid_r, n - 2)))


def level_area(u: Field, s: float) -> float:
    """A(s): area of the revolved level set {u = s} without the angular factor.

    Returns 0 when the level set is empty.
    """
    n = u.grid.dim
    return sum(polyline_area(c, n) for c in level_contours(u, s) if len(c) > 1)


def coarea_lower_bound(
    u: Field,
    s_lo: float = -1.0,
    s_hi: float = 1.0,
    n_levels: int = 64,
) -> float:
    """2 int_{s_lo}^{s_hi} A(s) sqrt(F_eps(s)) ds by Gauss-Legendre in s.

    Args:
        u: Field
        s_lo: Lower level (>= -1)
        s_hi: Upper level (<= 1)
        n_levels: Number of quadrature levels

    Returns:
        The bound; E(u) is at least this value up to discretization error
    """
    if not (-1.0 <= s_lo < s_hi <= 1.0):
        raise DomainError(f"need -1 <= s_lo < s_hi <= 1, got [{s_lo}, {s_hi}]")
    x, w = np.polynomial.legendre.leggauss(n_levels)
    half = 0.5 * (s_hi - s_lo)
    levels = s_lo + half * (x + 1.0)
    areas = np.array([level_area(u, float(s)) for s in levels])
    roots = np.sqrt(feps_eval(levels, u.grid.spec))
    return float(2.0 * half * np.sum(w * areas * roots))


def min_level_area(u: Field, s_lo: float, s_hi: float, n_levels: int = 16) -> float:
    """Smallest A(s) over evenly spaced levels strictly inside (s_lo, s_hi)."""
    levels = np.linspace(s_lo, s_hi, n_levels + 2)[1:-1]
    return float(min(level_area(u, float(s)) for s in levels))


def densify(points: np.ndarray, spacing: float) -> np.ndarray:
    """Insert points along each segment so that no gap exceeds ``spacing``."""
    seg = np.diff(points, axis=0)
    counts = np.maximum(np.ceil(np.hypot(seg[:, 0], seg[:, 1]) / spacing).astype(int), 1)
    starts = np.repeat(points[:-1], counts, axis=0)
    steps = np.repeat(seg / counts[:, None], counts, axis=0)
    offsets = np.concatenate([np.arange(c) for c in counts])[:, None]
    return np.vstack([starts + offsets * steps, points[-1:]])


def signed_distance(grid: AxiGrid, points: np.ndarray, above: np.ndarray) -> np.ndarray:
    """Euclidean distance from every node to a polyline, positive where ``above``.

    The polyline is mirrored across the axis so distances near r = 0 see the
    reflected curve. Each node is projected onto the segments with the
    nearest midpoints, which is exact within the profile's transition width.
    """
    if points.ndim != 2 or points.shape[1] != 2 or len(points) < 2:
        raise InputError("polyline needs at least two (r, z) points")
    if above.shape != grid.shape:
        raise InputError("side mask must have the grid shape")
    dense = densify(points, 0.25 * min(grid.hr, grid.hz))
    mirrored = dense * np.array([-1.0, 1.0])
    starts = np.vstack([dense[:-1], mirrored[:-1]])
    seg = np.vstack([np.diff(dense, axis=0), np.diff(mirrored, axis=0)])
    rr, zz = grid.mesh()
    nodes = np.column_stack([rr.ravel(), zz.ravel()])
    k = min(NEAREST_SEGMENTS, len(starts))
    _, idx = cKDTree(starts + 0.5 * seg).query(nodes, k=k)
    idx = idx.reshape(len(nodes), k)
    rel = nodes[:, None, :] - starts[idx]
    d = seg[idx]
    length2 = np.sum(d * d, axis=-1)
    t = np.clip(np.sum(rel * d, axis=-1) / np.where(length2 > 0.0, length2, 1.0), 0.0, 1.0)
    gap = rel - t[..., None] * d
    dist = np.sqrt(np.min(np.sum(gap * gap, axis=-1), axis=1))
    return np.where(above, 1.0, -1.0) * dist.reshape(grid.shape)
