"""Finite-volume axisymmetric Laplacian and the discrete energy.

With edge stiffnesses K and nodal masses M the energy is

    E(u) = sum_edges K (u_p - u_q)^2 + sum_nodes M F_eps(u),

a midpoint quadrature of int (|grad u|^2 + F_eps(u)) r^(n-2) dr dz, and the
discrete Laplacian is -K u / M. The operator is therefore symmetric in the
M-weighted inner product and u_t = Lap u - F'(u)/2 is the exact gradient
flow of E.
"""

import logging

import numpy as np
from scipy import sparse
from scipy.interpolate import RegularGridInterpolator

from axifb.grid.domain import AxiGrid, Field
from axifb.potential import feps_deriv, feps_eval

logger = logging.getLogger(__name__)


def stiffness(grid: AxiGrid, values: np.ndarray) -> np.ndarray:
    """K u, the weighted sum of differences over the edges at every node."""
    out = np.zeros_like(values)
    flux = grid.kr * (values[1:, :] - values[:-1, :])
    out[:-1, :] -= flux
    out[1:, :] += flux
    flux = grid.kz * (values[:, 1:] - values[:, :-1])
    out[:, :-1] -= flux
    out[:, 1:] += flux
    return out


def stiffness_matrix(grid: AxiGrid) -> sparse.csr_matrix:
    """K as a sparse matrix over the nodes in row-major (r, z) order."""
    idx = np.arange(grid.shape[0] * grid.shape[1]).reshape(grid.shape)
    rows, cols, weights = [], [], []
    for p, q, w in (
        (idx[:-1, :], idx[1:, :], grid.kr),
        (idx[:, :-1], idx[:, 1:], grid.kz),
    ):
        p, q, w = p.ravel(), q.ravel(), w.ravel()
        rows += [p, q, p, q]
        cols += [p, q, q, p]
        weights += [w, w, -w, -w]
    size = idx.size
    return sparse.coo_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    ).tocsr()


def laplacian(grid: AxiGrid, values: np.ndarray) -> np.ndarray:
    """Discrete d_rr + (n-2)/r d_r + d_zz; (n-1) d_rr on the axis."""
    return -stiffness(grid, values) / grid.mass


def laplacian_diagonal(grid: AxiGrid) -> np.ndarray:
    """Magnitude of the diagonal of the discrete Laplacian at each node."""
    diag = np.zeros(grid.shape)
    diag[:-1, :] += grid.kr
    diag[1:, :] += grid.kr
    diag[:, :-1] += grid.kz
    diag[:, 1:] += grid.kz
    return diag / grid.mass


def apply_operator(u: Field) -> np.ndarray:
    """-Lap u + F'_eps(u)/2 at every node (Dirichlet nodes included)."""
    grid = u.grid
    return -laplacian(grid, u.values) + 0.5 * feps_deriv(u.values, grid.spec)


def gradient_energy(grid: AxiGrid, values: np.ndarray) -> float:
    dr = values[1:, :] - values[:-1, :]
    dz = values[:, 1:] - values[:, :-1]
    return float(np.sum(grid.kr * dr * dr) + np.sum(grid.kz * dz * dz))


def energy(u: Field) -> float:
    """E(u) without the angular factor."""
    grid = u.grid
    potential = float(np.sum(grid.mass * feps_eval(u.values, grid.spec)))
    return gradient_energy(grid, u.values) + potential


def residual_norm(u: Field) -> float:
    """int |Lap u - F'(u)/2|^2 r^(n-2) over the free nodes."""
    grid = u.grid
    res = apply_operator(u)
    return float(np.sum((grid.mass * res * res)[grid.free]))


def inner(grid: AxiGrid, u: np.ndarray, v: np.ndarray) -> float:
    """M-weighted inner product."""
    return float(np.sum(grid.mass * u * v))


def gradient_components(u: Field):
    """(d_r u, d_z u) by second-order central differences."""
    grid = u.grid
    return np.gradient(u.values, grid.r, grid.z, edge_order=2)


def gradient_magnitude(u: Field) -> np.ndarray:
    du_dr, du_dz = gradient_components(u)
    return np.hypot(du_dr, du_dz)


def field_at(u: Field, r, z) -> np.ndarray:
    """Bilinear interpolation of u at points inside the grid."""
    grid = u.grid
    interp = RegularGridInterpolator((grid.r, grid.z), u.values, method="linear")
    r, z = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
    points = np.column_stack([r.ravel(), z.ravel()])
    return interp(points).reshape(r.shape)


def lipschitz_estimate(u: Field) -> float:
    """Largest difference quotient over axial, radial and diagonal neighbours.

    Unlike central differences this never exceeds the Lipschitz constant of
    the field, so it is stable under pointwise max, min and convex
    combinations.
    """
    grid, v = u.grid, u.values
    diag = float(np.hypot(grid.hr, grid.hz))
    quotients = (
        np.abs(v[1:, :] - v[:-1, :]) / grid.hr,
        np.abs(v[:, 1:] - v[:, :-1]) / grid.hz,
        np.abs(v[1:, 1:] - v[:-1, :-1]) / diag,
        np.abs(v[1:, :-1] - v[:-1, 1:]) / diag,
    )
    return max(float(np.max(q)) for q in quotients)
