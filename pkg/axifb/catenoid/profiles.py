"""n-dimensional catenoid profiles.

The unit catenoid (neck radius 1) is parametrized by
    r(s) = cosh((n-2)s)^(1/(n-2)),  z(s) = int_0^s cosh((n-2)t)^(-(n-3)/(n-2)) dt,
which for n = 3 reduces to r = cosh z. Every other profile is a rescaling.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from axifb.errors import DomainError, InputError

logger = logging.getLogger(__name__)

Real = Union[float, np.ndarray]

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)
_NECK_TOL = 1e-12


class CatenoidConvention(Enum):
    """How the scale parameter of a catenoid is read."""
    CENTERED = "centered"
    ASYMPTOTIC = "asymptotic"

    def __str__(self):
        return self.value


def _log_cosh(x: np.ndarray) -> np.ndarray:
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x)) - np.log(2.0)


def _height_density(s: np.ndarray, n: int) -> np.ndarray:
    """dz/ds of the unit catenoid."""
    m = n - 2
    return np.exp(-(n - 3) / m * _log_cosh(m * s))


class _UnitTable:
    """Cumulative height of the unit catenoid on an s-grid (n > 3)."""

    def __init__(self, n: int):
        self.n = n
        self.s_max = 40.0 / (n - 3)
        self.edges = np.linspace(0.0, self.s_max, 8001)
        mid = 0.5 * (self.edges[1:] + self.edges[:-1])
        half = 0.5 * (self.edges[1:] - self.edges[:-1])
        nodes = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
        panels = (half[:, None] * _GAUSS_WEIGHTS[None, :] * _height_density(nodes, n)).sum(axis=1)
        self.cumulative = np.concatenate([[0.0], np.cumsum(panels)])
        tail, _ = integrate.quad(
            lambda t: float(_height_density(np.array([t]), n)[0]),
            self.s_max, np.inf, epsabs=0.0, epsrel=1e-12,
        )
        self.limit = float(self.cumulative[-1] + tail)

    def height(self, s: np.ndarray) -> np.ndarray:
        """z(s) with a Gauss-Legendre correction from the nearest grid node."""
        s = np.asarray(s, dtype=float)
        inside = s <= self.s_max
        out = np.empty_like(s)
        si = s[inside]
        idx = np.clip(np.searchsorted(self.edges, si, side="right") - 1, 0, len(self.edges) - 2)
        base = self.edges[idx]
        half = 0.5 * (si - base)
        nodes = base[:, None] + half[:, None] * (1.0 + _GAUSS_NODES[None, :])
        corr = (half[:, None] * _GAUSS_WEIGHTS[None, :] * _height_density(nodes, self.n)).sum(axis=1)
        out[inside] = self.cumulative[idx] + corr
        # beyond s_max the remaining height is below double precision
        out[~inside] = self.limit
        return out

    def invert(self, z: np.ndarray) -> np.ndarray:
        """s with height(s) = z, for 0 <= z < limit."""
        z = np.asarray(z, dtype=float)
        s = np.interp(z, self.cumulative, self.edges)
        for _ in range(6):
            s = s - (self.height(s) - z) / _height_density(s, self.n)
            s = np.clip(s, 0.0, None)
        return s


@lru_cache(maxsize=16)
def _unit_table(n: int) -> _UnitTable:
    return _UnitTable(n)


def asymptotic_height(n: int) -> float:
    """c_n: limiting height of the unit catenoid (finite for n > 3)."""
    if n <= 3:
        raise DomainError("the catenoid height is unbounded for n = 3")
    return _unit_table(n).limit


@dataclass(frozen=True)
class Catenoid:
    """A catenoid of dimension ``dim`` read through ``convention``.

    Centered: ``scale`` is the neck radius. Asymptotic: ``scale`` is the
    limiting height (n > 3 only). In both cases the neck sits at z = 0.
    """
    dim: int
    scale: float
    convention: CatenoidConvention = CatenoidConvention.CENTERED

    def __post_init__(self):
        if self.dim < 3:
            raise DomainError(f"catenoids need n >= 3, got {self.dim}")
        if not self.scale > 0.0:
            raise DomainError(f"catenoid scale must be positive, got {self.scale}")
        if self.convention == CatenoidConvention.ASYMPTOTIC and self.dim == 3:
            raise DomainError("the asymptotic convention needs n > 3")

    @property
    def neck(self) -> float:
        if self.convention == CatenoidConvention.CENTERED:
            return self.scale
        return self.scale / asymptotic_height(self.dim)

    @property
    def height_limit(self) -> float:
        if self.dim == 3:
            return np.inf
        return self.neck * asymptotic_height(self.dim)

    def scaled(self, rho: float) -> "Catenoid":
        """The catenoid obtained by multiplying r and z by rho."""
        return Catenoid(self.dim, self.scale * rho, self.convention)


def _as_output(template: Real, out: np.ndarray) -> Real:
    return float(out[0]) if np.ndim(template) == 0 else out.reshape(np.shape(template))


def _parameter(c: Catenoid, r: np.ndarray) -> np.ndarray:
    m = c.dim - 2
    x = np.maximum(r / c.neck, 1.0)
    return np.arccosh(x ** m) / m


def catenoid_eval(c: Catenoid, r: Real) -> Real:
    """Height z(r) on the upper branch; r must be at least the neck radius."""
    arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(arr < c.neck * (1.0 - _NECK_TOL)):
        raise DomainError(f"r below the catenoid neck {c.neck:.6g}")
    s = _parameter(c, arr)
    if c.dim == 3:
        out = c.neck * s
    else:
        out = c.neck * _unit_table(c.dim).height(s)
    return _as_output(r, out)


def catenoid_inverse(c: Catenoid, z: Real) -> Real:
    """Radius r(z); symmetric about the neck, so negative z is allowed."""
    arr = np.atleast_1d(np.asarray(z, dtype=float))
    az = np.abs(arr)
    if np.any(az >= c.height_limit):
        raise DomainError("height at or beyond the catenoid limit")
    m = c.dim - 2
    if c.dim == 3:
        s = az / c.neck
    else:
        s = _unit_table(c.dim).invert(az / c.neck)
    out = c.neck * np.exp(_log_cosh(m * s) / m)
    return _as_output(z, out)


def catenoid_point(c: Catenoid, s: Real) -> Tuple[Real, Real]:
    """(r, z) at parameter s of the parametrization."""
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    m = c.dim - 2
    r = c.neck * np.exp(_log_cosh(m * arr) / m)
    if c.dim == 3:
        z = c.neck * arr
    else:
        z = np.sign(arr) * c.neck * _unit_table(c.dim).height(np.abs(arr))
    return _as_output(s, r), _as_output(s, z)


def catenoid_slope(c: Catenoid, r: Real) -> Real:
    """dz/dr = 1 / sqrt((r/neck)^(2(n-2)) - 1); infinite at the neck."""
    arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(arr < c.neck * (1.0 - _NECK_TOL)):
        raise DomainError(f"r below the catenoid neck {c.neck:.6g}")
    m = c.dim - 2
    excess = np.maximum(np.power(arr / c.neck, 2 * m) - 1.0, 0.0)
    with np.errstate(divide="ignore"):
        out = 1.0 / np.sqrt(excess)
    return _as_output(r, out)


def ode_residual(c: Catenoid, z: Real, h: Optional[float] = None) -> Real:
    """Relative residual phi phi''/(1+phi'^2) - (n-2) of r = phi(z).

    Derivatives come from five-point stencils of ``catenoid_inverse``.
    """
    arr = np.atleast_1d(np.asarray(z, dtype=float))
    h = 1e-3 * c.neck if h is None else h
    f = [catenoid_inverse(c, arr + k * h) for k in (-2, -1, 0, 1, 2)]
    d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h)
    d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
    out = f[2] * d2 / (1.0 + d1 * d1) - (c.dim - 2)
    return _as_output(z, out)


def fit_asymptote_constants(n: int, r_lo: float = 50.0, r_hi: float = 400.0) -> Tuple[float, float]:
    """Least-squares (c_n, c'_n) in z ~ c_n - c'_n r^(3-n) for the unit catenoid."""
    if n <= 3:
        raise DomainError("the power-law asymptote needs n > 3")
    c = Catenoid(n, 1.0)
    r = np.geomspace(r_lo, r_hi, 200)
    z = catenoid_eval(c, r)
    design = np.column_stack([np.ones_like(r), -np.power(r, 3.0 - n)])
    (c_n, c_prime), *_ = np.linalg.lstsq(design, z, rcond=None)
    logger.debug("asymptote n=%d: c_n=%.12f c'_n=%.12f", n, c_n, c_prime)
    return float(c_n), float(c_prime)


def catenoid_through(
    p1: Tuple[float, float], p2: Tuple[float, float]
) -> Optional[Tuple[float, float]]:
    """Three-dimensional catenoid z = sigma arccosh(r/sigma) + d through two points.

    Returns (sigma, d) for the least-area solution, or None when the points
    cannot be joined by a graph of this family.
    """
    (r1, z1), (r2, z2) = sorted([tuple(p1), tuple(p2)])
    if r1 <= 0.0 or r2 <= r1:
        raise InputError("catenoid_through needs 0 < r1 < r2")
    rise = z2 - z1
    if rise <= 0.0:
        return None

    def gain(sigma: float) -> float:
        return sigma * (np.arccosh(r2 / sigma) - np.arccosh(r1 / sigma)) - rise

    sigmas = np.geomspace(1e-8 * r1, r1, 400)
    values = np.array([gain(s) for s in sigmas])
    roots = []
    for i in np.nonzero(np.sign(values[:-1]) != np.sign(values[1:]))[0]:
        roots.append(brentq(gain, sigmas[i], sigmas[i + 1], xtol=1e-14))
    if not roots:
        return None

    def area(sigma: float) -> float:
        s1, s2 = np.arccosh(r1 / sigma), np.arccosh(r2 / sigma)
        return sigma ** 2 * ((s2 - s1) / 2.0 + (np.sinh(2 * s2) - np.sinh(2 * s1)) / 4.0)

    sigma = min(roots, key=area)
    return float(sigma), float(z1 - sigma * np.arccosh(r1 / sigma))
