"""Planar graphs, weighted areas and mean curvature."""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from axifb.catenoid.profiles import (
    Catenoid,
    _log_cosh,
    _parameter,
    catenoid_eval,
    catenoid_slope,
)
from axifb.errors import InputError

logger = logging.getLogger(__name__)

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)
_SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class AnalyticGraph:
    """A graph z = value(r) with an exact derivative."""
    value: Callable[[np.ndarray], np.ndarray]
    slope: Callable[[np.ndarray], np.ndarray]
    label: str = "analytic"
    catenoid: Optional[Catenoid] = None

    def scaled(self, rho: float) -> "AnalyticGraph":
        value, slope = self.value, self.slope
        return AnalyticGraph(
            value=lambda r: rho * np.asarray(value(np.asarray(r) / rho)),
            slope=lambda r: np.asarray(slope(np.asarray(r) / rho)),
            label=f"{self.label}*{rho:g}",
            catenoid=self.catenoid.scaled(rho) if self.catenoid is not None else None,
        )


def catenoid_graph(c: Catenoid, shift: float = 0.0) -> AnalyticGraph:
    """Upper branch of ``c`` lifted by ``shift`` as an analytic graph."""
    return AnalyticGraph(
        value=lambda r: np.asarray(catenoid_eval(c, r)) + shift,
        slope=lambda r: np.asarray(catenoid_slope(c, r)),
        label=f"catenoid(n={c.dim}, {c.convention}={c.scale:g})",
        catenoid=c if shift == 0.0 else None,
    )


@dataclass
class PlanarCurve:
    """Samples (r_i, z_i) of a graph over strictly increasing r_i > 0."""
    r: np.ndarray
    z: np.ndarray
    analytic: Optional[AnalyticGraph] = None

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.z = np.asarray(self.z, dtype=float)
        if self.r.ndim != 1 or self.r.shape != self.z.shape or len(self.r) < 2:
            raise InputError("curve needs matching 1-D sample arrays of length >= 2")
        if not (np.all(np.isfinite(self.r)) and np.all(np.isfinite(self.z))):
            raise InputError("curve samples must be finite")
        if np.any(self.r <= 0.0):
            raise InputError("curve radii must be positive")
        if np.any(np.diff(self.r) <= 0.0):
            raise InputError("curve radii must be strictly increasing")

    @classmethod
    def from_graph(cls, graph: AnalyticGraph, r: np.ndarray) -> "PlanarCurve":
        r = np.asarray(r, dtype=float)
        return cls(r=r, z=np.asarray(graph.value(r), dtype=float), analytic=graph)

    def slope_at(self, r: np.ndarray) -> np.ndarray:
        if self.analytic is not None:
            return np.asarray(self.analytic.slope(r), dtype=float)
        return PchipInterpolator(self.r, self.z).derivative()(r)

    def value_at(self, r: np.ndarray) -> np.ndarray:
        if self.analytic is not None:
            return np.asarray(self.analytic.value(r), dtype=float)
        return PchipInterpolator(self.r, self.z)(r)

    def scaled(self, rho: float) -> "PlanarCurve":
        graph = self.analytic.scaled(rho) if self.analytic is not None else None
        return PlanarCurve(r=rho * self.r, z=rho * self.z, analytic=graph)


def _graded_edges(r1: float, r2: float, panels: int = 400) -> np.ndarray:
    """Panel edges refined geometrically toward r1, where necks sit."""
    offsets = np.geomspace(1e-12, 1.0, panels)
    return np.concatenate([[r1], r1 + (r2 - r1) * offsets])


def gauss_nodes(edges: np.ndarray):
    """Quadrature nodes and weights on the panels delimited by ``edges``."""
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
    weights = half[:, None] * _GAUSS_WEIGHTS[None, :]
    return nodes.ravel(), weights.ravel()


def excess_density(slope: np.ndarray, r: np.ndarray, n: int) -> np.ndarray:
    """(sqrt(1 + p^2) - 1) r^(n-2), written without cancellation."""
    p2 = slope * slope
    with np.errstate(invalid="ignore"):
        out = p2 / (np.sqrt(1.0 + p2) + 1.0)
    out = np.where(np.isinf(slope), np.abs(slope), out)
    return out * np.power(r, n - 2)


def flat_area(r1: float, r2: float, n: int) -> float:
    """Weighted area of a horizontal segment."""
    return (r2 ** (n - 1) - r1 ** (n - 1)) / (n - 1)


def _check_window(curve: PlanarCurve, r1: float, r2: float) -> None:
    tol = _SUPPORT_TOL * max(1.0, abs(curve.r[-1]))
    if not (r1 < r2):
        raise InputError("weighted area needs r1 < r2")
    if r1 < curve.r[0] - tol or r2 > curve.r[-1] + tol:
        raise InputError(
            f"[{r1:g}, {r2:g}] is outside the curve support [{curve.r[0]:g}, {curve.r[-1]:g}]"
        )


def catenoid_area(c: Catenoid, r1: float, r2: float) -> float:
    """Weighted area of the catenoid graph between radii r1 < r2 (r1 >= neck).

    Integrated in the parameter s, where the integrand
    neck^(n-1) cosh((n-2)s)^((n-1)/(n-2)) is smooth.
    """
    s1, s2 = (float(v) for v in _parameter(c, np.array([r1, r2], dtype=float)))
    lam = c.neck
    if c.dim == 3:
        prim = lambda s: s / 2.0 + np.sinh(2.0 * s) / 4.0  # noqa: E731
        return lam ** 2 * (prim(s2) - prim(s1))
    m = c.dim - 2
    power = (c.dim - 1) / m

    def density(s):
        return np.exp(power * _log_cosh(m * s))

    value, _ = integrate.quad(density, s1, s2, epsabs=0.0, epsrel=1e-13, limit=400)
    return lam ** (c.dim - 1) * value


def catenoid_area_excess(c: Catenoid, a: float) -> float:
    """Weighted area from the neck to ``a`` minus a^(n-1)/(n-1), cancellation-free."""
    n = c.dim
    m = n - 2
    lam = c.neck
    y = a / lam
    if y <= 1.0:
        raise InputError("outer radius must exceed the neck")
    p = 1.0 / (2.0 * m)
    big_x = np.sqrt(np.expm1(2.0 * m * np.log(y)))

    def gap(x):
        if x <= 1.0:
            return (1.0 + x * x) ** p - x ** (2.0 * p)
        return x ** (2.0 * p) * np.expm1(p * np.log1p(1.0 / (x * x)))

    near, _ = integrate.quad(gap, 0.0, min(1.0, big_x), epsabs=0.0, epsrel=1e-13, limit=200)
    far = 0.0
    if big_x > 1.0:
        far, _ = integrate.quad(
            lambda u: gap(np.exp(u)) * np.exp(u), 0.0, np.log(big_x),
            epsabs=0.0, epsrel=1e-13, limit=400,
        )
    ratio = y ** (n - 1) * np.expm1((n - 1) / (2.0 * m) * np.log1p(-y ** (-2.0 * m)))
    return lam ** (n - 1) * ((near + far) / m + ratio / (n - 1))


def weighted_area_excess(curve: PlanarCurve, r1: float, r2: float, n: int) -> float:
    """int_{r1}^{r2} (sqrt(1 + f'^2) - 1) r^(n-2) dr."""
    _check_window(curve, r1, r2)
    if curve.analytic is not None:
        edges = _graded_edges(r1, r2)
    else:
        inner = curve.r[(curve.r > r1) & (curve.r < r2)]
        edges = np.concatenate([[r1], inner, [r2]])
    nodes, weights = gauss_nodes(edges)
    return float(np.sum(weights * excess_density(curve.slope_at(nodes), nodes, n)))


def weighted_area(curve: PlanarCurve, r1: float, r2: float, n: int) -> float:
    """Weighted area int_{r1}^{r2} sqrt(1 + f'^2) r^(n-2) dr.

    Args:
        curve: Sampled or analytic graph
        r1: Lower radius inside the support
        r2: Upper radius inside the support
        n: Ambient dimension

    Returns:
        The weighted area (angular factor omitted)
    """
    _check_window(curve, r1, r2)
    graph = curve.analytic
    if graph is not None and graph.catenoid is not None and graph.catenoid.dim == n:
        return catenoid_area(graph.catenoid, r1, r2)
    return flat_area(r1, r2, n) + weighted_area_excess(curve, r1, r2, n)


def _curve_slopes(curve: PlanarCurve) -> np.ndarray:
    if curve.analytic is not None:
        return curve.slope_at(curve.r)
    return np.gradient(curve.z, curve.r, edge_order=2)


def flux_profile(curve: PlanarCurve, n: int) -> np.ndarray:
    """r^(n-2) p' / sqrt(1 + p'^2) at every sample."""
    p = _curve_slopes(curve)
    return np.power(curve.r, n - 2) * p / np.sqrt(1.0 + p * p)


def mean_curvature(curve: PlanarCurve, n: int, normal: str = "down") -> np.ndarray:
    """Mean curvature at interior samples from the divergence form.

    Args:
        curve: At least five samples
        n: Ambient dimension
        normal: "down" (the orientation of a lower free boundary, where
            the sign is nonnegative) or "up"

    Returns:
        Array of length len(curve.r) - 2
    """
    if len(curve.r) < 5:
        raise InputError("mean curvature needs at least 5 samples")
    if normal not in ("down", "up"):
        raise InputError(f"unknown normal orientation {normal!r}")
    flux = flux_profile(curve, n)
    div = np.gradient(flux, curve.r, edge_order=2) / np.power(curve.r, n - 2)
    sign = -1.0 if normal == "down" else 1.0
    return sign * div[1:-1]
