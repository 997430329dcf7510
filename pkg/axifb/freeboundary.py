"""Free-boundary extraction, asymptotic fits and the blow-up rescaling.

The regularized transition layer has a known shape, so a sharp boundary is
estimated from one finite-eps field: a crossing of the level 1 - theta sits
at abscissa x(1 - theta) from the layer center, and the eps -> 0 boundary
sits at distance 1 from the center.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from axifb.catenoid import PlanarCurve
from axifb.errors import BlowupError, DomainError, FitError, InputError
from axifb.grid import Field, gradient_components, gradient_magnitude

logger = logging.getLogger(__name__)

MIN_FIT_SAMPLES = 10
MAX_CONDITION = 1e10
GRADIENT_LEVEL_EPS = 4.0


class Side(Enum):
    """F+ (where u reaches +1) or F- (where u reaches -1)."""
    PLUS = "plus"
    MINUS = "minus"

    def __str__(self):
        return self.value


class FitModel(Enum):
    LOG = "log"
    POWER = "power"

    def __str__(self):
        return self.value


@dataclass
class BoundaryCurve:
    side: Side
    r: np.ndarray
    z: np.ndarray
    theta: float
    a: float
    sharp: bool = True

    def __len__(self):
        return len(self.r)

    def to_planar(self) -> PlanarCurve:
        keep = self.r > 0.0
        return PlanarCurve(r=self.r[keep], z=self.z[keep])

    def window(self, r_lo: float, r_hi: float) -> Tuple[np.ndarray, np.ndarray]:
        keep = (self.r >= r_lo) & (self.r <= r_hi)
        return self.r[keep], self.z[keep]


@dataclass
class AsymptoticFit:
    model: FitModel
    params: Dict[str, float]
    window: Tuple[float, float]
    rms: float
    n_samples: int
    condition: float

    def to_dict(self) -> dict:
        return {
            "model": str(self.model),
            "params": self.params,
            "window": list(self.window),
            "rms": self.rms,
            "n_samples": self.n_samples,
            "condition": self.condition,
        }


@dataclass
class BlowupResult:
    """psi(X) = (u(rho X) + 1) / rho sampled on [0, r_max] x [0, z_max] in X."""
    rho: float
    window_scale: float
    x_r: np.ndarray
    x_z: np.ndarray
    psi: np.ndarray
    boundary_r: np.ndarray
    boundary_z: np.ndarray
    gradient_mean: float
    gradient_min: float
    gradient_max: float
    n_boundary: int
    gradient_level: float = field(default=0.0)

    def stats(self) -> dict:
        return {
            "rho": self.rho,
            "window_scale": self.window_scale,
            "gradient_mean": self.gradient_mean,
            "gradient_min": self.gradient_min,
            "gradient_max": self.gradient_max,
            "n_boundary": self.n_boundary,
            "gradient_level": self.gradient_level,
        }


def _crossings(u: Field, level: float, first_from_top: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Per column, the z where u crosses ``level`` by linear interpolation."""
    grid = u.grid
    rs, zs = [], []
    for i in range(grid.nr + 1):
        col = u.values[i]
        diff = col - level
        idx = np.nonzero(diff[:-1] * diff[1:] <= 0.0)[0]
        idx = idx[(diff[idx] != diff[idx + 1])]
        if len(idx) == 0:
            continue
        j = int(idx[-1] if first_from_top else idx[0])
        t = diff[j] / (diff[j] - diff[j + 1])
        rs.append(grid.r[i])
        zs.append(grid.z[j] + t * grid.hz)
    return np.array(rs), np.array(zs)


def extract(u: Field, side: Side, theta: Optional[float] = None, sharp: bool = True) -> BoundaryCurve:
    """Boundary curve of one side from the crossings of u = +-(1 - theta).

    Args:
        u: Field monotone in z
        side: Which free boundary
        theta: Extraction offset in (0, 1), default eps/2
        sharp: Shift crossings to the estimated eps -> 0 boundary

    Returns:
        BoundaryCurve; columns without a crossing are omitted
    """
    grid = u.grid
    theta = 0.5 * grid.eps if theta is None else theta
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    sign = 1.0 if side == Side.PLUS else -1.0
    r, z = _crossings(u, sign * (1.0 - theta), first_from_top=side == Side.PLUS)
    if sharp and len(z):
        offset = 1.0 - float(grid.profile.abscissa(1.0 - theta))
        z = z + sign * offset
    logger.debug("extracted %s boundary: %d columns (theta=%g)", side, len(r), theta)
    return BoundaryCurve(side=side, r=r, z=z, theta=theta, a=grid.a, sharp=sharp)


def default_window(a: float, lo: float = 0.3, hi: float = 0.8) -> Tuple[float, float]:
    return lo * a, hi * a


def fit_asymptote(
    curve: BoundaryCurve,
    n: int,
    window: Optional[Tuple[float, float]] = None,
    model: Optional[FitModel] = None,
) -> AsymptoticFit:
    """Least squares of z = k ln r + b (n = 3) or z = c - c' r^(3-n) (n > 3)."""
    model = model if model is not None else (FitModel.LOG if n == 3 else FitModel.POWER)
    if model == FitModel.POWER and n <= 3:
        raise FitError("the power-law model needs n > 3")
    window = window if window is not None else default_window(curve.a)
    r, z = curve.window(*window)
    if len(r) < MIN_FIT_SAMPLES:
        raise FitError(f"only {len(r)} samples in window {window}, need {MIN_FIT_SAMPLES}")
    if model == FitModel.LOG:
        design = np.column_stack([np.log(r), np.ones_like(r)])
        names = ("k", "b")
    else:
        design = np.column_stack([np.ones_like(r), -np.power(r, 3.0 - n)])
        names = ("c", "c_prime")
    cond = float(np.linalg.cond(design))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise FitError(f"fit is ill-conditioned (condition number {cond:.3g}); widen the window")
    coeffs, *_ = np.linalg.lstsq(design, z, rcond=None)
    rms = float(np.sqrt(np.mean((design @ coeffs - z) ** 2)))
    params = {name: float(v) for name, v in zip(names, coeffs)}
    if model == FitModel.POWER:
        params["exponent"] = float(3 - n)
    logger.info("%s fit on [%g, %g]: %s rms=%.3e", model, window[0], window[1], params, rms)
    return AsymptoticFit(model=model, params=params, window=tuple(window), rms=rms,
                         n_samples=len(r), condition=cond)


def rho_from_curve(curve: BoundaryCurve) -> Tuple[float, float, float]:
    """(rho, r, z) of the sample closest to the origin; ties go to the smallest r."""
    if len(curve) == 0:
        raise BlowupError("the F- boundary has no samples")
    dist = np.hypot(curve.r, curve.z)
    best = np.nonzero(dist <= dist.min() * (1.0 + 1e-12))[0]
    i = int(best[np.argmin(curve.r[best])])
    return float(dist[i]), float(curve.r[i]), float(curve.z[i])


def blowup(u: Field, window_scale: float = 4.0, theta: Optional[float] = None) -> BlowupResult:
    """Rescale u around the origin by the distance of its F- boundary.

    Boundary gradients are sampled on the level u = -(1 - 4 eps), where the
    transition profile has reached its bulk slope.
    """
    grid = u.grid
    if window_scale <= 0.0:
        raise InputError(f"window scale must be positive, got {window_scale}")
    minus = extract(u, Side.MINUS, theta)
    rho, _, _ = rho_from_curve(minus)
    if rho < 4.0 * grid.hr:
        raise BlowupError(
            f"rho={rho:.4g} spans fewer than 4 cells (hr={grid.hr:.4g}); refine the grid or reduce k"
        )
    r_max = min(window_scale * rho, grid.a)
    z_max = min(window_scale * rho, grid.b_eps)
    r_axis = np.linspace(0.0, r_max, max(int(np.ceil(r_max / grid.hr)) + 1, 2))
    z_axis = np.linspace(0.0, z_max, max(int(np.ceil(z_max / grid.hz)) + 1, 2))
    interp = RegularGridInterpolator((grid.r, grid.z), u.values, method="linear")
    rr, zz = np.meshgrid(r_axis, z_axis, indexing="ij")
    samples = interp(np.column_stack([rr.ravel(), zz.ravel()])).reshape(rr.shape)
    psi = (samples + 1.0) / rho

    theta_grad = min(GRADIENT_LEVEL_EPS * grid.eps, 0.999)
    layer = extract(u, Side.MINUS, theta_grad, sharp=False)
    inside = (layer.r <= r_max) & (layer.z <= z_max)
    if not np.any(inside):
        raise BlowupError("no boundary samples inside the blow-up window")
    du_dr, du_dz = gradient_components(u)
    points = np.column_stack([layer.r[inside], layer.z[inside]])
    gr = RegularGridInterpolator((grid.r, grid.z), du_dr)(points)
    gz = RegularGridInterpolator((grid.r, grid.z), du_dz)(points)
    # grad psi(X) = grad u(rho X)
    grad = np.hypot(gr, gz)

    result = BlowupResult(
        rho=rho,
        window_scale=window_scale,
        x_r=r_axis / rho,
        x_z=z_axis / rho,
        psi=psi,
        boundary_r=minus.r[minus.r <= r_max] / rho,
        boundary_z=minus.z[minus.r <= r_max] / rho,
        gradient_mean=float(np.mean(grad)),
        gradient_min=float(np.min(grad)),
        gradient_max=float(np.max(grad)),
        n_boundary=int(np.sum(inside)),
        gradient_level=-(1.0 - theta_grad),
    )
    logger.info("blow-up rho=%.4g: |grad psi| mean %.4f on %d samples", rho, result.gradient_mean, result.n_boundary)
    return result


def theorem_shape_checks(result: BlowupResult, n: int) -> dict:
    """Monotonicity signs of psi, the g'(r) r^(n-2) trend and g(1)."""
    hx = result.x_r[1] - result.x_r[0]
    hz = result.x_z[1] - result.x_z[0]
    dpsi_dr, dpsi_dz = np.gradient(result.psi, result.x_r, result.x_z, edge_order=2)
    positive = (result.psi > 1e-9) & (result.x_z[None, :] > 0.0)
    checks = {
        "min_dpsi_dz": float(np.min(dpsi_dz[positive])) if np.any(positive) else float("nan"),
        "max_dpsi_dr": float(np.max(dpsi_dr[positive])) if np.any(positive) else float("nan"),
        "tolerance": float(max(hx, hz)),
    }

    r, g = result.boundary_r, result.boundary_z
    keep = r > 0.0
    r, g = r[keep], g[keep]
    if len(r) >= 5:
        flux = np.gradient(g, r, edge_order=2) * np.power(r, n - 2)
        third = max(len(r) // 3, 1)
        middle = float(np.max(np.abs(flux[third:2 * third]))) if 2 * third > third else float("nan")
        outer = float(np.max(np.abs(flux[2 * third:])))
        checks["flux_middle"] = middle
        checks["flux_outer"] = outer
        checks["flux_bounded"] = bool(np.isfinite(outer) and outer <= 2.0 * max(middle, 1e-12) + 1.0)
    else:
        checks["flux_bounded"] = False
    if len(r) >= 2 and r[0] <= 1.0 <= r[-1]:
        checks["g_at_1"] = float(np.interp(1.0, r, g))
    else:
        checks["g_at_1"] = float("nan")
    checks["monotone_ok"] = bool(
        checks["min_dpsi_dz"] >= -checks["tolerance"] and checks["max_dpsi_dr"] <= checks["tolerance"]
    )
    return checks


def separation(u: Field, theta: Optional[float] = None, window: Optional[Tuple[float, float]] = None) -> float:
    """Mean of f_1 - f_2 over the columns both boundaries share inside the window."""
    grid = u.grid
    window = window if window is not None else default_window(grid.a)
    plus = extract(u, Side.PLUS, theta)
    minus = extract(u, Side.MINUS, theta)
    common, ip, im = np.intersect1d(plus.r, minus.r, return_indices=True)
    keep = (common >= window[0]) & (common <= window[1])
    if not np.any(keep):
        raise FitError("the two boundaries share no columns in the window")
    return float(np.mean(plus.z[ip][keep] - minus.z[im][keep]))


def max_interior_gradient(u: Field, theta: Optional[float] = None) -> float:
    """max |grad u| over {|u| < 1 - theta} (default theta = eps/2)."""
    theta = 0.5 * u.grid.eps if theta is None else theta
    layer = np.abs(u.values) < 1.0 - theta
    if not np.any(layer):
        return 0.0
    return float(np.max(gradient_magnitude(u)[layer]))
