"""The regularized double-well family F_eps and its building blocks."""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P

from axifb.errors import ConstructionError, DomainError

logger = logging.getLogger(__name__)

Real = Union[float, np.ndarray]

# Degree-5 smoothstep S(x) = 10x^3 - 15x^4 + 6x^5, low-to-high coefficients.
SMOOTHSTEP = (0.0, 0.0, 0.0, 10.0, -15.0, 6.0)

# Tolerance when deciding that |s| > 1 is a real domain violation.
_EDGE_TOL = 1e-12

BRIDGE_LO = 0.5
BRIDGE_HI = 1.0


@dataclass(frozen=True)
class PotentialSpec:
    """Regularization parameter plus the concrete blend defining F_bar and rho.

    ``blend_knots`` are the coefficients (low to high) of the quintic bridge
    in the local variable t = (s - 1/2) / (1/2); ``rho_poly`` the smoothstep
    coefficients. ``curvature_max``/``curvature_min`` are sampled bounds of
    F''_eps on [-1, 1], used by the flow to size admissible time steps.
    """
    eps: float
    blend_knots: Tuple[float, ...]
    rho_poly: Tuple[float, ...] = SMOOTHSTEP
    curvature_max: float = 0.0
    curvature_min: float = 0.0

    def value(self, s: Real) -> Real:
        return feps_eval(s, self)

    def slope(self, s: Real) -> Real:
        return feps_deriv(s, self)

    def curvature(self, s: Real) -> Real:
        return feps_second(s, self)


def _bridge_coefficients() -> Tuple[float, ...]:
    """Quintic matching s^2 at s=1/2 and 1-exp(-s) at s=1 up to second order."""
    h = BRIDGE_HI - BRIDGE_LO
    e1 = np.exp(-1.0)
    v0, d0, c0 = 0.25, 1.0, 2.0
    v1, d1, c1 = 1.0 - e1, e1, -e1

    a0, a1, a2 = v0, d0 * h, 0.5 * c0 * h * h
    lhs = np.array([[1.0, 1.0, 1.0], [3.0, 4.0, 5.0], [6.0, 12.0, 20.0]])
    rhs = np.array([
        v1 - a0 - a1 - a2,
        d1 * h - a1 - 2.0 * a2,
        c1 * h * h - 2.0 * a2,
    ])
    a3, a4, a5 = np.linalg.solve(lhs, rhs)
    return (a0, a1, a2, float(a3), float(a4), float(a5))


def _fbar(s: np.ndarray, knots: Tuple[float, ...], order: int = 0) -> np.ndarray:
    """F_bar and its first two derivatives on s >= 0 (no validation)."""
    h = BRIDGE_HI - BRIDGE_LO
    out = np.empty_like(s)
    low = s <= BRIDGE_LO
    high = s > BRIDGE_HI
    mid = ~(low | high)
    t = (s[mid] - BRIDGE_LO) / h
    coeffs = np.asarray(knots)

    if order == 0:
        out[low] = s[low] ** 2
        out[high] = -np.expm1(-s[high])
        out[mid] = P.polyval(t, coeffs)
    elif order == 1:
        out[low] = 2.0 * s[low]
        out[high] = np.exp(-s[high])
        out[mid] = P.polyval(t, P.polyder(coeffs, 1)) / h
    else:
        out[low] = 2.0
        out[high] = -np.exp(-s[high])
        out[mid] = P.polyval(t, P.polyder(coeffs, 2)) / (h * h)
    return out


def _rho(s: np.ndarray, poly: Tuple[float, ...], order: int = 0) -> np.ndarray:
    """rho(s) = 1 - S(s + 1/2) on [-1/2, 1/2], constant outside."""
    coeffs = np.asarray(poly)
    inside = np.abs(s) <= 0.5
    x = s[inside] + 0.5
    if order == 0:
        out = np.where(s < 0.0, 1.0, 0.0).astype(float)
        out[inside] = 1.0 - P.polyval(x, coeffs)
    else:
        out = np.zeros_like(s)
        out[inside] = -P.polyval(x, P.polyder(coeffs, order))
    return out


def _as_output(template: Real, out: np.ndarray) -> Real:
    return float(out) if np.ndim(template) == 0 else out


def _checked_abs(s: Real) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > 1.0 + _EDGE_TOL):
        raise DomainError("F_eps is defined on [-1, 1] only")
    return np.minimum(np.abs(arr), 1.0), np.sign(arr)


def fbar_eval(s: Real) -> Real:
    """Evaluate F_bar.

    Args:
        s: Non-negative argument (scalar or array)

    Returns:
        s^2 on [0, 1/2], 1 - exp(-s) beyond 1, the quintic bridge in between
    """
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(arr < 0.0) or np.any(~np.isfinite(arr)):
        raise DomainError("F_bar is defined for s >= 0 only")
    return _as_output(s, _fbar(arr, _bridge_coefficients()).reshape(np.shape(s)))


def _feps_parts(a: np.ndarray, spec: PotentialSpec):
    eps = spec.eps
    up = (1.0 + a) / eps
    down = (1.0 - a) / eps
    return up, down


def feps_eval(s: Real, spec: PotentialSpec) -> Real:
    """F_eps(s) = rho(s) F_bar((1+s)/eps) + (1 - rho(s)) F_bar((1-s)/eps)."""
    a, _ = _checked_abs(s)
    a = np.atleast_1d(a)
    up, down = _feps_parts(a, spec)
    rho = _rho(a, spec.rho_poly)
    out = rho * _fbar(up, spec.blend_knots) + (1.0 - rho) * _fbar(down, spec.blend_knots)
    return _as_output(s, out.reshape(np.shape(s)))


def feps_deriv(s: Real, spec: PotentialSpec) -> Real:
    """F'_eps(s); odd in s."""
    a, sign = _checked_abs(s)
    a = np.atleast_1d(a)
    eps = spec.eps
    up, down = _feps_parts(a, spec)
    knots = spec.blend_knots
    rho = _rho(a, spec.rho_poly)
    drho = _rho(a, spec.rho_poly, order=1)
    out = (
        drho * (_fbar(up, knots) - _fbar(down, knots))
        + rho * _fbar(up, knots, 1) / eps
        - (1.0 - rho) * _fbar(down, knots, 1) / eps
    )
    out = out.reshape(np.shape(s)) * sign
    return _as_output(s, out)


def feps_second(s: Real, spec: PotentialSpec) -> Real:
    """F''_eps(s); even in s."""
    a, _ = _checked_abs(s)
    a = np.atleast_1d(a)
    eps = spec.eps
    up, down = _feps_parts(a, spec)
    knots = spec.blend_knots
    rho = _rho(a, spec.rho_poly)
    drho = _rho(a, spec.rho_poly, order=1)
    ddrho = _rho(a, spec.rho_poly, order=2)
    out = (
        ddrho * (_fbar(up, knots) - _fbar(down, knots))
        + 2.0 * drho * (_fbar(up, knots, 1) + _fbar(down, knots, 1)) / eps
        + rho * _fbar(up, knots, 2) / eps ** 2
        + (1.0 - rho) * _fbar(down, knots, 2) / eps ** 2
    )
    return _as_output(s, out.reshape(np.shape(s)))


def _check_bridge(knots: Tuple[float, ...]) -> None:
    s = np.linspace(BRIDGE_LO, 4.0, 20001)
    slope = _fbar(s, knots, 1)
    if np.any(slope <= 0.0):
        raise ConstructionError("F_bar bridge is not monotone increasing")
    tail = s[s > 0.75]
    if np.any(_fbar(tail, knots, 2) >= 0.0):
        raise ConstructionError("F_bar'' must be negative on (3/4, inf)")


def build_potential(eps: float) -> PotentialSpec:
    """Build and self-check the potential for a regularization parameter.

    Args:
        eps: Regularization parameter in (0, 0.25]

    Returns:
        Frozen PotentialSpec with sampled curvature bounds
    """
    if not (0.0 < eps <= 0.25):
        raise DomainError(f"eps must lie in (0, 0.25], got {eps}")

    knots = _bridge_coefficients()
    _check_bridge(knots)

    spec = PotentialSpec(eps=float(eps), blend_knots=knots)
    s = np.concatenate([
        np.linspace(-1.0, 1.0, 40001),
        1.0 - np.geomspace(1e-9, 2.0 * eps, 2000),
    ])
    curv = feps_second(s, spec)
    spec = PotentialSpec(
        eps=float(eps),
        blend_knots=knots,
        curvature_max=float(np.max(curv)),
        curvature_min=float(np.min(curv)),
    )
    logger.debug(
        "potential eps=%g: F'' in [%.4g, %.4g]", eps, spec.curvature_min, spec.curvature_max
    )
    return spec


def limit_profile(x: Real) -> Real:
    """The eps -> 0 heteroclinic: x clipped to [-1, 1]."""
    out = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    return _as_output(x, out)
