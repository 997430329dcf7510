"""The constant delta_eps and the subsolution profile w_{eps,l}."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from axifb.errors import ConstructionError, DomainError
from axifb.potential.double_well import PotentialSpec, feps_deriv
from axifb.potential.profile import HeteroclinicProfile

logger = logging.getLogger(__name__)

Real = Union[float, np.ndarray]

_JOIN = 2.0


def _cubic_coefficients(profile: HeteroclinicProfile) -> Tuple[float, float, float]:
    """Cubic for delta divided by q = 1 - H(2): c1 d + c2 d^2 + c3 d^3 = 1."""
    q = profile.deficit(_JOIN)
    c1 = profile.slope(_JOIN) / q
    c2 = 0.5 * profile.curvature(_JOIN) / q
    c3 = 1.0 / profile.eps ** 4
    return c1, c2, c3


def delta_eps(spec: PotentialSpec, profile: HeteroclinicProfile) -> float:
    """Small positive root of the cubic that lifts the profile to exactly 1.

    Solves H(2) + H'(2) d + H''(2) d^2 / 2 + (1 - H(2)) d^3 / eps^4 = 1 on (0, eps).
    """
    if profile.eps != spec.eps:
        raise ConstructionError("profile and potential disagree on eps")
    c1, c2, c3 = _cubic_coefficients(profile)
    if 4.0 * c2 * c2 - 12.0 * c1 * c3 >= 0.0:
        raise ConstructionError("delta cubic is not strictly increasing")

    def cubic(d: float) -> float:
        return ((c3 * d + c2) * d + c1) * d - 1.0

    lo, hi = 0.0, spec.eps
    if cubic(lo) * cubic(hi) >= 0.0:
        raise ConstructionError("delta cubic has no sign change on (0, eps)")
    return float(brentq(cubic, lo, hi, xtol=1e-17, rtol=4.0 * np.finfo(float).eps, maxiter=500))


@dataclass
class SubsolutionProfile:
    """w_{eps,l} on [-l - eps, 2 + delta_eps].

    Three pieces: a quadratic cap on [-l - eps, -l], H_eps on [-l, 2] and a
    cubic on [2, 2 + delta] reaching exactly 1.
    """
    eps: float
    l: float
    delta_eps: float
    profile: HeteroclinicProfile

    def __post_init__(self):
        p = self.profile
        self._h2 = p.value(_JOIN)
        self._q2 = p.deficit(_JOIN)
        self._dh2 = p.slope(_JOIN)
        self._ddh2 = p.curvature(_JOIN)
        self._hl = p.value(self.l)
        self._dhl = p.slope(self.l)
        self._ddhl = p.curvature(self.l)

    @property
    def lower(self) -> float:
        return -self.l - self.eps

    @property
    def upper(self) -> float:
        return _JOIN + self.delta_eps

    def _pieces(self, x: Real):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        tol = 1e-12 * max(1.0, self.l)
        if np.any(arr < self.lower - tol) or np.any(arr > self.upper + tol):
            raise DomainError(
                f"subsolution is defined on [{self.lower:.6g}, {self.upper:.6g}]"
            )
        left = arr < -self.l
        right = arr > _JOIN
        return arr, left, right, ~(left | right)

    def value(self, x: Real) -> Real:
        arr, left, right, mid = self._pieces(x)
        out = np.empty_like(arr)
        out[mid] = self.profile.value(arr[mid])
        y = arr[left] + self.l
        out[left] = -self._hl + self._dhl * y - 0.5 * self._ddhl * y * y
        y = arr[right] - _JOIN
        cubic = self._q2 / self.eps ** 4
        out[right] = self._h2 + y * (self._dh2 + y * (0.5 * self._ddh2 + y * cubic))
        return _as_output(x, out)

    def slope(self, x: Real) -> Real:
        arr, left, right, mid = self._pieces(x)
        out = np.empty_like(arr)
        out[mid] = self.profile.slope(arr[mid])
        y = arr[left] + self.l
        out[left] = self._dhl - self._ddhl * y
        y = arr[right] - _JOIN
        cubic = self._q2 / self.eps ** 4
        out[right] = self._dh2 + y * (self._ddh2 + 3.0 * cubic * y)
        return _as_output(x, out)

    def curvature(self, x: Real) -> Real:
        arr, left, right, mid = self._pieces(x)
        out = np.empty_like(arr)
        out[mid] = self.profile.curvature(arr[mid])
        out[left] = -self._ddhl
        y = arr[right] - _JOIN
        out[right] = self._ddh2 + 6.0 * (self._q2 / self.eps ** 4) * y
        return _as_output(x, out)


def _as_output(template: Real, out: np.ndarray) -> Real:
    return float(out[0]) if np.ndim(template) == 0 else out.reshape(np.shape(template))


def subsolution_build(
    spec: PotentialSpec,
    profile: HeteroclinicProfile,
    l: float,
    delta: Optional[float] = None,
) -> SubsolutionProfile:
    """Assemble w_{eps,l}.

    Args:
        spec: Potential the profile was built from
        profile: Heteroclinic profile for the same eps
        l: Half-length, must exceed 2
        delta: Precomputed delta_eps; computed when omitted

    Returns:
        SubsolutionProfile
    """
    if l <= _JOIN:
        raise DomainError(f"subsolution half-length must exceed 2, got {l}")
    if delta is None:
        delta = delta_eps(spec, profile)
    return SubsolutionProfile(eps=spec.eps, l=float(l), delta_eps=float(delta), profile=profile)


def subsolution_residual(w: SubsolutionProfile, x: Real) -> Real:
    """Pointwise -w'' + F'_eps(w)/2; non-positive for a subsolution."""
    values = np.clip(np.asarray(w.value(x), dtype=float), -1.0, 1.0)
    out = -np.asarray(w.curvature(x)) + 0.5 * np.asarray(feps_deriv(values, w.profile.spec))
    return float(out) if np.ndim(x) == 0 else out
