"""Heteroclinic profile H_eps, its transition point and the energy constant."""

import logging
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from axifb.errors import ConstructionError, DomainError
from axifb.potential.double_well import PotentialSpec, feps_deriv, feps_eval

logger = logging.getLogger(__name__)

Real = Union[float, np.ndarray]

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _panel_edges(eps: float, top: float) -> np.ndarray:
    """Panels on [0, top] refined on the eps-scale pieces of F_eps."""
    knee = 1.0 - eps
    return np.unique(np.concatenate([
        np.linspace(0.0, 0.5, 2001),
        np.linspace(0.5, knee, 4001),
        np.linspace(knee, top, 1201),
    ]))


def _gauss_panels(fn, edges: np.ndarray) -> np.ndarray:
    """Integral of ``fn`` over each panel with 8-point Gauss-Legendre."""
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
    return (half[:, None] * _GAUSS_WEIGHTS[None, :] * fn(nodes)).sum(axis=1)


@dataclass
class HeteroclinicProfile:
    """Tabulated H_eps with its exact exponential tail.

    The core |x| <= t_eps is the inverse of x(h) = int_0^h ds / sqrt(F_eps(s));
    beyond t_eps the profile is 1 - (eps/2) exp((t_eps - |x|)/eps), extended
    as an odd function.
    """
    eps: float
    spec: PotentialSpec
    t_eps: float
    tail_coeff: float
    samples: np.ndarray
    _forward: CubicHermiteSpline = field(repr=False)
    _inverse: CubicHermiteSpline = field(repr=False)

    def _split(self, x: Real):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        ax = np.abs(arr)
        return arr, ax, ax <= self.t_eps

    def _tail_deficit(self, ax: np.ndarray) -> np.ndarray:
        return 0.5 * self.eps * np.exp((self.t_eps - ax) / self.eps)

    def deficit(self, x: Real) -> Real:
        """1 - H(x), without cancellation on the tail."""
        arr, ax, core = self._split(x)
        out = np.empty_like(ax)
        out[core] = 1.0 - self._forward(ax[core])
        out[~core] = self._tail_deficit(ax[~core])
        out = np.where(arr < 0.0, 2.0 - out, out)
        return _as_output(x, out)

    def value(self, x: Real) -> Real:
        arr, ax, core = self._split(x)
        out = np.empty_like(ax)
        out[core] = self._forward(ax[core])
        out[~core] = 1.0 - self._tail_deficit(ax[~core])
        return _as_output(x, np.sign(arr) * out)

    def slope(self, x: Real) -> Real:
        arr, ax, core = self._split(x)
        out = np.empty_like(ax)
        out[core] = self._forward(ax[core], 1)
        out[~core] = self._tail_deficit(ax[~core]) / self.eps
        return _as_output(x, out)

    def curvature(self, x: Real) -> Real:
        """H'' = F'_eps(H) / 2, exact on the tail."""
        arr, ax, core = self._split(x)
        out = np.empty_like(ax)
        out[core] = 0.5 * feps_deriv(self._forward(ax[core]), self.spec)
        out[~core] = -self._tail_deficit(ax[~core]) / self.eps ** 2
        return _as_output(x, np.sign(arr) * out)

    def abscissa(self, h: Real) -> Real:
        """Inverse profile: the x with H(x) = h, for |h| < 1."""
        arr = np.atleast_1d(np.asarray(h, dtype=float))
        if np.any(np.abs(arr) >= 1.0):
            raise DomainError("profile abscissa needs |h| < 1")
        ah = np.abs(arr)
        top = 1.0 - 0.5 * self.eps
        core = ah <= top
        out = np.empty_like(ah)
        out[core] = self._inverse(ah[core])
        # sigma = 1 - (eps/2) exp(-tau) with x = t_eps + eps * tau
        tau = np.log(0.5 * self.eps / (1.0 - ah[~core]))
        out[~core] = self.t_eps + self.eps * tau
        return _as_output(h, np.sign(arr) * out)


def _as_output(template: Real, out: np.ndarray) -> Real:
    return float(out[0]) if np.ndim(template) == 0 else out.reshape(np.shape(template))


def heteroclinic_build(
    spec: PotentialSpec,
    x_max: float = 6.0,
    n_samples: int = 2001,
) -> HeteroclinicProfile:
    """Build H_eps by inverting the first integral.

    Args:
        spec: Potential to build the profile for
        x_max: Half-width of the tabulated sample window
        n_samples: Number of uniform samples on [-x_max, x_max]

    Returns:
        HeteroclinicProfile with samples (x, H, H') and exact tail
    """
    eps = spec.eps
    if not (0.0 < eps <= 0.25):
        raise DomainError(f"eps must lie in (0, 0.25], got {eps}")
    if x_max <= 0.0 or n_samples < 3:
        raise DomainError("need x_max > 0 and at least 3 samples")

    top = 1.0 - 0.5 * eps
    sigma = _panel_edges(eps, top)

    def inv_sqrt(s):
        return 1.0 / np.sqrt(feps_eval(s, spec))

    panels = _gauss_panels(inv_sqrt, sigma)
    x_nodes = np.concatenate([[0.0], np.cumsum(panels)])
    if not np.all(np.isfinite(x_nodes)) or np.any(np.diff(x_nodes) <= 0.0):
        raise ConstructionError("first-integral quadrature failed")

    rate = np.sqrt(feps_eval(sigma, spec))
    forward = CubicHermiteSpline(x_nodes, sigma, rate)
    inverse = CubicHermiteSpline(sigma, x_nodes, 1.0 / rate)

    t_eps = float(x_nodes[-1])
    lower = 1.0 + eps * np.log(eps)
    if not (lower - 1e-9 <= t_eps <= 1.0 + 1e-9):
        logger.warning("t_eps=%.10f outside [1 + eps ln eps, 1] = [%.6f, 1]", t_eps, lower)

    profile = HeteroclinicProfile(
        eps=eps,
        spec=spec,
        t_eps=t_eps,
        tail_coeff=0.5 * eps * np.exp(t_eps / eps),
        samples=np.empty((0, 3)),
        _forward=forward,
        _inverse=inverse,
    )
    x = np.linspace(-x_max, x_max, n_samples)
    profile.samples = np.column_stack([x, profile.value(x), profile.slope(x)])
    logger.debug("profile eps=%g: t_eps=%.12f", eps, t_eps)
    return profile


def energy_identity(profile: HeteroclinicProfile) -> float:
    """int (H'^2 + F_eps(H)) dx over the whole line, computed in x-space."""
    spec = profile.spec
    edges = np.linspace(0.0, profile.t_eps, 6001)

    def density(x):
        return profile.slope(x) ** 2 + feps_eval(profile.value(x), spec)

    core = float(_gauss_panels(density, edges).sum())
    # on the tail H'^2 = F(H) = exp(2 (t_eps - x)/eps) / 4
    return 2.0 * (core + 0.25 * profile.eps)


def e_eps(spec: PotentialSpec) -> float:
    """Energy density constant e_eps = 2 int_{-1}^{1} sqrt(F_eps)."""
    eps = spec.eps

    def root(s):
        return np.sqrt(feps_eval(s, spec))

    value, _ = integrate.quad(
        root, 0.0, 1.0,
        points=[0.5, 1.0 - eps, 1.0 - 0.5 * eps],
        epsabs=0.0, epsrel=1e-12, limit=400,
    )
    return 4.0 * value
