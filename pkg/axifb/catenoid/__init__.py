"""Catenoid profiles, weighted area functionals and lower-bound certificates."""

from axifb.catenoid.bounds import BoundCheck, bound_a2, bound_e1, bound_y, excess_delta
from axifb.catenoid.curves import (
    AnalyticGraph,
    PlanarCurve,
    catenoid_area,
    catenoid_area_excess,
    catenoid_graph,
    flat_area,
    flux_profile,
    mean_curvature,
    weighted_area,
    weighted_area_excess,
)
from axifb.catenoid.profiles import (
    Catenoid,
    CatenoidConvention,
    asymptotic_height,
    catenoid_eval,
    catenoid_inverse,
    catenoid_point,
    catenoid_slope,
    catenoid_through,
    fit_asymptote_constants,
    ode_residual,
)

__all__ = [
    "BoundCheck",
    "bound_a2",
    "bound_e1",
    "bound_y",
    "excess_delta",
    "AnalyticGraph",
    "PlanarCurve",
    "catenoid_area",
    "catenoid_area_excess",
    "catenoid_graph",
    "flat_area",
    "flux_profile",
    "mean_curvature",
    "weighted_area",
    "weighted_area_excess",
    "Catenoid",
    "CatenoidConvention",
    "asymptotic_height",
    "catenoid_eval",
    "catenoid_inverse",
    "catenoid_point",
    "catenoid_slope",
    "catenoid_through",
    "fit_asymptote_constants",
    "ode_residual",
]
