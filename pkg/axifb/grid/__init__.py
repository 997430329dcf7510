"""Discretized cylinder, axisymmetric operators and level-set measurement."""

from axifb.grid.domain import (
    AxiGrid,
    BoundaryData,
    Field,
    boundary_omega,
    build_domain,
    catenoid_height,
    omega_field,
)
from axifb.grid.levelset import (
    coarea_lower_bound,
    level_area,
    level_contours,
    min_level_area,
    densify,
    polyline_area,
    signed_distance,
)
from axifb.grid.operators import (
    apply_operator,
    energy,
    field_at,
    gradient_components,
    gradient_magnitude,
    inner,
    laplacian,
    laplacian_diagonal,
    lipschitz_estimate,
    residual_norm,
    stiffness,
    stiffness_matrix,
)

__all__ = [
    "AxiGrid",
    "BoundaryData",
    "Field",
    "boundary_omega",
    "build_domain",
    "catenoid_height",
    "omega_field",
    "coarea_lower_bound",
    "level_area",
    "level_contours",
    "min_level_area",
    "densify",
    "polyline_area",
    "signed_distance",
    "apply_operator",
    "energy",
    "field_at",
    "gradient_components",
    "gradient_magnitude",
    "inner",
    "laplacian",
    "laplacian_diagonal",
    "lipschitz_estimate",
    "residual_norm",
    "stiffness",
    "stiffness_matrix",
]
