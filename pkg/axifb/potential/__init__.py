"""Regularized double-well potentials and the one-dimensional profiles built on them."""

from axifb.potential.double_well import (
    PotentialSpec,
    build_potential,
    fbar_eval,
    feps_deriv,
    feps_eval,
    feps_second,
    limit_profile,
)
from axifb.potential.profile import (
    HeteroclinicProfile,
    e_eps,
    energy_identity,
    heteroclinic_build,
)
from axifb.potential.subsolution import (
    SubsolutionProfile,
    delta_eps,
    subsolution_build,
    subsolution_residual,
)

__all__ = [
    "PotentialSpec",
    "build_potential",
    "fbar_eval",
    "feps_deriv",
    "feps_eval",
    "feps_second",
    "limit_profile",
    "HeteroclinicProfile",
    "e_eps",
    "energy_identity",
    "heteroclinic_build",
    "SubsolutionProfile",
    "delta_eps",
    "subsolution_build",
    "subsolution_residual",
]
