"""Polynomial engine, denominator sets and Landau matrices."""

from .denominators import (
    DeltaCertificate,
    DenominatorSet,
    KFormMatrix,
    LandauMatrix,
    Row,
    apply_H,
    build_denominator_set,
    eliminate_delta_rows,
    landau_matrix,
    photon_momentum,
    pole_decomposition,
    propagator_product,
    radial_product,
    side_momentum,
    to_k_form,
    to_k_variables,
)
from .poly import Poly, grad_vector, k_vector, omega_vector, p_vector, r_var

__all__ = [
    "DeltaCertificate",
    "DenominatorSet",
    "KFormMatrix",
    "LandauMatrix",
    "Poly",
    "Row",
    "apply_H",
    "build_denominator_set",
    "eliminate_delta_rows",
    "grad_vector",
    "k_vector",
    "landau_matrix",
    "omega_vector",
    "p_vector",
    "photon_momentum",
    "pole_decomposition",
    "propagator_product",
    "r_var",
    "radial_product",
    "side_momentum",
    "to_k_form",
    "to_k_variables",
]
