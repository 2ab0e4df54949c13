"""Landau diagrams, closure checks and the contraction cascade."""

from .cascade import CascadeLog, CascadeStep, contraction_cascade
from .landau import (
    ClosureReport,
    DiagramParams,
    LandauDiagram,
    VertexClassification,
    build_diagram,
    check_closure,
    classify_VR_VL,
    emit_dot,
    matrix_contractions,
)

__all__ = [
    "CascadeLog",
    "CascadeStep",
    "contraction_cascade",
    "ClosureReport",
    "DiagramParams",
    "LandauDiagram",
    "VertexClassification",
    "build_diagram",
    "check_closure",
    "classify_VR_VL",
    "emit_dot",
    "matrix_contractions",
]
