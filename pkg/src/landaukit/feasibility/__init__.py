"""Exact distortion-or-solution decisions and stratum sweeps."""

from .core import (
    ActiveSystem,
    Certificate,
    CertificateError,
    Distortion,
    LandauSolution,
    evaluate_active_system,
    farkas_decide,
)
from .sampler import SamplerConfig, SweepReport, construct_point, distortion_sweep
from .simplex import LPResult, solve_lp

__all__ = [
    "ActiveSystem",
    "Certificate",
    "CertificateError",
    "Distortion",
    "LPResult",
    "LandauSolution",
    "SamplerConfig",
    "SweepReport",
    "construct_point",
    "distortion_sweep",
    "evaluate_active_system",
    "farkas_decide",
    "solve_lp",
]
