"""On-surface evaluation of layer potentials by quadrature by expansion (QBX)."""

from ._jit import backend, set_backend
from .densities import Density, make_density
from .errors import (CapabilityError, ConfigError, ConvergenceFailure, DomainError, EvaluationError,
                     GeometryViolation, InsufficientDataError, NumericError, PlacementError, QbxError,
                     ValidationError)
from .geometry import Sphere, circle, ellipse, make_curve, panelize, place_center, starfish
from .qbx import KernelSpec, QbxExpansion, QbxParams, eval_on_surface

__version__ = "0.1.0"

__all__ = [
    "backend", "set_backend", "Density", "make_density", "Sphere", "circle", "ellipse", "starfish",
    "make_curve", "panelize", "place_center", "KernelSpec", "QbxExpansion", "QbxParams",
    "eval_on_surface", "QbxError", "ValidationError", "NumericError", "DomainError", "CapabilityError",
    "PlacementError", "GeometryViolation", "ConfigError", "EvaluationError", "ConvergenceFailure",
    "InsufficientDataError",
]
