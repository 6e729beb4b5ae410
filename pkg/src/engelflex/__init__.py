"""Horizontal curves in Engel manifolds: models, invariants, fronts and deformations."""

from .curves import FamilyOfCurves, SampledCurve, TangencyLocus
from .errors import EngelError
from .fronts import Front
from .geiges import LegendrianCurve
from .models import EngelModel, get_model

__version__ = "0.1.0"

__all__ = [
    "EngelError",
    "EngelModel",
    "FamilyOfCurves",
    "Front",
    "LegendrianCurve",
    "SampledCurve",
    "TangencyLocus",
    "get_model",
]
