"""Local digital estimators of intrinsic volumes from 2x2 configuration counts."""
from __future__ import annotations

from .boolean_model import (
    BooleanModelSpec, RadiusLaw, exact_class_probabilities, exact_estimator_mean,
    mc_field_experiment, series_estimator_mean, specific_volumes,
)
from .config_algebra import (
    ConsistencyError, WeightVector, coefficient_matrix, constraint_report, mobius_matrix,
    series_constants, solve_weight_family,
)
from .design_based import Annulus, Disk, DiskUnion, Ellipse, mc_design_estimate
from .estimators import CATALOG, lookup_weights, predicted_asymptotics
from .lattice_image import BinaryImage, ConfigHistogram, Lattice, Window, config_histogram

__version__ = "0.1.0"

__all__ = [
    "Annulus", "BinaryImage", "BooleanModelSpec", "CATALOG", "ConfigHistogram",
    "ConsistencyError", "Disk", "DiskUnion", "Ellipse", "Lattice", "RadiusLaw",
    "WeightVector", "Window", "coefficient_matrix", "config_histogram", "constraint_report",
    "exact_class_probabilities", "exact_estimator_mean", "lookup_weights",
    "mc_design_estimate", "mc_field_experiment", "mobius_matrix", "predicted_asymptotics",
    "series_constants", "series_estimator_mean", "solve_weight_family", "specific_volumes",
]
