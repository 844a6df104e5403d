"""Numerical lab for Morrey spaces, their atomic preduals and the operators acting on them."""

from .expr import parse
from .grid import DyadicCube, GridFunction, GridFunctionSeq, GridSpec, sample
from .norms import MorreyParams, PredualParams, lp_norm, morrey_norm_ball, morrey_norm_dyadic
from .operators import OperatorSpec, apply_operator
from .predual import predual_lower_bound, predual_upper_bound

__all__ = [
    "DyadicCube", "GridFunction", "GridFunctionSeq", "GridSpec", "MorreyParams", "OperatorSpec",
    "PredualParams", "apply_operator", "lp_norm", "morrey_norm_ball", "morrey_norm_dyadic",
    "parse", "predual_lower_bound", "predual_upper_bound", "sample",
]
