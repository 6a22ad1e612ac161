"""Exact Dirac solutions on static 1+1 backgrounds with position-dependent gamma matrices."""

from .background import (Flat, HyperbolicConst, InverseSquareCritical, LinearFlat, Numeric, TrigConst,
                         profile_from_json, solve_profile)
from .errors import CurvedDiracError
from .free_solver import FreeSpinor, decay_parameter, evaluate_spinor, probability_density
from .gamma_algebra import ModelParams, build_gamma, build_metric
from .interacting_solver import MorseProblem, PotentialConfig, evaluate_interacting_spinor, morse_reduce
from .special_fn import hyp1f1

__version__ = "0.1.0"

__all__ = [
    "CurvedDiracError", "Flat", "FreeSpinor", "HyperbolicConst", "InverseSquareCritical", "LinearFlat",
    "ModelParams", "MorseProblem", "Numeric", "PotentialConfig", "TrigConst", "build_gamma", "build_metric",
    "decay_parameter", "evaluate_interacting_spinor", "evaluate_spinor", "hyp1f1", "morse_reduce",
    "probability_density", "profile_from_json", "solve_profile",
]
