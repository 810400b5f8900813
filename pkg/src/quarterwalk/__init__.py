"""Absorption probabilities, Green functions and Martin kernels of nearest-neighbour
random walks in the quarter plane killed on the axes.

Three independent routes are provided and cross-checked: exhaustive lattice
dynamic programming (:mod:`quarterwalk.oracle`), closed integral formulas for
the generating functions (:mod:`quarterwalk.analytic`), and leading-order
asymptotic laws (:mod:`quarterwalk.asymptotic`).
"""

from .analytic import (
    HValue,
    Representation,
    absorption_probability,
    eval_h,
    eval_htilde,
    site_probability,
)
from .asymptotic import (
    AsymptoticLaw,
    GreenEstimate,
    Quantity,
    gamma_set_green,
    green_asymptotics,
    green_boundary_asymptotics,
    harmonic,
    martin_kernel,
    s_tail,
    site_asymptotics,
    t_tail,
    tau_tail,
)
from .curve import BranchPoints, CurveCoeffs, SaddlePoint, branch_points, saddle
from .errors import QuarterWalkError, WrongRegime
from .oracle import (
    AbsorptionTable,
    GreenTable,
    TauTail,
    dp_absorption,
    dp_genfunc,
    dp_green,
    dp_tau,
    green_box,
    mc_estimate,
)
from .walk import DriftClass, StartPoint, WalkParams, derive, non_absorption_probability, validate

__all__ = [
    "AbsorptionTable",
    "AsymptoticLaw",
    "BranchPoints",
    "CurveCoeffs",
    "DriftClass",
    "GreenEstimate",
    "GreenTable",
    "HValue",
    "Quantity",
    "QuarterWalkError",
    "Representation",
    "SaddlePoint",
    "StartPoint",
    "TauTail",
    "WalkParams",
    "WrongRegime",
    "absorption_probability",
    "branch_points",
    "derive",
    "dp_absorption",
    "dp_genfunc",
    "dp_green",
    "dp_tau",
    "eval_h",
    "eval_htilde",
    "gamma_set_green",
    "green_asymptotics",
    "green_boundary_asymptotics",
    "green_box",
    "harmonic",
    "martin_kernel",
    "mc_estimate",
    "non_absorption_probability",
    "s_tail",
    "saddle",
    "site_asymptotics",
    "site_probability",
    "t_tail",
    "tau_tail",
    "validate",
]
