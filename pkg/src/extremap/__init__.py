"""Exact and Monte Carlo computation of multivariate extreme-value laws for chaotic maps.

The package computes, estimates, and cross-checks the objects that describe
joint extremes of observables along orbits of expanding circle maps and a
hyperbolic toral automorphism: the stable dependence function, the direction-
dependent extremal index, the limiting law of componentwise block maxima, and
the Pickands dependence function.  Everything on the circle is computed in
exact rational arithmetic; Monte Carlo estimators and closed-form catalog
curves cross-validate the exact engine and each other.

Entry points
------------
``closed_form`` / ``validate``
    Closed-form dependence structure per catalog example; structural checks.
``preset``
    Bound map + observables + reference cluster depth per catalog example.
``gamma_hat`` / ``theta_exact`` / ``theta_limit`` / ``delta_prime``
    Exact rational estimates at finite horizon n.
``mc_block_maxima`` / ``mc_theta_runs`` / ``mc_delta_prime``
    Seeded Monte Carlo counterparts.
``run_all``
    The full cross-verification battery.
``extremap`` (console script)
    CSV-producing command-line front end; see ``extremap --help``.
"""

from .dependence import (
    DependenceFunctions,
    ExampleId,
    ValidationReport,
    closed_form,
    logistic_D,
    pickands,
    validate,
)
from .dynamics import (
    BudgetExceededError,
    ExpandingBase,
    ToralAuto,
    UnsupportedMapError,
    preimage,
    preimage_within,
)
from .engine import (
    EstimateResult,
    delta_prime,
    g_value,
    gamma_hat,
    theta_exact,
    theta_limit,
)
from .geometry import IntervalSet, TorusRect, ball
from .mc import mc_block_maxima, mc_delta_prime, mc_theta_runs
from .observables import (
    FinitePoints,
    InfeasibleThresholdError,
    Observable,
    ObservableSpec,
    UnstableSegment,
    thresholds,
)
from .presets import ExperimentPreset, preset
from .quadratic import SQRT5, Sqrt5
from .verification import CheckResult, run_all

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "CheckResult",
    "DependenceFunctions",
    "EstimateResult",
    "ExampleId",
    "ExperimentPreset",
    "ExpandingBase",
    "FinitePoints",
    "InfeasibleThresholdError",
    "IntervalSet",
    "Observable",
    "ObservableSpec",
    "SQRT5",
    "Sqrt5",
    "ToralAuto",
    "TorusRect",
    "UnstableSegment",
    "UnsupportedMapError",
    "ValidationReport",
    "ball",
    "closed_form",
    "delta_prime",
    "g_value",
    "gamma_hat",
    "logistic_D",
    "mc_block_maxima",
    "mc_delta_prime",
    "mc_theta_runs",
    "pickands",
    "preimage",
    "preimage_within",
    "preset",
    "run_all",
    "theta_exact",
    "theta_limit",
    "thresholds",
    "validate",
]
