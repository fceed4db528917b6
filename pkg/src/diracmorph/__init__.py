"""Spin geometry on chart domains: gamma matrices, Dirac operators, pull-back
spinors through horizontally conformal submersions and Dirac-morphism checks."""

__version__ = "0.1.0"

from .analysis import Box, FDConfig, Field, derivative, jacobian, parse_expr, to_text
from .clifford import (
    AdaptedRep,
    GammaRep,
    build_adapted_rep,
    build_gamma,
    clifford_mul,
    conjugate,
    two_form_action,
)
from .corpus import fixture, list_fixtures
from .dirac import (
    ChainRuleBreakdown,
    ChartSpinorField,
    PullbackSpec,
    chain_rule,
    dirac_apply,
    harmonic_spinor_2d,
    horizontal_parallel_residual,
    oneill_chain_rule,
    pullback_spinor,
    spin_covariant_derivative,
    vertical_dirac,
)
from .errors import DiracMorphError
from .geometry import (
    FramePointData,
    GeomInvariants,
    Scenario,
    Tolerances,
    adapted_frame,
    frame_connection,
    geom_invariants,
)
from .morphism import (
    MorphismReport,
    check_alpha_conditions,
    check_conditions,
    classify,
    converse_probe,
    cr_condition_check,
    default_witnesses,
    random_harmonic_witnesses,
)
from .scenario_file import load_scenario, parse_scenario, scenario_to_text

__all__ = [
    "AdaptedRep", "Box", "ChainRuleBreakdown", "ChartSpinorField", "DiracMorphError", "FDConfig",
    "Field", "FramePointData", "GammaRep", "GeomInvariants", "MorphismReport", "PullbackSpec",
    "Scenario", "Tolerances", "adapted_frame", "build_adapted_rep", "build_gamma", "chain_rule",
    "check_alpha_conditions", "check_conditions", "classify", "clifford_mul", "conjugate",
    "converse_probe", "cr_condition_check", "default_witnesses", "derivative", "dirac_apply", "fixture",
    "frame_connection", "geom_invariants", "harmonic_spinor_2d", "horizontal_parallel_residual",
    "jacobian", "list_fixtures", "load_scenario", "oneill_chain_rule", "parse_expr",
    "parse_scenario", "pullback_spinor", "random_harmonic_witnesses", "scenario_to_text", "spin_covariant_derivative",
    "to_text", "two_form_action", "vertical_dirac",
]
