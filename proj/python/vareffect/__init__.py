"""Variability dependency analysis for preprocessor-based product lines."""

from ._core import (
    VareffectError,
    __version__,
    aggregate,
    analyze,
    domain_axioms,
    feature_effect,
    is_satisfiable,
    is_tautology,
    parse_formula,
    scan_blocks,
    simplify_formula,
    translate_condition,
)

__all__ = [
    "VareffectError",
    "__version__",
    "aggregate",
    "analyze",
    "domain_axioms",
    "feature_effect",
    "is_satisfiable",
    "is_tautology",
    "parse_formula",
    "scan_blocks",
    "simplify_formula",
    "translate_condition",
]
