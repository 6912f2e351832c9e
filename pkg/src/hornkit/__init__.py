"""Constrained Horn clauses over linear arithmetic: parsing, evaluation,
polyhedral analysis, fold/unfold transformations and verification-condition
generation."""

from .analyze import AnalysisConfig, PolyModel, check_goals, check_model, cpa_lfp
from .core import (
    Atom,
    AtomicConstraint,
    Clause,
    Constraint,
    LinearTerm,
    ParseError,
    Program,
    parse_constraint,
    parse_program,
    print_program,
)
from .equiv import find_renaming, same_up_to_renaming
from .evaluate import Interpretation, kleene_lfp, success_set_k, td_derive, tp_step
from .linarith import Verdict
from .pipeline import Settings, check_sat, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "Atom",
    "AtomicConstraint",
    "Clause",
    "Constraint",
    "Interpretation",
    "LinearTerm",
    "ParseError",
    "PolyModel",
    "Program",
    "Settings",
    "Verdict",
    "check_goals",
    "check_model",
    "check_sat",
    "cpa_lfp",
    "find_renaming",
    "kleene_lfp",
    "parse_constraint",
    "parse_program",
    "print_program",
    "run_pipeline",
    "same_up_to_renaming",
    "success_set_k",
    "td_derive",
    "tp_step",
]
