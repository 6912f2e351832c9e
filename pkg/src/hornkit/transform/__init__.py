"""Satisfiability-preserving transformations of CHC programs."""

from .args import far, raf
from .qa import qa_transform, reverse
from .specialise import (
    SpecialisationBudget,
    control_flow_refinement,
    predicate_pair,
    predicate_pair_state,
    specialise,
    specialise_state,
)
from .state import (
    FoldError,
    Step,
    CorrectnessViolation,
    TransformError,
    TransformState,
    cleanup,
    flatten_atoms,
    normalize,
    replay,
)
from .strengthen import strengthen, strengthen_full

__all__ = [
    "FoldError",
    "SpecialisationBudget",
    "Step",
    "CorrectnessViolation",
    "TransformError",
    "TransformState",
    "cleanup",
    "control_flow_refinement",
    "far",
    "flatten_atoms",
    "normalize",
    "predicate_pair",
    "predicate_pair_state",
    "qa_transform",
    "raf",
    "replay",
    "reverse",
    "specialise",
    "specialise_state",
    "strengthen",
    "strengthen_full",
]
