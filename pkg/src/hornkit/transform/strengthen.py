"""Constraint strengthening with invariants found by query-answer analysis."""

from __future__ import annotations

from dataclasses import dataclass

from ..analyze import AnalysisConfig, CpaResult, PolyModel, cpa_lfp
from ..core import FALSE, Constraint, Program
from .qa import qa_names, qa_transform, single_goal


@dataclass
class StrengthenResult:
    program: Program
    qa: Program
    analysis: CpaResult
    invariants: dict[str, Constraint]


def invariants_from(p: Program, model: PolyModel) -> dict[str, Constraint]:
    """Per original predicate, the analysed answer constraint (false if never answered)."""
    defs, goal = single_goal(p)
    names = qa_names(defs.with_clauses(list(defs.clauses) + [goal]))
    out = {}
    for pred, arity in p.predicates().items():
        if pred == "false":
            continue
        ans = names[pred][1]
        c = model.get(ans)
        if c is None:
            out[pred] = FALSE
        else:
            out[pred] = c.rename(dict(zip(model.names[ans], [f"$d{i}" for i in range(arity)])))
    return out


def _inst(d: Constraint, args) -> Constraint:
    return d.subst({f"$d{i}": t for i, t in enumerate(args)})


def strengthen_full(p: Program, cfg: AnalysisConfig = AnalysisConfig()) -> StrengthenResult:
    qa = qa_transform(p)
    res = cpa_lfp(qa, cfg)
    inv = invariants_from(p, res.model)
    out = []
    for c in p.clauses:
        add = []
        if c.head is not None and c.head.pred in inv:
            add.append(_inst(inv[c.head.pred], c.head.args))
        for a in c.atoms:
            if a.pred in inv:
                add.append(_inst(inv[a.pred], a.args))
        k = Constraint.of(())
        for x in add:
            k = k & x
        out.append(c.with_constraint(k & c.constraint))
    return StrengthenResult(p.with_clauses(out), qa, res, inv)


def strengthen(p: Program, cfg: AnalysisConfig = AnalysisConfig()) -> Program:
    """Conjoin analysed invariants into every clause defining or calling a predicate.

    The invariant of ``p`` is the polyhedral model of ``p_a`` after the
    query-answer transformation, so only facts that matter for the goal are
    kept.  The result has the same least-model consequences for the goal.
    """
    return strengthen_full(p, cfg).program
