"""Query-answer transformation and clause reversal."""

from __future__ import annotations

from typing import Optional

from ..core import TRUE, Atom, Clause, Program, fresh_name
from .state import TransformError

GOAL_PRED = "goal"


def single_goal(p: Program, goal_index: Optional[int] = None) -> tuple[Program, Clause]:
    """Definite clauses of ``p`` plus one goal ``false <- c, A``.

    With ``goal_index`` only that goal is kept.  Several goals, or a goal
    with more than one atom, are wrapped by a fresh zero-arity predicate.
    """
    goals = p.goals
    if goal_index is not None:
        if not 0 <= goal_index < len(goals):
            raise TransformError(f"no goal with index {goal_index}")
        goals = [goals[goal_index]]
    if not goals:
        raise TransformError("the program has no goal")
    definite = list(p.definite)
    if len(goals) == 1 and len(goals[0].atoms) == 1:
        return p.with_clauses(definite), goals[0]
    if len(goals) == 1 and not goals[0].atoms:
        raise TransformError("the goal has no atoms")
    name = fresh_name(GOAL_PRED, set(p.predicates()) | {"false"})
    head = Atom(name)
    wrapped = [Clause(head, g.constraint, g.atoms) for g in goals]
    return p.with_clauses(definite + wrapped), Clause(None, TRUE, (head,))


def qa_names(p: Program) -> dict[str, tuple[str, str]]:
    taken = set(p.predicates()) | {"false"}
    out = {}
    for pred in p.predicates():
        if pred == "false":
            continue
        q = fresh_name(f"{pred}_q", taken)
        taken.add(q)
        a = fresh_name(f"{pred}_a", taken)
        taken.add(a)
        out[pred] = (q, a)
    return out


def qa_transform(p: Program, goal_index: Optional[int] = None) -> Program:
    """Query-answer transformation with respect to the goal.

    For each clause ``H <- c, A1..An`` this emits the answer clause
    ``H_a <- c, H_q, A1_a..An_a`` and the query clauses
    ``Aj_q <- c, H_q, A1_a..Aj-1_a``; the goal ``false <- c, A`` yields the
    seed ``A_q <- c`` and the new goal ``false <- c, A_a``.
    """
    defs, goal = single_goal(p, goal_index)
    names = qa_names(defs.with_clauses(list(defs.clauses) + [goal]))

    def q(a: Atom) -> Atom:
        return a.with_pred(names[a.pred][0])

    def ans(a: Atom) -> Atom:
        return a.with_pred(names[a.pred][1])

    (target,) = goal.atoms
    answers, queries = [], []
    for c in defs.clauses:
        hq = q(c.head)
        body_a = tuple(ans(a) for a in c.atoms)
        answers.append(Clause(ans(c.head), c.constraint, (hq,) + body_a))
        for j, a in enumerate(c.atoms):
            queries.append(Clause(q(a), c.constraint, (hq,) + body_a[:j]))
    seed = Clause(q(target), goal.constraint)
    new_goal = Clause(None, goal.constraint, (ans(target),))
    return p.with_clauses([new_goal] + answers + queries + [seed])


def reverse(p: Program) -> Program:
    """Swap head and body of every linear clause.

    ``A <- c`` becomes ``false <- c, A``; ``H <- c, B`` becomes ``B <- c, H``;
    ``false <- c, A`` becomes ``A <- c``.  Goals without atoms are kept.
    """
    out = []
    for c in p.clauses:
        if len(c.atoms) > 1:
            raise TransformError(f"reversal needs linear clauses: {c}")
        if c.is_goal:
            out.append(c if not c.atoms else Clause(c.atoms[0], c.constraint))
        elif not c.atoms:
            out.append(Clause(None, c.constraint, (c.head,)))
        else:
            out.append(Clause(c.atoms[0], c.constraint, (c.head,)))
    return p.with_clauses(out)
