"""Removal of redundant predicate arguments.

``raf`` works top-down: a position is dropped when every call passes a
variable that nothing else in the calling clause looks at.  ``far`` works
bottom-up: a position is dropped when every defining clause leaves it
unconstrained.  Both compute a greatest fixpoint of erasable positions and
rename the predicates that lose arguments.
"""

from __future__ import annotations

from typing import Optional

from ..core import Atom, Clause, Program, fresh_name
from .qa import single_goal
from .state import cleanup

Position = tuple[str, int]


def _all_positions(p: Program) -> set[Position]:
    return {(pred, i) for pred, n in p.predicates().items() if pred != "false" for i in range(n)}


def _occurrences(c: Clause, erased: set[Position], skip: tuple[int, int]) -> list[str]:
    """Variables of ``c`` everywhere except body position ``skip`` and erased head positions."""
    out = list(c.constraint.vars())
    if c.head is not None:
        for i, t in enumerate(c.head.args):
            if (c.head.pred, i) in erased:
                continue
            out.extend(t.vars())
    for k, a in enumerate(c.atoms):
        for i, t in enumerate(a.args):
            if (k, i) != skip:
                out.extend(t.vars())
    return out


def _erase(p: Program, erased: set[Position]) -> Program:
    if not erased:
        return p
    preds = {pr for pr, _ in erased}
    taken = set(p.predicates()) | {"false"}
    names = {}
    for pr in sorted(preds):
        n = fresh_name(pr, taken)
        taken.add(n)
        names[pr] = n

    def strip(a: Atom) -> Atom:
        if a.pred not in preds:
            return a
        return Atom(names[a.pred], tuple(t for i, t in enumerate(a.args) if (a.pred, i) not in erased))

    out = []
    for c in p.clauses:
        head = None if c.head is None else strip(c.head)
        out.append(Clause(head, c.constraint, tuple(strip(a) for a in c.atoms)))
    return p.with_clauses(out)


def raf_positions(p: Program) -> set[Position]:
    erased = _all_positions(p)
    changed = True
    while changed:
        changed = False
        for c in p.clauses:
            for k, a in enumerate(c.atoms):
                for i, t in enumerate(a.args):
                    if (a.pred, i) not in erased:
                        continue
                    v = t.as_var()
                    if v is None or v in _occurrences(c, erased, (k, i)):
                        erased.discard((a.pred, i))
                        changed = True
    return erased


def raf(p: Program, goal_index: Optional[int] = None) -> Program:
    """Top-down redundant argument filtering.

    With ``goal_index`` the program is first restricted to that goal.
    """
    if goal_index is not None:
        defs, goal = single_goal(p, goal_index)
        p = defs.with_clauses([goal] + list(defs.clauses))
    return _erase(p, raf_positions(p))


def far_positions(p: Program) -> set[Position]:
    erased = _all_positions(p)
    changed = True
    while changed:
        changed = False
        for c in p.definite:
            for i, t in enumerate(c.head.args):
                if (c.head.pred, i) not in erased:
                    continue
                v = t.as_var()
                rest = list(c.constraint.vars())
                for j, s in enumerate(c.head.args):
                    if j != i:
                        rest.extend(s.vars())
                for a in c.atoms:
                    for j, s in enumerate(a.args):
                        if (a.pred, j) not in erased:
                            rest.extend(s.vars())
                if v is None or v in rest:
                    erased.discard((c.head.pred, i))
                    changed = True
    return erased


def far(p: Program) -> Program:
    """Bottom-up redundant argument filtering, with constraint cleanup before and after."""
    p = p.with_clauses([cleanup(c, p.mode) for c in p.clauses])
    erased = far_positions(p)
    if not erased:
        return p
    q = _erase(p, erased)
    return q.with_clauses([cleanup(c, q.mode) for c in q.clauses])
