"""Concrete semantics: bottom-up T_P iteration and top-down derivations."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from . import linarith as la
from .core import TRUE, Atom, Clause, Constraint, Program
from .resolve import canonical_head, positional, resolvent

GOAL_ATOM = Atom("false")


@dataclass(frozen=True)
class Interpretation:
    """Finite set of constrained facts ``p(X1..Xn) <- c``."""

    facts: tuple[Clause, ...] = ()

    def for_pred(self, pred: str) -> list[Clause]:
        return [f for f in self.facts if f.head.pred == pred]

    def preds(self) -> list[str]:
        seen: dict[str, None] = {}
        for f in self.facts:
            seen.setdefault(f.head.pred)
        return list(seen)

    def subsumes_fact(self, f: Clause) -> bool:
        """Some single fact of this interpretation entails-covers ``f``."""
        names = [f"X{i + 1}" for i in range(f.head.arity)]
        fc = positional(f.head, f.constraint, names)
        return any(la.entail(fc, positional(g.head, g.constraint, names)) for g in self.for_pred(f.head.pred))

    def subsumes(self, other: "Interpretation") -> bool:
        return all(self.subsumes_fact(f) for f in other.facts)

    def union(self, facts: Iterable[Clause]) -> "Interpretation":
        return Interpretation(self.facts + tuple(facts))

    def __len__(self) -> int:
        return len(self.facts)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.facts)

    def __str__(self) -> str:
        return "".join(str(f) + "\n" for f in self.facts)


def make_fact(head: Atom, c: Constraint, mode: str = "rat") -> Optional[Clause]:
    """Canonical fact: distinct variable arguments, constraint projected on them."""
    head, c = canonical_head(head, c, ())
    if la.is_unsat(c):
        return None
    return Clause(head, la.proj(c, head.vars()))


def _bodies(clause: Clause, interp: Interpretation) -> Iterator[tuple[Constraint, ...]]:
    """Constraints obtained by resolving every body atom with a fact."""
    choices = [interp.for_pred(a.pred) for a in clause.atoms]
    for combo in itertools.product(*choices):
        avoid = set(clause.vars())
        parts = []
        for a, f in zip(clause.atoms, combo):
            c, _ = resolvent(a, f, avoid)
            avoid |= set(c.vars())
            parts.append(c)
        yield tuple(parts)


def tp_step(p: Program, interp: Interpretation, include_goals: bool = False) -> Interpretation:
    """One application of the immediate consequence operator.

    With ``include_goals`` a goal contributes a fact for the zero-arity
    pseudo predicate ``false`` whenever its body is satisfiable.
    """
    out: list[Clause] = []
    for clause in p.clauses:
        if clause.is_goal and not include_goals:
            continue
        head = GOAL_ATOM if clause.is_goal else clause.head
        for parts in _bodies(clause, interp):
            c = clause.constraint
            for x in parts:
                c = c & x
            for disjunct in la.split_disequalities(c):
                if la.is_unsat(disjunct, p.mode):
                    continue
                f = make_fact(head, disjunct, p.mode)
                if f is not None and f not in out:
                    out.append(f)
    return Interpretation(tuple(out))


class KleeneResult:
    """Outcome of Kleene iteration.  Unpacks as ``(interpretation, converged)``."""

    def __init__(self, interpretation: Interpretation, converged: bool, iterations: int, productive: int):
        self.interpretation = interpretation
        self.converged = converged
        self.iterations = iterations
        self.productive = productive

    def __iter__(self):
        return iter((self.interpretation, self.converged))

    def __repr__(self) -> str:
        return (
            f"KleeneResult(facts={len(self.interpretation)}, converged={self.converged}, "
            f"iterations={self.iterations}, productive={self.productive})"
        )


def kleene_lfp(p: Program, max_iters: int = 64, include_goals: bool = False) -> KleeneResult:
    """Iterate ``I -> I u T_P(I)`` from the empty interpretation.

    A new fact is dropped when a single existing fact of the same predicate
    subsumes it.  Stops as soon as a step adds nothing.
    """
    assert max_iters >= 1
    interp = Interpretation()
    productive = 0
    for it in range(1, max_iters + 1):
        new = tp_step(p, interp, include_goals)
        added: list[Clause] = []
        for f in new.facts:
            cur = interp.union(added)
            if not cur.subsumes_fact(f):
                added.append(f)
        if not added:
            return KleeneResult(interp, True, it, productive)
        productive += 1
        interp = interp.union(added)
    return KleeneResult(interp, False, max_iters, productive)


# ------------------------------------------------------------- top-down


@dataclass(frozen=True)
class DerivationNode:
    atoms: tuple[Atom, ...]
    constraint: Constraint
    depth: int = 0
    path: tuple[int, ...] = ()


@dataclass(frozen=True)
class DerivationOutcome:
    """``kind`` is ``successful``, ``finitely_failed`` or ``depth_exhausted``."""

    kind: str
    answer: Optional[Constraint] = None
    path: tuple[int, ...] = ()
    frontier: int = 0
    point: Optional[dict] = None

    @property
    def successful(self) -> bool:
        return self.kind == "successful"

    def __str__(self) -> str:
        if self.kind == "successful":
            return f"successful: {self.answer} via clauses {list(self.path)}"
        if self.kind == "depth_exhausted":
            return f"depth_exhausted (frontier {self.frontier})"
        return "finitely_failed"


def _shrink(c: Constraint, keep: set[str], mode: str) -> Constraint:
    """Drop variables that no longer matter, exactly for the given mode."""
    if mode == "rat":
        return la.proj(c, keep, simp=False)
    return la.proj_exact(c, keep, mode)


def td_derive(p: Program, goal: Clause, max_depth: int = 32, budget: int = la.DEFAULT_BUDGET) -> DerivationOutcome:
    """Breadth-first search of the derivation tree of ``goal``.

    Leftmost computation rule; a node whose constraint is unsatisfiable
    fails immediately.  Depth counts resolution steps.
    """
    assert goal.is_goal
    return _search(p, goal.atoms, goal.constraint, set(goal.vars()), max_depth, budget, first_only=True)[0][0]


def _search(p: Program, atoms, constraint, answer_vars: set[str], max_depth: int, budget: int, first_only: bool):
    mode = p.mode
    index = {i: c for i, c in enumerate(p.clauses)}
    by_pred: dict[str, list[int]] = {}
    for i, c in index.items():
        if c.head is not None:
            by_pred.setdefault(c.head.pred, []).append(i)
    answers: list[DerivationOutcome] = []
    queue = deque([DerivationNode(tuple(atoms), constraint, 0, ())])
    cut = 0
    undecided = False
    while queue:
        node = queue.popleft()
        sat = la.is_sat(node.constraint, mode, budget)
        if sat is False:
            continue
        if not node.atoms:
            if sat is None:
                undecided = True
                continue
            ans = la.proj(node.constraint, answer_vars) if mode == "rat" else node.constraint
            ans = Constraint.of(a.canonical() for a in ans.conjuncts)
            _, pt = la.solv(node.constraint, mode, budget)
            out = DerivationOutcome("successful", ans, node.path, point=pt)
            if first_only:
                return [out], 0, undecided
            answers.append(out)
            continue
        if node.depth >= max_depth:
            cut += 1
            continue
        sel, rest = node.atoms[0], node.atoms[1:]
        avoid = set(node.constraint.vars()) | answer_vars
        for a in node.atoms:
            avoid |= set(a.vars())
        for i in by_pred.get(sel.pred, []):
            c, body = resolvent(sel, index[i], avoid)
            new_c = node.constraint & c
            if new_c.unsat or la.is_unsat(new_c):
                continue
            new_atoms = body + rest
            keep = set(answer_vars)
            for a in new_atoms:
                keep |= set(a.vars())
            new_c = _shrink(new_c, keep, mode)
            queue.append(DerivationNode(new_atoms, new_c, node.depth + 1, node.path + (i,)))
    if answers:
        return answers, cut, undecided
    if cut or undecided:
        return [DerivationOutcome("depth_exhausted", frontier=cut)], cut, undecided
    return [DerivationOutcome("finitely_failed")], 0, undecided


def success_set_k(p: Program, pattern: Atom, k: int, budget: int = la.DEFAULT_BUDGET) -> Interpretation:
    """Facts for ``pattern`` from successful derivations of at most ``k`` steps."""
    if k <= 0:
        return Interpretation()
    head, c0 = canonical_head(pattern, TRUE, ())
    answers, _, _ = _search(p, (pattern,), TRUE, set(pattern.vars()), k, budget, first_only=False)
    facts: list[Clause] = []
    for out in answers:
        if not out.successful:
            continue
        f = make_fact(pattern, out.answer, p.mode)
        if f is not None and f not in facts:
            facts.append(f)
    return Interpretation(tuple(facts))


def goals_hold(p: Program, interp: Interpretation) -> bool:
    """Every goal body is unsatisfiable under the facts of ``interp``."""
    for g in p.goals:
        for parts in _bodies(g, interp):
            c = g.constraint
            for x in parts:
                c = c & x
            if not la.is_unsat(c, p.mode):
                return False
    return True
