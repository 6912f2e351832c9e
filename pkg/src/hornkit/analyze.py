"""Convex-polyhedral abstract interpretation of CHCs.

Each predicate is approximated by one constrained fact.  The iteration runs
over the strongly connected components of the call graph, callees first,
joining with convex hull and switching to widening once a predicate has
changed more than ``widening_delay`` times.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import networkx as nx

from . import linarith as la
from .core import FALSE, Atom, AtomicConstraint, Clause, Constraint, LinearTerm, Program
from .evaluate import Interpretation
from .linarith import Verdict
from .resolve import canonical_head


@dataclass(frozen=True)
class AnalysisConfig:
    widening_delay: int = 1
    join: str = "hull"  # or "union-then-hull"
    max_iters: int = 100

    def __post_init__(self):
        if self.max_iters < self.widening_delay:
            raise ValueError("max_iters must be at least widening_delay")
        if self.join not in ("hull", "union-then-hull"):
            raise ValueError(f"unknown join {self.join!r}")


def _arg_names(p: Program, pred: str, arity: int) -> tuple[str, ...]:
    for c in p.defining(pred):
        vs = [t.as_var() for t in c.head.args]
        if all(v is not None for v in vs) and len(set(vs)) == len(vs):
            return tuple(vs)
    return tuple(f"X{i + 1}" for i in range(arity))


@dataclass
class PolyModel:
    """Per predicate: argument names and a constraint over them, or bottom."""

    names: dict[str, tuple[str, ...]] = field(default_factory=dict)
    constraints: dict[str, Constraint] = field(default_factory=dict)

    def is_bottom(self, pred: str) -> bool:
        return pred not in self.constraints

    def get(self, pred: str) -> Optional[Constraint]:
        return self.constraints.get(pred)

    def instantiate(self, a: Atom) -> Constraint:
        """Model constraint of ``a.pred`` applied to the arguments of ``a``."""
        c = self.constraints.get(a.pred)
        if c is None:
            return FALSE
        return _instantiate(self.names[a.pred], c, a)

    def fact(self, pred: str) -> Clause:
        names = self.names[pred]
        return Clause(Atom(pred, tuple(LinearTerm.var(v) for v in names)), self.constraints[pred])

    def as_interpretation(self) -> Interpretation:
        return Interpretation(tuple(self.fact(p) for p in self.constraints))

    def to_json(self) -> list[dict]:
        out = []
        for pred, names in self.names.items():
            c = self.constraints.get(pred)
            out.append(
                {
                    "predicate": pred,
                    "arity": len(names),
                    "args": list(names),
                    "constraint": None if c is None else str(c),
                    "status": "bottom" if c is None else "reachable",
                }
            )
        return out

    def __str__(self) -> str:
        return "".join(str(self.fact(p)) + "\n" for p in self.constraints)


def _instantiate(names: Sequence[str], c: Constraint, a: Atom) -> Constraint:
    # go through private names so argument terms cannot capture each other
    tmp = [f"$a{i}" for i in range(len(names))]
    c = c.rename(dict(zip(names, tmp)))
    return c.subst({t: arg for t, arg in zip(tmp, a.args)})


def _drop_diseqs(c: Constraint) -> Constraint:
    if c.unsat:
        return c
    return Constraint(tuple(a for a in c.conjuncts if a.normal[0] != "!="))


def _int_tighten(c: Constraint) -> Constraint:
    """Replace ``t<0`` by ``t+1<=0`` (sound over the integers)."""
    if c.unsat:
        return c
    out = []
    for a in c.conjuncts:
        rel, t = a.normal
        if rel == "<" and all(k.denominator == 1 for _, k in t.coeffs) and t.const.denominator == 1:
            out.append(AtomicConstraint.from_normal("<=", t + LinearTerm.num(1)))
        else:
            out.append(a)
    return Constraint.of(out)


def prepare(p: Program) -> Program:
    """Clauses as the analyser sees them: no disequalities, integers tightened."""
    out = []
    for c in p.clauses:
        k = _drop_diseqs(c.constraint)
        if p.mode == "int":
            k = _int_tighten(k)
        out.append(c.with_constraint(k))
    return p.with_clauses(out)


def _clause_image(c: Clause, m: PolyModel, names: Sequence[str]) -> Optional[Constraint]:
    """Head constraint derived by one clause under ``m``; None if a body atom is bottom."""
    body = c.constraint
    for a in c.atoms:
        if m.is_bottom(a.pred):
            return None
        body = body & m.instantiate(a)
    head, body = canonical_head(c.head, body, names)
    if body.unsat or la.is_unsat(body):
        return FALSE
    hv = [t.as_var() for t in head.args]
    projected = la.proj(body, hv)
    return projected.rename(dict(zip(hv, names))) if not projected.unsat else FALSE


def _scc_order(p: Program) -> list[list[str]]:
    g = nx.DiGraph()
    for c in p.definite:
        g.add_node(c.head.pred)
        for a in c.atoms:
            g.add_edge(c.head.pred, a.pred)
    cond = nx.condensation(g)
    order = list(reversed(list(nx.topological_sort(cond))))
    return [sorted(cond.nodes[n]["members"]) for n in order]


class CpaResult:
    """Unpacks as ``(model, stable)``; also carries a per-round trace."""

    def __init__(self, model: PolyModel, stable: bool, trace: list[dict[str, str]], rounds: int):
        self.model = model
        self.stable = stable
        self.trace = trace
        self.rounds = rounds

    def __iter__(self):
        return iter((self.model, self.stable))


def cpa_lfp(p: Program, cfg: AnalysisConfig = AnalysisConfig()) -> CpaResult:
    """Polyhedral post-fixpoint of the definite clauses of ``p``."""
    q = prepare(p)
    preds = q.predicates()
    model = PolyModel({pr: _arg_names(q, pr, ar) for pr, ar in preds.items() if pr != "false"})
    changes: dict[str, int] = {}
    trace: list[dict[str, str]] = []
    stable = True
    rounds = 0
    for scc in _scc_order(q):
        clauses = [c for c in q.definite if c.head.pred in scc]
        for _ in range(cfg.max_iters):
            rounds += 1
            images: dict[str, list[Constraint]] = {}
            for c in clauses:
                img = _clause_image(c, model, model.names[c.head.pred])
                if img is None or img.unsat:
                    continue
                images.setdefault(c.head.pred, []).append(img)
            changed = False
            for pred, imgs in images.items():
                new = imgs[0]
                for x in imgs[1:]:
                    new = la.convex_hull(new, x)
                old = model.get(pred)
                if old is None:
                    model.constraints[pred] = new
                    changed = True
                    continue
                if la.entail(new, old):
                    continue
                changes[pred] = changes.get(pred, 0) + 1
                if changes[pred] > cfg.widening_delay:
                    model.constraints[pred] = la.widen(old, new)
                else:
                    model.constraints[pred] = la.convex_hull(old, new)
                changed = True
            if changed:
                trace.append({pr: str(model.constraints[pr]) for pr in scc if pr in model.constraints})
            else:
                break
        else:
            stable = False
    return CpaResult(model, stable, trace, rounds)


def check_goals(m: PolyModel, goals: Sequence[Clause], mode: str = "rat") -> list[Verdict]:
    """``sat`` for each goal whose body is unsatisfiable under ``m``, else ``unknown``."""
    out = []
    for g in goals:
        body = _drop_diseqs(g.constraint)
        for a in g.atoms:
            body = body & m.instantiate(a)
        out.append(Verdict.SAT if (body.unsat or la.is_unsat(body)) else Verdict.UNKNOWN)
    return out


def _fact_disjuncts(candidate, a: Atom) -> list[Constraint]:
    if isinstance(candidate, PolyModel):
        return [] if candidate.is_bottom(a.pred) else [candidate.instantiate(a)]
    out = []
    for f in candidate.for_pred(a.pred):
        if f.head.arity != a.arity:
            continue
        head, c = canonical_head(f.head, f.constraint, ())
        hv = [t.as_var() for t in head.args]
        c = la.proj(c, hv, simp=False) if set(c.vars()) - set(hv) else c
        out.append(_instantiate(hv, c, a))
    return out


def check_model(p: Program, candidate: Union[Interpretation, PolyModel], mode: Optional[str] = None) -> bool:
    """Whether ``candidate`` is a model of every clause of ``p``.

    Facts of the same predicate in an Interpretation are read as a
    disjunction.  In integer mode entailment is checked over the integers
    (an inconclusive search counts as failure).
    """
    return not model_violations(p, candidate, mode)


def model_violations(p: Program, candidate, mode: Optional[str] = None) -> list[Clause]:
    mode = mode or p.mode
    bad: list[Clause] = []
    for c in p.clauses:
        choices = [_fact_disjuncts(candidate, a) for a in c.atoms]
        heads = [] if c.head is None else _fact_disjuncts(candidate, c.head)
        ok = True
        for combo in itertools.product(*choices):
            body = c.constraint
            for x in combo:
                body = body & x
            if not la.entails_disjunction(body, heads, mode):
                ok = False
                break
        if not ok:
            bad.append(c)
    return bad


def model_from_text(text: str) -> Interpretation:
    from .core import parse_program

    return Interpretation(tuple(parse_program(text).clauses))
