"""Specialisation by definition, unfolding and folding.

The same engine drives three strategies:

* ``specialise``: one new predicate per constrained atom, generalised with
  widening against ancestor definitions;
* ``predicate_pair``: new predicates for constrained conjunctions of two
  atoms;
* ``control_flow_refinement``: polyvariant versions of each predicate, one
  per set of guard properties that hold at the call.

Generalisation restarts the run: the widened constraint is remembered as a
hint for its atom skeleton and the whole specialisation starts again, so the
goal itself is folded with the generalised definition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import networkx as nx

from .. import linarith as la
from ..core import TRUE, Atom, AtomicConstraint, Clause, Constraint, LinearTerm, Program
from .state import TransformError, TransformState

Skeleton = tuple


class SpecialisationBudget(TransformError):
    def __init__(self, msg: str, state: Optional[TransformState] = None):
        super().__init__(msg)
        self.state = state


class _Restart(Exception):
    def __init__(self, key: Skeleton, constraint: Constraint):
        self.key = key
        self.constraint = constraint


def skeleton(atoms: Sequence[Atom]) -> tuple[Skeleton, list[str]]:
    """Predicates, constants and variable sharing of ``atoms``, plus the variables in order."""
    idx: dict[str, int] = {}
    key = []
    for a in atoms:
        args = []
        for t in a.args:
            v = t.as_var()
            if v is not None:
                args.append(("v", idx.setdefault(v, len(idx))))
            else:
                args.append(("c", t.const))
        key.append((a.pred, tuple(args)))
    return tuple(key), list(idx)


def _positional(names: Sequence[str]) -> dict[str, str]:
    return {v: f"_P{i}" for i, v in enumerate(names)}


@dataclass
class Candidate:
    positions: tuple[int, ...]
    atoms: tuple[Atom, ...]
    constraint: Constraint
    key: Skeleton
    names: list[str]

    def positional(self) -> Constraint:
        return self.constraint.rename(_positional(self.names))


def _fixed_vars(c: Constraint, vs: Iterable[str]) -> set[str]:
    out = set()
    for v in vs:
        p = la.proj(c, {v})
        if any(a.normal[0] == "=" for a in p.conjuncts):
            out.add(v)
    return out


def make_candidate(clause: Clause, positions: Sequence[int], mode: str, propagate: bool = True) -> Candidate:
    """Canonical constrained atoms for the atoms at ``positions``.

    Variables that the constraint forces to be equal are merged, unless they
    are pinned to a constant, so the sharing between atoms becomes explicit.
    """
    atoms = [clause.atoms[p] for p in positions]
    c = clause.constraint
    _, names = skeleton(atoms)
    fixed = _fixed_vars(c, names)
    ren: dict[str, LinearTerm] = {}
    for i, u in enumerate(names):
        if u in ren or u in fixed:
            continue
        for v in names[i + 1 :]:
            if v in ren or v in fixed:
                continue
            if la.entail(c, Constraint.of([AtomicConstraint(LinearTerm.var(u), "=", LinearTerm.var(v))])):
                ren[v] = LinearTerm.var(u)
    atoms = [a.subst(ren) for a in atoms]
    key, names = skeleton(atoms)
    if propagate:
        cons = la.proj_exact(c, names, mode)
        cons = Constraint.of(a.canonical() for a in cons.conjuncts) if not cons.unsat else cons
    else:
        cons = TRUE
    return Candidate(tuple(positions), tuple(atoms), cons, key, names)


def _recursive_preds(p: Program) -> set[str]:
    g = nx.DiGraph()
    for c in p.clauses:
        g.add_node(c.head_pred)
        for a in c.atoms:
            g.add_edge(c.head_pred, a.pred)
    rec = set()
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1:
            rec |= comp
        else:
            (n,) = comp
            if g.has_edge(n, n):
                rec.add(n)
    return rec


def _property_pool(p: Program) -> dict[str, list[Constraint]]:
    """Guards of each predicate's clauses that only mention head variables."""
    pool: dict[str, list[Constraint]] = {}
    for c in p.definite:
        hv = [t.as_var() for t in c.head.args]
        if any(v is None for v in hv) or len(set(hv)) != len(hv):
            continue
        lst = pool.setdefault(c.head.pred, [])
        for a in c.constraint.conjuncts:
            if a.normal[0] == "!=" or not set(a.vars()) <= set(hv):
                continue
            pc = Constraint((a,)).rename(_positional(hv))
            if pc not in lst:
                lst.append(pc)
    return pool


@dataclass
class _DefInfo:
    id: int
    key: Skeleton
    pc: Constraint  # constraint over positional names


class _Engine:
    def __init__(
        self,
        p: Program,
        *,
        gen: str,
        max_unfold: int,
        propagate: bool,
        roots: Sequence[str],
        naming: str,
        grouping: Callable[["_Engine", Clause], list[list[int]]],
        hints: dict[Skeleton, list[Constraint]],
        inline_roots: bool,
        max_defs: int,
    ):
        self.p = p
        self.gen = gen
        self.max_unfold = max_unfold
        self.propagate = propagate
        self.root_preds = set(roots)
        self.naming = naming
        self.grouping = grouping
        self.hints = hints
        self.inline_roots = inline_roots
        self.max_defs = max_defs
        self.st = TransformState(p)
        self.recursive = _recursive_preds(p)
        self.originals = set(p.predicates())
        self.defs: list[_DefInfo] = []
        self.work: list[int] = []
        self.pool = _property_pool(p) if gen == "properties" else {}
        self.version: dict[str, int] = {}

    # -------------------------------------------------------- definitions

    def _name(self, atoms: Sequence[Atom]) -> str:
        if self.naming == "version" and len(atoms) == 1:
            base = atoms[0].pred
            k = self.version.get(base, 0)
            taken = self.st.predicates() | self.originals
            while f"{base}{k}" in taken:
                k += 1
            self.version[base] = k + 1
            return f"{base}{k}"
        if self.naming == "concat" and len(atoms) > 1:
            return self.st.fresh_pred("".join(a.pred for a in atoms))
        return self.st.fresh_pred("sp")

    def _properties(self, cand: Candidate) -> Constraint:
        if len(cand.atoms) != 1:
            raise TransformError("property abstraction supports single-atom definitions only")
        a = cand.atoms[0]
        # pool constraints are over the predicate's argument positions
        argmap = {f"_P{i}": t for i, t in enumerate(a.args)}
        pc = cand.positional()
        ren = _positional(cand.names)
        out = []
        for prop in self.pool.get(a.pred, []):
            inst = prop.subst({k: v.rename(ren) for k, v in argmap.items()})
            if la.entail(pc, inst, self.p.mode):
                out.extend(inst.conjuncts)
        return Constraint.of(out)

    def _weakest_hint(self, key: Skeleton, pc: Constraint) -> Optional[Constraint]:
        opts = [h for h in self.hints.get(key, []) if la.entail(pc, h)]
        if not opts:
            return None
        score = [sum(1 for o in opts if la.entail(o, h)) for h in opts]
        best = max(score)
        return [h for h, s in zip(opts, score) if s == best][-1]

    def choose(self, cand: Candidate, parent: Optional[int]) -> int:
        pc = cand.positional()
        if self.gen == "properties":
            props = self._properties(cand)
            for d in self.defs:
                if d.key == cand.key and d.pc.key() == props.key():
                    return d.id
            return self._new_def(cand, props, parent)
        options = [d for d in self.defs if d.key == cand.key and la.entail(pc, d.pc)]
        if options:
            score = [sum(1 for o in options if la.entail(d.pc, o.pc)) for d in options]
            best = max(score)
            return [d for d, s in zip(options, score) if s == best][-1].id
        if self.propagate:
            for anc in self.st.ancestors(parent):
                info = next(d for d in self.defs if d.id == anc.id)
                if info.key != cand.key:
                    continue
                if self.gen == "hull-then-widening":
                    g = la.widen(info.pc, la.convex_hull(info.pc, pc))
                else:
                    g = la.widen(Constraint.of(la.split_equalities(info.pc)), pc)
                raise _Restart(cand.key, g)
            cons = self._weakest_hint(cand.key, pc) or pc
        else:
            cons = TRUE
        return self._new_def(cand, cons, parent)

    def _new_def(self, cand: Candidate, pc: Constraint, parent: Optional[int]) -> int:
        if len(self.defs) >= self.max_defs:
            raise SpecialisationBudget(f"more than {self.max_defs} definitions", self.st)
        back = {v: k for k, v in _positional(cand.names).items()}
        cons = pc.rename(back)
        name = self._name(cand.atoms)
        head = Atom(name, tuple(LinearTerm.var(v) for v in cand.names))
        did = self.st.define(Clause(head, cons, cand.atoms), parent)
        self.defs.append(_DefInfo(did, cand.key, pc))
        self.work.append(did)
        return did

    # ------------------------------------------------------------ control

    def fold_all(self, cid: int, parent: Optional[int]) -> int:
        while True:
            c = self.st.clauses[cid]
            groups = self.grouping(self, c)
            if not groups:
                return cid
            g = groups[0]
            cand = make_candidate(c, g, self.p.mode, self.propagate)
            did = self.choose(cand, parent)
            cid = self.st.fold(cid, g, did)

    def _unfold_def(self, did: int) -> list[int]:
        k = len(self.st.clauses[did].atoms)
        ids = [did]
        # unfold the definition's atoms right to left so positions stay valid
        for pos in reversed(range(k)):
            nxt = []
            for cid in ids:
                nxt.extend(self.st.unfold(cid, pos))
            ids = nxt
        budget = {cid: k for cid in ids}
        out = []
        queue = list(ids)
        while queue:
            cid = queue.pop(0)
            c = self.st.clauses[cid]
            pos = next(
                (
                    i
                    for i, a in enumerate(c.atoms)
                    if a.pred in self.originals and a.pred not in self.recursive and a.pred not in self.root_preds
                ),
                None,
            )
            if pos is None or budget[cid] >= self.max_unfold:
                out.append(cid)
                continue
            for nid in self.st.unfold(cid, pos):
                budget[nid] = budget[cid] + 1
                queue.append(nid)
        return [cid for cid in self.st.order if cid in set(out)]

    def _inline(self, cid: int) -> list[int]:
        ids = [cid]
        out = []
        rounds = 0
        while ids:
            cur = ids.pop(0)
            c = self.st.clauses[cur]
            pos = next(
                (
                    i
                    for i, a in enumerate(c.atoms)
                    if a.pred in self.originals and a.pred not in self.recursive and a.pred not in self.root_preds
                ),
                None,
            )
            if pos is None or rounds >= 16:
                out.append(cur)
                continue
            rounds += 1
            ids.extend(self.st.unfold(cur, pos))
        return out

    def run(self) -> TransformState:
        st = self.st
        roots = [cid for cid in st.order if st.clauses[cid].is_goal or st.clauses[cid].head_pred in self.root_preds]
        for rid in roots:
            ids = self._inline(rid) if self.inline_roots else [rid]
            for cid in ids:
                self.fold_all(cid, None)
        while self.work:
            did = self.work.pop(0)
            for cid in self._unfold_def(did):
                if cid in st.clauses:
                    self.fold_all(cid, did)
        st.delete_clauses("unsat")
        st.delete_clauses("useless", self.root_preds)
        st.delete_clauses("undefined")
        st.audit()
        return st


def _single_groups(engine: _Engine, c: Clause) -> list[list[int]]:
    return [[i] for i, a in enumerate(c.atoms) if a.pred in engine.originals and a.pred not in engine.root_preds]


def run_engine(
    p: Program,
    *,
    gen: str = "widening",
    max_unfold: int = 3,
    propagate: bool = True,
    entries: Sequence[str] = (),
    naming: str = "sp",
    grouping=_single_groups,
    inline_roots: bool = False,
    max_restarts: int = 32,
    max_defs: int = 64,
) -> TransformState:
    if gen not in ("widening", "hull-then-widening", "properties"):
        raise TransformError(f"unknown generalisation {gen!r}")
    if not p.goals and not entries:
        raise TransformError("specialisation needs at least one goal or entry predicate")
    hints: dict[Skeleton, list[Constraint]] = {}
    for _ in range(max_restarts):
        eng = _Engine(
            p,
            gen=gen,
            max_unfold=max_unfold,
            propagate=propagate,
            roots=entries,
            naming=naming,
            grouping=grouping,
            hints=hints,
            inline_roots=inline_roots,
            max_defs=max_defs,
        )
        try:
            return eng.run()
        except _Restart as r:
            lst = hints.setdefault(r.key, [])
            if any(la.equivalent(h, r.constraint) for h in lst):
                raise SpecialisationBudget("generalisation made no progress", eng.st)
            lst.append(r.constraint)
    raise SpecialisationBudget(f"no stable set of definitions after {max_restarts} restarts")


def specialise(
    p: Program,
    gen: str = "widening",
    max_unfold: int = 3,
    propagate: bool = True,
    entries: Sequence[str] = (),
    naming: str = "sp",
) -> Program:
    """Specialise ``p`` with respect to its goals (and ``entries``).

    ``gen`` is ``widening`` (plain widening against the nearest ancestor
    definition with the same atom), ``hull-then-widening``, or
    ``properties`` (definitions keyed by the guard properties that hold).
    With ``propagate=False`` definitions carry no constraint, which gives
    plain partial deduction.
    """
    return specialise_state(p, gen, max_unfold, propagate, entries, naming).program()


def specialise_state(p, gen="widening", max_unfold=3, propagate=True, entries=(), naming="sp") -> TransformState:
    return run_engine(p, gen=gen, max_unfold=max_unfold, propagate=propagate, entries=entries, naming=naming)


def control_flow_refinement(p: Program, entries: Sequence[str] = ("main",), max_unfold: int = 1) -> Program:
    """Polyvariant specialisation keyed by the guard properties true at each call."""
    entries = [e for e in entries if e in p.predicates()]
    return run_engine(
        p, gen="properties", max_unfold=max_unfold, entries=entries, naming="version"
    ).program()


def _shares(c: Clause, a: Atom, b: Atom) -> bool:
    va, vb = set(a.vars()), set(b.vars())
    if va & vb:
        return True
    for u in va:
        for v in vb:
            if la.entail(c.constraint, Constraint.of([AtomicConstraint(LinearTerm.var(u), "=", LinearTerm.var(v))])):
                return True
    return False


def _pair_grouping(pair: tuple[str, str]):
    def grouping(engine: _Engine, c: Clause) -> list[list[int]]:
        eligible = [i for i, a in enumerate(c.atoms) if a.pred in engine.originals]
        for i in eligible:
            if c.atoms[i].pred != pair[0]:
                continue
            for j in eligible:
                if j != i and c.atoms[j].pred == pair[1] and _shares(c, c.atoms[i], c.atoms[j]):
                    return [[i, j]]
        return [[i] for i in eligible]

    return grouping


def select_pair(p: Program) -> tuple[str, str]:
    """Leftmost two goal atoms that share variables, after inlining non-recursive calls."""
    st = TransformState(p)
    rec = _recursive_preds(p)
    for gid in [i for i in st.order if st.clauses[i].is_goal]:
        ids = [gid]
        for _ in range(16):
            nxt = []
            for cid in ids:
                c = st.clauses[cid]
                pos = next((k for k, a in enumerate(c.atoms) if a.pred not in rec), None)
                nxt.extend([cid] if pos is None else st.unfold(cid, pos))
            if nxt == ids:
                break
            ids = nxt
        for cid in ids:
            c = st.clauses[cid]
            for i, a in enumerate(c.atoms):
                for b in c.atoms[i + 1 :]:
                    if _shares(c, a, b):
                        return a.pred, b.pred
    raise TransformError("no goal has two atoms sharing variables")


def predicate_pair(
    p: Program,
    pair: Optional[tuple[str, str]] = None,
    max_unfold: int = 3,
    gen: str = "widening",
) -> Program:
    """Introduce predicates for constrained conjunctions of two atoms.

    ``pair`` names the two predicates to pair; by default the leftmost two
    goal atoms sharing variables are chosen.  The new predicate is named by
    concatenating the paired predicate names.
    """
    return predicate_pair_state(p, pair, max_unfold, gen).program()


def predicate_pair_state(p: Program, pair=None, max_unfold: int = 3, gen: str = "widening") -> TransformState:
    if not any(len(g.atoms) >= 2 or g.atoms for g in p.goals):
        raise TransformError("predicate pairing needs a goal with atoms")
    pair = tuple(pair) if pair else select_pair(p)
    return run_engine(
        p, gen=gen, max_unfold=max_unfold, naming="concat", grouping=_pair_grouping(pair), inline_roots=True
    )
