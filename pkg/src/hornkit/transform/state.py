"""Fold/unfold kernel with the bookkeeping needed to audit fold correctness.

A ``TransformState`` holds the current clauses under stable integer ids,
the definitions introduced so far (with parent links), which of them have
been unfolded, and a history of rule applications that can be written out
as a script and replayed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import networkx as nx

from .. import linarith as la
from ..core import (
    Atom,
    AtomicConstraint,
    Clause,
    Constraint,
    LinearTerm,
    Program,
    fresh_name,
    parse_program,
)
from ..resolve import resolvent


class TransformError(Exception):
    pass


class FoldError(TransformError):
    pass


class CorrectnessViolation(TransformError):
    """A definition was used for folding without having been unfolded."""

    def __init__(self, msg: str, entry: Optional["Step"] = None):
        super().__init__(msg)
        self.entry = entry


@dataclass(frozen=True)
class Step:
    rule: str
    args: tuple

    def line(self) -> str:
        return " ".join([self.rule] + [str(a) for a in self.args])


@dataclass
class Definition:
    id: int
    clause: Clause
    parent: Optional[int] = None

    @property
    def pred(self) -> str:
        return self.clause.head.pred


def flatten_atoms(c: Clause, taken: Optional[set[str]] = None) -> Clause:
    """Give every body atom argument the form variable or constant."""
    taken = set(taken or ()) | set(c.vars())
    extra: list[AtomicConstraint] = []
    atoms = []
    for a in c.atoms:
        args = []
        for t in a.args:
            if t.is_const or t.as_var() is not None:
                args.append(t)
                continue
            w = fresh_name("V", taken)
            taken.add(w)
            extra.append(AtomicConstraint(LinearTerm.var(w), "=", t))
            args.append(LinearTerm.var(w))
        atoms.append(Atom(a.pred, tuple(args)))
    if not extra:
        return c
    return Clause(c.head, Constraint.of(extra) & c.constraint, tuple(atoms))


def clause_vars_kept(c: Clause) -> set[str]:
    keep: set[str] = set()
    if c.head is not None:
        keep |= set(c.head.vars())
    for a in c.atoms:
        keep |= set(a.vars())
    for a in c.constraint.conjuncts:
        if a.normal[0] == "!=":
            keep |= set(a.vars())
    return keep


def cleanup(c: Clause, mode: str = "rat") -> Clause:
    """Project the constraint onto the variables of the head and the atoms."""
    if c.constraint.unsat:
        return c
    keep = clause_vars_kept(c)
    return c.with_constraint(la.proj_exact(c.constraint, keep, mode))


def normalize(c: Clause, mode: str = "rat") -> Clause:
    return cleanup(flatten_atoms(c), mode)


class TransformState:
    def __init__(self, program: Program):
        self.mode = program.mode
        self.order: list[int] = []
        self.clauses: dict[int, Clause] = {}
        self.defs: dict[int, Definition] = {}
        self.unfolded_defs: set[int] = set()
        self.folded_with: dict[int, Step] = {}
        self.origin: dict[int, int] = {}  # clause id -> definition it descends from
        self.history: list[Step] = []
        self.original_preds = set(program.predicates())
        self._next = 0
        for c in program.clauses:
            self._add(c)

    # ------------------------------------------------------------ basics

    def _add(self, c: Clause, at: Optional[int] = None) -> int:
        cid = self._next
        self._next += 1
        self.clauses[cid] = c
        if at is None:
            self.order.append(cid)
        else:
            self.order.insert(at, cid)
        return cid

    def _remove(self, cid: int) -> int:
        pos = self.order.index(cid)
        self.order.pop(pos)
        del self.clauses[cid]
        return pos

    def program(self) -> Program:
        return Program(tuple(self.clauses[i] for i in self.order), self.mode)

    def ids(self) -> list[int]:
        return list(self.order)

    def defining(self, pred: str) -> list[int]:
        return [i for i in self.order if self.clauses[i].head is not None and self.clauses[i].head.pred == pred]

    def predicates(self) -> set[str]:
        out: set[str] = set()
        for c in self.clauses.values():
            if c.head is not None:
                out.add(c.head.pred)
            out.update(a.pred for a in c.atoms)
        return out | {d.pred for d in self.defs.values()}

    def fresh_pred(self, base: str) -> str:
        return fresh_name(base, self.predicates() | self.original_preds | {"false"})

    def ancestors(self, def_id: Optional[int]) -> list[Definition]:
        """The definition itself followed by its ancestors, nearest first."""
        out = []
        while def_id is not None:
            d = self.defs[def_id]
            out.append(d)
            def_id = d.parent
        return out

    # ------------------------------------------------------------- rules

    def define(self, clause: Clause, parent: Optional[int] = None) -> int:
        """Definition rule: ``clause`` introduces a fresh predicate."""
        if clause.head is None:
            raise TransformError("a definition needs an atom head")
        if clause.head.pred in self.predicates() or clause.head.pred in self.original_preds:
            raise TransformError(f"predicate {clause.head.pred} is not fresh")
        cid = self._add(clause)
        self.defs[cid] = Definition(cid, clause, parent)
        self.origin[cid] = cid
        self.history.append(Step("define", (cid, "-" if parent is None else parent, str(clause))))
        return cid

    def unfold(self, cid: int, pos: int) -> list[int]:
        """Unfolding rule: replace clause ``cid`` by its resolvents on atom ``pos``."""
        c = self.clauses.get(cid)
        if c is None:
            raise TransformError(f"no clause {cid}")
        if not 0 <= pos < len(c.atoms):
            raise TransformError(f"clause {cid} has no atom at position {pos}")
        sel = c.atoms[pos]
        results: list[Clause] = []
        avoid = set(c.vars())
        for kid in self.defining(sel.pred):
            k = self.clauses[kid]
            cons, body = resolvent(sel, k, avoid)
            new_c = c.constraint & cons
            if new_c.unsat or la.is_unsat(new_c):
                continue
            r = Clause(c.head, new_c, c.atoms[:pos] + body + c.atoms[pos + 1 :])
            r = normalize(r, self.mode)
            if r.constraint.unsat:
                continue
            results.append(r)
        origin = self.origin.get(cid)
        if cid in self.defs:
            self.unfolded_defs.add(cid)
        at = self._remove(cid)
        new_ids = []
        for i, r in enumerate(results):
            nid = self._add(r, at + i)
            if origin is not None:
                self.origin[nid] = origin
            new_ids.append(nid)
        self.history.append(Step("unfold", (cid, pos, ",".join(map(str, new_ids)) or "-")))
        return new_ids

    def match_def(self, c: Clause, positions: Sequence[int], def_id: int) -> Optional[dict[str, LinearTerm]]:
        """Substitution mapping the definition body atoms onto the selected atoms."""
        d = self.defs[def_id].clause
        if len(positions) != len(d.atoms):
            return None
        theta: dict[str, LinearTerm] = {}
        need: list[AtomicConstraint] = []
        for p, da in zip(positions, d.atoms):
            ca = c.atoms[p]
            if ca.sig != da.sig:
                return None
            for dt, ct in zip(da.args, ca.args):
                v = dt.as_var()
                if v is not None:
                    if v not in theta:
                        theta[v] = ct
                    elif theta[v] != ct:
                        need.append(AtomicConstraint(theta[v], "=", ct))
                elif dt.is_const:
                    if ct != dt:
                        need.append(AtomicConstraint(ct, "=", dt))
                else:
                    need.append(AtomicConstraint(dt, "=", ct))
        if any(v not in theta for v in d.vars()):
            return None
        if need and not la.entail(c.constraint, Constraint.of(need)):
            return None
        return theta

    def fold(self, cid: int, positions: Sequence[int], def_id: int) -> int:
        """Folding rule: replace the atoms at ``positions`` by the definition head."""
        if def_id not in self.defs:
            raise FoldError(f"{def_id} is not a definition")
        c = self.clauses.get(cid)
        if c is None:
            raise FoldError(f"no clause {cid}")
        step = Step("fold", (cid, ",".join(map(str, positions)), def_id))
        if def_id not in self.unfolded_defs and cid == def_id:
            raise CorrectnessViolation(
                f"definition {def_id} cannot fold itself before it has been unfolded (self-folding)", step
            )
        theta = self.match_def(c, positions, def_id)
        if theta is None:
            raise FoldError(f"atoms {list(positions)} of clause {cid} do not match definition {def_id}")
        d = self.defs[def_id].clause
        if not la.entail(c.constraint, d.constraint.subst(theta)):
            raise FoldError(f"constraint of clause {cid} does not entail the constraint of definition {def_id}")
        new_atom = d.head.subst(theta)
        first = min(positions)
        atoms = []
        for i, a in enumerate(c.atoms):
            if i == first:
                atoms.append(new_atom)
            if i not in positions:
                atoms.append(a)
        folded = cleanup(Clause(c.head, c.constraint, tuple(atoms)), self.mode)
        origin = self.origin.get(cid)
        at = self._remove(cid)
        nid = self._add(folded, at)
        if origin is not None:
            self.origin[nid] = origin
        entry = Step("fold", (cid, ",".join(map(str, positions)), def_id, nid))
        self.history.append(entry)
        self.folded_with.setdefault(def_id, entry)
        return nid

    def delete(self, cid: int, reason: str) -> None:
        self._remove(cid)
        self.history.append(Step("delete", (cid, reason)))

    def delete_clauses(self, mode: str, roots: Iterable[str] = ()) -> list[int]:
        """Clause deletion.

        ``unsat``: clauses whose constraint is unsatisfiable.
        ``useless``: clauses whose head predicate no goal (or root
        predicate) depends on.
        ``undefined``: clauses calling a predicate that has no clauses.
        """
        gone: list[int] = []
        if mode == "unsat":
            for cid in list(self.order):
                c = self.clauses[cid].constraint
                if c.unsat or la.is_unsat(c):
                    self.delete(cid, "unsat")
                    gone.append(cid)
        elif mode == "useless":
            g = nx.DiGraph()
            for cid in self.order:
                c = self.clauses[cid]
                g.add_node(c.head_pred)
                for a in c.atoms:
                    g.add_edge(c.head_pred, a.pred)
            start = {"false"} | set(roots)
            if not any(self.clauses[i].is_goal for i in self.order) and not set(roots):
                return gone
            live = set()
            for s in start:
                if s in g:
                    live |= {s} | nx.descendants(g, s)
            for cid in list(self.order):
                if self.clauses[cid].head_pred not in live:
                    self.delete(cid, "useless")
                    gone.append(cid)
        elif mode == "undefined":
            changed = True
            while changed:
                changed = False
                defined = {self.clauses[i].head.pred for i in self.order if self.clauses[i].head is not None}
                for cid in list(self.order):
                    if any(a.pred not in defined for a in self.clauses[cid].atoms):
                        self.delete(cid, "undefined")
                        gone.append(cid)
                        changed = True
        else:
            raise TransformError(f"unknown deletion mode {mode!r}")
        return gone

    def replace_constraint(self, cid: int, new: Constraint) -> None:
        """Replacement rule: swap in an equivalent constraint."""
        old = self.clauses[cid]
        if not la.equivalent(old.constraint, new):
            raise TransformError(f"replacement for clause {cid} is not equivalent")
        self.clauses[cid] = old.with_constraint(new)
        self.history.append(Step("replace", (cid, str(new))))

    # ------------------------------------------------------------- audit

    def audit(self) -> None:
        """Every definition used for folding must have been unfolded."""
        for def_id, entry in self.folded_with.items():
            if def_id not in self.unfolded_defs:
                raise CorrectnessViolation(
                    f"definition {def_id} was used for folding but never unfolded (at '{entry.line()}')", entry
                )

    def script(self) -> str:
        return "".join(s.line() + "\n" for s in self.history)


def replay(program: Program, script: str) -> TransformState:
    """Re-apply a rule script produced by ``TransformState.script``."""
    st = TransformState(program)
    for raw in script.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rule, _, rest = line.partition(" ")
        if rule == "define":
            cid, parent, text = rest.split(" ", 2)
            clause = parse_program(text).clauses[0]
            got = st.define(clause, None if parent == "-" else int(parent))
            if got != int(cid):
                raise TransformError(f"replay diverged: defined {got}, script says {cid}")
        elif rule == "unfold":
            cid, pos, _ = rest.split(" ")
            st.unfold(int(cid), int(pos))
        elif rule == "fold":
            parts = rest.split(" ")
            st.fold(int(parts[0]), [int(x) for x in parts[1].split(",")], int(parts[2]))
        elif rule == "delete":
            cid, reason = rest.split(" ")
            st.delete(int(cid), reason)
        elif rule == "replace":
            cid, text = rest.split(" ", 1)
            from ..core import parse_constraint

            st.replace_constraint(int(cid), parse_constraint(text))
        else:
            raise TransformError(f"unknown rule {rule!r} in script")
    st.audit()
    return st
