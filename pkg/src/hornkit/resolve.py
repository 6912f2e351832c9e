"""Resolution steps shared by the engines and the transformations."""

from __future__ import annotations

from typing import Iterable, Optional

from .core import Atom, AtomicConstraint, Clause, Constraint, LinearTerm, fresh_name, rename_apart


def _compose(theta: dict[str, LinearTerm], v: str, t: LinearTerm) -> dict[str, LinearTerm]:
    out = {w: s.subst({v: t}) for w, s in theta.items()}
    out[v] = t
    return out


def resolvent(call: Atom, clause: Clause, avoid: Iterable[str]) -> tuple[Constraint, tuple[Atom, ...]]:
    """Resolve ``call`` against the head of ``clause``.

    ``clause`` is renamed apart from ``avoid`` first.  A head variable is
    bound to the call argument when that argument is a variable or a
    constant; every other position becomes an equality.  Returns the
    clause's constraint plus the equalities, and its body atoms, all over
    the caller's variables and fresh clause-local ones.
    """
    assert clause.head is not None and clause.head.sig == call.sig
    avoid = set(avoid) | set(call.vars())
    k = rename_apart(clause, avoid)
    local = set(k.vars())
    theta: dict[str, LinearTerm] = {}
    eqs: list[tuple[LinearTerm, LinearTerm]] = []
    for h, a in zip(k.head.args, call.args):
        h = h.subst(theta)
        v = h.as_var()
        if v is not None and v in local and v not in theta and (a.as_var() is not None or a.is_const):
            theta = _compose(theta, v, a)
        else:
            eqs.append((h, a))
    cons = [AtomicConstraint(h.subst(theta), "=", a.subst(theta)) for h, a in eqs]
    c = Constraint.of(cons) & k.constraint.subst(theta)
    return c, tuple(b.subst(theta) for b in k.atoms)


def canonical_head(head: Atom, c: Constraint, taken: Iterable[str]) -> tuple[Atom, Constraint]:
    """Make every head argument a distinct variable, moving the rest into ``c``."""
    taken = set(taken) | set(head.vars()) | set(c.vars())
    seen: set[str] = set()
    args: list[LinearTerm] = []
    extra: list[AtomicConstraint] = []
    for t in head.args:
        v = t.as_var()
        if v is not None and v not in seen:
            seen.add(v)
            args.append(t)
            continue
        w = fresh_name("A", taken)
        taken.add(w)
        seen.add(w)
        args.append(LinearTerm.var(w))
        extra.append(AtomicConstraint(LinearTerm.var(w), "=", t))
    return Atom(head.pred, tuple(args)), Constraint.of(extra) & c


def positional(head: Atom, c: Constraint, names: Optional[list[str]] = None) -> Constraint:
    """Rename a canonical fact ``head <- c`` so its arguments are ``names``.

    Variables of ``c`` outside the head are renamed away from ``names``.
    """
    names = names or [f"X{i + 1}" for i in range(head.arity)]
    hv = [t.as_var() for t in head.args]
    assert all(v is not None for v in hv) and len(set(hv)) == len(hv), f"head not canonical: {head}"
    r = dict(zip(hv, names))
    taken = set(names) | set(hv)
    for v in c.vars():
        if v not in r and v in taken:
            w = fresh_name(v, taken | set(r.values()))
            taken.add(w)
            r[v] = w
    return c.rename(r)
