"""Structural comparison of programs up to renaming.

Two programs match when there is a bijection between their predicates (and
optionally a permutation of each predicate's arguments) under which every
clause of one has a counterpart in the other with the same head, the same
multiset of body predicates, and an equivalent constraint over the argument
positions.  Clause order and body-atom order do not matter.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Optional

import networkx as nx

from . import linarith as la
from .core import AtomicConstraint, Clause, Constraint, LinearTerm, Program

Mapping = dict[str, tuple[str, tuple[int, ...]]]


def _frame(c: Clause, pmap: Mapping, order: tuple[int, ...], mode: str) -> Constraint:
    """Constraint of ``c`` over position variables ``$h<i>`` and ``$b<k>_<i>``."""
    eqs = []
    keep = []
    if c.head is not None:
        _, perm = pmap[c.head.pred]
        for i, t in enumerate(c.head.args):
            v = f"$h{perm[i]}"
            keep.append(v)
            eqs.append(AtomicConstraint(LinearTerm.var(v), "=", t))
    for k, idx in enumerate(order):
        a = c.atoms[idx]
        _, perm = pmap[a.pred]
        for i, t in enumerate(a.args):
            v = f"$b{k}_{perm[i]}"
            keep.append(v)
            eqs.append(AtomicConstraint(LinearTerm.var(v), "=", t))
    full = Constraint.of(eqs) & c.constraint
    if full.unsat:
        return full
    out = la.proj_exact(full, keep, mode)
    if set(out.vars()) - set(keep):
        out = la.proj(full, keep)
    return out


def _body_orders(c1: Clause, c2: Clause, pmap: Mapping) -> Iterator[tuple[int, ...]]:
    want = [a.pred for a in c2.atoms]
    for order in itertools.permutations(range(len(c1.atoms))):
        if [pmap[c1.atoms[i].pred][0] for i in order] == want:
            yield order


def _clauses_match(c1: Clause, c2: Clause, pmap: Mapping, ident: Mapping, mode: str) -> bool:
    if c1.is_goal != c2.is_goal or len(c1.atoms) != len(c2.atoms):
        return False
    if c1.head is not None and pmap[c1.head.pred][0] != c2.head.pred:
        return False
    k2 = _frame(c2, ident, tuple(range(len(c2.atoms))), mode)
    for order in _body_orders(c1, c2, pmap):
        k1 = _frame(c1, pmap, order, mode)
        if la.entail(k1, k2, mode) and la.entail(k2, k1, mode):
            return True
    return False


def _identity(p: Program) -> Mapping:
    return {pr: (pr, tuple(range(n))) for pr, n in p.predicates().items()}


def _all_match(p1: Program, p2: Program, pmap: Mapping, mode: str) -> bool:
    if len(p1.clauses) != len(p2.clauses):
        return False
    ident = _identity(p2)
    g = nx.Graph()
    left = [("a", i) for i in range(len(p1.clauses))]
    g.add_nodes_from(left)
    g.add_nodes_from(("b", j) for j in range(len(p2.clauses)))
    for i, c1 in enumerate(p1.clauses):
        for j, c2 in enumerate(p2.clauses):
            if _clauses_match(c1, c2, pmap, ident, mode):
                g.add_edge(("a", i), ("b", j))
    for n in left:
        if g.degree(n) == 0:
            return False
    m = nx.bipartite.maximum_matching(g, top_nodes=left)
    return all(n in m for n in left)


def _mappings(p1: Program, p2: Program, permute_args: bool) -> Iterator[Mapping]:
    a1 = {k: v for k, v in p1.predicates().items() if k != "false"}
    a2 = {k: v for k, v in p2.predicates().items() if k != "false"}
    if sorted(a1.values()) != sorted(a2.values()):
        return
    names1 = sorted(a1, key=lambda n: (n not in a2, n))
    names2 = list(a2)

    def rec(i: int, used: set[str], acc: Mapping) -> Iterator[Mapping]:
        if i == len(names1):
            yield dict(acc)
            return
        n = names1[i]
        # try the same name first so identical programs match quickly
        cands = sorted((m for m in names2 if m not in used and a2[m] == a1[n]), key=lambda m: m != n)
        for m in cands:
            perms = itertools.permutations(range(a1[n])) if permute_args else [tuple(range(a1[n]))]
            for perm in perms:
                acc[n] = (m, tuple(perm))
                yield from rec(i + 1, used | {m}, acc)
                del acc[n]

    yield from rec(0, set(), {})


def find_renaming(p1: Program, p2: Program, mode: Optional[str] = None, permute_args: bool = False) -> Optional[Mapping]:
    """A predicate mapping under which ``p1`` and ``p2`` match clause for clause, or None."""
    mode = mode or p1.mode
    for pmap in _mappings(p1, p2, permute_args):
        if _all_match(p1, p2, pmap, mode):
            return pmap
    return None


def same_up_to_renaming(p1: Program, p2: Program, mode: Optional[str] = None, permute_args: bool = False) -> bool:
    return find_renaming(p1, p2, mode, permute_args) is not None
