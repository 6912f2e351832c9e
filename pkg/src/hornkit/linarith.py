"""Exact linear arithmetic over the rationals, with an integer refinement.

Everything here works on ``Fraction`` values.  Satisfiability, projection
and entailment use Fourier-Motzkin elimination, with equalities eliminated
by substitution first.  Integer satisfiability adds gcd tightening and a
bounded branch-and-bound on top of the rational procedure.
"""

from __future__ import annotations

import enum
import itertools
from fractions import Fraction
from math import ceil, floor, gcd, lcm
from typing import Iterable, Optional, Sequence

from .core import FALSE, TRUE, AtomicConstraint, Constraint, LinearTerm

DEFAULT_BUDGET = 64


class Verdict(str, enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


class Row:
    """``sum(coeffs[v]*v) + const rel 0`` with rel in ``= <= <``."""

    __slots__ = ("coeffs", "const", "rel", "origin")

    def __init__(self, coeffs: dict[str, Fraction], const: Fraction, rel: str, origin=frozenset()):
        self.coeffs = {v: k for v, k in coeffs.items() if k != 0}
        self.const = const
        self.rel = rel
        self.origin = origin

    @staticmethod
    def of(rel: str, t: LinearTerm, origin=frozenset()) -> "Row":
        return Row(dict(t.coeffs), t.const, rel, origin)

    def term(self) -> LinearTerm:
        return LinearTerm.of(self.coeffs, self.const)

    def key(self):
        n = _scaled(self)
        return (n.rel, tuple(sorted(n.coeffs.items())), n.const)

    def ground_ok(self) -> bool:
        c = self.const
        return {"=": c == 0, "<=": c <= 0, "<": c < 0}[self.rel]

    def subst(self, v: str, expr: dict[str, Fraction], k0: Fraction) -> "Row":
        a = self.coeffs.get(v)
        if a is None:
            return self
        out = dict(self.coeffs)
        del out[v]
        for w, k in expr.items():
            out[w] = out.get(w, Fraction(0)) + a * k
        return Row(out, self.const + a * k0, self.rel, self.origin)

    def value(self, point: dict[str, Fraction]) -> Fraction:
        return self.const + sum((k * point.get(v, Fraction(0)) for v, k in self.coeffs.items()), Fraction(0))

    def __repr__(self) -> str:
        return f"Row({self.term()} {self.rel} 0)"


def _scaled(r: Row) -> Row:
    """Positive rescaling to coprime integers (canonical sign for equalities)."""
    nums = list(r.coeffs.values()) + ([r.const] if r.const else [])
    if not nums:
        return r
    den = lcm(*(k.denominator for k in nums))
    g = 0
    for k in nums:
        g = gcd(g, abs(int(k * den)))
    f = Fraction(den, g)
    if r.rel == "=":
        first = r.coeffs[min(r.coeffs)] if r.coeffs else r.const
        if first < 0:
            f = -f
    return Row({v: k * f for v, k in r.coeffs.items()}, r.const * f, r.rel, r.origin)


def _split(c: Constraint) -> tuple[list[Row], list[LinearTerm]]:
    rows: list[Row] = []
    diseqs: list[LinearTerm] = []
    for a in c.conjuncts:
        rel, t = a.normal
        if rel == "!=":
            diseqs.append(t)
        else:
            rows.append(Row.of(rel, t))
    return rows, diseqs


def _negations(a: AtomicConstraint) -> list[Row]:
    """Rows whose disjunction is the negation of ``a``."""
    rel, t = a.normal
    if rel == "<=":
        return [Row.of("<", -t)]
    if rel == "<":
        return [Row.of("<=", -t)]
    if rel == "=":
        return [Row.of("<", t), Row.of("<", -t)]
    return [Row.of("=", t)]


# ----------------------------------------------------------- core solver


def _pick_value(lo: Optional[tuple[Fraction, bool]], hi: Optional[tuple[Fraction, bool]]) -> Fraction:
    """A value inside the bounds, preferring small integers."""

    def ok(x: Fraction) -> bool:
        if lo is not None and (x < lo[0] or (lo[1] and x == lo[0])):
            return False
        if hi is not None and (x > hi[0] or (hi[1] and x == hi[0])):
            return False
        return True

    if ok(Fraction(0)):
        return Fraction(0)
    if lo is not None and (hi is None or lo[0] > 0):
        c = Fraction(ceil(lo[0]))
        if lo[1] and c == lo[0]:
            c += 1
    else:
        c = Fraction(floor(hi[0]))
        if hi[1] and c == hi[0]:
            c -= 1
    if ok(c):
        return c
    if lo is not None and hi is not None:
        if lo[0] == hi[0]:
            return lo[0]
        return (lo[0] + hi[0]) / 2
    return c


def _combine(low: Row, up: Row, v: str) -> Row:
    a_l = -low.coeffs[v]
    a_u = up.coeffs[v]
    coeffs: dict[str, Fraction] = {}
    for w, k in low.coeffs.items():
        if w != v:
            coeffs[w] = coeffs.get(w, Fraction(0)) + a_u * k
    for w, k in up.coeffs.items():
        if w != v:
            coeffs[w] = coeffs.get(w, Fraction(0)) + a_l * k
    rel = "<" if "<" in (low.rel, up.rel) else "<="
    return Row(coeffs, a_u * low.const + a_l * up.const, rel, low.origin | up.origin)


def _dedupe(rows: Iterable[Row]) -> Optional[list[Row]]:
    """Drop trivial rows and duplicates; None if a ground row is false."""
    out: dict = {}
    for r in rows:
        if not r.coeffs:
            if not r.ground_ok():
                return None
            continue
        n = _scaled(r)
        k = (n.rel == "=", tuple(sorted(n.coeffs.items())))
        prev = out.get(k)
        if prev is None:
            out[k] = n
        else:
            # same direction: keep the tighter one
            if n.rel == "=":
                if n.const != prev.const:
                    return None
            elif n.const > prev.const or (n.const == prev.const and n.rel == "<"):
                out[k] = n
    return list(out.values())


def _eliminate_equalities(rows: list[Row], prefer: Optional[set[str]] = None):
    """Substitute away equalities.  Returns (rows, trail) or None if unsat.

    ``prefer`` restricts which variables may be solved for; equalities
    mentioning none of them are kept as rows.
    """
    trail: list[tuple[str, dict[str, Fraction], Fraction]] = []
    rows = list(rows)
    while True:
        pick = None
        for i, r in enumerate(rows):
            if r.rel != "=" or not r.coeffs:
                continue
            cands = [v for v in r.coeffs if prefer is None or v in prefer]
            if not cands:
                continue
            unit = [v for v in cands if abs(r.coeffs[v]) == 1]
            pick = (i, (unit or cands)[0])
            break
        if pick is None:
            return rows, trail
        i, v = pick
        r = rows.pop(i)
        a = r.coeffs[v]
        expr = {w: -k / a for w, k in r.coeffs.items() if w != v}
        k0 = -r.const / a
        trail.append((v, expr, k0))
        rows = [x.subst(v, expr, k0) for x in rows]
        d = _dedupe(rows)
        if d is None:
            return None
        rows = d


def _fm_eliminate(rows: list[Row], elim: Sequence[str], trail: Optional[list] = None, kohler: bool = False):
    """Eliminate the inequality-only variables ``elim``.  None if unsat."""
    remaining = [v for v in elim]
    steps = 0
    while remaining:
        best = None
        for v in remaining:
            pos = sum(1 for r in rows if r.coeffs.get(v, 0) > 0)
            neg = sum(1 for r in rows if r.coeffs.get(v, 0) < 0)
            cost = pos * neg - pos - neg
            if best is None or cost < best[0]:
                best = (cost, v)
        v = best[1]
        remaining.remove(v)
        steps += 1
        lows = [r for r in rows if r.coeffs.get(v, 0) < 0]
        ups = [r for r in rows if r.coeffs.get(v, 0) > 0]
        eqs = [r for r in rows if r.rel == "=" and v in r.coeffs]
        if eqs:
            # only reachable when equalities were deliberately kept
            r = eqs[0]
            a = r.coeffs[v]
            expr = {w: -k / a for w, k in r.coeffs.items() if w != v}
            k0 = -r.const / a
            if trail is not None:
                trail.append(("eq", v, expr, k0))
            rows = _dedupe(x.subst(v, expr, k0) for x in rows if x is not r)
            if rows is None:
                return None
            continue
        rest = [r for r in rows if v not in r.coeffs]
        if trail is not None:
            trail.append(("fm", v, lows + ups))
        new = [_combine(lo, up, v) for lo in lows for up in ups]
        if kohler:
            new = [r for r in new if len(r.origin) <= steps + 1]
        rows = _dedupe(rest + new)
        if rows is None:
            return None
    return rows


def _solve_rows(rows: list[Row]) -> Optional[dict[str, Fraction]]:
    """Rational satisfiability of rows with a witness point."""
    allvars = sorted({v for r in rows for v in r.coeffs})
    d = _dedupe(rows)
    if d is None:
        return None
    res = _eliminate_equalities(d)
    if res is None:
        return None
    rows2, eq_trail = res
    trail: list = []
    left = sorted({v for r in rows2 for v in r.coeffs})
    out = _fm_eliminate(rows2, left, trail)
    if out is None:
        return None
    point: dict[str, Fraction] = {}
    for entry in reversed(trail):
        if entry[0] == "eq":
            _, v, expr, k0 = entry
            point[v] = k0 + sum((k * point.setdefault(w, Fraction(0)) for w, k in expr.items()), Fraction(0))
            continue
        _, v, vrows = entry
        lo = hi = None
        for r in vrows:
            a = r.coeffs[v]
            rest = r.const + sum(
                (k * point.setdefault(w, Fraction(0)) for w, k in r.coeffs.items() if w != v), Fraction(0)
            )
            bound = -rest / a
            strict = r.rel == "<"
            if a > 0:
                if hi is None or bound < hi[0] or (bound == hi[0] and strict):
                    hi = (bound, strict)
            else:
                if lo is None or bound > lo[0] or (bound == lo[0] and strict):
                    lo = (bound, strict)
        point[v] = _pick_value(lo, hi)
    for v, expr, k0 in reversed(eq_trail):
        point[v] = k0 + sum((k * point.setdefault(w, Fraction(0)) for w, k in expr.items()), Fraction(0))
    for v in allvars:
        point.setdefault(v, Fraction(0))
    return point


def _tighten(rows: list[Row]) -> Optional[list[Row]]:
    """Integer tightening: coprime integer coefficients, strict to non-strict."""
    out: list[Row] = []
    for r in rows:
        nums = list(r.coeffs.values()) + [r.const]
        den = lcm(*(k.denominator for k in nums))
        co = {v: int(k * den) for v, k in r.coeffs.items()}
        c = int(r.const * den)
        rel = r.rel
        if not co:
            if not Row({}, Fraction(c), rel).ground_ok():
                return None
            continue
        if rel == "<":
            c += 1
            rel = "<="
        g = 0
        for k in co.values():
            g = gcd(g, abs(k))
        if rel == "=":
            if c % g:
                return None
            c //= g
        else:
            c = -((-c) // g)  # ceil(c/g)
        out.append(Row({v: Fraction(k // g) for v, k in co.items()}, Fraction(c), rel))
    return out


def _solve_rows_int(rows: list[Row], budget: int) -> tuple[Verdict, Optional[dict[str, Fraction]]]:
    stack = [rows]
    nodes = 0
    while stack:
        cur = stack.pop()
        nodes += 1
        if nodes > budget:
            return Verdict.UNKNOWN, None
        cur = _tighten(cur)
        if cur is None:
            continue
        pt = _solve_rows(cur)
        if pt is None:
            continue
        frac = next((v for v in sorted(pt) if pt[v].denominator != 1), None)
        if frac is None:
            return Verdict.SAT, pt
        f = pt[frac]
        up = Row({frac: Fraction(-1)}, Fraction(ceil(f)), "<=")  # frac >= ceil(f)
        down = Row({frac: Fraction(1)}, -Fraction(floor(f)), "<=")  # frac <= floor(f)
        stack.append(cur + [up])
        stack.append(cur + [down])
    return Verdict.UNSAT, None


def _solve_disjuncts(alternatives: Iterable[list[Row]], mode: str, budget: int):
    unknown = False
    for rows in alternatives:
        if mode == "int":
            v, pt = _solve_rows_int(rows, budget)
            if v is Verdict.SAT:
                return v, pt
            unknown = unknown or v is Verdict.UNKNOWN
        else:
            pt = _solve_rows(rows)
            if pt is not None:
                return Verdict.SAT, pt
    return (Verdict.UNKNOWN if unknown else Verdict.UNSAT), None


def _with_diseqs(rows: list[Row], diseqs: list[LinearTerm]) -> Iterable[list[Row]]:
    if not diseqs:
        yield rows
        return
    for signs in itertools.product((1, -1), repeat=len(diseqs)):
        yield rows + [Row.of("<", t.scale(s)) for t, s in zip(diseqs, signs)]


# ------------------------------------------------------------ public API


def solv(c: Constraint, mode: str = "rat", budget: int = DEFAULT_BUDGET) -> tuple[Verdict, Optional[dict[str, Fraction]]]:
    """Satisfiability with a sample point.

    In integer mode the answer may be ``unknown`` when branch-and-bound
    exceeds ``budget`` nodes.
    """
    if c.unsat:
        return Verdict.UNSAT, None
    rows, diseqs = _split(c)
    verdict, pt = _solve_disjuncts(_with_diseqs(rows, diseqs), mode, budget)
    if pt is not None:
        for v in c.vars():
            pt.setdefault(v, Fraction(0))
    return verdict, pt


def is_sat(c: Constraint, mode: str = "rat", budget: int = DEFAULT_BUDGET) -> Optional[bool]:
    """True/False, or None when integer search is inconclusive."""
    v, _ = solv(c, mode, budget)
    return None if v is Verdict.UNKNOWN else v is Verdict.SAT


def is_unsat(c: Constraint, mode: str = "rat", budget: int = DEFAULT_BUDGET) -> bool:
    return solv(c, mode, budget)[0] is Verdict.UNSAT


def entail_witness(c1: Constraint, c2: Constraint, mode: str = "rat", budget: int = DEFAULT_BUDGET):
    """None if ``c1`` entails ``c2``, else a point of ``c1`` violating ``c2``.

    In integer mode an inconclusive search yields the string ``"unknown"``.
    """
    if c1.unsat or c2.is_true:
        return None
    if c2.unsat:
        v, pt = solv(c1, mode, budget)
        return None if v is Verdict.UNSAT else (pt if pt is not None else "unknown")
    rows, diseqs = _split(c1)
    base = list(_with_diseqs(rows, diseqs))
    for a in c2.conjuncts:
        negs = _negations(a)
        alts = (b + [n] for b in base for n in negs)
        v, pt = _solve_disjuncts(alts, mode, budget)
        if v is Verdict.SAT:
            for w in c1.vars() + c2.vars():
                pt.setdefault(w, Fraction(0))
            return pt
        if v is Verdict.UNKNOWN:
            return "unknown"
    return None


def entail(c1: Constraint, c2: Constraint, mode: str = "rat", budget: int = DEFAULT_BUDGET) -> bool:
    """Every model of ``c1`` is a model of ``c2`` (rationals by default)."""
    return entail_witness(c1, c2, mode, budget) is None


def equivalent(c1: Constraint, c2: Constraint, mode: str = "rat") -> bool:
    return entail(c1, c2, mode) and entail(c2, c1, mode)


def entails_disjunction(c: Constraint, ds: Sequence[Constraint], mode: str = "rat", budget: int = DEFAULT_BUDGET) -> bool:
    """``c`` entails the disjunction of ``ds``.

    Checks that ``c`` conjoined with the negation of every disjunct is
    unsatisfiable, exploring the negations depth first.
    """
    if c.unsat:
        return True
    ds = [d for d in ds if not d.unsat]
    if any(d.is_true for d in ds):
        return True
    if mode == "rat" and any(entail(c, d) for d in ds):
        return True
    rows, diseqs = _split(c)

    def search(acc: list[Row], i: int) -> bool:
        v, _ = _solve_disjuncts(_with_diseqs(acc, diseqs), mode, budget)
        if v is Verdict.UNSAT:
            return True
        if v is Verdict.UNKNOWN and i == len(ds):
            return False
        if i == len(ds):
            return False
        return all(search(acc + [n], i + 1) for a in [ds[i]] for n in _all_negations(a))

    return search(rows, 0)


def _all_negations(d: Constraint) -> list[Row]:
    out: list[Row] = []
    for a in d.conjuncts:
        out.extend(_negations(a))
    return out


def split_disequalities(c: Constraint) -> list[Constraint]:
    """Equivalent finite disjunction of constraints without disequalities."""
    if c.unsat:
        return [c]
    plain = [a for a in c.conjuncts if a.normal[0] != "!="]
    diseqs = [a for a in c.conjuncts if a.normal[0] == "!="]
    if not diseqs:
        return [c]
    out = []
    for choice in itertools.product((0, 1), repeat=len(diseqs)):
        extra = [AtomicConstraint(d.lhs, "<" if s == 0 else ">", d.rhs) for d, s in zip(diseqs, choice)]
        out.append(Constraint.of(plain + extra))
    return out


def _to_constraint(rows: Iterable[Row]) -> Constraint:
    return Constraint.of(AtomicConstraint.from_normal(_scaled(r).rel, _scaled(r).term()) for r in rows)


def _merge_opposites(items: list[AtomicConstraint]) -> list[AtomicConstraint]:
    """Replace ``t<=0`` together with ``-t<=0`` by ``t=0``."""
    norms = [a.normal for a in items]
    index = {}
    for i, (rel, t) in enumerate(norms):
        if rel == "<=":
            index.setdefault(t, i)
    out: list[AtomicConstraint] = []
    dropped: set[int] = set()
    for i, a in enumerate(items):
        if i in dropped:
            continue
        rel, t = norms[i]
        if rel == "<=":
            j = index.get(_scaled_term(-t))
            if j is not None and j not in dropped and j != i:
                dropped.add(j)
                out.append(AtomicConstraint.from_normal("=", t).canonical())
                continue
        out.append(a)
    return out


def _scaled_term(t: LinearTerm) -> LinearTerm:
    return AtomicConstraint(t, "<=").normal[1]


def simplify(c: Constraint, mode: str = "rat") -> Constraint:
    """Equivalent constraint without duplicate or redundant conjuncts.

    Opposite inequalities are merged into equalities, then one
    left-to-right pass drops every conjunct entailed by the others.
    """
    if c.unsat:
        return FALSE
    if is_unsat(c):
        return FALSE
    items = _merge_opposites(list(Constraint.of(c.conjuncts).conjuncts))
    kept = list(items)
    i = 0
    while i < len(kept):
        rest = Constraint(tuple(kept[:i] + kept[i + 1 :]))
        if entail(rest, Constraint((kept[i],))):
            kept.pop(i)
        else:
            i += 1
    return Constraint(tuple(kept))


def proj(c: Constraint, keep: Iterable[str], simp: bool = True) -> Constraint:
    """Project ``c`` onto ``keep`` (existentially quantify the rest).

    Disequalities mentioning an eliminated variable are dropped, which is an
    over-approximation; those over kept variables are retained.
    """
    keep = set(keep)
    if c.unsat:
        return FALSE
    cvars = c.vars()
    elim = [v for v in cvars if v not in keep]
    if not elim:
        return simplify(c) if simp else c
    untouched = [a for a in c.conjuncts if not set(a.vars()) - keep]
    touched = [a for a in c.conjuncts if set(a.vars()) - keep]
    diseqs = [a for a in untouched if a.normal[0] == "!="]
    untouched = [a for a in untouched if a.normal[0] != "!="]
    rows = [Row.of(*a.normal) for a in touched if a.normal[0] != "!="]
    res = _eliminate_equalities(rows, prefer=set(elim))
    if res is None:
        return FALSE
    rows2, _ = res
    left = sorted({v for r in rows2 for v in r.coeffs if v not in keep})
    out = _fm_eliminate(rows2, left)
    if out is None:
        return FALSE
    result = Constraint.of(untouched + [AtomicConstraint.from_normal(_scaled(r).rel, _scaled(r).term()) for r in out] + diseqs)
    if is_unsat(result):
        return FALSE
    return simplify(result) if simp else result


def project_out(c: Constraint, drop: Iterable[str]) -> Constraint:
    drop = set(drop)
    return proj(c, [v for v in c.vars() if v not in drop])


def convex_hull(c1: Constraint, c2: Constraint) -> Constraint:
    """Closure of the convex hull of two polyhedra.

    Uses the lifted encoding ``x = y1 + y2``, ``A1 y1 <= l*b1``,
    ``A2 y2 <= (1-l)*b2``, ``0 <= l <= 1`` and projects onto ``x``.  Strict
    inequalities are closed, disequalities ignored.
    """
    if c1.unsat or is_unsat(c1):
        return simplify(c2)
    if c2.unsat or is_unsat(c2):
        return simplify(c1)
    xs = sorted(set(c1.vars()) | set(c2.vars()))
    lam = "$lam"
    rows: list[Row] = []
    n = 0
    for idx, (c, weight) in enumerate(((c1, (Fraction(1), Fraction(0))), (c2, (Fraction(-1), Fraction(1))))):
        # weight (a, b) stands for the multiplier a*lam + b
        a_l, b_l = weight
        for at in c.conjuncts:
            rel, t = at.normal
            if rel == "!=":
                continue
            if rel == "<":
                rel = "<="
            co: dict[str, Fraction] = {}
            for v, k in t.coeffs:
                if idx == 0:
                    co[f"$y_{v}"] = co.get(f"$y_{v}", Fraction(0)) + k
                else:
                    # y2 = x - y1
                    co[v] = co.get(v, Fraction(0)) + k
                    co[f"$y_{v}"] = co.get(f"$y_{v}", Fraction(0)) - k
            co[lam] = co.get(lam, Fraction(0)) + t.const * a_l
            n += 1
            rows.append(Row(co, t.const * b_l, rel, frozenset([n])))
    rows.append(Row({lam: Fraction(-1)}, Fraction(0), "<=", frozenset([n + 1])))
    rows.append(Row({lam: Fraction(1)}, Fraction(-1), "<=", frozenset([n + 2])))
    d = _dedupe(rows)
    if d is None:
        return FALSE
    elim = set(f"$y_{v}" for v in xs) | {lam}
    res = _eliminate_equalities(d, prefer=elim)
    rows2, _ = res
    left = sorted({v for r in rows2 for v in r.coeffs if v in elim})
    has_eq = any(r.rel == "=" for r in rows2 if set(r.coeffs) & elim)
    out = _fm_eliminate(rows2, left, kohler=not has_eq)
    if out is None:
        return FALSE
    return simplify(_to_constraint(out))


def split_equalities(c: Constraint) -> list[AtomicConstraint]:
    """Conjuncts with every equality replaced by two inequalities."""
    out: list[AtomicConstraint] = []
    for a in c.conjuncts:
        rel, t = a.normal
        if rel == "=":
            if a.rel == "=":
                out.append(AtomicConstraint(a.lhs, ">=", a.rhs))
                out.append(AtomicConstraint(a.lhs, "<=", a.rhs))
            else:
                out.append(AtomicConstraint.from_normal("<=", -t))
                out.append(AtomicConstraint.from_normal("<=", t))
        elif rel != "!=":
            out.append(a)
    return out


def widen(c1: Constraint, c2: Constraint) -> Constraint:
    """Keep the conjuncts of ``c1`` (equalities split) entailed by ``c2``.

    Pairs of kept opposite inequalities are merged back into equalities.
    """
    if c1.unsat:
        return c2
    if c2.unsat or is_unsat(c2):
        return c1
    kept = [a for a in split_equalities(c1) if entail(c2, Constraint((a,)))]
    return Constraint.of(_merge_opposites(kept))


def restrict(c: Constraint, keep: Iterable[str]) -> Constraint:
    """Conjuncts of ``c`` that only mention ``keep`` (syntactic, no elimination)."""
    keep = set(keep)
    return Constraint(tuple(a for a in c.conjuncts if set(a.vars()) <= keep))


__all__ = [
    "Verdict",
    "DEFAULT_BUDGET",
    "solv",
    "is_sat",
    "is_unsat",
    "entail",
    "entail_witness",
    "entails_disjunction",
    "equivalent",
    "proj",
    "project_out",
    "convex_hull",
    "widen",
    "simplify",
    "split_disequalities",
    "split_equalities",
    "restrict",
    "TRUE",
    "FALSE",
]


def proj_exact(c: Constraint, keep: Iterable[str], mode: str = "rat") -> Constraint:
    """Projection that is exact in ``mode``.

    Over the rationals this is ``proj``.  Over the integers a variable is
    only eliminated when that is exact: through an equality where it has a
    unit coefficient, or by Fourier-Motzkin when every row mentioning it has
    a unit coefficient for it (strict rows are tightened first).  Other
    variables are kept.
    """
    if mode == "rat":
        return proj(c, keep)
    keep = set(keep)
    if c.unsat or is_unsat(c):
        return FALSE
    items = [a for a in c.conjuncts]
    progress = True
    while progress:
        progress = False
        cur = Constraint.of(items)
        if cur.unsat:
            return FALSE
        items = list(cur.conjuncts)
        elim = [v for v in cur.vars() if v not in keep]
        for v in elim:
            touching = [a for a in items if v in a.vars()]
            if any(a.normal[0] == "!=" for a in touching):
                continue
            unit_eq = next(
                (a for a in touching if a.normal[0] == "=" and abs(a.normal[1].coeff(v)) == 1 and _integral(a.normal[1])),
                None,
            )
            if unit_eq is not None:
                t = unit_eq.normal[1]
                k = t.coeff(v)
                expr = (t - LinearTerm(((v, k),))).scale(-1 / k)
                items = [a.subst({v: expr}) for a in items if a is not unit_eq]
                progress = True
                break
            if touching and all(
                a.normal[0] != "=" and abs(a.normal[1].coeff(v)) == 1 and _integral(a.normal[1]) for a in touching
            ):
                rows = []
                for a in touching:
                    rel, t = a.normal
                    if rel == "<":
                        t = t + LinearTerm.num(1)
                    rows.append(Row.of("<=", t))
                lows = [r for r in rows if r.coeffs[v] < 0]
                ups = [r for r in rows if r.coeffs[v] > 0]
                new = [_combine(lo, up, v) for lo in lows for up in ups]
                d = _dedupe(new)
                if d is None:
                    return FALSE
                items = [a for a in items if v not in a.vars()] + [
                    AtomicConstraint.from_normal(_scaled(r).rel, _scaled(r).term()) for r in d
                ]
                progress = True
                break
    return simplify(Constraint.of(items))


def _integral(t: LinearTerm) -> bool:
    return t.const.denominator == 1 and all(k.denominator == 1 for _, k in t.coeffs)
