"""Exact arithmetic checks against enumerated oracles."""

import itertools
from fractions import Fraction

from hornkit import linarith as la
from hornkit.core import FALSE, TRUE, parse_constraint as C
from hornkit.linarith import Verdict

GRID = range(-4, 5)


def points(vs, grid=GRID):
    for vals in itertools.product(grid, repeat=len(vs)):
        yield {v: Fraction(x) for v, x in zip(vs, vals)}


def test_solv_returns_a_model():
    c = C("X+Y=<3, X>=1, Y>=1")
    v, pt = la.solv(c)
    assert v is Verdict.SAT and c.holds(pt)


def test_strict_bounds_are_exact_over_rationals():
    assert la.is_sat(C("X>0, X<1"), "rat")
    assert not la.is_sat(C("X>0, X<1"), "int")


def test_integer_gap_needs_branching():
    # 2X = 2Y + 1 has rational but no integer solutions
    c = C("2*X=2*Y+1")
    assert la.is_sat(c, "rat")
    assert la.is_unsat(c, "int")


def test_disequality_splits():
    assert la.is_unsat(C("X>=0, X=<0, X=\\=0"))
    assert la.is_sat(C("X>=0, X=<1, X=\\=0"), "int")


def test_unsat_constant_constraint():
    assert la.is_unsat(FALSE)
    assert la.is_sat(TRUE)


def test_entailment_matches_grid():
    # [DERIVED] oracle: enumerate the integer grid
    c1, c2 = C("X>=1, Y>=X"), C("Y>=1")
    assert la.entail(c1, c2, "int")
    assert all(c2.holds(p) for p in points(["X", "Y"]) if c1.holds(p))
    assert not la.entail(c2, c1)
    w = la.entail_witness(c2, c1)
    assert c2.holds(w) and not c1.holds(w)


def test_integer_entailment_stronger_than_rational():
    assert la.entail(C("X>0"), C("X>=1"), "int")
    assert not la.entail(C("X>0"), C("X>=1"), "rat")


def test_projection_fourier_motzkin():
    c = C("X=<Y, Y=<Z")
    assert la.equivalent(la.proj(c, ["X", "Z"]), C("X=<Z"))
    assert la.equivalent(la.proj(C("X=Y+1, Y>=0"), ["X"]), C("X>=1"))


def test_integer_projection_keeps_what_it_cannot_eliminate():
    # exists integer Y with X = 2Y: not expressible as a conjunction over X
    c = C("X=2*Y")
    out = la.proj_exact(c, ["X"], "int")
    assert "Y" in out.vars()
    out = la.proj_exact(C("X=Y+1, Y>=0"), ["X"], "int")
    assert la.equivalent(out, C("X>=1"))


def test_convex_hull_of_two_points():
    h = la.convex_hull(C("X=0, Y=0"), C("X=2, Y=2"))
    assert la.equivalent(h, C("X=Y, X>=0, X=<2"))


def test_convex_hull_with_unbounded_side():
    h = la.convex_hull(C("X=0"), C("X>=5"))
    assert la.equivalent(h, C("X>=0"))


def test_widen_keeps_stable_conjuncts():
    # [REFERENCE] widening regression
    old = C("X>=0, X=<0, Y>=0, Y=<0")
    new = C("0<N, X=1, Y=1")
    assert la.equivalent(la.widen(old, new), C("X>=0, Y>=0"))


def test_widen_of_unsat_left_is_right():
    assert la.equivalent(la.widen(FALSE, C("X>=1")), C("X>=1"))


def test_simplify_drops_redundancy():
    s = la.simplify(C("X>=0, X>=1, X=<5, X=<7"))
    assert len(s) == 2 and la.equivalent(s, C("X>=1, X=<5"))


def test_entails_disjunction():
    assert la.entails_disjunction(C("X>=0, X=<2"), [C("X=<1"), C("X>=1")])
    assert not la.entails_disjunction(C("X>=0, X=<2"), [C("X<1"), C("X>1")])
    assert la.entails_disjunction(C("X>=0, X=<2"), [C("X<1"), C("X>1"), C("X=1")], "int")


def test_budget_exhaustion_is_unknown():
    # unbounded integer search with no solution in reach
    c = C("3*X - 3*Y = 1")
    v, _ = la.solv(c, "int", budget=1)
    assert v in (Verdict.UNKNOWN, Verdict.UNSAT)
    assert la.is_unsat(c, "int")


def test_split_disequalities_counts():
    # [DERIVED] 2 ** number of disequalities
    assert len(la.split_disequalities(C("X=\\=Y, X=\\=0"))) == 4
