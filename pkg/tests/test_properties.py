"""Randomized properties checked against enumeration oracles."""

import itertools
from fractions import Fraction

from hypothesis import HealthCheck, given, settings, strategies as st

from hornkit import linarith as la
from hornkit.analyze import check_goals, cpa_lfp
from hornkit.core import Atom, AtomicConstraint, Clause, Constraint, LinearTerm, Program
from hornkit.evaluate import Interpretation, td_derive, tp_step
from hornkit.linarith import Verdict
from hornkit.transform import far, qa_transform, raf, reverse

CASES = settings(max_examples=1000, deadline=None, suppress_health_check=list(HealthCheck))
VARS = ("X", "Y", "Z")
BOX = 3
GRID = range(-BOX, BOX + 1)

@st.composite
def atomic(draw, vs=VARS, max_coeff=2, max_const=3, rels=("<=", "<", "=", ">=", ">")):
    coeffs = {v: draw(st.integers(-max_coeff, max_coeff)) for v in vs}
    coeffs = {v: k for v, k in coeffs.items() if k}
    if not coeffs:
        coeffs = {vs[0]: 1}
    t = LinearTerm.of(coeffs)
    return AtomicConstraint(t, draw(st.sampled_from(rels)), LinearTerm.num(draw(st.integers(-max_const, max_const))))

def box(vs):
    out = []
    for v in vs:
        out.append(AtomicConstraint(LinearTerm.var(v), ">=", LinearTerm.num(-BOX)))
        out.append(AtomicConstraint(LinearTerm.var(v), "<=", LinearTerm.num(BOX)))
    return out

@st.composite
def boxed(draw, vs=VARS, max_size=3):
    items = draw(st.lists(atomic(vs), min_size=1, max_size=max_size))
    return Constraint.of(items + box(vs))

_TESTS = {"=": lambda x: x == 0, "!=": lambda x: x != 0, "<=": lambda x: x <= 0, "<": lambda x: x < 0}

def int_models(c, vs=VARS):
    """Integer points of the box satisfying ``c`` (plain int arithmetic)."""
    if c.unsat:
        return []
    rows = []
    for a in c:
        rel, t = a.normal
        assert all(k.denominator == 1 for _, k in t.coeffs) and t.const.denominator == 1
        rows.append((_TESTS[rel], [int(t.coeff(v)) for v in vs], int(t.const)))
    out = []
    for vals in itertools.product(GRID, repeat=len(vs)):
        if all(ok(sum(k * x for k, x in zip(ks, vals)) + k0) for ok, ks, k0 in rows):
            out.append({v: Fraction(x) for v, x in zip(vs, vals)})
    return out

# --------------------------------------------------------- arithmetic

@CASES
@given(boxed())
def test_solv_agrees_with_integer_grid(c):
    models = int_models(c)
    v, pt = la.solv(c, "int")
    assert v is not Verdict.UNKNOWN
    assert (v is Verdict.SAT) == bool(models)
    if pt is not None:
        assert c.holds(pt) and all(x.denominator == 1 for x in pt.values())
    rv, rpt = la.solv(c, "rat")
    if models:
        assert rv is Verdict.SAT
    if rpt is not None:
        assert c.holds(rpt)

@CASES
@given(boxed(), st.lists(atomic(), min_size=1, max_size=2))
def test_entail_agrees_with_integer_grid(c1, extra):
    c2 = Constraint.of(extra)
    expected = len(int_models(c1)) == len(int_models(c1 & c2))
    assert la.entail(c1, c2, "int") == expected
    if la.entail(c1, c2, "rat"):
        assert expected

@CASES
@given(boxed(), st.sampled_from([("X",), ("X", "Y"), ("Y", "Z")]))
def test_projection_agrees_with_integer_grid(c, keep):
    models = int_models(c)
    shadow = {tuple(p[v] for v in keep) for p in models}
    rat = la.proj(c, keep)
    assert set(rat.vars()) <= set(keep)
    # rational projection over-approximates the integer shadow
    for p in models:
        assert rat.holds({v: p[v] for v in keep})
    exact = la.proj_exact(c, keep, "int")
    if set(exact.vars()) <= set(keep):
        inside = {tuple(q[v] for v in keep) for q in int_models(exact & Constraint.of(box(keep)), keep)}
        assert inside == shadow

# ----------------------------------------------------------- widening

@CASES
@given(st.lists(boxed(("X", "Y"), max_size=2), min_size=2, max_size=6), st.lists(st.integers(0, 5), min_size=1, max_size=8))
def test_widening_stabilises(pool, picks):
    cur = pool[0]
    bound = len(la.split_equalities(la.simplify(cur))) + 2
    changes = 0
    for i in picks:
        d = pool[i % len(pool)]
        new = la.convex_hull(cur, d)
        w = la.widen(cur, new)
        assert la.entail(new, w) and la.entail(cur, w)
        if not la.equivalent(w, cur):
            changes += 1
        cur = w
    assert changes <= bound

# -------------------------------------------- satisfiability preservation

def _v(n):
    return LinearTerm.var(n)

@st.composite
def transition_program(draw):
    """init(X,Y) -> p, p steps to p, goal on p; optionally a helper fact."""
    two = ("X", "Y")
    init = draw(st.lists(atomic(two, 1, 2, ("<=", ">=", "=")), min_size=1, max_size=2))
    # transition X1 = X + a, Y1 = Y + b under a guard
    a, b = draw(st.integers(-1, 1)), draw(st.integers(-1, 1))
    guard = draw(st.lists(atomic(two, 1, 2, ("<=", ">=", "<", ">")), max_size=1))
    bad = draw(st.lists(atomic(two, 1, 3), min_size=1, max_size=2))
    p = Atom("p", (_v("X"), _v("Y")))
    p1 = Atom("p", (_v("X1"), _v("Y1")))
    step = Constraint.of(
        guard
        + [
            AtomicConstraint(_v("X1"), "=", _v("X") + LinearTerm.num(a)),
            AtomicConstraint(_v("Y1"), "=", _v("Y") + LinearTerm.num(b)),
        ]
    )
    clauses = [
        Clause(p, Constraint.of(init)),
        Clause(p1, step, (p,)),
        Clause(None, Constraint.of(bad), (p,)),
    ]
    if draw(st.booleans()):
        # an argument that never matters
        q = Atom("q", (_v("X"), _v("Z")))
        clauses = [Clause(q, Constraint.of(init), ()), Clause(p, Constraint.of(()), (q,))] + clauses[1:]
    return Program(tuple(clauses), "rat")

def decide(p):
    for g in p.goals:
        out = td_derive(p, g, 6)
        if out.successful:
            return "unsat"
    model = cpa_lfp(p).model
    if all(v is Verdict.SAT for v in check_goals(model, p.goals)):
        return "sat"
    return None

@CASES
@given(transition_program(), st.sampled_from(["qa", "reverse", "raf", "far"]))
def test_transformations_preserve_satisfiability(p, which):
    fn = {"qa": qa_transform, "reverse": reverse, "raf": raf, "far": far}[which]
    before, after = decide(p), decide(fn(p))
    if before and after:
        assert before == after

# ------------------------------------------------------ T_P monotonicity

@st.composite
def interp_pair(draw):
    """I and J with every fact of I subsumed by some fact of J."""
    one = ("X",)
    small = [Clause(Atom("p", (_v("X"),)), Constraint.of([draw(atomic(one, 1, 3))])) for _ in range(draw(st.integers(0, 2)))]
    big = []
    for f in small:
        # J either keeps the fact or drops all of its constraint
        big.append(f if draw(st.booleans()) else Clause(f.head, Constraint.of(())))
    big += [Clause(Atom("p", (_v("X"),)), Constraint.of([draw(atomic(one, 1, 3))])) for _ in range(draw(st.integers(0, 1)))]
    return Interpretation(tuple(small)), Interpretation(tuple(big))

@st.composite
def small_program(draw):
    one = ("X", "Y")
    px, py = Atom("p", (_v("X"),)), Atom("p", (_v("Y"),))
    clauses = [
        Clause(px, Constraint.of(draw(st.lists(atomic(one, 2, 3), max_size=2))), (py,)),
        Clause(Atom("r", (_v("X"),)), Constraint.of(draw(st.lists(atomic(one, 2, 3), max_size=1))), (px, py)),
    ]
    return Program(tuple(clauses), "rat")

@CASES
@given(small_program(), interp_pair())
def test_tp_step_is_monotone(p, ij):
    i, j = ij
    assert j.subsumes(i)
    ti, tj = tp_step(p, i), tp_step(p, j)
    for f in ti:
        heads = [g for g in tj if g.head.pred == f.head.pred]
        names = {a.as_var(): f"$x{k}" for k, a in enumerate(f.head.args)}
        fc = f.constraint.rename(names)
        ds = [g.constraint.rename({a.as_var(): f"$x{k}" for k, a in enumerate(g.head.args)}) for g in heads]
        assert la.entails_disjunction(fc, ds)
