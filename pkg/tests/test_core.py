from fractions import Fraction

import pytest

from hornkit.core import (
    Atom,
    Clause,
    LinearTerm,
    ParseError,
    Program,
    call_graph,
    depends_on,
    parse_constraint,
    parse_program,
    print_program,
)

from programs import LEQ, SUM_UPTO


def test_round_trip_is_stable():
    p = parse_program(SUM_UPTO)
    text = print_program(p)
    assert print_program(parse_program(text)) == text
    assert len(p.clauses) == 4
    assert len(p.goals) == 1


def test_mode_directive_and_override():
    p = parse_program(":- mode(int).\np(X) :- X>0.")
    assert p.mode == "int"
    assert parse_program("p(X) :- X>0.").mode == "rat"
    assert parse_program(":- mode(int).\np(X).", mode="rat").mode == "rat"


def test_arity_clash_is_reported_with_position():
    with pytest.raises(ParseError) as e:
        parse_program("p(X) :- X>0.\np(X,Y) :- X>Y.")
    assert e.value.line == 2


def test_nonlinear_rejected():
    with pytest.raises(ParseError):
        parse_program("p(X,Y) :- X*Y>0.")


def test_constant_multiplication_and_rationals():
    c = parse_constraint("2*X + 1/2 =< Y")
    a = next(iter(c))
    assert a.holds({"X": Fraction(0), "Y": Fraction(1)})
    assert not a.holds({"X": Fraction(1), "Y": Fraction(1)})


def test_linear_term_arithmetic():
    x, y = LinearTerm.var("X"), LinearTerm.var("Y")
    t = x + y.scale(2) - LinearTerm.num(3)
    assert t.coeff("Y") == 2
    assert t.evaluate({"X": Fraction(1), "Y": Fraction(1)}) == 0
    assert (t - t).is_const


def test_clause_shapes():
    p = parse_program("p. false :- p. q(X) :- X=1, p, r(X). r(X) :- X>0.")
    fact, goal, q, r = p.clauses
    assert fact.is_fact and goal.is_goal and not q.is_linear
    assert r.is_linear and r.head == Atom("r", (LinearTerm.var("X"),))
    assert isinstance(q, Clause)


def test_dependencies():
    p = parse_program(LEQ)
    assert depends_on(p, "sur") >= {"f"}
    g = call_graph(p)
    assert g.has_edge("pr", "g")


def test_program_is_immutable_value():
    p = parse_program(SUM_UPTO)
    q = p.with_clauses(p.clauses[1:])
    assert len(p) == 4 and len(q) == 3
    assert isinstance(q, Program)
