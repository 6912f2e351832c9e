import pytest

from hornkit import linarith as la
from hornkit.analyze import check_goals, check_model, cpa_lfp, model_from_text
from hornkit.core import parse_program as P, print_program
from hornkit.equiv import find_renaming, same_up_to_renaming
from hornkit.evaluate import kleene_lfp, td_derive
from hornkit.linarith import Verdict
from hornkit.transform import (
    FoldError,
    CorrectnessViolation,
    TransformError,
    TransformState,
    control_flow_refinement,
    far,
    predicate_pair,
    predicate_pair_state,
    qa_transform,
    raf,
    replay,
    reverse,
    specialise,
    specialise_state,
    strengthen,
    strengthen_full,
)

from programs import (
    CFR_IN,
    LEQ,
    LEQ_MODEL,
    LEQ_PAIRED,
    PROP,
    PROP_EXPECTED,
    PROP_MODEL,
    QA_EXPECTED,
    QA_IN,
    RAF_FAR,
    SPEC_LISTS,
    SPEC_LISTS_EXPECTED,
)

# ---------------------------------------------------------------- kernel


def test_define_unfold_fold_by_hand():
    p = P("false :- X>=1, p(X).\np(X) :- X=Y+1, p(Y).\np(X) :- X>5.")
    st = TransformState(p)
    d = st.define(P("new(X) :- X>=1, p(X).").clauses[0])
    kids = st.unfold(d, 0)
    assert len(kids) == 2
    nid = st.fold(0, [0], d)
    assert str(st.clauses[nid]) == "false :- X>=1, new(X)."
    st.audit()
    again = replay(p, st.script())
    assert print_program(again.program()) == print_program(st.program())


def test_fold_requires_entailment():
    p = P("false :- p(X).\np(X) :- X>0.")
    st = TransformState(p)
    d = st.define(P("new(X) :- X>=1, p(X).").clauses[0])
    st.unfold(d, 0)
    with pytest.raises(FoldError):
        st.fold(0, [0], d)


def test_self_fold_before_unfold_is_rejected():
    st = TransformState(P("p.\nfalse :- p."))
    d = st.define(P("q :- p.").clauses[0])
    with pytest.raises(CorrectnessViolation):
        st.fold(d, [0], d)


def test_audit_rejects_fold_with_never_unfolded_definition():
    st = TransformState(P("p.\nfalse :- p."))
    d = st.define(P("q :- p.").clauses[0])
    st.fold(1, [0], d)
    with pytest.raises(CorrectnessViolation):
        st.audit()


def test_fresh_name_check():
    st = TransformState(P("p.\nfalse :- p."))
    with pytest.raises(TransformError):
        st.define(P("p :- p.").clauses[0])


def test_delete_modes():
    p = P("false :- q(X).\nq(X) :- X>0, X<0.\nq(X) :- X=1.\nq(X) :- r(X).\nunused(X) :- X=1.")
    st = TransformState(p)
    assert st.delete_clauses("unsat") == [1]
    assert st.delete_clauses("undefined") == [3]
    assert st.delete_clauses("useless") == [4]
    assert [str(c) for c in st.program().clauses] == ["false :- q(X).", "q(X) :- X=1."]


def test_undefined_deletion_cascades():
    st = TransformState(P("false :- q(X).\nq(X) :- r(X)."))
    assert sorted(st.delete_clauses("undefined")) == [0, 1]


def test_replay_detects_divergence():
    p = P("false :- p(X).\np(X) :- X>0.")
    with pytest.raises(TransformError):
        replay(p, "define 7 - new(X) :- p(X).\n")
    with pytest.raises(TransformError):
        replay(p, "frobnicate 1\n")


# -------------------------------------------------------- specialisation


def test_specialise_list_example():
    # [REFERENCE] three clauses up to renaming
    out = specialise(P(SPEC_LISTS), propagate=False)
    assert find_renaming(out, P(SPEC_LISTS_EXPECTED, "int"))
    res = kleene_lfp(out)
    assert res.converged and res.productive <= 2
    assert check_model(out, model_from_text("sp(X) :- X>0."))


@pytest.mark.parametrize("mode", ["rat", "int"])
def test_constraint_propagation(mode):
    # [REFERENCE] propagated goal, fact and recursive clause
    out = specialise(P(PROP, mode))
    assert find_renaming(out, P(PROP_EXPECTED, mode))
    # the printed model relies on integrality (X>Y gives X>=Y+1)
    assert check_model(out, model_from_text(PROP_MODEL), "int")
    model = cpa_lfp(out).model
    assert check_goals(model, out.goals, mode) == [Verdict.SAT]


def test_specialise_script_replays():
    p = P(PROP)
    st = specialise_state(p)
    again = replay(p, st.script())
    assert print_program(again.program()) == print_program(st.program())


def test_specialise_without_goal_reaching_definitions_empties_program():
    out = specialise(P("false :- X>0, p(X).\nq(X) :- X=1."))
    assert out.clauses == ()


def test_control_flow_refinement_versions():
    out = control_flow_refinement(P(CFR_IN, "int"))
    preds = out.predicates()
    assert {"while0", "while1", "while2"} <= set(preds) and "while" not in preds
    # each version loop is simple: while1 only decrements M-Y, while2 only X
    w1 = [c for c in out.clauses if c.head and c.head.pred == "while1" and c.atoms and c.atoms[0].pred == "while1"]
    w2 = [c for c in out.clauses if c.head and c.head.pred == "while2" and c.atoms and c.atoms[0].pred == "while2"]
    assert len(w1) == 1 and len(w2) == 1
    assert all(a.pred != "while1" for c in out.clauses if c.head and c.head.pred == "while2" for a in c.atoms)


def test_predicate_pairing():
    # [REFERENCE] paired clauses and their model
    out = predicate_pair(P(LEQ, "int"))
    assert find_renaming(out, P(LEQ_PAIRED, "int"))
    assert check_model(out, model_from_text(LEQ_MODEL))
    model = cpa_lfp(out).model
    assert check_goals(model, out.goals, "int") == [Verdict.SAT]


def test_pairing_script_replays():
    p = P(LEQ, "int")
    st = predicate_pair_state(p)
    assert print_program(replay(p, st.script()).program()) == print_program(st.program())


# ------------------------------------------------------- query-answer, args


def test_qa_transform():
    out = qa_transform(P(QA_IN))
    assert len(out.clauses) == 5
    assert find_renaming(out, P(QA_EXPECTED))
    res = kleene_lfp(out)
    assert res.converged
    assert [str(f) for f in res.interpretation if f.head.pred == "p_q"] == ["p_q(X) :- X=0."]
    assert not any(f.head.pred == "p_a" for f in res.interpretation)


def test_qa_multiple_goals_get_wrapped():
    out = qa_transform(P("false :- p(X), X>0.\nfalse :- p(X), X<0.\np(X) :- X=0."))
    assert len(out.goals) == 1


def test_reverse_is_an_involution():
    p = P("false :- X>0, p(X).\np(X) :- X=Y+1, p(Y).\np(X) :- X=0.")
    r = reverse(p)
    assert not same_up_to_renaming(r, p)
    assert same_up_to_renaming(reverse(r), p)


def test_reverse_rejects_nonlinear():
    with pytest.raises(TransformError):
        reverse(P("p(X) :- q(X), q(X).\nq(X) :- X=0."))


def test_raf_far_chain():
    # [REFERENCE] exact result
    mid = raf(P(RAF_FAR))
    assert print_program(mid) == "false :- X>0, q1(X).\nq1(X) :- X<Y.\n"
    out = far(mid)
    assert print_program(out) == "false :- q2.\nq2 :- true.\n"
    assert print_program(far(out)) == print_program(out)


def test_far_keeps_constrained_arguments():
    p = P("false :- X>0, q(X).\nq(X) :- X<0.")
    assert print_program(far(p)) == print_program(p)


# ----------------------------------------------------------- strengthening


def test_strengthening_makes_goal_trivially_unsat():
    res = strengthen_full(P(PROP))
    goal = res.program.goals[0]
    assert goal.constraint.unsat or la.is_unsat(goal.constraint)
    # sat is visible without any fixpoint computation on the result
    out = td_derive(res.program, goal, 1)
    assert out.kind == "finitely_failed"


def test_strengthening_preserves_goal_verdict():
    p = P("false :- X<0, p(X).\np(X) :- X=0.\np(X) :- X=Y+1, p(Y).")
    out = strengthen(p)
    assert check_goals(cpa_lfp(p).model, p.goals) == [Verdict.SAT]
    assert la.is_unsat(out.goals[0].constraint)
    q = P("false :- X>2, p(X).\np(X) :- X=0.\np(X) :- X=Y+1, p(Y).")
    assert td_derive(strengthen(q), strengthen(q).goals[0], 8).successful


def test_invariant_from_printed_query_answer_clauses():
    # the printed QA clauses seed p_q with X>=N, X>Y; analysing them gives that invariant back
    printed = P(
        "false :- X=0, Y=0, p_a(X,Y,N).\n"
        "p_a(X,Y,N) :- p_q(X,Y,N), X>=N, X>Y.\n"
        "p_a(X,Y,N) :- p_q(X,Y,N), X<N, X1=X+1, Y1=X1+Y, p_a(X1,Y1,N).\n"
        "p_q(X,Y,N) :- X>=N, X>Y.\n"
        "p_q(X1,Y1,N) :- X<N, X1=X+1, Y1=X1+Y, p_q(X,Y,N).\n"
    )
    model = cpa_lfp(printed).model
    for pred in ("p_q", "p_a"):
        names = model.names[pred]
        want = P(f"x({','.join(names)}) :- {names[0]}>={names[2]}, {names[0]}>{names[1]}.").clauses[0].constraint
        assert la.equivalent(model.get(pred), want), (pred, str(model.get(pred)))
