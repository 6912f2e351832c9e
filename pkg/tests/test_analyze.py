import pytest

from hornkit import linarith as la
from hornkit.analyze import AnalysisConfig, check_goals, check_model, cpa_lfp, model_from_text
from hornkit.core import parse_constraint, parse_program
from hornkit.linarith import Verdict

from programs import SUM_UPTO, SUM_UPTO_MODEL


def _model_equals(model, expected):
    for pred, text in expected.items():
        got = model.get(pred)
        names = model.names[pred]
        want = parse_constraint(text)
        # expected constraints are written over the defining clause's head names
        assert set(want.vars()) <= set(names), (pred, names)
        assert la.equivalent(got, want), (pred, str(got))


def test_sum_upto_fixpoint():
    # [REFERENCE] polyhedral model of the sum_upto clauses
    res = cpa_lfp(parse_program(SUM_UPTO))
    assert res.stable
    _model_equals(res.model, SUM_UPTO_MODEL)
    assert check_goals(res.model, parse_program(SUM_UPTO).goals) == [Verdict.SAT]


def test_model_is_checked_model():
    p = parse_program(SUM_UPTO)
    res = cpa_lfp(p)
    assert check_model(p, res.model)


def test_delay_changes_precision_not_soundness():
    p = parse_program(SUM_UPTO)
    for d in (1, 2, 4):
        m = cpa_lfp(p, AnalysisConfig(widening_delay=d)).model
        assert check_model(p, m)


def test_bottom_predicate():
    p = parse_program("p(X) :- q(X).\nfalse :- p(X).")
    res = cpa_lfp(p)
    assert res.model.is_bottom("p")
    assert check_goals(res.model, p.goals) == [Verdict.SAT]


def test_unproved_goal_is_unknown():
    p = parse_program("p(X) :- X>=0.\nfalse :- X=1, p(X).")
    assert check_goals(cpa_lfp(p).model, p.goals) == [Verdict.UNKNOWN]


def test_config_validation():
    with pytest.raises(ValueError):
        AnalysisConfig(widening_delay=5, max_iters=2)
    with pytest.raises(ValueError):
        AnalysisConfig(join="meet")


def test_json_shape():
    res = cpa_lfp(parse_program(SUM_UPTO))
    js = {e["predicate"]: e for e in res.model.to_json()}
    assert js["while"]["status"] == "reachable" and js["while"]["arity"] == 3


def test_check_model_rejects_non_model():
    p = parse_program(SUM_UPTO)
    assert not check_model(p, model_from_text("while(X,R1,R) :- R>=R1+1.\nsum_upto(X,R) :- R>=0."))
