import pytest

from hornkit.core import ParseError, parse_program as P
from hornkit.equiv import find_renaming
from hornkit.imp2chc import ImpProgram, compile_source, parse_imp, translate_bigstep, translate_reach
from hornkit.linarith import Verdict
from hornkit.pipeline import Settings, check_sat
from hornkit.transform import reverse

from programs import LEQ_C, REACH_EXPECTED, SUM_UPTO, SUM_UPTO_C


def test_parse_pragmas():
    prog, spec = parse_imp(SUM_UPTO_C)
    assert isinstance(prog, ImpProgram)
    assert list(prog.functions) == ["sum_upto"]
    assert spec.entries


def test_bigstep_matches_hand_written_clauses():
    out = compile_source(SUM_UPTO_C, "bigstep")
    assert find_renaming(out, P(SUM_UPTO, "int"), permute_args=True)
    assert check_sat(out).verdict is Verdict.SAT


def test_reach_matches_backward_reachability_clauses():
    out = compile_source(SUM_UPTO_C, "reach")
    assert all(c.is_linear for c in out.clauses)
    assert find_renaming(out, P(REACH_EXPECTED, "int"), permute_args=True)
    assert check_sat(out).verdict is Verdict.SAT


def test_reach_reversed_is_forward_system():
    out = reverse(compile_source(SUM_UPTO_C, "reach"))
    facts = [c for c in out.clauses if c.is_fact]
    assert len(facts) == 1 and facts[0].head.pred == "assign_error"


@pytest.mark.parametrize("style", ["bigstep", "reach"])
def test_invalid_triple_is_refuted(style):
    out = compile_source(SUM_UPTO_C.replace("sum >= m", "sum > m"), style)
    res = check_sat(out, Settings(method="td", depth=8))
    assert res.verdict is Verdict.UNSAT
    assert res.witness["point"]


def test_true_post_emits_no_goal():
    out = compile_source(SUM_UPTO_C.replace("sum >= m", "true"))
    assert out.goals == []


def test_relational_triple_bigstep():
    out = compile_source(LEQ_C, "bigstep")
    g = out.goals[0]
    assert sorted(a.pred for a in g.atoms) == ["f", "g"]
    rec_f = [c for c in out.clauses if c.head and c.head.pred == "f" and c.atoms]
    assert len(rec_f) == 1


def test_reach_rejects_recursion():
    with pytest.raises(ParseError):
        compile_source(LEQ_C, "reach")


def test_straight_line_program_is_a_chain():
    src = """
// pre: a >= 0
// post: b >= 1
// entry: b = h(a);
int h(int x) {
  int y = x + 1;
  return y;
}
"""
    out = compile_source(src, "reach")
    assert all(len(c.atoms) <= 1 for c in out.clauses)
    assert check_sat(out).verdict is Verdict.SAT
    assert check_sat(compile_source(src, "bigstep")).verdict is Verdict.SAT


@pytest.mark.parametrize(
    "body",
    [
        "int y = x * x; return y;",
        "int y = x / 2; return y;",
        "return z;",
        "if (x > 0 || x < 0) { x = 1; } return x;",
        "int y = x % 2; return y;",
    ],
)
def test_rejected_sources(body):
    src = f"// pre: a >= 0\n// post: b >= 0\n// entry: b = h(a);\nint h(int x) {{ {body} }}\n"
    with pytest.raises(ParseError):
        compile_source(src)


def test_translators_take_parsed_program():
    prog, spec = parse_imp(SUM_UPTO_C)
    assert len(translate_bigstep(prog, spec).clauses) == 4
    assert len(translate_reach(prog, spec).clauses) == 4
