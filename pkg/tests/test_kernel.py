from dataclasses import replace

import pytest

from nckernel.cli import fixture_dir
from nckernel.kernel import (
    ALL_RULES, RuleId, check_proof, derivable_depth1, is_tautology, rule_id,
    tautologically_implies,
)
from nckernel.parser import parse_formula, parse_proof_script, pretty_print
from nckernel.syntax import ConjOp, alpha_equivalent, walk

P = parse_formula

HEADER = "theory T\n1. ex X . X = 0 /\\ (all alpha . alpha notin X) ; axiom T.EMPTY\n"


def check(body, header=HEADER):
    return check_proof(parse_proof_script(header + body))


def test_small_derivation_accepted():
    v = check(
        "2. $E = 0 /\\ (all alpha . alpha notin $E) ; from 1 by RULE-C\n"
        "3. all alpha . alpha notin $E ; from 2 by AND-E\n"
        "4. 0 notin $E ; from 3 by UNIV-E\n"
        "5. 0 notin $E \\/ 0 = 0 ; from 4 by OR-I\n"
        "6. alpha = alpha ; schema EQ-REFL()\n"
        "7. all alpha . alpha = alpha ; from 6 by UNIV-I\n"
        "8. 0 = 0 ; from 7 by UNIV-E\n"
        "9. 0 = 0 -> 0 notin $E ; from 4 by TAUT\n"
        "10. 0 notin $E ; from 8,9 by MP\n"
        "11. ex beta . beta = beta ; from 8 by EXIST-I\n"
    )
    assert v.accepted, v.report()


def test_axiom_text_must_match():
    v = check_proof(parse_proof_script("theory T\n1. ex X . all alpha . alpha notin X ; axiom T.EMPTY\n"))
    assert not v.accepted
    assert "differs from axiom T.EMPTY" in v.failures()[0][1]


def test_unknown_axiom():
    v = check_proof(parse_proof_script("theory T\n1. 0 = 0 ; axiom T.NOPE\n"))
    assert "no axiom NOPE" in v.failures()[0][1]


def test_rule_c_constant_must_be_fresh():
    v = check(
        "2. $E = 0 /\\ (all alpha . alpha notin $E) ; from 1 by RULE-C\n"
        "3. $E = 0 /\\ (all alpha . alpha notin $E) ; from 1 by RULE-C\n"
    )
    assert [i for i, _ in v.failures()] == [3]
    assert "not fresh" in v.failures()[0][1]


def test_modus_ponens_checks_shape():
    v = check("2. 0 = 0 ; schema EQ-REFL()\n3. 0 in 0 ; from 2,1 by MP\n")
    assert [i for i, _ in v.failures()] == [3]


def test_generalization_needs_matching_body():
    v = check("2. 0 = 0 ; schema EQ-REFL()\n3. all alpha . alpha = alpha ; from 2 by UNIV-I\n")
    assert not v.accepted


def test_tautology_rule():
    assert is_tautology(P("a = 0 \\/ ~ a = 0"))
    assert not is_tautology(P("a = 0 -> b = 0"))
    assert tautologically_implies([P("a = 0"), P("a = 0 -> b = 0")], P("b = 0"))
    v = check("2. 0 = 0 -> 0 in 0 ; by TAUT\n")
    assert "TAUT" in v.failures()[0][1]


def test_rule_aliases():
    assert rule_id("I1") is RuleId.I1
    assert rule_id("MP") is RuleId.MP
    with pytest.raises(ValueError):
        rule_id("NOPE")


# ------------------------------------------------------------ shipped scripts


def _script(name):
    return parse_proof_script((fixture_dir() / name).read_text())


@pytest.mark.parametrize("name", ["eq42-derivation.prf", "prop6-derivation.prf"])
def test_shipped_scripts_accepted(name):
    v = check_proof(_script(name))
    assert v.accepted, v.report()


def test_goal_must_be_reached():
    script = _script("eq42-derivation.prf")
    last = script.steps[-1].index
    v = check_proof(script.without(last))
    assert not v.accepted and v.goal_diagnostic


def test_sum_derivation_without_conjunction_step_fails_where_conjunction_appears():
    script = _script("prop6-derivation.prf")
    (i1,) = [s.index for s in script.steps if s.justification.ref == "I1"]
    mutated = script.without(i1)
    v = check_proof(mutated)
    first_conj = next(s.index for s in mutated.steps
                      if any(isinstance(n, ConjOp) for _, n in walk(s.formula)))
    assert v.failures()[0][0] == first_conj


def test_sum_derivation_with_wrong_rule_rejected():
    script = _script("prop6-derivation.prf")
    (i1,) = [s for s in script.steps if s.justification.ref == "I1"]
    bad = replace(i1, justification=replace(i1.justification, ref="AND-I"))
    mutated = replace(script, steps=tuple(bad if s is i1 else s for s in script.steps))
    v = check_proof(mutated)
    assert i1.index in [i for i, _ in v.failures()]


# ------------------------------------------------------------ forward steps


def test_depth1_modus_ponens():
    out = derivable_depth1([P("a = 0"), P("a = 0 -> b = 0")], {RuleId.MP})
    assert any(alpha_equivalent(f, P("b = 0")) for f in out)


def test_depth1_conjunction_over_literal():
    prems = [P("f_{{a}} : a |-> a"), P("f_{{b}} : b |-> b"),
             P("all gamma . (gamma in X <-> gamma = a \\/ gamma = b)")]
    out = derivable_depth1(prems, {RuleId.I1})
    conj = [f for f in out if isinstance(f, ConjOp)]
    assert conj, [pretty_print(f) for f in out]


def test_depth1_is_deterministic():
    prems = [P("a = 0"), P("a = 0 -> b = 0"), P("ex x . x in a")]
    first = [pretty_print(f) for f in derivable_depth1(prems, ALL_RULES)]
    assert first == [pretty_print(f) for f in derivable_depth1(prems, ALL_RULES)]
