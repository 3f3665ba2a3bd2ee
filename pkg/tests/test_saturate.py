import pytest

from nckernel.kernel import ALL_RULES, RuleId
from nckernel.parser import parse_formula, parse_term
from nckernel.saturate import (
    SaturationError, derivation_chain, find_contradiction, is_witness_consistent, new_mapping_atoms,
    saturate, stage_of, stage_rules, staged_run,
)
from nckernel.syntax import ConjOp, Not, alpha_equivalent, canonical

P = parse_formula

# one mapping atom of F for each element of its domain {a, b}
FAMILY = [P("F_{{a, b}} : a |-> a"), P("F_{{a, b}} : b |-> b")]


def test_modus_ponens_closure():
    state = saturate([P("p = 0"), P("p = 0 -> q = 0")], {RuleId.MP}, max_depth=1)
    assert [f for f in state.formulas][-1] == P("q = 0")
    assert len(state.formulas) == 3
    assert state.stage == "Sigma"


def test_conjunction_introduced_over_family():
    state = saturate(FAMILY, {RuleId.I1}, max_depth=1)
    extra = state.formulas[len(FAMILY):]
    assert extra == (P("bigwedge_{xi in {a, b}} F_{{a, b}} : xi |-> xi"),)


def test_conjunction_elimination_adds_nothing_new():
    first = saturate(FAMILY, {RuleId.I1}, max_depth=1)
    second = saturate(first.formulas, {RuleId.I2}, max_depth=1)
    assert second.keys() == first.keys()


def test_duplicates_removed_modulo_alpha():
    state = saturate([P("all x . x in y"), P("all z . z in y")], {RuleId.MP}, max_depth=0)
    assert len(state.formulas) == 1


def test_monotone_in_depth():
    seed = [P("p = 0"), P("p = 0 -> q = 0"), P("q = 0 -> r = 0"), P("ex x . x in p")]
    pool = [parse_term("0")]
    shallow = saturate(seed, ALL_RULES, pool, max_depth=1)
    deep = saturate(seed, ALL_RULES, pool, max_depth=2)
    assert shallow.keys() <= deep.keys()


def test_rerun_is_identical():
    seed = [P("p = 0"), P("p = 0 -> q = 0"), P("ex x . x in p")]
    a = saturate(seed, ALL_RULES, [parse_term("0")], max_depth=2)
    b = saturate(seed, ALL_RULES, [parse_term("0")], max_depth=2)
    assert a.formulas == b.formulas and a.counts == b.counts


def test_depth_bound():
    with pytest.raises(SaturationError):
        saturate([P("p = 0")], max_depth=5)


def test_cap_sets_truncation_flag():
    seed = [P("p = 0")] + [P(f"p = 0 -> q{i} = 0") for i in range(12)]
    state = saturate(seed, {RuleId.MP}, max_depth=1, cap=20)
    assert state.truncated and len(state.formulas) <= 20
    assert "truncated yes" in state.summary()


def test_contradiction_found_with_chains():
    state = saturate([P("p = 0"), P("p = 0 -> ~ p = 0")], {RuleId.MP}, max_depth=1)
    w = find_contradiction(state)
    assert w is not None and is_witness_consistent(w)
    assert alpha_equivalent(w.phi, P("p = 0"))
    assert "by MP" in w.provenance[1]


def test_double_negation_counts():
    state = saturate([P("~ ~ p = 0"), P("~ p = 0")], {RuleId.MP}, max_depth=0)
    assert find_contradiction(state) is not None


def test_consistent_seed_has_no_witness():
    state = saturate([P("p = 0")], {RuleId.MP}, max_depth=3)
    assert find_contradiction(state) is None


def test_derivation_chain_cites_seed_labels():
    state = saturate([("A.ONE", P("p = 0")), ("A.TWO", P("p = 0 -> q = 0"))], {RuleId.MP}, max_depth=1)
    chain = derivation_chain(state, P("q = 0"))
    assert chain.splitlines() == [
        "1. p = 0 ; axiom A.ONE",
        "2. p = 0 -> q = 0 ; axiom A.TWO",
        "3. q = 0 ; from 1,2 by MP",
    ]


def test_stages():
    assert stage_of(stage_rules("Sigma")) == "Sigma"
    assert stage_of(stage_rules("Upsilon")) == "Upsilon"
    assert stage_of(stage_rules("Phi")) == "Phi"
    assert stage_of(stage_rules("Omega")) == "Omega"
    with pytest.raises(SaturationError):
        stage_rules("Delta")


def test_staged_family_adds_no_mapping_atom():
    runs = staged_run(FAMILY, max_depth=2)
    assert not new_mapping_atoms(runs["Sigma"], runs["Phi"])
    assert all(find_contradiction(s) is None for s in runs.values())
    assert any(isinstance(f, ConjOp) for f in runs["Upsilon"].formulas)


def test_membership_uses_canonical_form():
    state = saturate([P("all x . x in y")], max_depth=0)
    assert P("all z . z in y") in state
    assert canonical(Not(P("0 = 0"))) not in state.keys()


def test_conjunction_over_enumerated_domain():
    seed = [P("F_{$S} : a |-> a"), P("F_{$S} : b |-> b"),
            P("all gamma . (gamma in $S <-> gamma = a \\/ gamma = b)")]
    state = saturate(seed, {RuleId.I1}, max_depth=1)
    assert P("bigwedge_{xi in $S} F_{$S} : xi |-> xi") in state
