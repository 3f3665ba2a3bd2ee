import pytest

from nckernel.parser import parse_formula, parse_term, pretty_print
from nckernel.syntax import (
    ConjOp, LanguageId, MultiQuant, Sort, SortMismatch, Var, alpha_equivalent, canonical,
    contains_nonstandard, family_member, free_variables, fresh_name, is_closed, is_well_formed,
    substitute, unfold, well_formed,
)

P = parse_formula


def _free(text):
    (v,) = free_variables(P(text))
    return v


def test_substitution_renames_capturing_binder():
    phi = P("all y . x in y")
    out = substitute(phi, _free("all y . x in y"), Var("y", Sort.SET))
    assert pretty_print(out) == "all y' . y in y'"


def test_substitution_leaves_bound_occurrences():
    phi = P("all x . x in y")
    assert substitute(phi, Var("x", Sort.SET), Var("z", Sort.SET)) == phi


def test_substitution_checks_sorts():
    phi = P("all y . x in y")
    with pytest.raises(SortMismatch):
        substitute(phi, _free("all y . x in y"), parse_term("[f X]"))


def test_fresh_name_primes():
    assert fresh_name("x", {"x"}) == "x'"
    assert fresh_name("x", {"y"}) == "x"


def test_alpha_equivalence():
    assert alpha_equivalent(P("all x . x in y"), P("all z . z in y"))
    assert not alpha_equivalent(P("all x . x in y"), P("all y . y in y"))
    assert canonical(P("ex a . a = 0")) == canonical(P("ex b . b = 0"))


def test_closed_and_free():
    assert is_closed(P("all x . ex y . x in y"))
    assert not is_closed(P("ex y . x in y"))


def test_family_member_prints_singleton_domain():
    f = family_member("f", Var("xi", Sort.THING))
    assert f.name == "f" and f.domain == parse_term("{xi}")


def test_unfold_conjunction_over_literal():
    phi = P("bigwedge_{xi in {a, b}} f_{{xi}} : xi |-> xi")
    assert isinstance(phi, ConjOp) and contains_nonstandard(phi)
    expected = P("f_{{a}} : a |-> a /\\ f_{{b}} : b |-> b")
    assert alpha_equivalent(unfold(phi), expected)
    assert not contains_nonstandard(unfold(phi))


def test_unfold_multiple_quantifier():
    phi = P("(ex f_{xi})_{xi in {a, b}} . f_{{a}} : a |-> a")
    assert isinstance(phi, MultiQuant)
    out = unfold(phi)
    assert not contains_nonstandard(out)
    assert is_well_formed(out, LanguageId.LT_STANDARD)


def test_nonstandard_rejected_in_standard_language():
    phi = P("bigwedge_{xi in {a}} f_{{xi}} : xi |-> xi")
    diags = well_formed(phi, LanguageId.LT_STANDARD)
    assert diags and "ConjOp" in diags[0].message
    assert is_well_formed(phi, LanguageId.LT)


def test_matrix_terms_only_in_matrix_languages():
    phi = P("A = [0 0]", None)
    assert not is_well_formed(phi, LanguageId.LT)
    assert is_well_formed(phi, LanguageId.LSMT_1X2)
