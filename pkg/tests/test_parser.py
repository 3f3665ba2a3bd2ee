import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nckernel.cli import fixture_dir
from nckernel.parser import (
    ParseError, WellFormednessError, parse_formula, parse_formula_file, parse_proof_script,
    parse_term, pretty_print, print_proof_script, tokenize,
)
from nckernel.syntax import (
    EMPTY, And, Eq, Exists, Forall, Iff, Implies, LanguageId, Mem, Not, Or, Pair, Sort, Succ, Var,
    alpha_equivalent,
)
from nckernel.theories import THEORY_IDS, load_theory

P = parse_formula


def _roundtrip(phi, lang=LanguageId.LT):
    text = pretty_print(phi)
    again = P(text, lang)
    assert alpha_equivalent(again, phi), text
    assert pretty_print(again) == text


@pytest.mark.parametrize("name, lang", [("corpus-lt.fml", LanguageId.LT), ("corpus-smt.fml", None)])
def test_corpus_round_trips(name, lang):
    formulas = parse_formula_file((fixture_dir() / name).read_text(), lang)
    assert formulas
    for phi in formulas:
        _roundtrip(phi, lang)


@pytest.mark.parametrize("tid", THEORY_IDS)
def test_catalog_round_trips(tid):
    theory = load_theory(tid)
    for _, phi in theory.axioms:
        _roundtrip(phi, theory.language)


def test_precedence():
    phi = P("p0 = 0 /\\ p1 = 0 \\/ p2 = 0 -> p3 = 0")
    assert isinstance(phi, Implies) and isinstance(phi.left, Or) and isinstance(phi.left.left, And)


def test_implication_is_right_associative():
    phi = P("a = 0 -> b = 0 -> c = 0")
    assert isinstance(phi.right, Implies)


def test_unparenthesized_iff_chain_is_rejected():
    with pytest.raises(ParseError):
        P("a = 0 <-> b = 0 <-> c = 0")
    P("(a = 0 <-> b = 0) <-> c = 0")


def test_abbreviations_expand():
    assert alpha_equivalent(P("x sub y"), P("all zeta . zeta in x -> zeta in y"))
    assert isinstance(P("ex! x . x in y"), Exists)
    assert alpha_equivalent(P("x notin y"), P("~ x in y"))


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        P("all x . (x in")
    assert "line 1, column 14" in str(err.value)


def test_well_formedness_enforced_by_language():
    with pytest.raises(WellFormednessError):
        P("A = [0 0]", LanguageId.LT)
    P("A = [0 0]", None)


def test_tokenizer_rejects_stray_characters():
    with pytest.raises(ParseError):
        tokenize("x in y ?")


def test_terms():
    assert parse_term("succ(0)") == Succ(EMPTY)
    assert pretty_print(P("(x, y) in Y^X")) == "(x, y) in Y^X"


def test_proof_script_round_trip():
    text = (fixture_dir() / "eq42-derivation.prf").read_text()
    script = parse_proof_script(text)
    again = parse_proof_script(print_proof_script(script))
    assert again.theory == script.theory
    assert [s.justification for s in again.steps] == [s.justification for s in script.steps]
    assert all(alpha_equivalent(a.formula, b.formula) for a, b in zip(again.steps, script.steps))


# ------------------------------------------------------------ generated formulas

_VARS = [Var(n, Sort.THING) for n in ("alpha", "beta", "gamma")]


def _terms():
    leaf = st.sampled_from(_VARS + [EMPTY])
    return st.recursive(leaf, lambda t: st.one_of(
        st.builds(Succ, t), st.builds(Pair, t, t)), max_leaves=4)


def _formulas():
    atom = st.one_of(st.builds(Eq, _terms(), _terms()), st.builds(Mem, _terms(), _terms()))
    binder = st.sampled_from(_VARS)
    return st.recursive(atom, lambda f: st.one_of(
        st.builds(Not, f),
        st.builds(And, f, f), st.builds(Or, f, f), st.builds(Implies, f, f), st.builds(Iff, f, f),
        st.builds(Forall, binder, f), st.builds(Exists, binder, f),
    ), max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(_formulas())
def test_generated_formulas_round_trip(phi):
    _roundtrip(phi)
