import pytest

from nckernel.cli import fixture_dir
from nckernel.parser import parse_formula, parse_formula_file, pretty_print
from nckernel.syntax import LanguageId, alpha_equivalent, is_well_formed, walk
from nckernel.theories import instantiate_replacement, instantiate_separation, load_theory, standard_axioms
from nckernel.translator import TranslationError, translate, translate_theory

STD = LanguageId.LT_STANDARD
TARGET = LanguageId.LSMT_1X2_PLUS4


def _fixture(name, lang):
    (phi,) = parse_formula_file((fixture_dir() / name).read_text(), lang)
    return phi


def test_reverse_graph_translates_to_golden():
    trace = translate(_fixture("gamma30.fml", STD))
    assert alpha_equivalent(trace.output, _fixture("eq42.fml", TARGET))


def test_clause_log_covers_each_node_once():
    phi = _fixture("gamma30.fml", STD)
    trace = translate(phi)
    paths = [p for p, _ in trace.clause_log]
    assert sorted(paths) == sorted(p for p, _ in walk(phi))
    assert len(trace.audit_lines()) == len(paths)


@pytest.mark.parametrize("aid, phi", standard_axioms("T"), ids=lambda x: getattr(x, "name", ""))
def test_standard_axioms_land_in_matrix_language(aid, phi):
    assert is_well_formed(translate(phi).output, TARGET)


def test_function_quantifier_gets_existence_guard():
    out = translate(parse_formula("all X . all f_{X} . f_{X} : X ->> X", STD)).output
    assert pretty_print(out) == "all X . all f . (ex alpha . alpha = [f X]) -> [f X] : X ->> X"


def test_existential_guard_is_conjoined():
    out = translate(parse_formula("all X . ex f_{X} . f_{X} : X ->> X", STD)).output
    assert alpha_equivalent(out, parse_formula(
        "all X . ex f . ((ex alpha . alpha = [f X]) /\\ [f X] : X ->> X)", TARGET))


def test_inactive_constant_becomes_empty_matrix():
    out = translate(parse_formula("id0 = id0", STD)).output
    assert pretty_print(out) == "[0 0] = [0 0]"


def test_graph_name_avoids_set_variables():
    phi = parse_formula("all f . all X . ex f_{X} . f_{X} : X ->> f", STD)
    out = translate(phi).output
    assert pretty_print(out) == "all f . all X . ex f' . (ex alpha . alpha = [f' X]) /\\ [f' X] : X ->> f"


def test_nonstandard_input_rejected():
    phi = parse_formula("bigwedge_{xi in {a}} f_{{xi}} : xi |-> xi", LanguageId.LT)
    with pytest.raises(TranslationError):
        translate(phi, LanguageId.LT)


def test_free_composite_with_unbound_domain_rejected():
    with pytest.raises(TranslationError):
        translate(parse_formula("f_{X} : X ->> X", STD))


def test_matrix_language_input_rejected():
    with pytest.raises(TranslationError):
        translate(parse_formula("0 = 0", TARGET), TARGET)


def test_schema_instances_translate_to_set_theory():
    smt = load_theory("SMT-1x2-plus4")
    sep = instantiate_separation(parse_formula("alpha != alpha", STD))
    assert alpha_equivalent(translate(sep).output, smt.schema("SEP").instantiate(
        parse_formula("alpha != alpha", TARGET)))
    rep = instantiate_replacement(parse_formula("beta = alpha", STD))
    assert alpha_equivalent(translate(rep).output, smt.schema("REP").instantiate(
        parse_formula("beta = alpha", TARGET)))


def test_translate_theory_keeps_order():
    axioms = standard_axioms("T-inf-0")
    out = translate_theory(axioms)
    assert [a for a, _ in out] == [a for a, _ in axioms]
