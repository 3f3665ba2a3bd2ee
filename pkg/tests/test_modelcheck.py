import pytest

from nckernel.modelcheck import (
    EMPTY_SET, SUM_F_INFINITE, Mat, ModelError, Valuation, admissible_index_sets, brute_force_sum_f,
    carriers_disjoint, check_axioms, enumerate_universe, eval_formula, function_table,
    functions_well_formed, pair, pair_injective, pruning, rank, schema_instances, sum_f_search,
    unpair,
)
from nckernel.parser import parse_formula
from nckernel.syntax import LanguageId, Sort, Var
from nckernel.theories import load_theory

P = parse_formula
ONE = frozenset({EMPTY_SET})


@pytest.mark.parametrize("r, slack, sets, functions", [
    (1, 0, 2, 1), (2, 0, 4, 1), (3, 0, 16, 2), (3, 2, 16, 625),
])
def test_carrier_sizes(r, slack, sets, functions):
    S = enumerate_universe(r, slack)
    assert (len(S.sets), len(S.functions)) == (sets, functions)


@pytest.mark.parametrize("r, slack", [(1, 0), (2, 0), (3, 0), (3, 2)])
def test_carriers(r, slack):
    S = enumerate_universe(r, slack)
    assert carriers_disjoint(S) and pair_injective(S) and functions_well_formed(S)


def test_pairs():
    assert unpair(pair(EMPTY_SET, ONE)) == (EMPTY_SET, ONE)
    assert pair(EMPTY_SET, ONE) != pair(ONE, EMPTY_SET)
    assert rank(pair(ONE, ONE)) == 3


def test_function_objects_are_not_sets():
    S = enumerate_universe(3, 2)
    f = S.ur_functions(EMPTY_SET)[0]
    assert isinstance(f, Mat) and f.domain == ONE
    assert set(function_table(f)) == {EMPTY_SET}


def test_rank_bound_validated():
    with pytest.raises(ModelError):
        enumerate_universe(9)
    with pytest.raises(ModelError):
        enumerate_universe(2, -1)


def test_basic_evaluation():
    S = enumerate_universe(2)
    assert eval_formula(P("ex X . all alpha . alpha notin X"), S)
    # the largest set has no superset in a finite carrier
    assert not eval_formula(P("all x . ex y . x in y"), S)


def test_omega_has_no_denotation():
    assert not eval_formula(P("w = w"), enumerate_universe(2))


def test_valuation_for_free_variables():
    S = enumerate_universe(2)
    x = Var("x", Sort.SET)
    assert eval_formula(P("0 in x"), S, Valuation({x: ONE}))
    assert not eval_formula(P("0 in x"), S, Valuation({x: EMPTY_SET}))


def _items(tid):
    theory = load_theory(tid)
    return [(a.name, phi) for a, phi in theory.axioms] + schema_instances(theory)


@pytest.mark.parametrize("label, phi", _items("T"), ids=lambda x: x if isinstance(x, str) else "")
def test_pruning_matches_plain_search(label, phi):
    S = enumerate_universe(2)
    fast = eval_formula(phi, S)
    with pruning(False):
        slow = eval_formula(phi, S)
    assert fast == slow


def test_axiom_report_shape():
    report = check_axioms("T", enumerate_universe(2), expected_fail=("INF", SUM_F_INFINITE))
    statuses = {r.id: r.status for r in report.rows}
    assert statuses["INF"] == "EXPECTED-FAIL"
    assert statuses[SUM_F_INFINITE] == "EXPECTED-FAIL"
    assert statuses["EXT"] == "PASS" and statuses["REV-GRAPH"] == "PASS"
    assert set(report.unexpected) == {"PAIR", "POW", "SUCC-DEF", "UR-EXIST"}
    assert "-" in report.text(timing=False)


def test_matrix_theory_report():
    report = check_axioms("SMT-1x2", enumerate_universe(2), include_schemata=False)
    assert {r.id for r in report.rows} >= {"EXT", "1X2"}


@pytest.mark.parametrize("slack, admissible", [(0, 1), (2, 15)])
def test_sum_of_ur_functions(slack, admissible):
    S = enumerate_universe(3, slack)
    xs = admissible_index_sets(S)
    assert len(xs) == admissible
    assert all(brute_force_sum_f(S, x) for x in xs)


def test_sum_search_reports_families():
    S = enumerate_universe(3, 2)
    result = sum_f_search(S, frozenset({EMPTY_SET, ONE}))
    assert result.holds and result.families > 0


def test_sum_search_rejects_empty_index_set():
    with pytest.raises(ModelError):
        sum_f_search(enumerate_universe(3, 2), EMPTY_SET)


def test_matrix_language_formulas_evaluate():
    phi = P("ex alpha . alpha = [0 0]", LanguageId.LSMT_1X2)
    assert eval_formula(phi, enumerate_universe(2))


RICH_CASES = [
    "all X . all f_{X} . all alpha . (f_{X} : alpha |-> alpha -> alpha in X)",
    "all X . ex f_{X} . ex Y . f_{X} : X ->> Y",
    "ex X . ex f_{X} . (f_{X} : 0 |-> {0} /\\ ~ X = {0})",
]


@pytest.mark.parametrize("text", RICH_CASES)
def test_pruning_matches_plain_search_with_functions(text):
    S = enumerate_universe(3, 2)
    phi = P(text, LanguageId.LT_STANDARD)
    fast = eval_formula(phi, S)
    with pruning(False):
        slow = eval_formula(phi, S)
    assert fast == slow
