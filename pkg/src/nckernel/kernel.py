"""Hilbert-style proof checker with the nonstandard conjunctive-operator rules.

A script is a list of numbered steps.  Each step is an axiom of the script's
theory, a schema instance, or the result of one rule applied to earlier
steps.  Checking is purely syntactic; instantiation terms and Rule-C
witnesses are recovered by matching the cited premise against the step.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, is_dataclass
from enum import Enum
from typing import Optional

from .parser import (
    ParseError, ProofScript, Step, parse_formula, pretty_print,
    _split_top,
)
from .syntax import (
    FORMULA_TYPES, TERM_TYPES, And, ConjOp, Const, Eq, Exists, Forall, Fun,
    Iff, Implies, Maps, Mem, MultiQuant, Not, Or, SetLit, Sort,
    SortMismatch, Var, alpha_equivalent, canonical, contains_nonstandard,
    free_variables, rename_family, sort_fits, substitute, substitute_many, term_sort, walk,
)
from . import theories as th


class RuleId(str, Enum):
    MP = "MP"
    AND_I = "AND-I"
    AND_E = "AND-E"
    OR_I = "OR-I"
    NOT_E = "NOT-E"
    UNIV_I = "UNIV-I"
    UNIV_E = "UNIV-E"
    EXIST_I = "EXIST-I"
    RULE_C = "RULE-C"
    I1 = "I1-CONJ-I"
    I2 = "I2-CONJ-E"
    I3 = "I3-MULTI-I"
    I4 = "I4-MULTI-E"
    I5 = "I5-NS-QUANT-I"
    I6 = "I6-NS-QUANT-E"
    TAUT = "TAUT"


_RULE_ALIASES = {"I1": RuleId.I1, "I2": RuleId.I2, "I3": RuleId.I3, "I4": RuleId.I4,
                 "I5": RuleId.I5, "I6": RuleId.I6, "GEN": RuleId.UNIV_I}

STANDARD_RULES = frozenset({RuleId.MP, RuleId.AND_I, RuleId.AND_E, RuleId.OR_I, RuleId.NOT_E,
                            RuleId.UNIV_I, RuleId.UNIV_E, RuleId.EXIST_I, RuleId.RULE_C,
                            RuleId.TAUT})
ALL_RULES = frozenset(RuleId)

TAUT_ATOM_LIMIT = 16


def rule_id(text) -> RuleId:
    if isinstance(text, RuleId):
        return text
    key = str(text).upper()
    if key in _RULE_ALIASES:
        return _RULE_ALIASES[key]
    return RuleId(key)


class StepError(Exception):
    """A violated side condition; the message is the diagnostic."""


@dataclass
class Verdict:
    accepted: bool
    per_step: list  # (index, None | diagnostic)
    goal_diagnostic: Optional[str] = None
    fresh: dict = field(default_factory=dict)

    def failures(self) -> list:
        return [(i, d) for i, d in self.per_step if d is not None]

    def report(self) -> str:
        lines = []
        for i, d in self.per_step:
            lines.append(f"{i} OK" if d is None else f"{i} FAIL {d}")
        if self.goal_diagnostic:
            lines.append(f"goal FAIL {self.goal_diagnostic}")
        lines.append("ACCEPTED" if self.accepted else "REJECTED")
        return "\n".join(lines) + "\n"


# ------------------------------------------------------------ matching

def _is_node(x) -> bool:
    return isinstance(x, TERM_TYPES) or isinstance(x, FORMULA_TYPES)


def _collect(p, q, active: frozenset, bmap: dict, out: dict) -> bool:
    """Walk ``p`` (pattern) and ``q`` in parallel.

    Occurrences of ``active`` variables in ``p`` record the aligned subterm of
    ``q`` in ``out``.  ``bmap`` aligns binders that may have been renamed.
    """
    if isinstance(p, (Var, Fun)) and p in active:
        prev = out.get(p)
        if prev is None:
            out[p] = q
            return True
        return prev == q
    if type(p) is not type(q):
        return False
    if isinstance(p, Var):
        want = bmap.get(("v", p.name, p.sort))
        if want is not None:
            return q == want
        return p == q
    if isinstance(p, Fun):
        if p.const != q.const:
            return False
        name = bmap.get(("f", p.name), p.name)
        if name != q.name:
            return False
        return _collect(p.domain, q.domain, active, bmap, out)
    if isinstance(p, (Forall, Exists)):
        pv, qv = p.var, q.var
        if type(pv) is not type(qv):
            return False
        inner = dict(bmap)
        if isinstance(pv, Var):
            if pv.sort != qv.sort:
                return False
            inner[("v", pv.name, pv.sort)] = qv
            act = active - {pv}
        else:
            if not _collect(pv.domain, qv.domain, active, bmap, out):
                return False
            inner[("f", pv.name)] = qv.name
            act = frozenset(a for a in active if not (isinstance(a, Fun) and a.name == pv.name))
        return _collect(p.body, q.body, act, inner, out)
    if isinstance(p, (ConjOp, MultiQuant)):
        if not _collect(p.index_set, q.index_set, active, bmap, out):
            return False
        if p.index.sort != q.index.sort:
            return False
        inner = dict(bmap)
        inner[("v", p.index.name, p.index.sort)] = q.index
        act = active - {p.index}
        if isinstance(p, MultiQuant):
            if p.kind != q.kind:
                return False
            inner[("f", p.family)] = q.family
            act = frozenset(a for a in act if not (isinstance(a, Fun) and a.name == p.family))
        return _collect(p.body, q.body, act, inner, out)
    for f in fields(p):
        if f.name == "span":
            continue
        a, b = getattr(p, f.name), getattr(q, f.name)
        if _is_node(a):
            if not _collect(a, b, active, bmap, out):
                return False
        elif isinstance(a, tuple):
            if not isinstance(b, tuple) or len(a) != len(b):
                return False
            for x, y in zip(a, b):
                if _is_node(x):
                    if not _collect(x, y, active, bmap, out):
                        return False
                elif x != y:
                    return False
        elif a != b:
            return False
    return True


def match_instance(body, variables, target):
    """Terms ``ts`` with ``body[variables := ts]`` alpha-equivalent to ``target``.

    Returns a dict (missing keys: the variable does not occur) or None.
    """
    variables = list(variables)
    out = {}
    if not _collect(body, target, frozenset(variables), {}, out):
        # binders renamed by capture avoidance can defeat the fast walk; the
        # candidates found so far may still be right, so fall through to the check
        pass
    try:
        inst = instantiate_prefix(body, variables, out)
    except SortMismatch:
        return None
    if alpha_equivalent(inst, target):
        return out
    return None


def instantiate_prefix(body, variables, terms: dict):
    """Replace the peeled prefix ``variables`` by ``terms`` in ``body``.

    A function binder whose subscript mentions an earlier binder of the same
    prefix is rewritten in order, so ``all X . all f_{X}`` instantiates to
    ``f_{t}`` first and then to the supplied function term.
    """
    pairs = [(v, terms[v]) for v in variables if v in terms]
    if not any(isinstance(v, Fun) for v, _ in pairs):
        return substitute_many(body, pairs) if pairs else body
    done = []
    for v, t in pairs:
        if isinstance(v, Fun):
            d = v.domain
            for w, u in done:
                d = substitute(d, w, u)
            v = Fun(v.name, d, False, v.span)
        body = substitute(body, v, t)
        done.append((v, t))
    return body


def _peel(phi, cls, limit=None) -> list:
    """Successive ``(vars, body)`` splits of a quantifier prefix of class ``cls``."""
    out = []
    vs = []
    while isinstance(phi, cls) and (limit is None or len(vs) < limit):
        vs.append(phi.var)
        phi = phi.body
        out.append((list(vs), phi))
    return out


# ----------------------------------------------------------- tautologies

_PROP = (Not, And, Or, Implies, Iff)


def _atom_key(phi):
    return canonical(phi)


def _eval_mask(phi, table, nbits, full):
    match phi:
        case Not(body=b):
            return full ^ _eval_mask(b, table, nbits, full)
        case And(left=l, right=r):
            return _eval_mask(l, table, nbits, full) & _eval_mask(r, table, nbits, full)
        case Or(left=l, right=r):
            return _eval_mask(l, table, nbits, full) | _eval_mask(r, table, nbits, full)
        case Implies(left=l, right=r):
            return (full ^ _eval_mask(l, table, nbits, full)) | _eval_mask(r, table, nbits, full)
        case Iff(left=l, right=r):
            return full ^ (_eval_mask(l, table, nbits, full) ^ _eval_mask(r, table, nbits, full))
    return table[_atom_key(phi)]


def _gather_atoms(phi, seen: dict):
    if isinstance(phi, _PROP):
        for c in ((phi.body,) if isinstance(phi, Not) else (phi.left, phi.right)):
            _gather_atoms(c, seen)
        return
    key = _atom_key(phi)
    if key not in seen:
        seen[key] = len(seen)


def _atom_mask(i: int, k: int) -> int:
    """Bit r is set iff atom i is true in row r (rows 0 .. 2^k - 1)."""
    width = 1 << (i + 1)
    m = ((1 << (1 << i)) - 1) << (1 << i)
    total = 1 << k
    while width < total:
        m |= m << width
        width <<= 1
    return m


def is_tautology(phi) -> bool:
    atoms: dict = {}
    _gather_atoms(phi, atoms)
    k = len(atoms)
    if k > TAUT_ATOM_LIMIT:
        raise StepError(f"TAUT: {k} distinct atoms exceed the limit of {TAUT_ATOM_LIMIT}")
    full = (1 << (1 << k)) - 1
    table = {key: _atom_mask(i, k) for key, i in atoms.items()}
    return _eval_mask(phi, table, k, full) == full


def tautologically_implies(premises, concl) -> bool:
    phi = concl
    for p in reversed(list(premises)):
        phi = Implies(p, phi)
    return is_tautology(phi)


# ------------------------------------------------------ logical schemata

def _diff_positions(p, q, s, t, bound=frozenset()) -> bool:
    """Is ``q`` obtained from ``p`` by replacing some free occurrences of s by t?"""
    if p == q and not _is_node(p):
        return True
    if p == s and q == t:
        return not (free_variables(s) | free_variables(t)) & bound
    if type(p) is not type(q):
        return False
    if not _is_node(p):
        return p == q
    newly = set()
    if isinstance(p, (Forall, Exists)):
        if p.var != q.var:
            return False
        newly.add(p.var)
    if isinstance(p, (ConjOp, MultiQuant)):
        if p.index != q.index:
            return False
        if not _diff_positions(p.index_set, q.index_set, s, t, bound):
            return False
        return _diff_positions(p.body, q.body, s, t, bound | {p.index}) and \
            (not isinstance(p, MultiQuant) or (p.kind, p.family) == (q.kind, q.family))
    for f in fields(p):
        if f.name == "span":
            continue
        a, b = getattr(p, f.name), getattr(q, f.name)
        inner = bound | newly if f.name == "body" else bound
        if isinstance(a, tuple):
            if not isinstance(b, tuple) or len(a) != len(b):
                return False
            if not all(_diff_positions(x, y, s, t, inner) for x, y in zip(a, b)):
                return False
        elif f.name == "var":
            continue
        elif not _diff_positions(a, b, s, t, inner):
            return False
    return True


def _check_eq_refl(phi):
    if isinstance(phi, Eq) and phi.left == phi.right:
        return
    raise StepError("EQ-REFL: expected a formula t = t")


def _check_eq_subst(phi):
    if not (isinstance(phi, Implies) and isinstance(phi.left, Eq) and isinstance(phi.right, Implies)):
        raise StepError("EQ-SUBST: expected s = t -> (phi -> psi)")
    s, t = phi.left.left, phi.left.right
    a, b = phi.right.left, phi.right.right
    if not _diff_positions(a, b, s, t):
        raise StepError("EQ-SUBST: psi is not phi with free occurrences of s replaced by t")


def _check_univ_e0(phi):
    if not (isinstance(phi, Implies) and isinstance(phi.left, Forall)):
        raise StepError("UNIV-E0: expected (all x . phi) -> phi[t]")
    for vs, body in _peel(phi.left, Forall):
        if match_instance(body, vs, phi.right) is not None:
            return
    raise StepError("UNIV-E0: consequent is not an instance of the quantified formula")


def _check_exist_i0(phi):
    if not (isinstance(phi, Implies) and isinstance(phi.right, Exists)):
        raise StepError("EXIST-I0: expected phi[t] -> ex x . phi")
    for vs, body in _peel(phi.right, Exists):
        if match_instance(body, vs, phi.left) is not None:
            return
    raise StepError("EXIST-I0: antecedent is not an instance of the existential body")


def _check_univ_pull(phi):
    # (all x . (A -> B)) -> (A -> all x . B), x not free in A
    try:
        quant, rest = phi.left, phi.right
        x = quant.var
        inner = quant.body
        ok = (isinstance(phi, Implies) and isinstance(quant, Forall) and isinstance(inner, Implies)
              and isinstance(rest, Implies) and isinstance(rest.right, Forall) and rest.right.var == x
              and alpha_equivalent(rest.left, inner.left)
              and alpha_equivalent(rest.right.body, inner.right))
    except AttributeError:
        ok = False
    if not ok:
        raise StepError("UNIV-PULL: expected (all x . (A -> B)) -> (A -> all x . B)")
    if x in free_variables(inner.left):
        raise StepError(f"UNIV-PULL: {x.name} is free in the antecedent")


def _check_exist_e(phi):
    # (all x . (A -> B)) -> ((ex x . A) -> B), x not free in B
    try:
        quant, rest = phi.left, phi.right
        x = quant.var
        inner = quant.body
        ok = (isinstance(phi, Implies) and isinstance(quant, Forall) and isinstance(inner, Implies)
              and isinstance(rest, Implies) and isinstance(rest.left, Exists) and rest.left.var == x
              and alpha_equivalent(rest.left.body, inner.left)
              and alpha_equivalent(rest.right, inner.right))
    except AttributeError:
        ok = False
    if not ok:
        raise StepError("EXIST-E: expected (all x . (A -> B)) -> ((ex x . A) -> B)")
    if x in free_variables(inner.right):
        raise StepError(f"EXIST-E: {x.name} is free in the consequent")


EXP_DEF_TEXT = (
    "all f . all X . all Y . (f in Y^X <-> "
    "(all gamma . (gamma in f -> ex alpha . ex beta . (gamma = (alpha, beta) /\\ alpha in X /\\ beta in Y)))"
    " /\\ (all alpha . (alpha in X -> ex beta . (alpha, beta) in f))"
    " /\\ (all alpha . all beta . all delta . ((alpha, beta) in f /\\ (alpha, delta) in f -> beta = delta)))"
)
PAIR_EQ_TEXT = (
    "all alpha . all beta . all gamma . all delta . "
    "((alpha, beta) = (gamma, delta) <-> alpha = gamma /\\ beta = delta)"
)


def exp_definition():
    """Y^X as the set of graphs of functions from X into Y."""
    return parse_formula(EXP_DEF_TEXT, None)


def pair_equality():
    return parse_formula(PAIR_EQ_TEXT, None)


def _fixed(maker, name):
    def check(phi):
        if not alpha_equivalent(phi, maker()):
            raise StepError(f"{name}: formula differs from the definition")
    return check


LOGICAL_SCHEMATA = {
    "EQ-REFL": _check_eq_refl,
    "EQ-SUBST": _check_eq_subst,
    "UNIV-E0": _check_univ_e0,
    "EXIST-I0": _check_exist_i0,
    "UNIV-PULL": _check_univ_pull,
    "EXIST-E": _check_exist_e,
    "EXP-DEF": _fixed(exp_definition, "EXP-DEF"),
    "PAIR-EQ": _fixed(pair_equality, "PAIR-EQ"),
}


# --------------------------------------------------------- schema args

def _parse_holes(text):
    holes = []
    for name in _split_top(text):
        if ":" in name:
            n, sort = (x.strip() for x in name.split(":", 1))
            holes.append(Var(n, Sort(sort)))
        else:
            holes.append(Var(name.strip(), Sort.THING))
    return holes


def instantiate_cited_schema(theory: th.Theory, name: str, args: str):
    """Generate the instance a ``schema NAME(args)`` citation denotes."""
    schema = theory.schema(name)
    kinds = schema.parameters
    if kinds == ():
        if args.strip():
            raise StepError(f"schema {name} takes no arguments")
        return schema.instantiate()
    if kinds == ("m", "n"):
        parts = _split_top(args)
        if len(parts) != 2:
            raise StepError(f"schema {name} takes two dimensions")
        try:
            m, n = int(parts[0]), int(parts[1])
        except ValueError:
            raise StepError(f"schema {name}: dimensions must be integers") from None
        return schema.instantiate(m, n)
    # formula with holes: "holes | formula" or just "formula"
    holes_text, bar, ftext = args.partition("|")
    if not bar:
        ftext, holes_text = holes_text, ""
    try:
        phi = parse_formula(ftext.strip(), None)
    except ParseError as e:
        raise StepError(f"schema {name}: cannot parse formula argument: {e}") from None
    if holes_text.strip():
        holes = _parse_holes(holes_text)
        if name == "SEP":
            if len(holes) != 1:
                raise StepError("schema SEP takes exactly one hole")
            return schema.instantiate(phi, holes[0])
        return schema.instantiate(phi, holes)
    return schema.instantiate(phi)


# ------------------------------------------------------------ checking

def _enumeration(phi, S):
    """Elements listed by ``all g . (g in S <-> g = e1 \\/ ... \\/ g = ek)``, else None."""
    if not isinstance(phi, Forall) or not isinstance(phi.body, Iff):
        return None
    g = phi.var
    left, right = phi.body.left, phi.body.right
    if not (isinstance(left, Mem) and left.left == g and left.right == S):
        return None
    elems = []
    stack = [right]
    while stack:
        d = stack.pop(0)
        if isinstance(d, Or):
            stack[:0] = [d.left, d.right]
        elif isinstance(d, Eq) and d.left == g and g not in free_variables(d.right):
            elems.append(d.right)
        else:
            return None
    return elems


def _const_ids(phi) -> set:
    ids = set()
    for _, node in walk(phi):
        if isinstance(node, Const):
            ids.add(("c", node.name))
        elif isinstance(node, Fun) and node.const:
            ids.add(("f", node.name, node.domain))
    return ids


def _family_names(phi) -> set:
    out = set()
    for _, node in walk(phi):
        if isinstance(node, Fun):
            out.add(node.name)
        elif isinstance(node, MultiQuant):
            out.add(node.family)
    return out


def _is_fresh(c, used: set) -> bool:
    if isinstance(c, Const):
        return ("c", c.name) not in used and not any(u[0] == "f" and u[1] == c.name for u in used)
    if isinstance(c, Fun) and c.const:
        for u in used:
            if u[0] == "c" and u[1] == c.name:
                return False
            if u[0] == "f" and u[1] == c.name:
                if u[2] == c.domain or free_variables(u[2]):
                    return False
        return True
    return False


class _Checker:
    def __init__(self, theory: th.Theory):
        self.theory = theory
        self.formulas: dict = {}
        self.rulec_deps: dict = {}  # step -> {rule-C step}
        self.rulec_free: dict = {}  # rule-C step -> free variables of its premise
        self.used: set = set()
        self.used_families: set = set()
        self.fresh: dict = {}

    # -- entry
    def check(self, step: Step) -> Optional[str]:
        try:
            self._dispatch(step)
            return None
        except StepError as e:
            return str(e)
        finally:
            self.formulas[step.index] = step.formula
            self.used |= _const_ids(step.formula)
            self.used_families |= _family_names(step.formula)

    def _dispatch(self, step: Step):
        j = step.justification
        self.rulec_deps[step.index] = set()
        if j.kind == "axiom":
            return self._axiom(step, j)
        if j.kind == "schema":
            return self._schema(step, j)
        try:
            rule = rule_id(j.ref)
        except ValueError:
            raise StepError(f"unknown rule {j.ref}") from None
        prem = []
        for i in j.premises:
            if i not in self.formulas:
                raise StepError(f"unknown premise {i}")
            if i >= step.index:
                raise StepError(f"premise {i} does not precede step {step.index}")
            prem.append(self.formulas[i])
            self.rulec_deps[step.index] |= self.rulec_deps.get(i, set())
        handler = getattr(self, "_r_" + rule.name)
        handler(step, prem)

    # -- axioms and schemata
    def _axiom(self, step, j):
        try:
            aid = th.AxiomId.parse(j.ref)
            cited = th.axiom(aid)
        except th.TheoryError as e:
            raise StepError(str(e)) from None
        if not any(alpha_equivalent(cited, phi) for _, phi in self.theory.axioms):
            raise StepError(f"{j.ref} is not an axiom of {self.theory.id}")
        if not alpha_equivalent(cited, step.formula):
            raise StepError(f"formula differs from axiom {j.ref}")

    def _schema(self, step, j):
        name = j.ref.upper()
        if name in LOGICAL_SCHEMATA:
            if j.args.strip():
                raise StepError(f"{name} is checked by shape and takes no arguments")
            LOGICAL_SCHEMATA[name](step.formula)
            return
        if not self.theory.has_schema(name):
            raise StepError(f"schema {name} is not available in {self.theory.id}")
        try:
            inst = instantiate_cited_schema(self.theory, name, j.args)
        except (th.SchemaError, th.TheoryError) as e:
            raise StepError(f"schema {name}: {e}") from None
        if not alpha_equivalent(inst, step.formula):
            raise StepError(f"formula is not the instance {name}({j.args})")

    # -- helpers
    def _arity(self, prem, n, rule):
        if len(prem) != n:
            raise StepError(f"{rule} takes {n} premise{'s' if n != 1 else ''}, got {len(prem)}")

    def _standard_only(self, rule, *phis):
        if any(contains_nonstandard(p) for p in phis):
            raise StepError(f"{rule} applies to standard formulas only; use I5/I6 for nonstandard ones")

    def _nonstandard_only(self, rule, *phis):
        if not any(contains_nonstandard(p) for p in phis):
            raise StepError(f"{rule} applies to nonstandard formulas only")

    # -- propositional
    def _r_MP(self, step, prem):
        self._arity(prem, 2, "MP")
        a, b = prem
        for x, y in ((a, b), (b, a)):
            if isinstance(y, Implies) and alpha_equivalent(y.left, x) and alpha_equivalent(y.right, step.formula):
                return
        raise StepError("MP: premises are not phi and phi -> (this formula)")

    def _r_AND_I(self, step, prem):
        self._arity(prem, 2, "AND-I")
        phi = step.formula
        if not isinstance(phi, And):
            raise StepError("AND-I: conclusion is not a conjunction")
        a, b = prem
        if (alpha_equivalent(phi.left, a) and alpha_equivalent(phi.right, b)) or \
                (alpha_equivalent(phi.left, b) and alpha_equivalent(phi.right, a)):
            return
        raise StepError("AND-I: conjuncts do not match the premises")

    def _r_AND_E(self, step, prem):
        self._arity(prem, 1, "AND-E")
        p = prem[0]
        if isinstance(p, And) and (alpha_equivalent(p.left, step.formula) or alpha_equivalent(p.right, step.formula)):
            return
        raise StepError("AND-E: formula is not a conjunct of the premise")

    def _r_OR_I(self, step, prem):
        self._arity(prem, 1, "OR-I")
        phi = step.formula
        if isinstance(phi, Or) and (alpha_equivalent(phi.left, prem[0]) or alpha_equivalent(phi.right, prem[0])):
            return
        raise StepError("OR-I: premise is not a disjunct of the formula")

    def _r_NOT_E(self, step, prem):
        if len(prem) == 1:
            p = prem[0]
            if isinstance(p, Not) and isinstance(p.body, Not) and alpha_equivalent(p.body.body, step.formula):
                return
            raise StepError("NOT-E: premise is not the double negation of the formula")
        if len(prem) == 2:
            a, b = prem
            if alpha_equivalent(Not(a), b) or alpha_equivalent(Not(b), a):
                return
            raise StepError("NOT-E: premises are not phi and ~phi")
        raise StepError("NOT-E takes one or two premises")

    def _r_TAUT(self, step, prem):
        if not tautologically_implies(prem, step.formula):
            raise StepError("TAUT: not a propositional consequence of the premises")

    # -- quantifiers
    def _univ_i(self, step, prem, rule):
        self._arity(prem, 1, rule)
        for vs, body in _peel(step.formula, Forall):
            if alpha_equivalent(body, prem[0]):
                for v in vs:
                    for c in self.rulec_deps[step.index]:
                        if v in self.rulec_free[c]:
                            raise StepError(f"{rule}: {_vname(v)} is free in the existential behind Rule-C step {c}")
                return
        raise StepError(f"{rule}: premise is not the body of the generalization")

    def _univ_e(self, step, prem, rule):
        self._arity(prem, 1, rule)
        for vs, body in _peel(prem[0], Forall):
            if match_instance(body, vs, step.formula) is not None:
                return
        if not isinstance(prem[0], Forall):
            raise StepError(f"{rule}: premise is not universally quantified")
        raise StepError(f"{rule}: formula is not an instance of the premise (check sorts and capture)")

    def _exist_i(self, step, prem, rule):
        self._arity(prem, 1, rule)
        if not isinstance(step.formula, Exists):
            raise StepError(f"{rule}: conclusion is not existential")
        for vs, body in _peel(step.formula, Exists):
            if match_instance(body, vs, prem[0]) is not None:
                return
        raise StepError(f"{rule}: premise is not an instance of the existential body")

    def _rule_c(self, step, prem, rule):
        self._arity(prem, 1, rule)
        p = prem[0]
        if not isinstance(p, Exists):
            raise StepError(f"{rule}: premise is not existential")
        for vs, body in _peel(p, Exists):
            out = match_instance(body, vs, step.formula)
            if out is None:
                continue
            wit = []
            for v in vs:
                c = out.get(v)
                if c is None:
                    continue
                if isinstance(v, Var):
                    if not isinstance(c, Const) or c.sort != v.sort:
                        raise StepError(f"{rule}: witness for {v.name} must be a new {v.sort.value} constant")
                elif not (isinstance(c, Fun) and c.const and c.domain == v.domain):
                    raise StepError(f"{rule}: witness for {_vname(v)} must be a new function constant on the same domain")
                if not _is_fresh(c, self.used) or c in wit:
                    raise StepError(f"{rule}: constant {_vname(c)} is not fresh")
                wit.append(c)
            self.fresh[step.index] = tuple(_vname(c) for c in wit)
            self.rulec_deps[step.index] = self.rulec_deps[step.index] | {step.index}
            self.rulec_free[step.index] = free_variables(p)
            return
        raise StepError(f"{rule}: formula is not the existential body with constants for its variables")

    def _r_UNIV_I(self, step, prem):
        self._standard_only("UNIV-I", step.formula, *prem)
        self._univ_i(step, prem, "UNIV-I")

    def _r_UNIV_E(self, step, prem):
        self._standard_only("UNIV-E", step.formula, *prem)
        self._univ_e(step, prem, "UNIV-E")

    def _r_EXIST_I(self, step, prem):
        self._standard_only("EXIST-I", step.formula, *prem)
        self._exist_i(step, prem, "EXIST-I")

    def _r_RULE_C(self, step, prem):
        self._standard_only("RULE-C", step.formula, *prem)
        self._rule_c(step, prem, "RULE-C")

    def _r_I5(self, step, prem):
        self._nonstandard_only("I5", step.formula)
        if isinstance(step.formula, Forall):
            return self._univ_i(step, prem, "I5")
        if isinstance(step.formula, Exists):
            return self._exist_i(step, prem, "I5")
        raise StepError("I5: conclusion must start with a quantifier")

    def _r_I6(self, step, prem):
        self._arity(prem, 1, "I6")
        self._nonstandard_only("I6", prem[0])
        if isinstance(prem[0], Forall):
            return self._univ_e(step, prem, "I6")
        if isinstance(prem[0], Exists):
            return self._rule_c(step, prem, "I6")
        raise StepError("I6: premise must start with a quantifier")

    # -- conjunctive operator
    def _elements(self, S, prem, rule):
        """Explicit elements of S plus the premises used to certify them."""
        if isinstance(S, SetLit):
            return list(S.elems), []
        for k, p in enumerate(prem):
            elems = _enumeration(p, S)
            if elems is not None:
                return elems, [k]
        raise StepError(f"{rule}: index set is not explicitly enumerated (cite a set literal or an enumeration step)")

    def _r_I1(self, step, prem):
        phi = step.formula
        if not isinstance(phi, ConjOp):
            raise StepError("I1: conclusion is not a conjunctive operator")
        if not isinstance(phi.body, Maps):
            raise StepError("I1: the conjunct must be a mapping atom")
        elems, used = self._elements(phi.index_set, prem, "I1")
        atoms = [p for k, p in enumerate(prem) if k not in used]
        wanted = [substitute(phi.body, phi.index, e) for e in elems]
        for k, a in enumerate(atoms):
            if not isinstance(a, Maps):
                raise StepError(f"I1: premise {pretty_print(a)} is not a mapping atom")
            if not any(alpha_equivalent(a, w) for w in wanted):
                raise StepError(f"I1: premise {pretty_print(a)} is not an instance of the conjunct")
        for w in wanted:
            if not any(alpha_equivalent(a, w) for a in atoms):
                raise StepError(f"I1: incomplete family, missing {pretty_print(w)}")

    def _r_I2(self, step, prem):
        conj = [p for p in prem if isinstance(p, ConjOp)]
        if len(conj) != 1:
            raise StepError("I2: cite exactly one conjunctive-operator premise")
        c = conj[0]
        rest = [p for p in prem if p is not c]
        out = match_instance(c.body, [c.index], step.formula)
        if out is None:
            raise StepError("I2: formula is not an instance of the conjunct")
        a = out.get(c.index)
        if a is None:
            raise StepError("I2: conjunct does not mention the index")
        S = c.index_set
        if isinstance(S, SetLit) and a in S.elems:
            return
        for p in rest:
            if alpha_equivalent(p, Mem(a, S)):
                return
            elems = _enumeration(p, S)
            if elems is not None and a in elems:
                return
        raise StepError(f"I2: {pretty_print(Mem(a, S))} is not certified")

    # -- multiple quantifier
    def _r_I3(self, step, prem):
        self._arity(prem, 1, "I3")
        phi = step.formula
        if not isinstance(phi, MultiQuant):
            raise StepError("I3: conclusion is not a multiple quantifier")
        if not isinstance(phi.index_set, (SetLit, Const)):
            raise StepError("I3: index set must be a set literal or a constant")
        p = prem[0]
        if phi.kind == "all":
            if not alpha_equivalent(phi.body, p):
                raise StepError("I3: premise is not the body of the multiple quantifier")
            for _, node in walk(p):
                if isinstance(node, Fun) and node.name == phi.family and node.const:
                    raise StepError("I3: cannot generalize a constant family")
            for c in self.rulec_deps[step.index]:
                if any(isinstance(v, Fun) and v.name == phi.family for v in self.rulec_free[c]):
                    raise StepError(f"I3: family {phi.family} is free in the existential behind Rule-C step {c}")
            return
        for g in sorted(_family_names(p)):
            if alpha_equivalent(rename_family(phi.body, phi.family, g), p):
                return
        raise StepError("I3: premise is not the body with some family in place of the bound one")

    def _r_I4(self, step, prem):
        self._arity(prem, 1, "I4")
        p = prem[0]
        if not isinstance(p, MultiQuant):
            raise StepError("I4: premise is not a multiple quantifier")
        for g in sorted(_family_names(step.formula) | {p.family}):
            if alpha_equivalent(rename_family(p.body, p.family, g), step.formula):
                if p.kind == "ex" and g in self.used_families:
                    raise StepError(f"I4: family name {g} is not fresh")
                return
        raise StepError("I4: formula is not the body with a family in place of the bound one")


def _vname(v) -> str:
    if isinstance(v, Fun):
        return f"{'$' if v.const else ''}{v.name}_{{...}}"
    if isinstance(v, Const):
        return "$" + v.name
    return v.name


def resolve_theory(tid) -> th.Theory:
    return tid if isinstance(tid, th.Theory) else th.load_theory(tid)


def check_step(context: dict, step: Step, theory) -> Optional[str]:
    """Check one step against prior formulas ``{index: Formula}``."""
    ck = _Checker(resolve_theory(theory))
    for i in sorted(context):
        ck.formulas[i] = context[i]
        ck.used |= _const_ids(context[i])
        ck.used_families |= _family_names(context[i])
        ck.rulec_deps[i] = set()
    return ck.check(step)


def check_proof(p: ProofScript, theory=None) -> Verdict:
    ck = _Checker(resolve_theory(theory or p.theory))
    per = [(s.index, ck.check(s)) for s in p.steps]
    goal_diag = None
    if not p.steps:
        goal_diag = "empty script"
    elif p.goal is not None and not alpha_equivalent(p.steps[-1].formula, p.goal):
        goal_diag = "last step does not match the goal"
    ok = all(d is None for _, d in per) and goal_diag is None
    return Verdict(ok, per, goal_diag, dict(ck.fresh))


# -------------------------------------------------- depth-1 closure

def _subformulas(phis) -> dict:
    out = {}
    for phi in phis:
        for _, node in walk(phi):
            if isinstance(node, FORMULA_TYPES):
                out.setdefault(canonical(node), node)
    return out


def _closed_terms(phi):
    return not free_variables(phi)


class WitnessNamer:
    """Deterministic fresh constants for Rule-C in the closure, one per formula."""

    def __init__(self, prefix="c"):
        self.prefix = prefix
        self.memo: dict = {}
        self.count = 0

    def witness(self, phi, var):
        key = (canonical(phi), var)
        if key not in self.memo:
            self.count += 1
            name = f"{self.prefix}{self.count}"
            if isinstance(var, Var):
                self.memo[key] = Const(name, var.sort)
            else:
                self.memo[key] = Fun(name, var.domain, True)
        return self.memo[key]


def _anti_unify_body(F, index, by_elem: dict):
    """Candidate conjuncts ``F : index |-> T`` covering every element's image."""
    images = {e: [a.val for a in atoms] for e, atoms in by_elem.items()}
    cands = []
    for e0, ts in images.items():
        for t in ts:
            cands.append(Maps(F, index, t))
            abstracted = _replace_term(t, e0, index)
            if abstracted != t:
                cands.append(Maps(F, index, abstracted))
        break
    out = []
    for body in cands:
        ok = True
        for e, ts in images.items():
            inst = substitute(body, index, e)
            if not any(Maps(F, e, t) == inst for t in ts):
                ok = False
                break
        if ok and body not in out:
            out.append(body)
    return out


def _replace_term(t, old, new):
    if t == old:
        return new
    if not _is_node(t) or not is_dataclass(t):
        return t
    changes = {}
    for f in fields(t):
        if f.name == "span":
            continue
        v = getattr(t, f.name)
        if _is_node(v):
            changes[f.name] = _replace_term(v, old, new)
        elif isinstance(v, tuple):
            changes[f.name] = tuple(_replace_term(x, old, new) if _is_node(x) else x for x in v)
    from dataclasses import replace as _dc_replace
    return _dc_replace(t, **changes)


def depth1_steps(premises, rules=ALL_RULES, pool=(), targets=None, namer=None):
    """``(formula, rule, premises)`` for every single rule application.

    Introduction rules (AND-I, OR-I, UNIV-I, EXIST-I) only produce formulas
    that occur among ``targets`` (by default: subformulas of the premises),
    since their unrestricted closure is infinite.  UNIV-E instantiates with
    ``pool`` terms only.  TAUT and I3-I6 are not enumerated.
    """
    rules = {rule_id(r) for r in rules}
    namer = namer or WitnessNamer()
    have = {}
    for p in premises:
        have.setdefault(canonical(p), p)
    prem_list = list(have.values())
    if targets is None:
        tmap = _subformulas(prem_list)
    else:
        tmap = {canonical(t): t for t in targets}
    targets_list = list(tmap.values())

    if RuleId.MP in rules:
        for p in prem_list:
            if isinstance(p, Implies) and canonical(p.left) in have:
                yield p.right, RuleId.MP, (have[canonical(p.left)], p)
    if RuleId.AND_E in rules:
        for p in prem_list:
            if isinstance(p, And):
                yield p.left, RuleId.AND_E, (p,)
                yield p.right, RuleId.AND_E, (p,)
    if RuleId.NOT_E in rules:
        for p in prem_list:
            if isinstance(p, Not) and isinstance(p.body, Not):
                yield p.body.body, RuleId.NOT_E, (p,)
    if RuleId.AND_I in rules:
        for t in targets_list:
            if isinstance(t, And) and canonical(t.left) in have and canonical(t.right) in have:
                yield t, RuleId.AND_I, (have[canonical(t.left)], have[canonical(t.right)])
    if RuleId.OR_I in rules:
        for t in targets_list:
            if isinstance(t, Or):
                for side in (t.left, t.right):
                    if canonical(side) in have:
                        yield t, RuleId.OR_I, (have[canonical(side)],)
                        break
    if RuleId.UNIV_I in rules:
        for t in targets_list:
            if isinstance(t, Forall) and canonical(t.body) in have and not contains_nonstandard(t):
                yield t, RuleId.UNIV_I, (have[canonical(t.body)],)
    if RuleId.EXIST_I in rules:
        for t in targets_list:
            if isinstance(t, Exists) and not contains_nonstandard(t):
                for term in pool:
                    try:
                        inst = substitute(t.body, t.var, term)
                    except SortMismatch:
                        continue
                    if canonical(inst) in have:
                        yield t, RuleId.EXIST_I, (have[canonical(inst)],)
                        break
    if RuleId.UNIV_E in rules:
        for p in prem_list:
            if isinstance(p, Forall) and not contains_nonstandard(p):
                for term in pool:
                    if isinstance(p.var, Fun):
                        if not (isinstance(term, Fun) and term.domain == p.var.domain):
                            continue
                    elif not sort_fits(term_sort(term), p.var.sort):
                        continue
                    try:
                        yield substitute(p.body, p.var, term), RuleId.UNIV_E, (p,)
                    except SortMismatch:
                        continue
    if RuleId.RULE_C in rules:
        for p in prem_list:
            if isinstance(p, Exists) and not contains_nonstandard(p):
                c = namer.witness(p, p.var)
                yield substitute(p.body, p.var, c), RuleId.RULE_C, (p,)
    if RuleId.I1 in rules:
        for phi, used in _i1_conclusions(prem_list, pool):
            yield phi, RuleId.I1, used
    if RuleId.I2 in rules:
        for phi, used in _i2_conclusions(prem_list, have, pool):
            yield phi, RuleId.I2, used


def derivable_depth1(premises, rules=ALL_RULES, pool=(), targets=None, namer=None) -> list:
    """Formulas obtainable from ``premises`` by exactly one rule application."""
    out: dict = {}
    for phi, _, _ in depth1_steps(premises, rules, pool, targets, namer):
        out.setdefault(canonical(phi), phi)
    return sorted(out.values(), key=pretty_print)


def _index_var(avoid):
    from .syntax import fresh_name, names_in
    names = set()
    for a in avoid:
        names |= names_in(a)
    return Var(fresh_name("xi", names), Sort.THING)


def _i1_conclusions(prems, pool):
    maps = [p for p in prems if isinstance(p, Maps)]
    by_fun: dict = {}
    for m in maps:
        by_fun.setdefault(m.fun, []).append(m)
    enums = []
    for p in prems:
        if isinstance(p, Forall) and isinstance(p.body, Iff) and isinstance(p.body.left, Mem):
            S = p.body.left.right
            elems = _enumeration(p, S)
            if elems:
                enums.append((S, elems))
    for F, atoms in sorted(by_fun.items(), key=lambda kv: pretty_print(Maps(kv[0], kv[0], kv[0]))):
        sets = []
        dom = getattr(F, "domain", None)
        if isinstance(dom, SetLit) and dom.elems:
            sets.append((dom, list(dom.elems)))
        for S, elems in enums:
            if dom == S:
                sets.append((S, elems))
        for S, elems in sets:
            by_elem = {e: [a for a in atoms if a.arg == e] for e in elems}
            if not all(by_elem.values()):
                continue
            xi = _index_var(atoms + [S])
            used = tuple(a for e in elems for a in by_elem[e])
            for body in _anti_unify_body(F, xi, by_elem):
                yield ConjOp(xi, S, body), used


def _i2_conclusions(prems, have, pool):
    for p in prems:
        if not isinstance(p, ConjOp):
            continue
        S = p.index_set
        elems = [(e, (p,)) for e in S.elems] if isinstance(S, SetLit) else []
        for q in prems:
            found = _enumeration(q, S)
            if found:
                elems.extend((e, (p, q)) for e in found)
        for t in pool:
            if canonical(Mem(t, S)) in have:
                elems.append((t, (p, have[canonical(Mem(t, S))])))
        seen = []
        for e, used in elems:
            if e in seen:
                continue
            seen.append(e)
            yield substitute(p.body, p.index, e), used
