"""Interpretation of the standard function language into the 1x2 matrix language.

A function composite ``f_X`` becomes the matrix term ``[f X]``, whose graph
entry ``f`` is an ordinary set variable.  Function quantifiers keep their
quantifier and gain a guard stating that the matrix exists:

    all f_{X} . phi   ~>   all f . ((ex a . a = [f X]) -> tau(phi))
    ex f_{X} . phi    ~>   ex f . ((ex a . a = [f X]) /\\ tau(phi))

Everything else is mapped clause by clause.  Every input node is logged once
with the clause that handled it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    And, ConjOp, Const, EmptySet, Eq, Exists, Exponent, Forall, Fun, Iff, ImageApp, Implies,
    Inactive, LanguageId, Maps, Matrix, Mem, MultiQuant, Not, Omega, Or, Pair, Pred, SetLit,
    Sort, Succ, Surj, Var, children, fresh_name, free_variables, names_in, well_formed,
)

SOURCE_LANGUAGES = (LanguageId.LT_STANDARD, LanguageId.LT)
TARGET_LANGUAGE = LanguageId.LSMT_1X2_PLUS4


class TranslationError(ValueError):
    def __init__(self, message, path=()):
        super().__init__(message if not path else f"{message} (at node {'.'.join(map(str, path)) or 'root'})")
        self.path = tuple(path)


@dataclass(frozen=True)
class TranslationTrace:
    input: object
    output: object
    clause_log: tuple = field(default_factory=tuple)

    def audit_lines(self) -> list:
        return [f"{'.'.join(map(str, p)) or 'root'}\t{c}" for p, c in self.clause_log]


_CONNECTIVES = {Not: "connective-not", And: "connective-and", Or: "connective-or",
                Implies: "connective-implies", Iff: "connective-iff"}
_ATOMS = {Eq: "atom-eq", Mem: "atom-mem", Surj: "atom-surj", Maps: "atom-maps", Pred: "atom-pred"}
_TERMS = {Succ: "term-succ", Pair: "term-pair", SetLit: "term-set-literal", Exponent: "term-exponent"}


class _Translator:
    def __init__(self, phi):
        self.log = []
        # graph names must not collide with any ordinary variable of the input
        self.taken = {n.name for _, n in _walk_vars(phi)}
        self.guard_avoid = set(names_in(phi))

    def note(self, path, clause):
        self.log.append((path, clause))

    # scope: tuple of (binder Fun, graph Var) pairs plus bound set-side Vars
    def run(self, node, path, scope):
        match node:
            case EmptySet():
                self.note(path, "constant-empty")
                return node
            case Omega():
                self.note(path, "constant-omega")
                return node
            case Inactive():
                self.note(path, "constant-inactive")
                return Matrix(1, 2, (EmptySet(), EmptySet()))
            case Var():
                self.note(path, "variable")
                return node
            case Const():
                self.note(path, "constant")
                return node
            case Fun():
                return self.composite(node, path, scope)
            case ImageApp():
                raise TranslationError("image application f_X(t) has no translation clause", path)
            case Matrix():
                raise TranslationError("matrix terms belong to the target language already", path)
            case MultiQuant() | ConjOp():
                raise TranslationError(f"nonstandard construct {type(node).__name__} cannot be translated", path)
            case Forall(var=v, body=b) | Exists(var=v, body=b):
                if isinstance(v, Fun):
                    return self.function_quantifier(node, path, scope)
                self.note(path, "quantifier-" + ("all" if isinstance(node, Forall) else "ex"))
                self.note(path + (0,), "binder-variable")
                return type(node)(v, self.run(b, path + (1,), scope + ((v, None),)))
        cls = type(node)
        clause = _CONNECTIVES.get(cls) or _ATOMS.get(cls) or _TERMS.get(cls)
        if clause is None:
            raise TranslationError(f"no translation clause for {cls.__name__}", path)
        self.note(path, clause)
        kids = [self.run(c, path + (i,), scope) for i, c in enumerate(children(node))]
        return _rebuild(node, kids)

    def composite(self, node, path, scope):
        self.note(path, "composite-to-matrix")
        self._check_domain(node, path, scope)
        dom = self.run(node.domain, path + (0,), scope)
        if node.const:
            return Matrix(1, 2, (Const(node.name, Sort.SET), dom))
        for entry, graph in reversed(scope):
            if isinstance(entry, Fun) and entry == node:
                return Matrix(1, 2, (graph, dom))
        # free composite over a bound or constant domain
        return Matrix(1, 2, (Var(node.name, Sort.SET), dom))

    def _check_domain(self, fun, path, scope):
        bound = {v for v, g in scope if isinstance(v, Var)}
        loose = [v for v in free_variables(fun.domain) if isinstance(v, Var) and v not in bound]
        if loose:
            names = ", ".join(sorted(v.name for v in loose))
            raise TranslationError(
                f"composite {fun.name} has domain variable(s) {names} not bound by an enclosing quantifier", path)

    def function_quantifier(self, node, path, scope):
        v = node.var
        universal = isinstance(node, Forall)
        self.note(path, "function-quantifier-" + ("all" if universal else "ex"))
        self.note(path + (0,), "graph-variable")
        self._check_domain(v, path + (0,), scope)
        in_scope = {g.name for _, g in scope if g is not None}
        name = v.name if v.name not in self.taken and v.name not in in_scope else fresh_name(
            v.name, self.taken | in_scope | self.guard_avoid)
        graph = Var(name, Sort.SET)
        self.guard_avoid.add(name)
        dom = self.run(v.domain, path + (0, 0), scope)
        guard_var = Var(fresh_name("alpha", self.guard_avoid | self.taken), Sort.THING)
        guard = Exists(guard_var, Eq(guard_var, Matrix(1, 2, (graph, dom))))
        body = self.run(node.body, path + (1,), scope + ((v, graph),))
        if universal:
            return Forall(graph, Implies(guard, body))
        return Exists(graph, And(guard, body))


def _walk_vars(phi):
    from .syntax import walk
    for p, n in walk(phi):
        if isinstance(n, Var):
            yield p, n


def _rebuild(node, kids):
    match node:
        case Not():
            return Not(kids[0])
        case And() | Or() | Implies() | Iff() | Eq() | Mem() | Pair():
            return type(node)(kids[0], kids[1])
        case Surj():
            return Surj(*kids)
        case Maps():
            return Maps(*kids)
        case Pred():
            return Pred(node.name, tuple(kids))
        case Succ():
            return Succ(kids[0])
        case SetLit():
            return SetLit(tuple(kids))
        case Exponent():
            return Exponent(kids[0], kids[1])
    raise TypeError(node)


def translate(phi, lang=LanguageId.LT_STANDARD) -> TranslationTrace:
    """Apply the interpretation to a standard formula, logging each clause."""
    lang = LanguageId(lang)
    if lang not in SOURCE_LANGUAGES:
        raise TranslationError(f"translation is defined on the function languages only, not {lang.value}")
    diags = well_formed(phi, LanguageId.LT_STANDARD)
    if diags:
        raise TranslationError("input is not a standard formula: " + diags[0].message, diags[0].path)
    t = _Translator(phi)
    out = t.run(phi, (), ())
    return TranslationTrace(phi, out, tuple(t.log))


def translate_theory(axioms, gamma=()) -> list:
    """Translate ``(id, formula)`` pairs; Gamma instances are appended unchanged in order."""
    return [(aid, translate(phi).output) for aid, phi in list(axioms) + list(gamma)]
