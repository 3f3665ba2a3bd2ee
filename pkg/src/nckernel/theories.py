"""Axiom catalogs and schema instantiators.

Closed axioms live in plain-text ``.thy`` files under ``data/theories``.
Schemata are generators: nothing infinite is ever materialized, callers ask
for the instances they need.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable, Sequence

from .parser import parse_formula, unique_exists
from .syntax import (
    And, ConjOp, Eq, Exists, Exponent, Forall, Fun, Iff, Implies,
    LanguageId, Maps, Matrix, Mem, MultiQuant, Not, Pair, SetLit, Sort, Surj, Var,
    conjunction, family_member, free_variables, fresh_name, is_well_formed,
    names_in, substitute_many, well_formed, ImageApp,
)

THEORY_IDS = ("T", "T-inf-0", "SMT", "SMT-1x2", "SMT-1x2-plus4")


class TheoryError(ValueError):
    pass


class SchemaError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class AxiomId:
    theory: str
    name: str

    def __str__(self):
        return f"{self.theory}.{self.name}"

    @classmethod
    def parse(cls, text: str) -> "AxiomId":
        # theory ids contain dashes and dots never, names may contain dashes
        theory, sep, name = text.partition(".")
        if not sep or not name:
            raise TheoryError(f"malformed axiom id {text!r}")
        return cls(theory, name)


@dataclass(frozen=True)
class AxiomSchema:
    """A named generator. ``parameters`` lists kinds: 'formula', 'm', 'n'."""
    id: AxiomId
    parameters: tuple
    generator: Callable = field(compare=False)

    def instantiate(self, *args, **kwargs):
        return self.generator(*args, **kwargs)


@dataclass(frozen=True)
class Theory:
    id: str
    language: LanguageId
    axioms: tuple  # of (AxiomId, Formula)
    schemata: tuple  # of AxiomSchema

    def axiom(self, name: str):
        for aid, phi in self.axioms:
            if aid.name == name:
                return phi
        raise TheoryError(f"theory {self.id} has no axiom {name}")

    def axiom_names(self) -> list:
        return [aid.name for aid, _ in self.axioms]

    def schema(self, name: str) -> AxiomSchema:
        for s in self.schemata:
            if s.id.name == name:
                return s
        raise TheoryError(f"theory {self.id} has no schema {name}")

    def has_schema(self, name: str) -> bool:
        return any(s.id.name == name for s in self.schemata)


# ------------------------------------------------------------ generators

ALPHA = Var("alpha", Sort.THING)
BETA = Var("beta", Sort.THING)


def _close(phi, keep=()):
    """Universally close over free plain variables (sorted by name)."""
    free = [v for v in free_variables(phi) if isinstance(v, Var) and v not in keep]
    leftover = [v for v in free_variables(phi) if not isinstance(v, Var)]
    if leftover:
        raise SchemaError("schema formula has free function composites: "
                          + ", ".join(sorted(f"{f.name}_" for f in leftover)))
    for v in sorted(free, key=lambda v: (v.name, v.sort.value), reverse=True):
        phi = Forall(v, phi)
    return phi


def _check_hole(hole: Var):
    if not isinstance(hole, Var):
        raise SchemaError(f"hole must be a variable, got {hole!r}")
    if hole.sort != Sort.THING:
        raise SchemaError(f"hole {hole.name} must be thing-sorted, found {hole.sort.value}")


def _pick(base, sort, avoid):
    return Var(fresh_name(base, avoid), sort)


def instantiate_separation(phi, hole: Var = ALPHA, lang=LanguageId.LT_STANDARD,
                           set_names=("X", "Y")):
    """``all X . ex Y . all a . (a in Y <-> a in X /\\ phi(a))`` closed over parameters.

    ``hole`` names the variable of ``phi`` that is being separated on. The
    SMT flavour uses lower-case set names, which is only cosmetic.
    """
    _check_hole(hole)
    fv = free_variables(phi)
    xs, ys = set_names
    X, Y = Var(xs, Sort.SET), Var(ys, Sort.SET)
    for v in (X, Y):
        if v in fv:
            raise SchemaError(f"variable capture: {v.name} is free in the separation formula")
    body = Iff(Mem(hole, Y), And(Mem(hole, X), phi))
    inst = Forall(X, Exists(Y, Forall(hole, body)))
    inst = _close(inst)
    _require_wf(inst, lang)
    return inst


def instantiate_replacement(psi, holes: Sequence = (ALPHA, BETA), lang=LanguageId.LT_STANDARD,
                            set_names=("X", "Z")):
    """``all X . (all a in X . ex! b . psi(a,b)) -> ex Z . all g . (g in Z <-> ex x . (x in X /\\ psi(x,g)))``."""
    holes = tuple(holes)
    if len(holes) != 2:
        raise SchemaError(f"replacement takes exactly two holes, got {len(holes)}")
    for h in holes:
        _check_hole(h)
    a, b = holes
    if a == b:
        raise SchemaError("the two holes must be distinct")
    fv = free_variables(psi)
    xs, zs = set_names
    X, Z = Var(xs, Sort.SET), Var(zs, Sort.SET)
    for v in (X, Z):
        if v in fv:
            raise SchemaError(f"variable capture: {v.name} is free in the replacement formula")
    avoid = names_in(psi) | {xs, zs, a.name, b.name}
    g = _pick("gamma" if set_names == ("X", "Z") else "zeta", Sort.THING, avoid)
    avoid.add(g.name)
    x = _pick("xi" if set_names == ("X", "Z") else "gamma", Sort.THING, avoid)
    hyp = Forall(a, Implies(Mem(a, X), unique_exists(b, psi)))
    image = substitute_many(psi, [(a, x), (b, g)])
    concl = Exists(Z, Forall(g, Iff(Mem(g, Z), Exists(x, And(Mem(x, X), image)))))
    inst = _close(Forall(X, Implies(hyp, concl)))
    _require_wf(inst, lang)
    return inst


def reverse_graph_axiom():
    """Every graph f in Y^X comes from a function h_X with the same mapping behaviour."""
    f, X, Y = Var("f", Sort.SET), Var("X", Sort.SET), Var("Y", Sort.SET)
    h = Fun("h", X)
    body = Forall(ALPHA, Forall(BETA, Iff(Maps(h, ALPHA, BETA), Mem(Pair(ALPHA, BETA), f))))
    return Forall(f, Forall(X, Forall(Y, Implies(Mem(f, Exponent(Y, X)), Exists(h, body)))))


def _entries(prefix, m, n):
    return [Var(f"{prefix}{i}{j}" if m < 10 and n < 10 else f"{prefix}{i}x{j}", Sort.THING)
            for i in range(1, m + 1) for j in range(1, n + 1)]


def _forall_all(vs, body):
    for v in reversed(vs):
        body = Forall(v, body)
    return body


def _exists_all(vs, body):
    for v in reversed(vs):
        body = Exists(v, body)
    return body


SMT_SCHEMATA = ("set-matrix", "omission", "division", "epsilon", "matrix-ext", "set-of-set-matrices")


def instantiate_smt_schema(name: str, m: int, n: int, lang=LanguageId.LSMT):
    """Closed instance of one of the matrix schemata at size m x n."""
    key = name.lower()
    if key not in SMT_SCHEMATA:
        raise SchemaError(f"unknown SMT schema {name!r}; known: {', '.join(SMT_SCHEMATA)}")
    if not (isinstance(m, int) and isinstance(n, int)) or m < 1 or n < 1:
        raise SchemaError(f"dimensions must be positive integers, got {m}x{n}")
    if key in ("division", "epsilon") and m * n < 2:
        raise SchemaError(f"{key} needs m*n >= 2, got {m}x{n}")
    a = _entries("alpha", m, n)
    mat = Matrix(m, n, tuple(a))
    x = Var("x", Sort.SET)
    match key:
        case "set-matrix":
            b = Var("beta", Sort.THING)
            phi = _forall_all(a, Exists(b, Eq(b, mat)))
        case "omission":
            phi = _forall_all(a, Eq(Matrix(1, 1, (mat,)), mat))
        case "division":
            phi = Forall(x, _forall_all(a, Not(Eq(x, mat))))
        case "epsilon":
            b = Var("beta", Sort.THING)
            phi = _forall_all(a + [b], Not(Mem(b, mat)))
        case "matrix-ext":
            b = _entries("beta", m, n)
            same = conjunction(Eq(p, q) for p, q in zip(a, b))
            phi = _forall_all(a + b, Iff(Eq(mat, Matrix(m, n, tuple(b))), same))
        case "set-of-set-matrices":
            b = _entries("beta", m, n)
            y = Var("y", Sort.SET)
            al = Var("alpha", Sort.THING)
            inner = conjunction([Eq(al, Matrix(m, n, tuple(b)))] + [Mem(v, x) for v in b])
            phi = Forall(x, Exists(y, Forall(al, Iff(Mem(al, y), _exists_all(b, inner)))))
    _require_wf(phi, lang)
    return phi


def gamma_axioms(sep=(), rep=()) -> list:
    """Requested separation and replacement instances plus the reverse-graph axiom.

    Elements of ``sep`` are formulas (hole ``alpha``) or ``(formula, hole)``
    pairs; elements of ``rep`` are formulas (holes ``alpha``, ``beta``) or
    ``(formula, holes)`` pairs.
    """
    out = []
    for item in sep:
        phi, hole = item if isinstance(item, tuple) else (item, ALPHA)
        out.append(instantiate_separation(phi, hole))
    for item in rep:
        psi, holes = item if isinstance(item, tuple) else (item, (ALPHA, BETA))
        out.append(instantiate_replacement(psi, holes))
    out.append(reverse_graph_axiom())
    return out


def sum_f_instance(elements, family="f", total="F", image_set="Y", index="xi"):
    """The sum function statement for an explicit finite index set.

    Returns ``(standard, nonstandard)``: the form with one quantifier per ur-function
    and the form with a multiple quantifier and a conjunctive operator.
    """
    elements = tuple(elements)
    if not elements:
        raise SchemaError("the index set must be nonempty")
    if len(set(elements)) != len(elements):
        raise SchemaError("duplicate elements in the index set")
    S = SetLit(elements)
    F = Fun(total, S)
    Y = Var(image_set, Sort.SET)
    xi = Var(index, Sort.THING)
    if xi in elements:
        raise SchemaError(f"index variable {index} clashes with an element")

    def image(e):
        return ImageApp(family_member(family, e), e)

    maps = [Maps(F, e, image(e)) for e in elements]
    std = Exists(F, Exists(Y, conjunction([Surj(F, S, Y)] + maps)))
    for e in reversed(elements):
        std = Forall(family_member(family, e), std)
    conj = ConjOp(xi, S, Maps(F, xi, image(xi)))
    ns = MultiQuant("all", family, xi, S, Exists(F, Exists(Y, And(Surj(F, S, Y), conj))))
    return std, ns


def _require_wf(phi, lang):
    diags = well_formed(phi, lang)
    if diags:
        raise SchemaError("instance is not well formed: " + "; ".join(map(str, diags)))


# ---------------------------------------------------- schema registry

def _sep_for(lang):
    smt = lang not in (LanguageId.LT, LanguageId.LT_STANDARD)
    names = ("x", "y") if smt else ("X", "Y")
    return lambda phi, hole=ALPHA: instantiate_separation(phi, hole, lang, names)


def _rep_for(lang):
    smt = lang not in (LanguageId.LT, LanguageId.LT_STANDARD)
    names = ("x", "y") if smt else ("X", "Z")
    return lambda psi, holes=(ALPHA, BETA): instantiate_replacement(psi, holes, lang, names)


def _smt_for(name, lang, only=None):
    def gen(m, n):
        if only is not None and (m, n) != only:
            raise SchemaError(f"{name} is only available at size {only[0]}x{only[1]} here")
        return instantiate_smt_schema(name, m, n, lang)
    return gen


def _make_schema(theory: str, name: str, lang: LanguageId) -> AxiomSchema:
    aid = AxiomId(theory, name)
    if name == "SEP":
        return AxiomSchema(aid, ("formula",), _sep_for(lang))
    if name == "REP":
        return AxiomSchema(aid, ("formula",), _rep_for(lang))
    if name == "REV-GRAPH":
        return AxiomSchema(aid, (), reverse_graph_axiom)
    key = name.lower()
    if key in SMT_SCHEMATA:
        only = (1, 2) if lang in (LanguageId.LSMT_1X2, LanguageId.LSMT_1X2_PLUS4) else None
        return AxiomSchema(aid, ("m", "n"), _smt_for(key, lang, only))
    raise TheoryError(f"unknown schema {name} in theory {theory}")


# ------------------------------------------------------------ loading

def _read_theory_text(tid: str) -> str:
    res = resources.files("nckernel") / "data" / "theories" / f"{tid}.thy"
    if not res.is_file():
        raise TheoryError(f"unknown theory {tid!r}; known: {', '.join(THEORY_IDS)}")
    return res.read_text(encoding="utf-8")


def parse_theory(text: str, loader=None) -> Theory:
    """Parse the ``.thy`` format. ``loader`` resolves ``extends`` targets."""
    loader = loader or load_theory
    tid = None
    lang = None
    parent = None
    entries = []
    schema_names = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "theory":
            tid = rest
        elif word == "language":
            lang = LanguageId(rest)
        elif word == "extends":
            parent = loader(rest)
        elif word == "axiom":
            name, sep, src = rest.partition("::")
            if not sep:
                raise TheoryError(f"line {lineno}: expected 'axiom NAME :: formula'")
            col = raw.index(src.strip()) + 1 if src.strip() else 1
            phi = parse_formula(src.strip(), None, line=lineno)
            entries.append((name.strip(), phi, lineno, col))
        elif word == "schema":
            schema_names.append(rest)
        else:
            raise TheoryError(f"line {lineno}: unknown directive {word!r}")
    if tid is None or lang is None:
        raise TheoryError("theory file needs 'theory' and 'language' lines")
    axioms = []
    schemata = []
    if parent is not None:
        axioms.extend((AxiomId(tid, a.name), phi) for a, phi in parent.axioms)
        schemata.extend(_make_schema(tid, s.id.name, lang) for s in parent.schemata)
    seen = {a.name for a, _ in axioms}
    for name, phi, lineno, _ in entries:
        if name in seen:
            raise TheoryError(f"line {lineno}: duplicate axiom {name}")
        seen.add(name)
        diags = well_formed(phi, lang)
        if diags:
            raise TheoryError(f"line {lineno}: axiom {name} is not well formed in {lang.value}: "
                              + "; ".join(map(str, diags)))
        axioms.append((AxiomId(tid, name), phi))
    for name in schema_names:
        if not any(s.id.name == name for s in schemata):
            schemata.append(_make_schema(tid, name, lang))
    return Theory(tid, lang, tuple(axioms), tuple(schemata))


@lru_cache(maxsize=None)
def load_theory(tid: str) -> Theory:
    th = parse_theory(_read_theory_text(tid))
    if th.id != tid:
        raise TheoryError(f"file for {tid} declares theory {th.id}")
    return th


def axioms_of(tid: str) -> list:
    return list(load_theory(tid).axioms)


def axiom(ref) -> object:
    """Look up ``'T.EXT'`` or an ``AxiomId``."""
    aid = AxiomId.parse(ref) if isinstance(ref, str) else ref
    return load_theory(aid.theory).axiom(aid.name)


def standard_axioms(tid: str = "T-inf-0") -> list:
    """Closed axioms without nonstandard constructs."""
    return [(a, phi) for a, phi in axioms_of(tid) if is_well_formed(phi, LanguageId.LT_STANDARD)]
