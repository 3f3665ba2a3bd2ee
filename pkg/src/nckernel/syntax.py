"""Abstract syntax shared by every language of the workbench.

Terms and formulas are immutable dataclasses.  Source spans are carried on
every node but never take part in equality or hashing, so two parses of the
same text compare equal regardless of layout.

Variables are sorted.  ``Var`` covers set and thing variables, ``Fun`` covers
function composites ``f_X`` (a function variable or constant on the set
denoted by ``domain``).  A function variable is identified by its name *and*
its domain term, which is what makes ``f_{a}`` and ``f_{b}`` two different
variables of the same family.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Optional, Union


class Sort(str, Enum):
    SET = "set"
    THING = "thing"
    FUN = "fun"
    MATRIX = "matrix"


class LanguageId(str, Enum):
    LT = "LT"
    LT_STANDARD = "LT-standard"
    LSMT = "LSMT"
    LSMT_1X2 = "LSMT-1x2"
    LSMT_1X2_PLUS4 = "LSMT-1x2-plus4"


LT_LANGUAGES = (LanguageId.LT, LanguageId.LT_STANDARD)
SMT_LANGUAGES = (LanguageId.LSMT, LanguageId.LSMT_1X2, LanguageId.LSMT_1X2_PLUS4)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


def _span():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class EmptySet:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Omega:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Inactive:
    """The inactive function ``1_0``."""

    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Const:
    name: str
    sort: Sort
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Fun:
    name: str
    domain: "Term"
    const: bool = False
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Succ:
    arg: "Term"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SetLit:
    elems: tuple
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ImageApp:
    fun: "Term"
    arg: "Term"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: tuple
    span: Optional[SourceSpan] = _span()

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"matrix {self.rows}x{self.cols} needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )


@dataclass(frozen=True)
class Exponent:
    """``base^exp``: the set of all graphs of functions from ``exp`` to ``base``."""

    base: "Term"
    exp: "Term"
    span: Optional[SourceSpan] = _span()


Term = Union[EmptySet, Omega, Inactive, Var, Const, Fun, Succ, Pair, SetLit,
             ImageApp, Matrix, Exponent]
TERM_TYPES = (EmptySet, Omega, Inactive, Var, Const, Fun, Succ, Pair, SetLit,
              ImageApp, Matrix, Exponent)

EMPTY = EmptySet()
EMPTY_MATRIX = Matrix(1, 2, (EMPTY, EMPTY))


# ------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Mem:
    left: Term
    right: Term
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Surj:
    fun: Term
    dom: Term
    cod: Term
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Maps:
    fun: Term
    arg: Term
    val: Term
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Pred:
    """Schematic predicate letter, used for propositional test material."""

    name: str
    args: tuple = ()
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Not:
    body: "Formula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Forall:
    var: Union[Var, Fun]
    body: "Formula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Exists:
    var: Union[Var, Fun]
    body: "Formula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class MultiQuant:
    """``(all f_{xi})_{xi in X}``; binds every member ``f_{{t}}`` of the family."""

    kind: str  # "all" or "ex"
    family: str
    index: Var
    index_set: Term
    body: "Formula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ConjOp:
    index: Var
    index_set: Term
    body: "Formula"
    span: Optional[SourceSpan] = _span()


Formula = Union[Eq, Mem, Surj, Maps, Pred, Not, And, Or, Implies, Iff, Forall,
                Exists, MultiQuant, ConjOp]
FORMULA_TYPES = (Eq, Mem, Surj, Maps, Pred, Not, And, Or, Implies, Iff, Forall,
                 Exists, MultiQuant, ConjOp)
ATOM_TYPES = (Eq, Mem, Surj, Maps, Pred)
BINARY_TYPES = (And, Or, Implies, Iff)
QUANT_TYPES = (Forall, Exists)

Node = Union[Term, Formula]


# ------------------------------------------------------------- sort helpers

GREEK = frozenset(
    "alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu nu xi "
    "omicron pi rho sigma tau upsilon phi chi psi omega".split()
)


def conventional_sort(name: str) -> Sort:
    """Sort implied by spelling: Greek letter names are things, the rest sets."""
    base = name.rstrip("'0123456789")
    return Sort.THING if base in GREEK else Sort.SET


def term_sort(t: Term) -> Sort:
    if isinstance(t, (Var, Const)):
        return t.sort
    if isinstance(t, (Fun, Inactive)):
        return Sort.FUN
    if isinstance(t, ImageApp):
        return Sort.THING
    if isinstance(t, Matrix):
        return Sort.MATRIX
    return Sort.SET


def sort_fits(value_sort: Sort, slot: Sort) -> bool:
    """May a term of ``value_sort`` fill a variable slot of sort ``slot``?"""
    if value_sort == slot:
        return True
    return slot == Sort.THING


def is_singleton_domain(t: Term) -> bool:
    return isinstance(t, SetLit) and len(t.elems) == 1


def family_member(family: str, elem: Term, const: bool = False) -> Fun:
    """The family member ``f_{{elem}}`` (an ur-function on the singleton of elem)."""
    return Fun(family, SetLit((elem,)), const)


# ------------------------------------------------------------ traversal


def children(node: Node) -> list:
    """Immediate sub-nodes in a fixed left-to-right order (binder vars included)."""
    match node:
        case EmptySet() | Omega() | Inactive() | Var() | Const():
            return []
        case Fun(domain=d):
            return [d]
        case Succ(arg=a):
            return [a]
        case Pair(left=a, right=b) | Eq(left=a, right=b) | Mem(left=a, right=b):
            return [a, b]
        case SetLit(elems=es):
            return list(es)
        case ImageApp(fun=f, arg=a):
            return [f, a]
        case Matrix(entries=es):
            return list(es)
        case Exponent(base=b, exp=e):
            return [b, e]
        case Surj(fun=f, dom=a, cod=b):
            return [f, a, b]
        case Maps(fun=f, arg=a, val=b):
            return [f, a, b]
        case Pred(args=args):
            return list(args)
        case Not(body=b):
            return [b]
        case And(left=a, right=b) | Or(left=a, right=b) | Implies(left=a, right=b) | Iff(left=a, right=b):
            return [a, b]
        case Forall(var=v, body=b) | Exists(var=v, body=b):
            return [v, b]
        case MultiQuant(index=i, index_set=s, body=b):
            return [i, s, b]
        case ConjOp(index=i, index_set=s, body=b):
            return [i, s, b]
    raise TypeError(f"not a syntax node: {node!r}")


def walk(node: Node, path: tuple = ()) -> Iterator[tuple]:
    """Pre-order ``(path, node)`` pairs over the whole tree."""
    yield path, node
    for i, child in enumerate(children(node)):
        yield from walk(child, path + (i,))


def node_at(node: Node, path: tuple) -> Node:
    for i in path:
        node = children(node)[i]
    return node


def contains_nonstandard(node: Node) -> bool:
    return any(isinstance(n, (ConjOp, MultiQuant)) for _, n in walk(node))


def strip_spans(node):
    """Rebuild ``node`` without spans (handy for stable reprs in reports)."""
    if not hasattr(node, "span"):
        return node
    kwargs = {}
    for name in node.__dataclass_fields__:
        if name == "span":
            continue
        value = getattr(node, name)
        if isinstance(value, tuple):
            value = tuple(strip_spans(v) for v in value)
        elif hasattr(value, "__dataclass_fields__"):
            value = strip_spans(value)
        kwargs[name] = value
    return type(node)(**kwargs)


# --------------------------------------------------------- free variables


def free_variables(node: Node) -> frozenset:
    """Free ``Var`` and non-constant ``Fun`` occurrences of ``node``.

    The index variable of ``ConjOp``/``MultiQuant`` is bound inside the body;
    variables of the index set are free.  A free ``Fun`` also contributes the
    free variables of its domain.
    """
    out: set = set()
    _free(node, (), out)
    return frozenset(out)


def _bound_here(occ, scope) -> bool:
    for entry in reversed(scope):
        kind = entry[0]
        if kind == "var" and isinstance(occ, Var) and entry[1] == occ:
            return True
        if kind == "fun" and isinstance(occ, Fun) and entry[1] == occ:
            return True
        if kind == "family" and isinstance(occ, Fun) and occ.name == entry[1] and is_singleton_domain(occ.domain):
            return True
    return False


def _free(node, scope, out):
    match node:
        case Var():
            if not _bound_here(node, scope):
                out.add(node)
            return
        case Fun(domain=d, const=c):
            _free(d, scope, out)
            if not c and not _bound_here(node, scope):
                out.add(node)
            return
        case Forall(var=v, body=b) | Exists(var=v, body=b):
            if isinstance(v, Fun):
                _free(v.domain, scope, out)
                _free(b, scope + (("fun", v),), out)
            else:
                _free(b, scope + (("var", v),), out)
            return
        case MultiQuant(family=f, index=i, index_set=s, body=b):
            _free(s, scope, out)
            _free(b, scope + (("family", f), ("var", i)), out)
            return
        case ConjOp(index=i, index_set=s, body=b):
            _free(s, scope, out)
            _free(b, scope + (("var", i),), out)
            return
    for child in children(node):
        _free(child, scope, out)


def is_closed(node: Node) -> bool:
    return not free_variables(node)


def constants(node: Node) -> frozenset:
    """Every ``Const`` and constant ``Fun`` occurring anywhere in ``node``."""
    return frozenset(
        n for _, n in walk(node)
        if isinstance(n, Const) or (isinstance(n, Fun) and n.const)
    )


def names_in(node: Node) -> set:
    """All identifier names used by variables, constants and families."""
    names = set()
    for _, n in walk(node):
        if isinstance(n, (Var, Const, Fun)):
            names.add(n.name)
        elif isinstance(n, MultiQuant):
            names.add(n.family)
    return names


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    name = base
    while name in avoid:
        name += "'"
    return name


# ----------------------------------------------------------- substitution


class SortMismatch(TypeError):
    pass


def substitute(node: Node, v: Union[Var, Fun], t: Term) -> Node:
    """Capture-avoiding replacement of the free variable ``v`` by ``t``.

    Substituting a set variable also rewrites the subscripts of function
    composites, so ``F_X`` becomes ``F_t`` when ``X`` is replaced by ``t``.
    """
    if isinstance(v, Var):
        if not sort_fits(term_sort(t), v.sort):
            raise SortMismatch(f"cannot put a {term_sort(t).value} term in for {v.sort.value} variable {v.name}")
    elif isinstance(v, Fun):
        if term_sort(t) != Sort.FUN:
            raise SortMismatch(f"function variable {v.name} needs a function term")
    else:
        raise TypeError(f"can only substitute for variables, not {v!r}")
    t_free = free_variables(t)
    return _subst(node, v, t, t_free)


def _occurs_free(v, node) -> bool:
    return v in free_variables(node)


def _subst(node, v, t, t_free):
    match node:
        case Var():
            return t if node == v else node
        case Const() | EmptySet() | Omega() | Inactive():
            return node
        case Fun(name=n, domain=d, const=c):
            if not c and isinstance(v, Fun) and node == v:
                return t
            nd = _subst(d, v, t, t_free)
            return node if nd is d else Fun(n, nd, c, node.span)
        case Forall(var=b, body=body) | Exists(var=b, body=body):
            return _subst_binder(node, b, body, v, t, t_free)
        case MultiQuant(family=fam, index=i, index_set=s, body=body):
            ns = _subst(s, v, t, t_free)
            if not _occurs_free(v, replace(node, index_set=EMPTY)):
                return replace(node, index_set=ns)
            avoid = names_in(body) | names_in(t) | {v.name}
            if i in t_free:
                ni = Var(fresh_name(i.name, avoid), i.sort)
                avoid.add(ni.name)
                body = _subst(body, i, ni, frozenset({ni}))
                i = ni
            if any(isinstance(x, Fun) and x.name == fam for x in t_free):
                nf = fresh_name(fam, avoid)
                body = rename_family(body, fam, nf)
                fam = nf
            return MultiQuant(node.kind, fam, i, ns, _subst(body, v, t, t_free), node.span)
        case ConjOp(index=i, index_set=s, body=body):
            ns = _subst(s, v, t, t_free)
            if v == i or not _occurs_free(v, replace(node, index_set=EMPTY)):
                return replace(node, index_set=ns)
            if i in t_free:
                avoid = names_in(body) | names_in(t) | {v.name}
                ni = Var(fresh_name(i.name, avoid), i.sort)
                body = _subst(body, i, ni, frozenset({ni}))
                i = ni
            return ConjOp(i, ns, _subst(body, v, t, t_free), node.span)
    # structural recursion for everything else
    kwargs = {}
    changed = False
    for name in node.__dataclass_fields__:
        if name == "span":
            continue
        value = getattr(node, name)
        if isinstance(value, tuple):
            new = tuple(_subst(x, v, t, t_free) for x in value)
            changed |= any(a is not b for a, b in zip(new, value))
        elif isinstance(value, TERM_TYPES + FORMULA_TYPES):
            new = _subst(value, v, t, t_free)
            changed |= new is not value
        else:
            new = value
        kwargs[name] = new
    if not changed:
        return node
    return type(node)(**kwargs, span=node.span)


def _subst_binder(node, b, body, v, t, t_free):
    if b == v:
        # shadowed; a Fun binder equal to v has no v inside its domain
        return node
    if not _occurs_free(v, node):
        return node
    avoid = names_in(body) | names_in(t) | {v.name, b.name}
    if isinstance(b, Var):
        if isinstance(v, Fun) and b in free_variables(v.domain):
            return node
        if b in t_free:
            nb = Var(fresh_name(b.name, avoid), b.sort)
            body = _subst(body, b, nb, frozenset({nb}))
            b = nb
        return type(node)(b, _subst(body, v, t, t_free), node.span)
    # function binder: its domain lives outside its own scope
    if any(isinstance(x, Fun) and x.name == b.name for x in t_free):
        nb = Fun(fresh_name(b.name, avoid), b.domain)
        body = _subst(body, b, nb, frozenset({nb}))
        b = nb
    # occurrences F_X in the body get their subscript rewritten exactly like
    # the binder, so the binding survives
    new_b = Fun(b.name, _subst(b.domain, v, t, t_free), False, b.span)
    return type(node)(new_b, _subst(body, v, t, t_free), node.span)


def rename_family(node: Node, old: str, new: str) -> Node:
    """Rename free members ``old_{{t}}`` of a family to ``new_{{t}}``."""
    match node:
        case Fun(name=n, domain=d, const=c):
            d2 = rename_family(d, old, new)
            if not c and n == old and is_singleton_domain(d2):
                return Fun(new, d2, False, node.span)
            return Fun(n, d2, c, node.span)
        case MultiQuant(family=f):
            s = rename_family(node.index_set, old, new)
            if f == old:
                return replace(node, index_set=s)
            return replace(node, index_set=s, body=rename_family(node.body, old, new))
        case Forall(var=b) | Exists(var=b):
            if isinstance(b, Fun) and b.name == old and is_singleton_domain(b.domain):
                return node
    if not hasattr(node, "__dataclass_fields__"):
        return node
    kwargs = {}
    for name in node.__dataclass_fields__:
        if name == "span":
            continue
        value = getattr(node, name)
        if isinstance(value, tuple):
            value = tuple(rename_family(x, old, new) for x in value)
        elif isinstance(value, TERM_TYPES + FORMULA_TYPES):
            value = rename_family(value, old, new)
        kwargs[name] = value
    return type(node)(**kwargs, span=node.span)


def substitute_many(node: Node, pairs) -> Node:
    """Simultaneous substitution via fresh intermediates."""
    pairs = list(pairs)
    avoid = set(names_in(node))
    for v, t in pairs:
        avoid |= names_in(t) | {v.name}
    temps = []
    for v, t in pairs:
        name = fresh_name("%tmp", avoid)
        avoid.add(name)
        tmp = Var(name, v.sort) if isinstance(v, Var) else Fun(name, v.domain)
        node = substitute(node, v, tmp)
        temps.append((tmp, t))
    for tmp, t in temps:
        node = substitute(node, tmp, t)
    return node


# ------------------------------------------------------- alpha-equivalence


def canonical(node: Node) -> Node:
    """Rename bound variables positionally so alpha-variants become equal."""
    return _canon(node, ())


def _lookup(occ, scope):
    for entry in reversed(scope):
        kind = entry[0]
        if kind == "var" and isinstance(occ, Var) and entry[1] == occ:
            return entry[2]
        if kind == "fun" and isinstance(occ, Fun) and entry[1] == occ.name and entry[2] == occ.domain:
            return Fun(entry[3], occ.domain)
        if kind == "family" and isinstance(occ, Fun) and entry[1] == occ.name and is_singleton_domain(occ.domain):
            return Fun(entry[2], occ.domain)
    return None


def _canon(node, scope):
    match node:
        case Var():
            hit = _lookup(node, scope)
            return hit if hit is not None else strip_spans(node)
        case Fun(name=n, domain=d, const=c):
            cd = _canon(d, scope)
            if not c:
                hit = _lookup(Fun(n, cd), scope)
                if hit is not None:
                    return hit
            return Fun(n, cd, c)
        case Forall(var=b, body=body) | Exists(var=b, body=body):
            level = f"%{len(scope)}"
            if isinstance(b, Fun):
                cd = _canon(b.domain, scope)
                nb = Fun(level, cd)
                return type(node)(nb, _canon(body, scope + (("fun", b.name, cd, level),)))
            nb = Var(level, b.sort)
            return type(node)(nb, _canon(body, scope + (("var", b, nb),)))
        case MultiQuant(kind=k, family=f, index=i, index_set=s, body=body):
            cs = _canon(s, scope)
            fam = f"%{len(scope)}"
            ni = Var(f"%{len(scope) + 1}", i.sort)
            inner = scope + (("family", f, fam), ("var", i, ni))
            return MultiQuant(k, fam, ni, cs, _canon(body, inner))
        case ConjOp(index=i, index_set=s, body=body):
            cs = _canon(s, scope)
            ni = Var(f"%{len(scope)}", i.sort)
            return ConjOp(ni, cs, _canon(body, scope + (("var", i, ni),)))
    kwargs = {}
    for name in node.__dataclass_fields__:
        if name == "span":
            continue
        value = getattr(node, name)
        if isinstance(value, tuple):
            value = tuple(_canon(x, scope) for x in value)
        elif isinstance(value, TERM_TYPES + FORMULA_TYPES):
            value = _canon(value, scope)
        kwargs[name] = value
    return type(node)(**kwargs)


def alpha_equivalent(a: Node, b: Node) -> bool:
    return canonical(a) == canonical(b)


# -------------------------------------------------------------- unfolding


def conjunction(parts) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disjunction(parts) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def unfold(node: Formula) -> Formula:
    """Expand conjunctive operators and multiple quantifiers over set literals.

    ``bigwedge_{xi in {a,b}} P(xi)`` becomes ``P(a) /\\ P(b)`` and
    ``(all f_{xi})_{xi in {a,b}} Q`` becomes ``all f_{a} . all f_{b} . Q``.
    Index sets that are not literals are left alone.
    """
    match node:
        case ConjOp(index=i, index_set=s, body=body):
            body = unfold(body)
            if isinstance(s, SetLit) and s.elems:
                return conjunction(substitute(body, i, e) for e in s.elems)
            return replace(node, body=body)
        case MultiQuant(kind=k, family=f, index=i, index_set=s, body=body):
            body = unfold(body)
            if isinstance(s, SetLit) and s.elems:
                quant = Forall if k == "all" else Exists
                out = body
                for e in reversed(s.elems):
                    out = quant(family_member(f, e), out)
                return out
            return replace(node, body=body)
        case Not(body=b):
            return Not(unfold(b))
        case And() | Or() | Implies() | Iff():
            return type(node)(unfold(node.left), unfold(node.right))
        case Forall(var=v, body=b) | Exists(var=v, body=b):
            return type(node)(v, unfold(b))
    return node


# -------------------------------------------------------- well-formedness


@dataclass(frozen=True)
class Diagnostic:
    path: tuple
    message: str
    span: Optional[SourceSpan] = None

    def __str__(self):
        where = f"{self.span.line}:{self.span.column}" if self.span else "/".join(map(str, self.path)) or "root"
        return f"{where}: {self.message}"


def well_formed(phi: Formula, lang: LanguageId) -> list:
    """Diagnostics for constructs ``lang`` does not license (empty list = ok)."""
    lang = LanguageId(lang)
    diags = []

    def bad(path, node, msg):
        diags.append(Diagnostic(path, msg, getattr(node, "span", None)))

    lt = lang in LT_LANGUAGES
    for path, node in walk(phi):
        match node:
            case Matrix(rows=m, cols=n):
                if lt:
                    bad(path, node, "matrix terms are not part of the LT languages")
                elif lang in (LanguageId.LSMT_1X2, LanguageId.LSMT_1X2_PLUS4) and (m, n) != (1, 2):
                    bad(path, node, f"only 1x2 matrices are allowed in {lang.value}, found {m}x{n}")
            case Fun(domain=d):
                if not lt:
                    bad(path, node, "function composites are not part of the SMT languages")
                if term_sort(d) != Sort.SET:
                    bad(path, node, "function subscript must be a set term")
            case Inactive() | ImageApp():
                if not lt:
                    bad(path, node, f"{type(node).__name__} is not part of the SMT languages")
            case MultiQuant() | ConjOp():
                if lang != LanguageId.LT:
                    bad(path, node, f"nonstandard construct {type(node).__name__} not allowed in {lang.value}")
            case Surj() | Maps():
                if lang in (LanguageId.LSMT, LanguageId.LSMT_1X2):
                    bad(path, node, f"{type(node).__name__} atoms are only defined in LSMT-1x2-plus4")
            case Omega():
                if lang in (LanguageId.LSMT, LanguageId.LSMT_1X2):
                    bad(path, node, "the constant w is only defined in LSMT-1x2-plus4")
            case Forall(var=Fun()) | Exists(var=Fun()):
                if not lt:
                    bad(path, node, "function quantifiers are not part of the SMT languages")
            case Var(sort=s) | Const(sort=s):
                if s in (Sort.FUN, Sort.MATRIX):
                    bad(path, node, f"variables cannot carry sort {s.value}")
        if isinstance(node, ImageApp) and term_sort(node.fun) != Sort.FUN:
            bad(path, node, "image application needs a function term")
    return diags


def is_well_formed(phi: Formula, lang: LanguageId) -> bool:
    return not well_formed(phi, lang)
