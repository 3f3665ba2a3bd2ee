"""ASCII concrete syntax: tokenizer, recursive-descent parser, printer.

Grammar reference (EBNF) lives in ``docs/grammar.md``.  The printer emits
the canonical form, which the parser reads back to an alpha-equivalent
formula; printing that again yields the identical string.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    And, ConjOp, Const, EmptySet, Eq, Exists, Exponent, Forall,
    Fun, Iff, ImageApp, Implies, Inactive, LanguageId, Maps, Matrix, Mem,
    MultiQuant, Not, Omega, Or, Pair, Pred, SetLit, Sort, SourceSpan, Succ,
    Surj, Var, conventional_sort, fresh_name, is_singleton_domain, names_in,
    term_sort, well_formed,
)


class ParseError(Exception):
    def __init__(self, span: SourceSpan, expected, found: str, message: str = ""):
        self.span = span
        self.expected = list(expected) or ["<input>"]
        self.found = found
        self.message = message
        super().__init__(str(self))

    def __str__(self):
        where = f"line {self.span.line}, column {self.span.column}"
        if self.message:
            return f"{where}: {self.message}"
        return f"{where}: expected {' or '.join(self.expected)}, found {self.found!r}"


class WellFormednessError(Exception):
    """Syntactically fine, but not licensed by the requested language."""

    def __init__(self, diagnostics: list):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


# --------------------------------------------------------------- tokenizer

KEYWORDS = {"all", "ex", "ex!", "in", "notin", "sub", "succ", "bigwedge", "thing",
            "set", "w", "id0"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<sym><->|->>|->|\|->|/\\|\\/|!=|_\{|[~=(){}\[\],;:.^$])
  | (?P<exbang>ex!(?!=))
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9']*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # sym, num, ident, kw, eof
    text: str
    pos: int


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(_span_of(text, pos, 1), ["a token"], text[pos])
        kind = m.lastgroup
        tok = m.group()
        if kind == "ident" and tok in KEYWORDS:
            kind = "kw"
        elif kind == "exbang":
            kind = "kw"
        if kind != "ws":
            tokens.append(Token(kind, tok, pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


def _span_of(text: str, start: int, length: int) -> SourceSpan:
    line = text.count("\n", 0, start) + 1
    col = start - (text.rfind("\n", 0, start) + 1) + 1
    return SourceSpan(line, col, max(1, length))


# ------------------------------------------------------------------ parser


class _Parser:
    def __init__(self, text: str, line_offset: int = 0):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.scope: list = []  # (name, Sort)
        self.line_offset = line_offset

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("sym", "kw") and t.text in texts

    def error(self, expected, message="") -> ParseError:
        t = self.tok
        return ParseError(self.span(t.pos, max(1, len(t.text))), expected,
                          t.text if t.kind != "eof" else "<end of input>", message)

    def expect(self, text) -> Token:
        if not self.at(text):
            raise self.error([repr(text)])
        t = self.tok
        self.i += 1
        return t

    def span(self, start: int, length: int) -> SourceSpan:
        s = _span_of(self.text, start, length)
        return SourceSpan(s.line + self.line_offset, s.column, s.length)

    def close(self, start_pos: int) -> SourceSpan:
        prev = self.toks[self.i - 1]
        end = prev.pos + len(prev.text)
        return self.span(start_pos, end - start_pos)

    # -- scope
    def sort_of(self, name: str) -> Sort:
        for n, s in reversed(self.scope):
            if n == name:
                return s
        return conventional_sort(name)

    def maybe_annotation(self) -> Optional[Sort]:
        if self.at(":") and self.peek().kind == "kw" and self.peek().text in ("thing", "set"):
            self.i += 1
            s = Sort(self.tok.text)
            self.i += 1
            return s
        return None

    # -- terms
    def term(self):
        start = self.tok.pos
        base = self.postfix()
        if self.at("^"):
            self.i += 1
            exp = self.postfix()
            return Exponent(base, exp, span=self.close(start))
        return base

    def postfix(self):
        start = self.tok.pos
        t = self.primary()
        if isinstance(t, Fun) and self.at("("):
            self.i += 1
            arg = self.term()
            self.expect(")")
            t = ImageApp(t, arg, span=self.close(start))
        return t

    def subscript_domain(self):
        self.expect("_{")
        d = self.term()
        self.expect("}")
        if term_sort(d) == Sort.SET:
            return d
        return SetLit((d,), span=d.span)

    def primary(self):
        t = self.tok
        start = t.pos
        if t.kind == "num":
            if t.text != "0":
                raise self.error(["a term"], "only 0 is a numeral term")
            self.i += 1
            return EmptySet(span=self.close(start))
        if t.kind == "kw":
            if t.text == "w":
                self.i += 1
                return Omega(span=self.close(start))
            if t.text == "id0":
                self.i += 1
                return Inactive(span=self.close(start))
            if t.text == "succ":
                self.i += 1
                self.expect("(")
                a = self.term()
                self.expect(")")
                return Succ(a, span=self.close(start))
            raise self.error(["a term"])
        if self.at("("):
            self.i += 1
            a = self.term()
            if self.at(","):
                self.i += 1
                b = self.term()
                self.expect(")")
                return Pair(a, b, span=self.close(start))
            self.expect(")")
            return a
        if self.at("{"):
            self.i += 1
            elems = []
            if not self.at("}"):
                elems.append(self.term())
                while self.at(","):
                    self.i += 1
                    elems.append(self.term())
            self.expect("}")
            return SetLit(tuple(elems), span=self.close(start))
        if self.at("["):
            self.i += 1
            rows = [[]]
            while not self.at("]"):
                if self.at(";"):
                    self.i += 1
                    rows.append([])
                    continue
                rows[-1].append(self.term())
            self.expect("]")
            widths = {len(r) for r in rows}
            if len(widths) != 1 or 0 in widths:
                raise ParseError(self.close(start), ["rows of equal nonzero length"], "ragged matrix")
            entries = tuple(e for r in rows for e in r)
            return Matrix(len(rows), len(rows[0]), entries, span=self.close(start))
        if self.at("$"):
            self.i += 1
            if self.tok.kind != "ident":
                raise self.error(["a constant name"])
            name = self.tok.text
            self.i += 1
            if self.at("_{"):
                d = self.subscript_domain()
                return Fun(name, d, True, span=self.close(start))
            sort = self.maybe_annotation() or conventional_sort(name)
            return Const(name, sort, span=self.close(start))
        if t.kind == "ident":
            self.i += 1
            name = t.text
            if self.at("_{"):
                d = self.subscript_domain()
                return Fun(name, d, False, span=self.close(start))
            sort = self.maybe_annotation() or self.sort_of(name)
            return Var(name, sort, span=self.close(start))
        raise self.error(["a term"])

    # -- formulas
    def formula(self):
        start = self.tok.pos
        left = self.implication()
        if self.at("<->"):
            self.i += 1
            right = self.implication()
            if self.at("<->"):
                raise self.error(["a parenthesized <-> chain"], "<-> does not associate; add parentheses")
            return Iff(left, right, span=self.close(start))
        return left

    def implication(self):
        start = self.tok.pos
        left = self.disjunction()
        if self.at("->"):
            self.i += 1
            right = self.implication()
            return Implies(left, right, span=self.close(start))
        return left

    def disjunction(self):
        start = self.tok.pos
        left = self.conjunction()
        if self.at("\\/"):
            self.i += 1
            right = self.disjunction()
            return Or(left, right, span=self.close(start))
        return left

    def conjunction(self):
        start = self.tok.pos
        left = self.unary()
        if self.at("/\\"):
            self.i += 1
            right = self.conjunction()
            return And(left, right, span=self.close(start))
        return left

    def unary(self):
        start = self.tok.pos
        if self.at("~"):
            self.i += 1
            body = self.unary()
            return Not(body, span=self.close(start))
        if self.at("all", "ex", "ex!"):
            return self.quantifier()
        if self.at("bigwedge"):
            return self.conjop()
        if self.at("("):
            if self.peek().text in ("all", "ex") and self.peek(2).kind == "ident" and self.peek(3).text == "_{" \
                    and self.peek(5).text == "}" and self.peek(6).text == ")":
                return self.multiquant()
            save = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = save
            self.i += 1
            inner = self.formula()
            self.expect(")")
            return inner
        return self.atom()

    def binder(self):
        start = self.tok.pos
        if self.tok.kind != "ident":
            raise self.error(["a variable to bind"])
        name = self.tok.text
        self.i += 1
        if self.at("_{"):
            d = self.subscript_domain()
            return Fun(name, d, False, span=self.close(start))
        sort = self.maybe_annotation() or conventional_sort(name)
        return Var(name, sort, span=self.close(start))

    def quantifier(self):
        start = self.tok.pos
        kw = self.tok.text
        self.i += 1
        var = self.binder()
        restriction = None
        if self.at("in", "notin", "!="):
            op = self.tok.text
            self.i += 1
            bound = self.term()
            if op == "in":
                restriction = Mem(var, bound)
            elif op == "notin":
                restriction = Not(Mem(var, bound))
            else:
                restriction = Not(Eq(var, bound))
        self.expect(".")
        pushed = isinstance(var, Var)
        if pushed:
            self.scope.append((var.name, var.sort))
        try:
            body = self.formula()
        finally:
            if pushed:
                self.scope.pop()
        sp = self.close(start)
        if kw == "ex!":
            if restriction is not None:
                body = And(restriction, body)
            return unique_exists(var, body, span=sp)
        if restriction is not None:
            body = Implies(restriction, body) if kw == "all" else And(restriction, body)
        cls = Forall if kw == "all" else Exists
        return cls(var, body, span=sp)

    def index_binding(self):
        if self.tok.kind != "ident":
            raise self.error(["an index variable"])
        name = self.tok.text
        start = self.tok.pos
        self.i += 1
        sort = self.maybe_annotation() or conventional_sort(name)
        index = Var(name, sort, span=self.close(start))
        self.expect("in")
        index_set = self.term()
        return index, index_set

    def multiquant(self):
        start = self.tok.pos
        self.expect("(")
        kind = self.tok.text
        self.i += 1
        family = self.tok.text
        self.i += 1
        self.expect("_{")
        if self.tok.kind != "ident":
            raise self.error(["the index variable"])
        sub = self.tok.text
        self.i += 1
        self.expect("}")
        self.expect(")")
        self.expect("_{")
        index, index_set = self.index_binding()
        if index.name != sub:
            raise ParseError(index.span, [repr(sub)], index.name, "family subscript must name the index variable")
        self.expect("}")
        self.expect(".")
        self.scope.append((index.name, index.sort))
        try:
            body = self.formula()
        finally:
            self.scope.pop()
        return MultiQuant(kind, family, index, index_set, body, span=self.close(start))

    def conjop(self):
        start = self.tok.pos
        self.expect("bigwedge")
        self.expect("_{")
        index, index_set = self.index_binding()
        self.expect("}")
        self.scope.append((index.name, index.sort))
        try:
            body = self.formula()
        finally:
            self.scope.pop()
        return ConjOp(index, index_set, body, span=self.close(start))

    def atom(self):
        start = self.tok.pos
        t = self.tok
        if t.kind == "ident" and self.peek().text == "(" and t.text not in ():
            # predicate letter P(...) -- function composites always carry _{...}
            self.i += 2
            args = []
            if not self.at(")"):
                args.append(self.term())
                while self.at(","):
                    self.i += 1
                    args.append(self.term())
            self.expect(")")
            return Pred(t.text, tuple(args), span=self.close(start))
        left = self.term()
        if self.at("="):
            self.i += 1
            return Eq(left, self.term(), span=self.close(start))
        if self.at("!="):
            self.i += 1
            right = self.term()
            sp = self.close(start)
            return Not(Eq(left, right, span=sp), span=sp)
        if self.at("in"):
            self.i += 1
            return Mem(left, self.term(), span=self.close(start))
        if self.at("notin"):
            self.i += 1
            right = self.term()
            sp = self.close(start)
            return Not(Mem(left, right, span=sp), span=sp)
        if self.at("sub"):
            self.i += 1
            right = self.term()
            return subset_formula(left, right, span=self.close(start))
        if self.at(":"):
            self.i += 1
            a = self.term()
            if self.at("->>"):
                self.i += 1
                return Surj(left, a, self.term(), span=self.close(start))
            if self.at("|->"):
                self.i += 1
                return Maps(left, a, self.term(), span=self.close(start))
            raise self.error(["'->>'", "'|->'"])
        raise self.error(["'='", "'!='", "'in'", "'notin'", "'sub'", "':'"])


def unique_exists(var, body, span=None):
    """``ex! v . body`` expanded to ``ex v . body /\\ all v' . (body[v'] -> v' = v)``."""
    from .syntax import substitute

    other_name = fresh_name(var.name, names_in(body) | {var.name})
    other = Var(other_name, var.sort) if isinstance(var, Var) else Fun(other_name, var.domain)
    uniq = Forall(other, Implies(substitute(body, var, other), Eq(other, var)))
    return Exists(var, And(body, uniq), span=span)


def subset_formula(left, right, span=None):
    """``Z sub X`` (improper inclusion) as ``all zeta . (zeta in Z -> zeta in X)``."""
    avoid = names_in(left) | names_in(right)
    z = Var(fresh_name("zeta", avoid), Sort.THING)
    return Forall(z, Implies(Mem(z, left), Mem(z, right)), span=span)


def parse_term(text: str):
    p = _Parser(text)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error(["end of input"])
    return t


def parse_formula(text: str, lang: LanguageId | str | None = LanguageId.LT, line: int = 1):
    """Parse one formula.  With ``lang`` set, also enforce well-formedness."""
    p = _Parser(text, line_offset=line - 1)
    phi = p.formula()
    if p.tok.kind != "eof":
        raise p.error(["end of formula"])
    if lang is not None:
        diags = well_formed(phi, LanguageId(lang))
        if diags:
            raise WellFormednessError(diags)
    return phi


def parse_formula_file(text: str, lang=LanguageId.LT) -> list:
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        offset = raw.index(line[0])
        out.append(parse_formula(" " * offset + line, lang, line=n))
    return out


# ----------------------------------------------------------------- printer

_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}
_OPS = {Iff: "<->", Implies: "->", Or: "\\/", And: "/\\"}


def _level(phi) -> int:
    if isinstance(phi, (Forall, Exists, MultiQuant, ConjOp)):
        return 0
    if isinstance(phi, Not) and isinstance(phi.body, (Eq, Mem)):
        return 6
    return _LEVEL.get(type(phi), 6)


class _Printer:
    def __init__(self):
        self.scope: list = []

    def bound_sort(self, name):
        for n, s in reversed(self.scope):
            if n == name:
                return s
        return None

    def var(self, v: Var, binder=False) -> str:
        if binder:
            ann = v.sort != conventional_sort(v.name)
        else:
            b = self.bound_sort(v.name)
            ann = (b != v.sort) if b is not None else v.sort != conventional_sort(v.name)
        return v.name + (f":{v.sort.value}" if ann else "")

    def subscript(self, d) -> str:
        if is_singleton_domain(d) and term_sort(d.elems[0]) != Sort.SET:
            return "_{" + self.term(d.elems[0]) + "}"
        return "_{" + self.term(d) + "}"

    def term(self, t) -> str:
        match t:
            case EmptySet():
                return "0"
            case Omega():
                return "w"
            case Inactive():
                return "id0"
            case Var():
                return self.var(t)
            case Const(name=n, sort=s):
                return "$" + n + (f":{s.value}" if s != conventional_sort(n) else "")
            case Fun(name=n, domain=d, const=c):
                return ("$" if c else "") + n + self.subscript(d)
            case Succ(arg=a):
                return f"succ({self.term(a)})"
            case Pair(left=a, right=b):
                return f"({self.term(a)}, {self.term(b)})"
            case SetLit(elems=es):
                return "{" + ", ".join(self.term(e) for e in es) + "}"
            case ImageApp(fun=f, arg=a):
                return f"{self.term(f)}({self.term(a)})"
            case Matrix(rows=m, cols=n, entries=es):
                rows = [" ".join(self.term(es[r * n + c]) for c in range(n)) for r in range(m)]
                return "[" + "; ".join(rows) + "]"
            case Exponent(base=b, exp=e):
                return f"{self.exp_operand(b)}^{self.exp_operand(e)}"
        raise TypeError(f"not a term: {t!r}")

    def exp_operand(self, t) -> str:
        s = self.term(t)
        return f"({s})" if isinstance(t, Exponent) else s

    def formula(self, phi) -> str:
        match phi:
            case Eq(left=a, right=b):
                return f"{self.term(a)} = {self.term(b)}"
            case Mem(left=a, right=b):
                return f"{self.term(a)} in {self.term(b)}"
            case Surj(fun=f, dom=a, cod=b):
                return f"{self.term(f)} : {self.term(a)} ->> {self.term(b)}"
            case Maps(fun=f, arg=a, val=b):
                return f"{self.term(f)} : {self.term(a)} |-> {self.term(b)}"
            case Pred(name=n, args=args):
                return f"{n}(" + ", ".join(self.term(a) for a in args) + ")"
            case Not(body=Eq(left=a, right=b)):
                return f"{self.term(a)} != {self.term(b)}"
            case Not(body=Mem(left=a, right=b)):
                return f"{self.term(a)} notin {self.term(b)}"
            case Not(body=b):
                inner = self.formula(b)
                return "~" + (f"({inner})" if _level(b) < 5 else inner)
            case And() | Or() | Implies() | Iff():
                lv = _LEVEL[type(phi)]
                left = self.formula(phi.left)
                right = self.formula(phi.right)
                if _level(phi.left) <= lv:
                    left = f"({left})"
                if _level(phi.right) < lv or (isinstance(phi, Iff) and _level(phi.right) <= lv):
                    right = f"({right})"
                return f"{left} {_OPS[type(phi)]} {right}"
            case Forall(var=v, body=b) | Exists(var=v, body=b):
                kw = "all" if isinstance(phi, Forall) else "ex"
                if isinstance(v, Fun):
                    head = self.term(v)
                    body = self.formula(b)
                else:
                    head = self.var(v, binder=True)
                    self.scope.append((v.name, v.sort))
                    body = self.formula(b)
                    self.scope.pop()
                return f"{kw} {head} . {body}"
            case MultiQuant(kind=k, family=f, index=i, index_set=s, body=b):
                idx = self.var(i, binder=True)
                head = f"({k} {f}_{{{i.name}}})_{{{idx} in {self.term(s)}}}"
                self.scope.append((i.name, i.sort))
                body = self.formula(b)
                self.scope.pop()
                return f"{head} . {body}"
            case ConjOp(index=i, index_set=s, body=b):
                idx = self.var(i, binder=True)
                head = f"bigwedge_{{{idx} in {self.term(s)}}}"
                self.scope.append((i.name, i.sort))
                body = self.formula(b)
                self.scope.pop()
                return f"{head} {body}"
        raise TypeError(f"not a formula: {phi!r}")


def pretty_print(phi) -> str:
    return _Printer().formula(phi)


def pretty_term(t) -> str:
    return _Printer().term(t)


def pretty(node) -> str:
    from .syntax import TERM_TYPES

    return pretty_term(node) if isinstance(node, TERM_TYPES) else pretty_print(node)


# ------------------------------------------------------------ proof scripts

@dataclass(frozen=True)
class Justification:
    """``kind`` is 'axiom', 'schema' or 'rule'.

    axiom:  ``ref`` is ``Theory.NAME``
    schema: ``ref`` is the schema name, ``args`` the raw argument text
    rule:   ``ref`` is the rule id, ``premises`` the cited step indices
    """
    kind: str
    ref: str
    args: str = ""
    premises: tuple = ()

    def __str__(self):
        if self.kind == "axiom":
            return f"axiom {self.ref}"
        if self.kind == "schema":
            return f"schema {self.ref}({self.args})"
        if self.premises:
            return f"from {','.join(map(str, self.premises))} by {self.ref}"
        return f"by {self.ref}"


@dataclass(frozen=True)
class Step:
    index: int
    formula: object
    justification: Justification
    fresh_constants: tuple = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ProofScript:
    theory: str
    steps: tuple
    goal: object = None
    pool: tuple = ()

    def step(self, index: int) -> Step:
        for s in self.steps:
            if s.index == index:
                return s
        raise KeyError(index)

    def without(self, index: int) -> "ProofScript":
        """The same script with one step removed (citations left dangling)."""
        return ProofScript(self.theory, tuple(s for s in self.steps if s.index != index),
                           self.goal, self.pool)


_STEP_RE = re.compile(r"\s*(\d+)\s*\.\s")
_FROM_RE = re.compile(r"from\s+([\d\s,]+?)\s+by\s+([A-Za-z0-9-]+)\s*$")
_BY_RE = re.compile(r"by\s+([A-Za-z0-9-]+)\s*$")
_AXIOM_RE = re.compile(r"axiom\s+([A-Za-z0-9-]+)\.([A-Za-z0-9-]+)\s*$")
_SCHEMA_RE = re.compile(r"schema\s+([A-Za-z0-9-]+)\s*\((.*)\)\s*$")


def _split_justification(body: str) -> int:
    """Index of the first ';' outside brackets, or -1."""
    depth = 0
    for i, ch in enumerate(body):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == ";" and depth == 0:
            return i
    return -1


def _parse_justification(text: str, line: int, col: int) -> Justification:
    text = text.strip()
    if m := _AXIOM_RE.match(text):
        return Justification("axiom", f"{m.group(1)}.{m.group(2)}")
    if m := _SCHEMA_RE.match(text):
        return Justification("schema", m.group(1), m.group(2).strip())
    if m := _FROM_RE.match(text):
        nums = [int(x) for x in re.split(r"[\s,]+", m.group(1).strip()) if x]
        return Justification("rule", m.group(2).upper(), premises=tuple(nums))
    if m := _BY_RE.match(text):
        return Justification("rule", m.group(1).upper())
    raise ParseError(SourceSpan(line, col, max(1, len(text))),
                     ["axiom T.ID", "schema ID(args)", "from i,j by RULE", "by RULE"],
                     text, "malformed justification")


def parse_proof_script(text: str, lang=None) -> ProofScript:
    """Parse the line-oriented proof format.

    Directives: ``theory ID``, ``goal FORMULA``, ``pool T1, T2, ...``.
    Steps: ``N. FORMULA ; JUSTIFICATION``.  ``#`` starts a comment.
    """
    theory = None
    goal = None
    pool = ()
    steps = []
    seen = {}
    cites = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        lead = len(line) - len(stripped)
        word = stripped.split(None, 1)[0]
        if word == "theory":
            theory = stripped[len("theory"):].strip()
            continue
        if word == "goal":
            src = stripped[len("goal"):]
            goal = parse_formula(" " * (lead + 4) + src, lang, line=n)
            continue
        if word == "pool":
            src = stripped[len("pool"):].strip()
            pool = tuple(parse_term(t) for t in _split_top(src)) if src else ()
            continue
        m = _STEP_RE.match(line)
        if not m:
            raise ParseError(SourceSpan(n, lead + 1, max(1, len(stripped))),
                             ["'N. formula ; justification'", "'theory'", "'goal'", "'pool'"],
                             stripped, "unrecognized line")
        index = int(m.group(1))
        body = line[m.end():]
        cut = _split_justification(body)
        if cut < 0:
            raise ParseError(SourceSpan(n, len(line) + 1, 1), ["';'"], "<end of line>",
                             f"step {index} has no justification")
        ftext = body[:cut]
        phi = parse_formula(" " * m.end() + ftext, lang, line=n)
        jcol = m.end() + cut + 2
        just = _parse_justification(body[cut + 1:], n, jcol)
        span = SourceSpan(n, lead + 1, max(1, len(stripped)))
        if index in seen:
            raise ParseError(span, ["a new step number"], str(index),
                             f"step {index} already defined on line {seen[index].line}")
        seen[index] = span
        steps.append(Step(index, phi, just, span=span))
        for p in just.premises:
            cites.append((index, p, span))
    for index, p, span in cites:
        if p not in seen:
            raise ParseError(span, ["an existing step"], str(p), f"unknown step {p} (cited by step {index})")
        if p >= index:
            raise ParseError(span, ["an earlier step"], str(p),
                             f"step {index} cites step {p}, defined at line {seen[p].line}, which does not precede it")
    if theory is None:
        theory = "T"
    return ProofScript(theory, tuple(steps), goal, pool)


def _split_top(text: str) -> list:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur).strip())
    return parts


def print_proof_script(p: ProofScript) -> str:
    lines = [f"theory {p.theory}"]
    if p.goal is not None:
        lines.append(f"goal {pretty_print(p.goal)}")
    if p.pool:
        lines.append("pool " + ", ".join(pretty_term(t) for t in p.pool))
    for s in p.steps:
        lines.append(f"{s.index}. {pretty_print(s.formula)} ; {s.justification}")
    return "\n".join(lines) + "\n"
