"""Finite semantics over hereditarily finite sets plus function objects.

Sets are frozensets.  A function object is the 1x2 matrix value ``Mat((g, X))``
with ``g`` a set of Kuratowski-style pairs ``{a, {a, b}}`` that is total and
single-valued on ``X``; the same value is what the matrix term ``[g X]``
denotes on the matrix side, so both languages share one carrier.

Terms may denote objects outside the carrier (``succ`` of a top-rank set, say).
A term with no value at all (``succ`` of a function, an image outside the
domain, a matrix of the wrong shape used as a function) makes the atom it sits
in false.  The constant ``w`` is different: it raises ``NoDenotation``, which
``eval_formula`` turns into ``False`` and ``check_axioms`` reports as a failure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Optional

from .syntax import (
    And, ConjOp, Const, EmptySet, Eq, Exists, Exponent, Forall, Fun, Iff, ImageApp, Implies,
    Inactive, Matrix, Maps, Mem, MultiQuant, Not, Omega, Or, Pair, Pred, SetLit, Sort, Succ,
    Surj, Var, free_variables,
)

MAX_RANK = 4
EMPTY_SET = frozenset()


class ModelError(ValueError):
    pass


class NoDenotation(Exception):
    """Raised when a formula mentions the constant w, which no finite set denotes."""


class _Undefined:
    __slots__ = ()

    def __repr__(self):
        return "UNDEFINED"


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class Mat:
    """A matrix value; ``Mat((g, X))`` doubles as the function with graph g on X."""

    entries: tuple
    rows: int = 1
    cols: int = 2

    @property
    def graph(self):
        return self.entries[0]

    @property
    def domain(self):
        return self.entries[1]


# ------------------------------------------------------------ HF sets


@lru_cache(maxsize=None)
def rank(s) -> int:
    if isinstance(s, Mat):
        raise ModelError("function objects have no set rank")
    return max((rank(m) + 1 for m in s), default=0)


def pair(a, b) -> frozenset:
    return frozenset({a, frozenset({a, b})})


@lru_cache(maxsize=None)
def unpair(p):
    """``(a, b)`` if ``p`` encodes a pair, else None."""
    if not isinstance(p, frozenset) or len(p) != 2:
        return None
    x, y = tuple(p)
    for a, c in ((x, y), (y, x)):
        if isinstance(c, frozenset) and a in c and len(c) <= 2:
            rest = [e for e in c if e != a]
            return (a, rest[0] if rest else a)
    return None


def ackermann(s) -> int:
    return sum(1 << ackermann(m) for m in s)


def function_table(f) -> Optional[dict]:
    """The map of a function object, or None if ``f`` is not one."""
    if not isinstance(f, Mat) or (f.rows, f.cols) != (1, 2):
        return None
    return _table(f.graph, f.domain)


@lru_cache(maxsize=None)
def _table_cached(g, x):
    table = {}
    for p in g:
        ab = unpair(p)
        if ab is None or ab[0] not in x or ab[0] in table:
            return None
        table[ab[0]] = ab[1]
    return table if len(table) == len(x) else None


def _table(g, x):
    if not isinstance(g, frozenset) or not isinstance(x, frozenset):
        return None
    return _table_cached(g, x)


def is_function(f) -> bool:
    return function_table(f) is not None


# ---------------------------------------------------------- structures


@dataclass(frozen=True)
class FiniteStructure:
    rank_bound: int
    sets: tuple
    functions: tuple
    graph_slack: int = 0
    by_domain: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def elements(self) -> tuple:
        return self.sets + self.functions

    def functions_on(self, x) -> tuple:
        return self.by_domain.get(x, ())

    def ur_functions(self, xi) -> tuple:
        return self.functions_on(frozenset({xi}))

    def describe(self) -> str:
        return (f"rank <= {self.rank_bound}: {len(self.sets)} sets, {len(self.functions)} functions"
                f" (graphs up to rank {self.rank_bound + self.graph_slack})")


def _sets_up_to(r):
    level = [EMPTY_SET]
    for _ in range(r):
        members = level
        level = [frozenset(c for i, c in enumerate(members) if mask >> i & 1) for mask in range(1 << len(members))]
    return sorted(level, key=lambda s: (rank(s), ackermann(s)))


@lru_cache(maxsize=None)
def enumerate_universe(rank_bound: int, graph_slack: int = 0) -> FiniteStructure:
    """All HF sets of rank <= ``rank_bound`` and every function on them.

    A function (g, X) has X and its values in the set carrier; its graph must
    have rank <= ``rank_bound + graph_slack`` (slack 0: the graph is itself in
    the carrier).
    """
    if not 1 <= rank_bound <= MAX_RANK:
        raise ModelError(f"rank bound must be between 1 and {MAX_RANK}, got {rank_bound}")
    if graph_slack < 0:
        raise ModelError("graph slack must be non-negative")
    sets = tuple(_sets_up_to(rank_bound))
    graph_rank = rank_bound + graph_slack
    functions = []
    by_domain = {}
    for x in sets:
        choices = []
        for a in sorted(x, key=ackermann):
            # {a, {a, b}} has rank max(rank a, rank b) + 2; the graph adds one
            choices.append([b for b in sets if max(rank(a), rank(b)) + 3 <= graph_rank])
        fs = []
        for values in product(*choices):
            graph = frozenset(pair(a, b) for a, b in zip(sorted(x, key=ackermann), values))
            fs.append(Mat((graph, x)))
        by_domain[x] = tuple(fs)
        functions.extend(fs)
    return FiniteStructure(rank_bound, sets, tuple(functions), graph_slack, by_domain)


# ------------------------------------------------------------- evaluation


class Valuation(dict):
    """Keys: ``Var`` and ``Const`` nodes, function binder nodes, and
    ``("family", name)`` for the ur-function assignment of a multiple quantifier."""

    def bind(self, key, value) -> "Valuation":
        out = Valuation(self)
        out[key] = value
        return out


def _strip(fun: Fun) -> Fun:
    return Fun(fun.name, fun.domain, fun.const)


def denote(t, S: FiniteStructure, v: Valuation):
    match t:
        case EmptySet():
            return EMPTY_SET
        case Omega():
            raise NoDenotation("w has no denotation in a finite structure")
        case Inactive():
            return Mat((EMPTY_SET, EMPTY_SET))
        case Var() | Const():
            try:
                return v[t]
            except KeyError:
                raise ModelError(f"no value for {type(t).__name__.lower()} {t.name}") from None
        case Fun():
            return _denote_fun(t, S, v)
        case Succ(arg=a):
            s = denote(a, S, v)
            if not isinstance(s, frozenset):
                return UNDEFINED
            return s | {s}
        case Pair(left=a, right=b):
            x, y = denote(a, S, v), denote(b, S, v)
            if not (isinstance(x, frozenset) and isinstance(y, frozenset)):
                return UNDEFINED
            return pair(x, y)
        case SetLit(elems=es):
            vals = [denote(e, S, v) for e in es]
            if not all(isinstance(x, frozenset) for x in vals):
                return UNDEFINED
            return frozenset(vals)
        case ImageApp(fun=f, arg=a):
            table = function_table(denote(f, S, v))
            x = denote(a, S, v)
            if table is None or x not in table:
                return UNDEFINED
            return table[x]
        case Matrix(rows=m, cols=n, entries=es):
            vals = tuple(denote(e, S, v) for e in es)
            if any(x is UNDEFINED for x in vals):
                return UNDEFINED
            return Mat(vals, m, n)
        case Exponent(base=y, exp=x):
            return _exponent(denote(y, S, v), denote(x, S, v))
    raise ModelError(f"cannot denote {type(t).__name__}")


def _denote_fun(t: Fun, S, v):
    key = _strip(t)
    if key in v:
        return v[key]
    dom = t.domain
    if isinstance(dom, SetLit) and len(dom.elems) == 1 and ("family", t.name) in v:
        member = denote(dom.elems[0], S, v)
        family = v[("family", t.name)]
        if member in family:
            return family[member]
    kind = "function constant" if t.const else "function variable"
    raise ModelError(f"no value for {kind} {t.name}")


def _exponent(y, x):
    if not (isinstance(x, frozenset) and isinstance(y, frozenset)):
        return UNDEFINED
    xs = sorted(x, key=ackermann)
    return frozenset(
        frozenset(pair(a, b) for a, b in zip(xs, vals))
        for vals in product(sorted(y, key=ackermann), repeat=len(xs))
    )


def _in_exponent(g, y, x) -> bool:
    if not all(isinstance(s, frozenset) for s in (g, y, x)):
        return False
    table = _table(g, x)
    return table is not None and all(b in y for b in table.values())


def _image(table) -> frozenset:
    return frozenset(table.values())


def _atom(phi, S, v) -> bool:
    match phi:
        case Eq(left=a, right=b):
            x, y = denote(a, S, v), denote(b, S, v)
            return x is not UNDEFINED and x == y
        case Mem(left=a, right=Exponent(base=yb, exp=xe)):
            return _in_exponent(denote(a, S, v), denote(yb, S, v), denote(xe, S, v))
        case Mem(left=a, right=b):
            x, y = denote(a, S, v), denote(b, S, v)
            return isinstance(y, frozenset) and x in y
        case Surj(fun=f, dom=d, cod=c):
            fo = denote(f, S, v)
            table = function_table(fo)
            if table is None:
                return False
            return denote(d, S, v) == fo.domain and denote(c, S, v) == _image(table)
        case Maps(fun=f, arg=a, val=b):
            fo = denote(f, S, v)
            if function_table(fo) is None:
                return False
            x, y = denote(a, S, v), denote(b, S, v)
            if not (isinstance(x, frozenset) and isinstance(y, frozenset)):
                return False
            return pair(x, y) in fo.graph
        case Pred(name=n):
            raise ModelError(f"no interpretation for predicate {n}")
    raise ModelError(f"not an atom: {type(phi).__name__}")


def _range(var, S, v):
    if isinstance(var, Fun):
        dom = denote(var.domain, S, v)
        return S.functions_on(dom) if isinstance(dom, frozenset) else ()
    if var.sort == Sort.SET:
        return S.sets
    if var.sort == Sort.THING:
        return S.elements
    raise ModelError(f"unsorted variable {var.name}")


# Witness pruning.  In ``ex x . (... /\ x = t /\ ...)`` and in
# ``all x . (... /\ x = t /\ ... -> psi)`` only the value of ``t`` can matter
# (the same holds behind further quantifiers of the same kind, and for
# equations such as ``[x X] = t`` that determine x).  A guard ``x in t``
# restricts x to the members of t.

_GUARDS: dict = {}


def _conjuncts(phi):
    if isinstance(phi, And):
        return _conjuncts(phi.left) + _conjuncts(phi.right)
    return [phi]


def _guards(q):
    hit = _GUARDS.get(id(q))
    if hit is not None and hit[0] is q:
        return hit[1]
    x, cls = q.var, type(q)
    prefix = {x}
    body = q.body
    while isinstance(body, cls) and isinstance(body.var, Var):
        prefix.add(body.var)
        body = body.body
    if cls is Forall:
        conj = _conjuncts(body.left) if isinstance(body, Implies) else []
    else:
        conj = _conjuncts(body)
    found = []
    if isinstance(x, Fun):
        fx = _strip(x)
        for c in conj:
            if isinstance(c, Maps) and _is_fun(c.fun, fx):
                found.append(("maps", c, None))
            elif isinstance(c, ConjOp) and isinstance(c.body, Maps) and _is_fun(c.body.fun, fx):
                found.append(("maps-all", c, None))
    if isinstance(x, Var):
        for c in conj:
            if isinstance(c, Eq):
                for pat, other in ((c.left, c.right), (c.right, c.left)):
                    fv = free_variables(other)
                    if _mentions(pat, x) and not (fv & prefix):
                        found.append(("eq", pat, other))
            elif isinstance(c, Mem) and c.left == x and not (free_variables(c.right) & prefix):
                found.append(("mem", None, c.right))
            elif isinstance(c, Surj) and c.cod == x and not (free_variables(c.fun) & prefix):
                found.append(("image", None, c.fun))
    _GUARDS[id(q)] = (q, found)
    return found


def _is_fun(t, fx) -> bool:
    return isinstance(t, Fun) and not t.const and _strip(t) == fx


def _mentions(t, x) -> bool:
    if t == x:
        return True
    if isinstance(t, (Matrix, Pair, SetLit)):
        return any(_mentions(e, x) for e in _parts(t))
    return False


def _parts(t):
    if isinstance(t, Matrix):
        return t.entries
    if isinstance(t, Pair):
        return (t.left, t.right)
    return t.elems


_NO_MATCH = object()


def _solve(pat, value, x):
    """The value of ``x`` forced by ``pat == value``; None if not determined."""
    if value is UNDEFINED:
        return _NO_MATCH
    if pat == x:
        return value
    if isinstance(pat, Matrix):
        if not isinstance(value, Mat) or (value.rows, value.cols) != (pat.rows, pat.cols):
            return _NO_MATCH
        parts = value.entries
    elif isinstance(pat, Pair):
        parts = unpair(value) if isinstance(value, frozenset) else None
        if parts is None:
            return _NO_MATCH
    elif isinstance(pat, SetLit) and len(pat.elems) == 1:
        if not isinstance(value, frozenset) or len(value) != 1:
            return _NO_MATCH
        parts = tuple(value)
    else:
        return None
    for sub, val in zip(_parts(pat), parts):
        if _mentions(sub, x):
            return _solve(sub, val, x)
    return None


def _in_carrier(e, S) -> bool:
    if isinstance(e, Mat):
        return e in S.functions_on(e.domain) if isinstance(e.domain, frozenset) else False
    return isinstance(e, frozenset) and rank(e) <= S.rank_bound


_PRUNING = [True]


class pruning:
    """Context manager switching witness pruning on or off (for cross-checks)."""

    def __init__(self, enabled: bool):
        self.enabled = enabled

    def __enter__(self):
        self.saved = _PRUNING[0]
        _PRUNING[0] = self.enabled

    def __exit__(self, *exc):
        _PRUNING[0] = self.saved


def _candidates(q, S, v):
    x = q.var
    if not _PRUNING[0]:
        return _range(x, S, v)
    if isinstance(x, Fun):
        return _function_candidates(q, S, v)
    for kind, pat, other in _guards(q):
        try:
            value = denote(other, S, v)
        except ModelError:
            continue
        if kind == "mem":
            if not isinstance(value, frozenset):
                return ()
            return [e for e in sorted(value, key=ackermann) if _in_carrier(e, S)]
        if kind == "image":
            table = function_table(value)
            if table is None:
                return ()
            image = _image(table)
            return [image] if _in_carrier(image, S) else ()
        forced = _solve(pat, value, x)
        if forced is _NO_MATCH:
            return ()
        if forced is None:
            continue
        if x.sort == Sort.SET and not isinstance(forced, frozenset):
            return ()
        return [forced] if _in_carrier(forced, S) else ()
    return _range(x, S, v)


def _required_pairs(guards, S, v):
    """Pairs every witness graph must contain; None if some atom cannot hold."""
    pairs = []
    for kind, c, _ in guards:
        if kind == "maps":
            items = [(c, v)]
        elif kind == "maps-all":
            try:
                members = _members(c.index_set, S, v)
            except ModelError:
                continue
            items = [(c.body, v.bind(c.index, m)) for m in members]
        else:
            continue
        for atom, w in items:
            try:
                a, b = denote(atom.arg, S, w), denote(atom.val, S, w)
            except ModelError:
                continue  # mentions the quantified function itself; no constraint
            if not (isinstance(a, frozenset) and isinstance(b, frozenset)):
                return None
            pairs.append(pair(a, b))
    return pairs


def _function_candidates(q, S, v):
    everything = _range(q.var, S, v)
    guards = [g for g in _guards(q) if g[0] in ("maps", "maps-all")]
    if not guards:
        return everything
    pairs = _required_pairs(guards, S, v)
    if pairs is None:
        return ()
    return [f for f in everything if all(p in f.graph for p in pairs)]


def _members(index_set, S, v):
    s = denote(index_set, S, v)
    if not isinstance(s, frozenset):
        raise ModelError("index set does not denote a set")
    return sorted(s, key=ackermann)


def _eval(phi, S, v) -> bool:
    match phi:
        case Not(body=b):
            return not _eval(b, S, v)
        case And(left=l, right=r):
            return _eval(l, S, v) and _eval(r, S, v)
        case Or(left=l, right=r):
            return _eval(l, S, v) or _eval(r, S, v)
        case Implies(left=l, right=r):
            return (not _eval(l, S, v)) or _eval(r, S, v)
        case Iff(left=l, right=r):
            return _eval(l, S, v) == _eval(r, S, v)
        case Forall(var=x, body=b):
            key = _strip(x) if isinstance(x, Fun) else x
            return all(_eval(b, S, v.bind(key, e)) for e in _candidates(phi, S, v))
        case Exists(var=x, body=b):
            key = _strip(x) if isinstance(x, Fun) else x
            return any(_eval(b, S, v.bind(key, e)) for e in _candidates(phi, S, v))
        case ConjOp(index=i, index_set=s, body=b):
            return all(_eval(b, S, v.bind(i, m)) for m in _members(s, S, v))
        case MultiQuant(kind=k, family=fam, index=i, index_set=s, body=b):
            members = _members(s, S, v)
            quant = all if k == "all" else any
            options = [S.ur_functions(m) for m in members]
            return quant(
                _eval(b, S, v.bind(("family", fam), dict(zip(members, choice))))
                for choice in product(*options)
            )
    return _atom(phi, S, v)


def eval_formula(phi, S: FiniteStructure, v: Optional[dict] = None) -> bool:
    """Tarskian truth of ``phi`` in ``S``; a formula mentioning w is false."""
    try:
        return _eval(phi, S, Valuation(v or {}))
    except NoDenotation:
        return False


def valuations(variables: Iterable, S: FiniteStructure):
    """Every sort-respecting assignment to ``variables`` (Vars only)."""
    variables = list(variables)
    for combo in product(*(_range(x, S, Valuation()) for x in variables)):
        yield Valuation(zip(variables, combo))


def distinct_set_valuations(variables: Iterable, S: FiniteStructure, max_rank: Optional[int] = None):
    """Assignments of pairwise different sets (of rank <= ``max_rank``) to ``variables``.

    These are the valuations under which a literal ``{a, b, ...}`` lists
    exactly as many members as it has entries.
    """
    variables = list(variables)
    pool = [x for x in S.sets if max_rank is None or rank(x) <= max_rank]
    for combo in product(pool, repeat=len(variables)):
        if len(set(combo)) == len(combo):
            yield Valuation(zip(variables, combo))


# ------------------------------------------------------------ axiom check


@dataclass(frozen=True)
class AxiomRow:
    id: str
    status: str  # PASS, FAIL, EXPECTED-FAIL
    ms: int
    note: str = ""

    def line(self, timing: bool = True) -> str:
        return f"{self.id} {self.status} {self.ms if timing else '-'}"


@dataclass(frozen=True)
class AxiomReport:
    theory: str
    structure: str
    rows: tuple

    @property
    def failures(self) -> list:
        return [r.id for r in self.rows if r.status != "PASS"]

    @property
    def unexpected(self) -> list:
        return [r.id for r in self.rows if r.status == "FAIL"]

    @property
    def accepted(self) -> bool:
        return not self.unexpected

    def text(self, timing: bool = True) -> str:
        return "\n".join(r.line(timing) for r in self.rows) + "\n"


SUM_F_INFINITE = "SUM-F-INFINITE"

DEFAULT_SEPARATION_POOL = ("alpha = alpha", "alpha != alpha", "alpha = 0", "0 in alpha")
DEFAULT_REPLACEMENT_POOL = ("beta = alpha", "beta = 0")


def schema_instances(theory, sep_pool=None, rep_pool=None) -> list:
    """``(label, formula)`` for the schemata of ``theory`` over finite pools."""
    from .parser import parse_formula

    sep_pool = DEFAULT_SEPARATION_POOL if sep_pool is None else sep_pool
    rep_pool = DEFAULT_REPLACEMENT_POOL if rep_pool is None else rep_pool
    out = []
    for schema in theory.schemata:
        name = schema.id.name
        if name == "SEP":
            for text in sep_pool:
                out.append((f"SEP[{text}]", schema.instantiate(parse_formula(text, theory.language))))
        elif name == "REP":
            for text in rep_pool:
                out.append((f"REP[{text}]", schema.instantiate(parse_formula(text, theory.language))))
        elif schema.parameters == ("m", "n"):
            out.append((f"{name}[1x2]", schema.instantiate(1, 2)))
        else:
            out.append((name, schema.instantiate()))
    return out


def check_axioms(theory_id: str, S: FiniteStructure, expected_fail: Iterable = (),
                 sep_pool=None, rep_pool=None, include_schemata: bool = True) -> AxiomReport:
    """Evaluate every axiom (and pooled schema instance) of a theory in ``S``."""
    from .theories import load_theory

    theory = load_theory(theory_id)
    expected = {str(x) for x in expected_fail}
    items = [(aid.name, phi) for aid, phi in theory.axioms]
    if include_schemata:
        items += schema_instances(theory, sep_pool, rep_pool)
    rows = []
    for label, phi in items:
        start = time.perf_counter()
        ok = eval_formula(phi, S)
        ms = int((time.perf_counter() - start) * 1000)
        rows.append(AxiomRow(label, _status(ok, label, expected), ms))
    if "SUM-F" in theory.axiom_names():
        # only finite index sets exist here; the infinite case is never witnessed
        rows.append(AxiomRow(SUM_F_INFINITE, _status(False, SUM_F_INFINITE, expected), 0,
                             "infinite index sets are not representable"))
    return AxiomReport(theory_id, S.describe(), tuple(rows))


def _status(ok, label, expected):
    if ok:
        return "PASS"
    return "EXPECTED-FAIL" if label in expected or label.split("[")[0] in expected else "FAIL"


# --------------------------------------------------------- sum of ur-functions


@dataclass(frozen=True)
class SumFResult:
    holds: bool
    families: int
    excluded: int
    counterexample: Optional[tuple] = None


def sum_f_families(S: FiniteStructure, x: frozenset):
    members = sorted(x, key=ackermann)
    for choice in product(*(S.ur_functions(m) for m in members)):
        yield dict(zip(members, choice))


def sum_f_search(S: FiniteStructure, x) -> SumFResult:
    """Exhaustive search for a sum function of every admissible family on ``x``.

    A family is admissible when the graph collecting its values is within the
    structure's graph bound; the others cannot have a sum in ``S`` and are
    counted as excluded.
    """
    if not isinstance(x, frozenset) or x not in S.by_domain:
        raise ModelError("X must be a set of the structure")
    if not x:
        raise ModelError("X must be non-empty")
    graph_rank = S.rank_bound + S.graph_slack
    families = excluded = 0
    for family in sum_f_families(S, x):
        values = {m: function_table(f)[m] for m, f in family.items()}
        if rank(frozenset(pair(m, b) for m, b in values.items())) > graph_rank:
            excluded += 1
            continue
        families += 1
        if not _has_sum(S, x, values):
            return SumFResult(False, families, excluded, tuple(sorted(values.items(), key=lambda kv: ackermann(kv[0]))))
    return SumFResult(True, families, excluded)


def _has_sum(S, x, values) -> bool:
    for F in S.functions_on(x):
        if not all(pair(m, b) in F.graph for m, b in values.items()):
            continue
        image = _image(function_table(F))
        if any(y == image for y in S.sets):
            return True
    return False


def brute_force_sum_f(S: FiniteStructure, x) -> bool:
    return sum_f_search(S, x).holds


def admissible_index_sets(S: FiniteStructure) -> list:
    """Non-empty sets of ``S`` each of whose members carries an ur-function."""
    return [x for x in S.sets if x and all(S.ur_functions(m) for m in x)]


# ----------------------------------------------------------- carrier checks


def carriers_disjoint(S: FiniteStructure) -> bool:
    sets = set(S.sets)
    return all(f not in sets and not isinstance(f, frozenset) for f in S.functions)


def pair_injective(S: FiniteStructure) -> bool:
    seen = {}
    for a in S.sets:
        for b in S.sets:
            p = pair(a, b)
            if seen.setdefault(p, (a, b)) != (a, b) or unpair(p) != (a, b):
                return False
    return True


def functions_well_formed(S: FiniteStructure) -> bool:
    for f in S.functions:
        table = function_table(f)
        if table is None or set(table) != set(f.domain):
            return False
        if not f.domain and f.graph:
            return False
    return True
