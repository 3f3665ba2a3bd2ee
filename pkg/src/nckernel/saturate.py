"""Bounded closure of a formula set under the kernel rules, with contradiction search.

A run starts from a seed and applies every enabled rule once per depth level
(``kernel.depth1_steps``), keeping one representative per alpha-class.  Rule-C
witnesses are named deterministically, so reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .kernel import (
    ALL_RULES, STANDARD_RULES, RuleId, WitnessNamer, depth1_steps, rule_id,
)
from .parser import pretty_print
from .syntax import Maps, Not, alpha_equivalent, canonical

MAX_DEPTH = 4
DEFAULT_CAP = 50_000

STAGES = ("Sigma", "Upsilon", "Phi", "Omega")
_EXTRA_RULES = {RuleId.I3, RuleId.I4, RuleId.I5, RuleId.I6}


class SaturationError(ValueError):
    pass


@dataclass(frozen=True)
class Origin:
    rule: Optional[RuleId]  # None for seed formulas
    premises: tuple  # canonical keys
    label: str = ""
    depth: int = 0


@dataclass(frozen=True)
class SaturationState:
    stage: str
    depth: int
    formulas: tuple
    term_pool: tuple
    rule_set: frozenset
    truncated: bool = False
    counts: tuple = ()  # formula count after each depth level, starting with the seed
    origins: dict = field(default_factory=dict, compare=False, repr=False)

    def keys(self) -> set:
        return {canonical(f) for f in self.formulas}

    def __contains__(self, phi) -> bool:
        return canonical(phi) in self.origins

    def mapping_atoms(self) -> set:
        return {canonical(f) for f in self.formulas if isinstance(f, Maps)}

    def summary(self) -> str:
        lines = [f"stage {self.stage}", f"rules {' '.join(sorted(r.value for r in self.rule_set))}"]
        lines += [f"depth {i} formulas {n}" for i, n in enumerate(self.counts)]
        lines.append("truncated yes" if self.truncated else "truncated no")
        return "\n".join(lines) + "\n"


def stage_of(rules) -> str:
    rules = {rule_id(r) for r in rules}
    if rules & _EXTRA_RULES:
        return "Omega"
    if RuleId.I2 in rules:
        return "Phi"
    if RuleId.I1 in rules:
        return "Upsilon"
    return "Sigma"


def stage_rules(stage: str) -> frozenset:
    """Rule set for a named stage: standard rules, then I1, then I2, then the rest."""
    base = set(STANDARD_RULES)
    if stage == "Sigma":
        return frozenset(base)
    if stage == "Upsilon":
        return frozenset(base | {RuleId.I1})
    if stage == "Phi":
        return frozenset(base | {RuleId.I1, RuleId.I2})
    if stage == "Omega":
        return frozenset(ALL_RULES)
    raise SaturationError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")


def _seed_items(seed):
    for i, item in enumerate(seed, 1):
        if isinstance(item, tuple):
            label, phi = item
            yield str(label), phi
        else:
            yield f"SEED.{i}", item


def saturate(seed: Iterable, rule_set=ALL_RULES, term_pool: Iterable = (), max_depth: int = 1,
             cap: int = DEFAULT_CAP, stage: Optional[str] = None) -> SaturationState:
    """Close ``seed`` under at most ``max_depth`` rounds of ``rule_set``.

    ``seed`` items are formulas or ``(label, formula)`` pairs.  When the
    number of formulas would pass ``cap`` the run stops and the state is
    flagged as truncated.
    """
    if not 0 <= max_depth <= MAX_DEPTH:
        raise SaturationError(f"depth must be between 0 and {MAX_DEPTH}, got {max_depth}")
    rules = frozenset(rule_id(r) for r in rule_set)
    pool = tuple(term_pool)
    origins: dict = {}
    order: list = []
    for label, phi in _seed_items(seed):
        key = canonical(phi)
        if key not in origins:
            origins[key] = Origin(None, (), label, 0)
            order.append(phi)
    counts = [len(order)]
    namer = WitnessNamer()
    truncated = False
    for depth in range(1, max_depth + 1):
        fresh = []
        for phi, rule, used in depth1_steps(order, rules, pool, namer=namer):
            key = canonical(phi)
            if key in origins:
                continue
            if len(order) + len(fresh) >= cap:
                truncated = True
                break
            origins[key] = Origin(rule, tuple(canonical(u) for u in used), "", depth)
            fresh.append(phi)
        fresh.sort(key=pretty_print)
        order.extend(fresh)
        counts.append(len(order))
        if truncated or not fresh:
            break
    return SaturationState(stage or stage_of(rules), len(counts) - 1, tuple(order), pool, rules,
                           truncated, tuple(counts), origins)


# ------------------------------------------------------------ contradictions


@dataclass(frozen=True)
class ContradictionWitness:
    phi: object
    negation: object
    provenance: tuple  # (chain for phi, chain for its negation), proof-script text
    found: tuple = ()  # the two formulas as they occur in the state


def _polarity(phi):
    """Strip double negations: ``(core, negated?)``."""
    neg = False
    while isinstance(phi, Not):
        phi = phi.body
        neg = not neg
    return phi, neg


def find_contradiction(state: SaturationState) -> Optional[ContradictionWitness]:
    """Some phi and its negation in the state, modulo alpha and double negation."""
    seen: dict = {}
    for phi in state.formulas:
        core, neg = _polarity(phi)
        key = canonical(core)
        entry = seen.setdefault(key, {})
        entry.setdefault(neg, phi)
        if len(entry) == 2:
            pos, negf = entry[False], entry[True]
            chains = (derivation_chain(state, pos), derivation_chain(state, negf))
            return ContradictionWitness(core, Not(core), chains, (pos, negf))
    return None


def derivation_chain(state: SaturationState, phi) -> str:
    """Ancestry of ``phi`` in the state, written as a proof script."""
    by_key = {canonical(f): f for f in state.formulas}
    ordered: list = []
    seen: set = set()

    def visit(key):
        if key in seen:
            return
        seen.add(key)
        for k in state.origins[key].premises:
            visit(k)
        ordered.append(key)

    visit(canonical(phi))
    numbers = {k: i for i, k in enumerate(ordered, 1)}
    lines = []
    for k in ordered:
        o = state.origins[k]
        text = pretty_print(by_key[k])
        if o.rule is None:
            just = f"axiom {o.label}" if "." in o.label else f"axiom SEED.{o.label}"
        else:
            cited = ",".join(str(numbers[p]) for p in o.premises)
            just = f"from {cited} by {o.rule.value}" if cited else f"by {o.rule.value}"
        lines.append(f"{numbers[k]}. {text} ; {just}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ staged runs


def staged_run(seed, term_pool=(), max_depth: int = 1, schedule=("Sigma", "Upsilon", "Phi"),
               cap: int = DEFAULT_CAP) -> dict:
    """One saturation per stage in ``schedule``, all from the same seed."""
    return {name: saturate(seed, stage_rules(name), term_pool, max_depth, cap, stage=name)
            for name in schedule}


def new_mapping_atoms(before: SaturationState, after: SaturationState) -> list:
    """Mapping atoms of ``after`` with no alpha-variant in ``before``."""
    extra = after.mapping_atoms() - before.mapping_atoms()
    return sorted((f for f in after.formulas if canonical(f) in extra), key=pretty_print)


def is_witness_consistent(w: ContradictionWitness) -> bool:
    return alpha_equivalent(w.negation, Not(w.phi))
