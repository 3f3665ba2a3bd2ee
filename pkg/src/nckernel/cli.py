"""Command line entry point: ``nckernel <verb> [options]``.

Exit codes: 0 success, 1 rejected / contradiction / unexpected failure,
2 usage error, 3 input parse error.  Reports go to stdout, diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .parser import (
    ParseError, WellFormednessError, parse_formula, parse_formula_file, parse_proof_script,
    parse_term, pretty_print, pretty_term,
)
from .syntax import LanguageId
from .theories import SchemaError, TheoryError

EXIT_OK, EXIT_REJECTED, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3
DATA_ENV = "NONCLASSICAL_KERNEL_DATA"
REPLAY_FIXTURES = ("eq42-derivation", "prop6-derivation", "sumf-unfold-3")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


# --------------------------------------------------------------- data files


def fixture_dir() -> Path:
    override = os.environ.get(DATA_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("nckernel") / "data" / "fixtures"))


def golden_dir() -> Path:
    override = os.environ.get(DATA_ENV)
    if override and (Path(override) / "golden").is_dir():
        return Path(override) / "golden"
    return Path(str(resources.files("nckernel") / "data" / "golden"))


def resolve_input(name: str) -> Path:
    """A path as given, or else looked up in the fixture directory."""
    p = Path(name)
    if p.is_file():
        return p
    parts = p.parts[1:] if p.parts and p.parts[0] == "fixtures" else p.parts
    candidate = fixture_dir().joinpath(*parts) if parts else None
    if candidate is not None and candidate.is_file():
        return candidate
    raise UsageError(f"no such file: {name}")


def _read(name: str) -> str:
    return resolve_input(name).read_text(encoding="utf-8")


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _lines(text: str) -> list:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def _formulas(name: str, lang) -> list:
    try:
        return parse_formula_file(_read(name), lang)
    except (ParseError, WellFormednessError) as exc:
        raise InputError(f"{name}: {exc}") from exc


# ------------------------------------------------------------------- verbs


def cmd_parse(args, out) -> int:
    for phi in _formulas(args.file, args.lang):
        out.write(pretty_print(phi) + "\n")
    return EXIT_OK


def cmd_instantiate(args, out) -> int:
    from .theories import load_theory

    theory = load_theory(args.theory)
    schema = theory.schema(args.schema)
    try:
        if schema.parameters == ("formula",):
            if args.formula is None:
                raise UsageError(f"schema {args.schema} needs --formula")
            phi = schema.instantiate(_parse(args.formula, theory.language))
        elif schema.parameters == ("m", "n"):
            if args.size is None:
                raise UsageError(f"schema {args.schema} needs --size MxN")
            m, n = _size(args.size)
            phi = schema.instantiate(m, n)
        else:
            phi = schema.instantiate()
    except SchemaError as exc:
        raise InputError(str(exc)) from exc
    out.write(pretty_print(phi) + "\n")
    return EXIT_OK


def _size(text: str):
    try:
        m, n = text.lower().split("x")
        return int(m), int(n)
    except ValueError:
        raise UsageError(f"bad size {text!r}; expected e.g. 1x2") from None


def _parse(text, lang):
    try:
        return parse_formula(text, lang)
    except (ParseError, WellFormednessError) as exc:
        raise InputError(str(exc)) from exc


def cmd_check(args, out) -> int:
    from .kernel import check_proof

    try:
        script = parse_proof_script(_read(args.file))
    except (ParseError, WellFormednessError, ValueError) as exc:
        raise InputError(f"{args.file}: {exc}") from exc
    if args.without is not None:
        script = script.without(args.without)
    verdict = check_proof(script, args.theory)
    text = verdict.report()
    out.write(text)
    if args.report:
        _write(args.report, text)
    return EXIT_OK if verdict.accepted else EXIT_REJECTED


def cmd_translate(args, out) -> int:
    from .syntax import alpha_equivalent
    from .translator import TranslationError, translate

    sources = _formulas(args.input, LanguageId.LT_STANDARD)
    expected = _formulas(args.expect, LanguageId.LSMT_1X2_PLUS4) if args.expect else None
    if expected is not None and len(expected) != len(sources):
        out.write(f"MISMATCH {len(sources)} inputs but {len(expected)} expected formulas\n")
        return EXIT_REJECTED
    lines, audit, status = [], [], EXIT_OK
    for i, phi in enumerate(sources, 1):
        try:
            trace = translate(phi)
        except TranslationError as exc:
            print(f"formula {i}: {exc}", file=sys.stderr)
            lines.append(f"{i} ERROR {exc}")
            status = EXIT_REJECTED
            continue
        lines.append(pretty_print(trace.output))
        audit += [f"{i}\t{line}" for line in trace.audit_lines()]
        if expected is not None:
            same = alpha_equivalent(trace.output, expected[i - 1])
            lines.append(f"{i} {'MATCH' if same else 'MISMATCH'}")
            status = status if same else EXIT_REJECTED
    text = "\n".join(lines) + "\n"
    out.write(text)
    if args.report:
        _write(args.report, text)
    if args.audit:
        _write(args.audit, "\n".join(audit) + "\n")
    return status


def cmd_model_check(args, out) -> int:
    from .modelcheck import (
        admissible_index_sets, check_axioms, enumerate_universe, ModelError, sum_f_search,
    )

    try:
        S = enumerate_universe(args.rank, args.graph_slack)
    except ModelError as exc:
        raise UsageError(str(exc)) from exc
    expected = [x for x in (args.expect_fail or "").split(",") if x]
    sep = _lines(_read(args.sep_pool)) if args.sep_pool else None
    rep = _lines(_read(args.rep_pool)) if args.rep_pool else None
    report = check_axioms(args.theory, S, expected, sep, rep, include_schemata=not args.no_schemata)
    text = f"theory {args.theory}\nstructure {S.describe()}\n" + report.text(timing=not args.no_timing)
    ok = report.accepted
    if args.sum_f:
        xs = admissible_index_sets(S)
        results = [sum_f_search(S, x) for x in xs]
        good = sum(r.holds for r in results)
        text += (f"sum-f admissible {len(xs)} holds {good} families {sum(r.families for r in results)}"
                 f" excluded {sum(r.excluded for r in results)}\n")
        ok = ok and good == len(xs)
    text += "ACCEPTED\n" if ok else "REJECTED\n"
    out.write(text)
    if args.report:
        _write(args.report, text)
    if args.figure:
        from .plotting import axiom_report_figure
        axiom_report_figure(report, args.figure)
    return EXIT_OK if ok else EXIT_REJECTED


def _term_pool(args) -> list:
    texts = []
    if args.pool:
        texts += _lines(_read(args.pool))
    if args.terms:
        texts += [t.strip() for t in args.terms.split(";") if t.strip()]
    try:
        return [parse_term(t) for t in texts]
    except ParseError as exc:
        raise InputError(f"term pool: {exc}") from exc


def _seed(args) -> list:
    from .theories import instantiate_replacement, instantiate_separation, load_theory, reverse_graph_axiom

    seed = []
    if args.seed:
        seed += [(f"SEED.{i}", phi) for i, phi in enumerate(_formulas(args.seed, LanguageId.LT), 1)]
    if args.theory:
        theory = load_theory(args.theory)
        seed += [(str(aid), phi) for aid, phi in theory.axioms]
        lang = theory.language
    else:
        lang = LanguageId.LT
    for text in args.sep or ():
        seed.append((f"GAMMA.SEP[{text}]", instantiate_separation(_parse(text, lang))))
    for text in args.rep or ():
        seed.append((f"GAMMA.REP[{text}]", instantiate_replacement(_parse(text, lang))))
    if args.rev_graph:
        seed.append(("GAMMA.REV-GRAPH", reverse_graph_axiom()))
    if not seed:
        raise UsageError("saturate needs --seed or --theory")
    return seed


def cmd_saturate(args, out) -> int:
    from .saturate import (
        SaturationError, find_contradiction, new_mapping_atoms, saturate, stage_rules, staged_run,
    )

    seed = _seed(args)
    pool = _term_pool(args)
    try:
        if args.stage == "staged":
            states = staged_run(seed, pool, args.depth, cap=args.cap)
        else:
            states = {args.stage: saturate(seed, stage_rules(args.stage), pool, args.depth, args.cap,
                                           stage=args.stage)}
    except SaturationError as exc:
        raise UsageError(str(exc)) from exc
    status = EXIT_OK
    chunks = []
    for name, state in states.items():
        chunks.append(state.summary())
        if state.truncated:
            chunks.append(f"TRUNCATED at {args.cap} formulas\n")
            status = EXIT_REJECTED
        witness = find_contradiction(state)
        if witness is None:
            chunks.append("contradiction none\n")
        else:
            status = EXIT_REJECTED
            chunks.append(f"contradiction {pretty_print(witness.phi)}\n")
            chunks.append("# derivation of the formula\n" + witness.provenance[0])
            chunks.append("# derivation of its negation\n" + witness.provenance[1])
    if "Sigma" in states and "Phi" in states:
        extra = new_mapping_atoms(states["Sigma"], states["Phi"])
        chunks.append(f"new mapping atoms after I2 {len(extra)}\n")
        status = status if not extra else EXIT_REJECTED
    text = "".join(chunks)
    out.write(text)
    if args.report:
        _write(args.report, text)
    if args.figure:
        from .plotting import saturation_figure
        saturation_figure(states, args.figure)
    return status


# ------------------------------------------------------------------ replay


def replay_output(name: str) -> str:
    """The deterministic text a bundled scenario produces."""
    if name in ("eq42-derivation", "prop6-derivation"):
        from .kernel import check_proof
        script = parse_proof_script(_read(f"{name}.prf"))
        verdict = check_proof(script)
        return f"scenario {name}\ntheory {script.theory}\nsteps {len(script.steps)}\n" + verdict.report()
    if name == "sumf-unfold-3":
        return _sumf_unfold(_read("sumf-unfold-3.txt"))
    raise UsageError(f"unknown fixture {name!r}; known: {', '.join(REPLAY_FIXTURES)}")


def _sumf_unfold(text: str) -> str:
    from .modelcheck import distinct_set_valuations, enumerate_universe, eval_formula
    from .syntax import alpha_equivalent, free_variables, unfold
    from .theories import sum_f_instance

    settings = {k.strip(): v.strip() for k, v in (line.split("=", 1) for line in _lines(text))}
    elements = [parse_term(t.strip()) for t in settings["elements"].split(",")]
    rank = int(settings.get("rank", "2"))
    slack = int(settings.get("graph_slack", "0"))
    element_rank = int(settings["element_rank"]) if "element_rank" in settings else None
    standard, nonstandard = sum_f_instance(elements)
    unfolded = unfold(nonstandard)
    S = enumerate_universe(rank, slack)
    free = sorted(free_variables(standard), key=lambda v: v.name)
    total = agree = true = 0
    for v in distinct_set_valuations(free, S, element_rank):
        total += 1
        value = eval_formula(standard, S, v)
        true += value
        agree += value == eval_formula(nonstandard, S, v)
    same = alpha_equivalent(unfolded, standard)
    lines = [
        "scenario sumf-unfold-3",
        f"elements {', '.join(pretty_term(e) for e in elements)}",
        f"nonstandard {pretty_print(nonstandard)}",
        f"unfolded {pretty_print(unfolded)}",
        f"standard {pretty_print(standard)}",
        f"alpha-equivalent {'yes' if same else 'no'}",
        f"structure {S.describe()}",
        f"valuations {total} agreeing {agree} true {true} (distinct sets for the elements)",
        "EQUIVALENT" if same and agree == total else "DIFFERENT",
    ]
    return "\n".join(lines) + "\n"


def cmd_replay(args, out) -> int:
    if args.fixture not in REPLAY_FIXTURES:
        print(f"unknown fixture {args.fixture!r}; known: {', '.join(REPLAY_FIXTURES)}", file=sys.stderr)
        return EXIT_USAGE
    text = replay_output(args.fixture)
    golden = golden_dir() / f"{args.fixture}.golden"
    if args.bless:
        _write(golden, text)
        out.write(text)
        return EXIT_OK
    if not golden.is_file():
        print(f"missing golden file {golden}", file=sys.stderr)
        return EXIT_USAGE
    out.write(text)
    if golden.read_text(encoding="utf-8") != text:
        print(f"output differs from {golden}", file=sys.stderr)
        return EXIT_REJECTED
    return EXIT_OK


# ---------------------------------------------------------------- argparse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nckernel", description="Proof kernel, translator and finite model checker.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="file of 'key = value' lines giving option defaults")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("parse", help="parse and pretty-print a formula file")
    s.add_argument("file")
    s.add_argument("--lang", default="LT", choices=[x.value for x in LanguageId])
    s.set_defaults(run=cmd_parse)

    s = sub.add_parser("instantiate", help="print a schema instance")
    s.add_argument("--theory", default="T")
    s.add_argument("--schema", required=True)
    s.add_argument("--formula")
    s.add_argument("--size", help="matrix size for matrix schemata, e.g. 1x2")
    s.set_defaults(run=cmd_instantiate)

    s = sub.add_parser("check", help="check a proof script")
    s.add_argument("file")
    s.add_argument("--theory", help="override the theory named in the script")
    s.add_argument("--without", type=int, metavar="STEP", help="drop one step before checking")
    s.add_argument("--report")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("translate", help="translate standard formulas into the 1x2 matrix language")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--expect", help="formulas the translations must match up to bound names")
    s.add_argument("--audit", help="write the clause log here")
    s.add_argument("--report")
    s.set_defaults(run=cmd_translate)

    s = sub.add_parser("model-check", help="evaluate a theory in a finite structure")
    s.add_argument("--theory", default="T")
    s.add_argument("--rank", type=int, default=3)
    s.add_argument("--graph-slack", type=int, default=0)
    s.add_argument("--expect-fail", default="")
    s.add_argument("--sep-pool", help="file of separation formulas (hole alpha)")
    s.add_argument("--rep-pool", help="file of replacement formulas (holes alpha, beta)")
    s.add_argument("--no-schemata", action="store_true")
    s.add_argument("--no-timing", action="store_true", help="print '-' instead of elapsed ms")
    s.add_argument("--sum-f", action="store_true", help="also brute-force the sum of ur-functions")
    s.add_argument("--report")
    s.add_argument("--figure", help="write a PNG/SVG/PDF chart of the report")
    s.set_defaults(run=cmd_model_check)

    s = sub.add_parser("saturate", help="bounded closure and contradiction search")
    s.add_argument("--theory")
    s.add_argument("--seed", help="file of seed formulas")
    s.add_argument("--sep", action="append", help="add a separation instance (repeatable)")
    s.add_argument("--rep", action="append", help="add a replacement instance (repeatable)")
    s.add_argument("--rev-graph", action="store_true", help="add the reversed-graph axiom")
    s.add_argument("--pool", help="file of ground terms, one per line")
    s.add_argument("--terms", help="ground terms separated by ';'")
    s.add_argument("--depth", type=int, default=1)
    s.add_argument("--cap", type=int, default=50_000)
    s.add_argument("--stage", default="staged", choices=["Sigma", "Upsilon", "Phi", "Omega", "staged"])
    s.add_argument("--report")
    s.add_argument("--figure")
    s.set_defaults(run=cmd_saturate)

    s = sub.add_parser("replay", help="rerun a bundled scenario against its golden output")
    s.add_argument("fixture")
    s.add_argument("--bless", action="store_true", help="rewrite the golden file")
    s.set_defaults(run=cmd_replay)
    return p


def _read_config(path: str) -> dict:
    out = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser, argv, config: dict) -> argparse.Namespace:
    """Parse ``argv`` with config values as defaults; flags still win."""
    first = parser.parse_args(argv)
    verb_parser = parser._subparsers._group_actions[0].choices[first.verb]
    actions = {a.dest: a for a in verb_parser._actions}
    defaults = {}
    for key, value in config.items():
        if key not in actions or key in ("help", "run"):
            raise UsageError(f"config key {key!r} is not an option of {first.verb}")
        action = actions[key]
        if action.type is not None:
            value = action.type(value)
        elif action.const is True:
            value = value.lower() in ("1", "true", "yes", "on")
        defaults[key] = value
    verb_parser.set_defaults(**defaults)
    return parser.parse_args(argv)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(parser, argv, _read_config(args.config))
        return args.run(args, out)
    except (UsageError, TheoryError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ParseError, WellFormednessError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
