"""Command line interface.

Exit codes follow one scheme across subcommands: 0 for a completed
positive result, 2 for a completed negative or escalated result
(unparseable or ambiguous input, ESCALATED adjudication, REFUTED goal),
and 1 for operational errors (missing files, malformed JSON, bad config).
Scope-ambiguous sentences are not failures: parse prints every reading
and exits 0.  Ambiguous anaphora is a failure: there is no single
resolvable meaning, so parse exits 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, Engine, RunConfig, load_config, load_engine

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2
EXIT_TIMEOUT = 3


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SystemExit(_fail(f"cannot read {path}: {exc}"))


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def _load_engine(config_path: str) -> tuple["RunConfig", Engine]:
    try:
        config = load_config(config_path)
        return config, load_engine(config)
    except ConfigError as exc:
        raise SystemExit(_fail(str(exc)))


# ---------------------------------------------------------------------------
# parse / lower


def _analyze(text: str, engine_paths: tuple[str, str], max_edit: int):
    from .lexicon import LexiconError, load_lexicon
    from .ontology import OntologyError, load_ontology
    from .semantics import analyze_text

    try:
        lexicon = load_lexicon(engine_paths[0])
        ontology = load_ontology(engine_paths[1])
    except (OSError, LexiconError, OntologyError) as exc:
        raise SystemExit(_fail(str(exc)))
    return analyze_text(text, lexicon, ontology, max_edit=max_edit), lexicon, ontology


def _default_assets() -> tuple[str, str]:
    root = Path(__file__).parent / "assets"
    return str(root / "demo_lexicon.txt"), str(root / "demo.ont")


def cmd_parse(args: argparse.Namespace) -> int:
    from .formulas import render
    from .semantics import AnaphoraError, SemanticsError

    text = _read_text(args.file)
    paths = (args.lexicon, args.ontology) if args.lexicon else _default_assets()
    try:
        analysis, _, _ = _analyze(text, paths, args.max_edit)
    except AnaphoraError as exc:
        print(f"ambiguous: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except SemanticsError as exc:
        print(f"unparseable: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE

    if all(len(r) == 1 for r in analysis.readings):
        formula = analysis.discourse_formula()
        assert formula is not None
        print(render(formula))
        return EXIT_OK
    # scope ambiguity: every reading of every sentence, in derivation order
    first = True
    for readings in analysis.readings:
        if len(analysis.readings) > 1 and not first:
            print()
        first = False
        for f in readings:
            print(render(f))
    return EXIT_OK


def cmd_lower(args: argparse.Namespace) -> int:
    from .lowering import lower, serialize_delta
    from .semantics import AnaphoraError, SemanticsError

    text = _read_text(args.file)
    paths = (args.lexicon, args.ontology) if args.lexicon else _default_assets()
    try:
        analysis, _, ontology = _analyze(text, paths, args.max_edit)
    except AnaphoraError as exc:
        print(f"ambiguous: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except SemanticsError as exc:
        print(f"unparseable: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    chosen = analysis.context.unambiguous_readings()
    if chosen is None:
        print("ambiguous: sentence has multiple scope readings; lowering needs one",
              file=sys.stderr)
        return EXIT_NEGATIVE
    delta = lower(chosen, analysis.context, canonical=ontology.canonical_word)
    sys.stdout.write(serialize_delta(delta))
    return EXIT_OK


# ---------------------------------------------------------------------------
# prove


def cmd_prove(args: argparse.Namespace) -> int:
    from .formulas import FormulaError, parse_formula
    from .lowering import formula_to_clauses
    from .prover import Budget, Verdict, entails

    goal_text = _read_text(args.goal).strip()
    axiom_text = _read_text(args.axioms)
    try:
        goal = parse_formula(goal_text)
        clauses = []
        next_skolem = 1
        for lineno, raw in enumerate(axiom_text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                axiom = parse_formula(line)
            except FormulaError as exc:
                return _fail(f"axioms line {lineno}: {exc}")
            new_clauses, next_skolem = formula_to_clauses(axiom, next_skolem)
            clauses.extend(new_clauses)
    except FormulaError as exc:
        return _fail(str(exc))

    result = entails(clauses, goal, Budget(args.budget_ms, args.max_clauses))
    print(result.verdict.value)
    if result.verdict is Verdict.PROVED:
        return EXIT_OK
    if result.verdict is Verdict.REFUTED:
        return EXIT_NEGATIVE
    return EXIT_TIMEOUT


# ---------------------------------------------------------------------------
# validate / batch


def _adjudicate_file(bill_path: Path, engine: Engine):
    from .adjudicator import DocumentError, adjudicate, bill_from_dict

    try:
        data = json.loads(bill_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValueError(f"cannot read {bill_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{bill_path} is not valid JSON: {exc}") from exc
    try:
        bill = bill_from_dict(data)
    except DocumentError as exc:
        raise ValueError(f"{bill_path}: {exc}") from exc
    return adjudicate(
        bill, engine.kb, engine.ontology, engine.lexicon, engine.adjudicator_config
    )


def _report_bytes(adj) -> str:
    from .adjudicator import adjudication_to_dict
    from .store import canonical_json

    return canonical_json(adjudication_to_dict(adj)) + "\n"


def _write_escalation(adj, report: str, escalation_dir: Path) -> Path:
    safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in adj.bill_id) or "unnamed"
    out = escalation_dir / f"{safe}.json"
    out.write_text(report, encoding="utf-8")
    return out


def cmd_validate(args: argparse.Namespace) -> int:
    run_config, engine = _load_engine(args.config)
    try:
        adj = _adjudicate_file(Path(args.bill), engine)
    except ValueError as exc:
        return _fail(str(exc))
    report = _report_bytes(adj)
    engine.kb.append_audit(json.loads(report))
    if args.out:
        Path(args.out).write_text(report, encoding="utf-8")
    sys.stdout.write(report)
    from .adjudicator import Status

    if adj.status is Status.ESCALATED:
        path = _write_escalation(adj, report, run_config.escalation_dir)
        print(f"escalated: report written to {path}", file=sys.stderr)
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_batch(args: argparse.Namespace) -> int:
    from .adjudicator import Status

    run_config, engine = _load_engine(args.config)
    directory = Path(args.dir)
    if not directory.is_dir():
        return _fail(f"{directory} is not a directory")
    bills = sorted(directory.glob("*.json"))
    if not bills:
        return _fail(f"no *.json bills under {directory}")
    counts = {"AUTO_APPROVED": 0, "AUTO_REDUCED": 0, "ESCALATED": 0, "error": 0}
    for bill_path in bills:
        try:
            adj = _adjudicate_file(bill_path, engine)
        except ValueError as exc:
            counts["error"] += 1
            print(f"{bill_path.name}\terror\t{exc}")
            continue
        report = _report_bytes(adj)
        engine.kb.append_audit(json.loads(report))
        counts[adj.status.value] += 1
        if adj.status is Status.ESCALATED:
            _write_escalation(adj, report, run_config.escalation_dir)
            reasons = ",".join(sorted({e.code for e in adj.escalations}))
            print(f"{bill_path.name}\tESCALATED\t{reasons}")
        else:
            print(f"{bill_path.name}\t{adj.status.value}\tapproved={adj.approved_minor}")
    print(
        f"total={len(bills)} approved={counts['AUTO_APPROVED']} "
        f"reduced={counts['AUTO_REDUCED']} escalated={counts['ESCALATED']} "
        f"errors={counts['error']}"
    )
    return EXIT_OK if counts["error"] == 0 else EXIT_ERROR


# ---------------------------------------------------------------------------
# serve


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    try:
        config = load_config(args.config)
    except ConfigError as exc:
        return _fail(str(exc))
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claims",
        description="Symbolic claims validation: parse controlled English, "
        "lower it to clause logic, prove entailments, and adjudicate bills.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_language_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--lexicon", help="lexicon file (default: packaged demo lexicon)")
        p.add_argument("--ontology", help="ontology file (default: packaged demo ontology)")
        p.add_argument("--max-edit", type=int, default=1,
                       help="spelling correction distance (default 1)")

    p = sub.add_parser("parse", help="parse a text file and print its logical readings")
    p.add_argument("file")
    add_language_args(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("lower", help="lower a text file to its clause set")
    p.add_argument("file")
    add_language_args(p)
    p.set_defaults(func=cmd_lower)

    p = sub.add_parser("prove", help="prove a goal formula from axiom formulas")
    p.add_argument("--goal", required=True, help="file holding one goal formula")
    p.add_argument("--axioms", required=True, help="file with one axiom formula per line")
    p.add_argument("--budget-ms", type=int, default=2000)
    p.add_argument("--max-clauses", type=int, default=50000)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("validate", help="adjudicate one bill against the knowledge base")
    p.add_argument("--bill", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="also write the report to this file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("batch", help="adjudicate every *.json bill in a directory")
    p.add_argument("--dir", required=True)
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("serve", help="run the validation HTTP service")
    p.add_argument("--config", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8732)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
