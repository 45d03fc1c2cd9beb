"""End-to-end walkthrough: discourse analysis, proving, and bill validation.

Builds a scratch knowledge base under .demo/, runs the packaged example
bills through the adjudicator, and prints what happened at each stage.
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "scripts"))

from build_kb import ASSETS, build  # noqa: E402

from claimlogic.adjudicator import adjudicate, adjudication_to_dict, bill_from_dict  # noqa: E402
from claimlogic.config import load_config, load_engine  # noqa: E402
from claimlogic.formulas import render  # noqa: E402
from claimlogic.lexicon import load_lexicon  # noqa: E402
from claimlogic.lowering import lower  # noqa: E402
from claimlogic.ontology import load_ontology  # noqa: E402
from claimlogic.prover import Budget, Verdict, entails_formulas  # noqa: E402
from claimlogic.semantics import analyze_text  # noqa: E402


def show(title: str) -> None:
    print()
    print(f"--- {title}")


def money(minor) -> str:
    if minor is None:
        return "-"
    sign = "-" if minor < 0 else ""
    return f"{sign}{abs(minor) // 100}.{abs(minor) % 100:02d}"


def main() -> None:
    lexicon = load_lexicon(ASSETS / "demo_lexicon.txt")
    discourse_ont = load_ontology(ASSETS / "demo.ont")

    show("discourse: negation licenses an intensional reading")
    text = "John's father did not return. Now John is searching for him."
    analysis = analyze_text(text, lexicon, discourse_ont)
    print(f"  {text}")
    print(f"  => {render(analysis.discourse_formula())}")

    show("scope ambiguity: both readings, then a one-way entailment check")
    analysis = analyze_text("Every man loves one woman.", lexicon, discourse_ont)
    de_dicto, de_re = analysis.readings[0]
    print(f"  de dicto: {render(de_dicto)}")
    print(f"  de re:    {render(de_re)}")
    budget = Budget(2000, 50000)
    fwd = entails_formulas([de_re], de_dicto, budget)
    back = entails_formulas([de_dicto], de_re, budget)
    print(f"  de re -> de dicto: {fwd.verdict.name}; converse: {back.verdict.name}")

    show("knowledge-backed anaphora: the adjective decides the antecedent")
    for adjective in ("slow", "quick"):
        text = f"The cat caught the mouse because it was {adjective}."
        analysis = analyze_text(text, lexicon, discourse_ont)
        print(f"  {text:55s} => {render(analysis.discourse_formula())}")

    show("bill validation against the glass benchmarks")
    workdir = ROOT / ".demo"
    if workdir.exists():
        shutil.rmtree(workdir)
    config = load_config(build(workdir))
    engine = load_engine(config)
    for name in ("windscreen_full", "windscreen_reduced", "rear_window_clean",
                 "windscreen_escalates"):
        data = json.loads((ASSETS / "bills" / f"{name}.json").read_text())
        bill = bill_from_dict(data)
        adj = adjudicate(bill, engine.kb, engine.ontology, engine.lexicon,
                         engine.adjudicator_config)
        print(f"  {bill.bill_id}: {adj.status.name:13s} "
              f"billed {money(adj.total_minor):>9s}  approved {money(adj.approved_minor):>9s}")
        for d in adj.deductions:
            print(f"      line {d.line + 1}: -{money(d.amount_minor)}  {d.justification}")
        for e in adj.escalations:
            where = f"line {e.line + 1}: " if e.line is not None else ""
            print(f"      {where}{e.code}: {e.detail}")
        engine.kb.append_audit(adjudication_to_dict(adj))

    show("audit chain")
    head = engine.kb.verify_chain()
    print(f"  {head} records verified; chain intact")
    print(f"\nscratch knowledge base left in {workdir}")


if __name__ == "__main__":
    main()
