"""Build a working knowledge base from the packaged assets.

Creates <dest>/kb with the compiled glass benchmarks, an empty
<dest>/escalations outbox, and <dest>/config.json pointing at everything,
ready for `claims validate --config <dest>/config.json`.
"""

from __future__ import annotations

import argparse
import json
import shutil
from pathlib import Path

from claimlogic.adjudicator import compile_benchmark
from claimlogic.corpus import DOC_TYPE, SUBTYPES, load_benchmark_source
from claimlogic.lexicon import load_lexicon
from claimlogic.ontology import load_ontology
from claimlogic.store import Store

ASSETS = Path(__file__).resolve().parent.parent / "src" / "claimlogic" / "assets"


def build(dest: Path, force: bool = False) -> Path:
    if dest.exists() and force:
        shutil.rmtree(dest)
    dest.mkdir(parents=True, exist_ok=True)

    lexicon_path = dest / "lexicon.txt"
    ontology_path = dest / "ontology.ont"
    shutil.copyfile(ASSETS / "demo_lexicon.txt", lexicon_path)
    shutil.copyfile(ASSETS / "car_glass.ont", ontology_path)

    lexicon = load_lexicon(lexicon_path)
    ontology = load_ontology(ontology_path)

    kb_path = dest / "kb"
    store = Store(kb_path)
    store.initialize()
    for subtype in SUBTYPES:
        payload = compile_benchmark(load_benchmark_source(subtype), lexicon, ontology)
        store.put_benchmark(DOC_TYPE, subtype, payload)

    escalation_dir = dest / "escalations"
    escalation_dir.mkdir(exist_ok=True)

    config_path = dest / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "budget_ms": 500,
                "max_clauses": 20000,
                "match_budget_ms": 150,
                "max_edit": 1,
                "lexicon_path": "lexicon.txt",
                "ontology_path": "ontology.ont",
                "kb_path": "kb",
                "escalation_dir": "escalations",
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return config_path


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="workdir", help="output directory (default: workdir)")
    parser.add_argument("--force", action="store_true", help="wipe an existing destination first")
    args = parser.parse_args()
    config_path = build(Path(args.dest), args.force)
    print(f"knowledge base ready; config at {config_path}")


if __name__ == "__main__":
    main()
