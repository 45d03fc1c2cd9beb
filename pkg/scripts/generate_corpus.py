"""Generate the synthetic glass-claim corpus with ground truth.

Writes <out>/corpus.jsonl (one bill + expected outcome per record) and, with
--bills, a <out>/bills/ directory of plain bill JSON files suitable for
`claims batch --dir <out>/bills --config ...`.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from claimlogic.adjudicator import bill_to_dict
from claimlogic.corpus import corpus_to_jsonl, generate_corpus
from claimlogic.lexicon import load_lexicon

ASSETS = Path(__file__).resolve().parent.parent / "src" / "claimlogic" / "assets"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="corpus", help="output directory (default: corpus)")
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--corrupt-every", type=int, default=4,
                        help="every Nth bill carries one corruption (default: 4)")
    parser.add_argument("--bills", action="store_true",
                        help="also write one plain bill JSON file per record")
    args = parser.parse_args()

    lexicon = load_lexicon(ASSETS / "demo_lexicon.txt")
    items = generate_corpus(lexicon, count=args.count,
                            corrupt_every=args.corrupt_every, seed=args.seed)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jsonl = out / "corpus.jsonl"
    jsonl.write_text(corpus_to_jsonl(items), encoding="utf-8")

    corrupted = sum(1 for it in items if it.truth.corruption is not None)
    print(f"{len(items)} bills ({corrupted} corrupted) -> {jsonl}")

    if args.bills:
        bill_dir = out / "bills"
        bill_dir.mkdir(exist_ok=True)
        for item in items:
            path = bill_dir / f"{item.bill.bill_id}.json"
            path.write_text(json.dumps(bill_to_dict(item.bill), indent=2) + "\n",
                            encoding="utf-8")
        print(f"bill files -> {bill_dir}")


if __name__ == "__main__":
    main()
