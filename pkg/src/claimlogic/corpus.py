"""Synthetic bill corpus with per-bill ground truth.

Bills are assembled directly from benchmark data: each line is either the
benchmark wording, a paraphrase that still matches it, or known extra work
that matches nothing.  Because amounts are sampled against the same caps
the adjudicator enforces, the expected status and approved amount follow
arithmetically, without running the engine.  Corrupted bills carry defects
built to be mechanically undecidable (unparseable, ambiguous, or
arithmetically inconsistent), so their ground truth is always escalation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .adjudicator import (
    Bill,
    BillLine,
    bill_from_dict,
    bill_to_dict,
    compile_benchmark,
    round_half_up,
)
from .lexicon import Lexicon
from .ontology import Ontology

ASSET_ROOT = Path(__file__).parent / "assets"

DOC_TYPE = "glass"
SUBTYPES = ("windscreen", "rear_window")

CORRUPTIONS = (
    "scrambled-token",
    "truncated-line",
    "negative-amount",
    "line-arithmetic",
    "ambiguous-pronoun",
    "no-classification",
    "double-classification",
)

# paraphrases per subtype: benchmark line index -> alternative wordings that
# still match that line (verified to score at least 3/5 against it and 0
# against every other line of the same benchmark)
_VARIANTS: dict[str, dict[int, tuple[str, ...]]] = {
    "windscreen": {
        0: (
            "Exchange the cracked windscreen.",
            "Replace the cracked windshield.",
            "Replace the windscreen.",
            "Windscreen replacement.",
        ),
        1: ("Remove the seal.",),
        2: ("Fit a new seal.",),
    },
    "rear_window": {
        0: ("Exchange the rear window.", "Rear window replacement."),
        1: ("Remove the seal.",),
        2: ("Fit a new seal.",),
        9: ("Polish the panel.",),
    },
}

# work outside both benchmarks; matches no benchmark line
_EXTRA_WORK = ("Polish the bonnet.", "Rotate the tyre.", "Replace the filter.")

# quantities above 1 only where the line plausibly carries them
_MULTI_QUANTITY = {
    "Clean the work area.": (Fraction(1), Fraction(3, 2), Fraction(2)),
    "Replace the wiper blade.": (Fraction(1), Fraction(2)),
}

_AMBIGUOUS_LINE = "Remove the seal. Remove the moulding. Clean it."
_UNCLASSIFIED_LINE = "Polish the bonnet."


@dataclass(frozen=True)
class GroundTruth:
    status: str  # AUTO_APPROVED | AUTO_REDUCED | ESCALATED
    approved_minor: Optional[int]
    deduction_minor: int
    corruption: Optional[str] = None


@dataclass(frozen=True)
class CorpusItem:
    bill: Bill
    truth: GroundTruth


def load_benchmark_source(subtype: str) -> dict:
    """Authored benchmark file: texts, caps and source excerpts."""
    path = ASSET_ROOT / "benchmarks" / DOC_TYPE / f"{subtype}.json"
    return json.loads(path.read_text())


def stock_store(store, lexicon: Lexicon, ontology: Ontology) -> None:
    """Compile the packaged benchmarks and load them into a knowledge store."""
    for subtype in SUBTYPES:
        payload = compile_benchmark(load_benchmark_source(subtype), lexicon, ontology)
        store.put_benchmark(DOC_TYPE, subtype, payload)


def _scramble_word(word: str, lexicon: Lexicon, rng: random.Random) -> str:
    """A corruption of the word that no lexicon entry is uniquely close to."""
    letters = list(word)
    for _ in range(40):
        rng.shuffle(letters)
        candidate = "".join(letters)
        if candidate != word and lexicon.correct(candidate, 1) is None:
            return candidate
    candidate = word
    while lexicon.correct(candidate, 1) is not None:
        candidate += "qx"
    return candidate


def _truncate_line(text: str) -> str:
    """Cut the first sentence right after its determiner; the fragment can
    never parse because the grammar has no determiner-final production."""
    words = text.split()
    for i, w in enumerate(words):
        if w.lower() in ("the", "a", "an") and i >= 1:
            return " ".join(words[: i + 1]) + "."
    return words[0] + " the."


@dataclass
class _Draft:
    subtype: str
    texts: list[str]
    quantities: list[Fraction]
    prices: list[int]
    deductions: list[int]  # expected deduction per line


def _draft_bill(rng: random.Random, with_overage: bool, with_extra: bool) -> _Draft:
    subtype = rng.choice(SUBTYPES)
    bench_lines = load_benchmark_source(subtype)["lines"]

    available = list(range(1, len(bench_lines)))
    picked = [0] + sorted(rng.sample(available, rng.randint(2, 7)))
    rng.shuffle(picked)

    texts: list[str] = []
    quantities: list[Fraction] = []
    prices: list[int] = []
    deductions: list[int] = []
    overage_lines = set(rng.sample(picked, min(len(picked), rng.randint(1, 2)))) if with_overage else set()

    for j in picked:
        bl = bench_lines[j]
        max_q = Fraction(bl["max_quantity"])
        max_p = int(bl["max_unit_price"])
        text = bl["text"]
        variants = _VARIANTS[subtype].get(j)
        if variants and rng.random() < 0.4:
            text = rng.choice(variants)
        if text in _MULTI_QUANTITY:
            q = rng.choice([x for x in _MULTI_QUANTITY[text] if x <= max_q])
        else:
            q = Fraction(1)
        p = max(1, (max_p * rng.randint(70, 100)) // 100)
        if j in overage_lines:
            if rng.random() < 0.5:
                p = (max_p * rng.randint(105, 135)) // 100
            else:
                q = max_q + 1
        billed = round_half_up(q * p)
        allowed = round_half_up(min(q, max_q) * min(p, max_p))
        texts.append(text)
        quantities.append(q)
        prices.append(p)
        deductions.append(max(0, billed - allowed))

    if with_extra:
        text = rng.choice(_EXTRA_WORK)
        q = Fraction(1)
        p = rng.randint(500, 2500)
        pos = rng.randrange(len(texts) + 1)
        texts.insert(pos, text)
        quantities.insert(pos, q)
        prices.insert(pos, p)
        deductions.insert(pos, round_half_up(q * p))  # whole line unmatched

    return _Draft(subtype, texts, quantities, prices, deductions)


def _finish(draft: _Draft, bill_id: str, doc_date: str) -> CorpusItem:
    lines = tuple(
        BillLine(i + 1, t, q, p, round_half_up(q * p))
        for i, (t, q, p) in enumerate(zip(draft.texts, draft.quantities, draft.prices))
    )
    bill = Bill(bill_id, doc_date, lines)
    total = bill.total_minor
    deduction = sum(draft.deductions)
    status = "AUTO_REDUCED" if deduction else "AUTO_APPROVED"
    return CorpusItem(bill, GroundTruth(status, total - deduction, deduction))


def _replace_text(line: BillLine, text: str) -> BillLine:
    return BillLine(line.pos, text, line.quantity, line.unit_price_minor, line.line_total_minor)


def _corrupt(item: CorpusItem, kind: str, lexicon: Lexicon, rng: random.Random) -> CorpusItem:
    bill = item.bill
    lines = list(bill.lines)

    # the line whose text carries the subtype is always the benchmark's
    # first line or a paraphrase of it; every wording mentions the panel
    def subtype_line() -> int:
        needles = ("windscreen", "windshield", "rear window")
        for i, l in enumerate(lines):
            if any(n in l.text.lower() for n in needles):
                return i
        return 0

    if kind == "scrambled-token":
        i = rng.randrange(len(lines))
        words = lines[i].text.rstrip(".").split()
        targets = [k for k, w in enumerate(words) if len(w) >= 5 and w.isalpha()]
        k = rng.choice(targets) if targets else len(words) - 1
        words[k] = _scramble_word(words[k].lower(), lexicon, rng)
        lines[i] = _replace_text(lines[i], " ".join(words) + ".")
    elif kind == "truncated-line":
        i = rng.randrange(len(lines))
        lines[i] = _replace_text(lines[i], _truncate_line(lines[i].text))
    elif kind == "negative-amount":
        i = rng.randrange(len(lines))
        l = lines[i]
        lines[i] = BillLine(l.pos, l.text, l.quantity, -l.unit_price_minor, -l.line_total_minor)
    elif kind == "line-arithmetic":
        i = rng.randrange(len(lines))
        l = lines[i]
        lines[i] = BillLine(
            l.pos, l.text, l.quantity, l.unit_price_minor,
            l.line_total_minor + rng.randint(1, 400),
        )
    elif kind == "ambiguous-pronoun":
        i = rng.randrange(len(lines))
        lines[i] = _replace_text(lines[i], _AMBIGUOUS_LINE)
    elif kind == "no-classification":
        lines[subtype_line()] = _replace_text(lines[subtype_line()], _UNCLASSIFIED_LINE)
    elif kind == "double-classification":
        is_windscreen = any(
            "windscreen" in l.text.lower() or "windshield" in l.text.lower() for l in lines
        )
        other = "Replace the rear window." if is_windscreen else "Replace the windscreen."
        q, p = Fraction(1), rng.randint(5000, 20000)
        lines.append(BillLine(len(lines) + 1, other, q, p, round_half_up(q * p)))
    else:
        raise ValueError(f"unknown corruption {kind}")

    corrupted = Bill(bill.bill_id, bill.doc_date, tuple(lines))
    return CorpusItem(corrupted, GroundTruth("ESCALATED", None, 0, corruption=kind))


def generate_corpus(
    lexicon: Lexicon,
    count: int = 200,
    corrupt_every: int = 4,
    seed: int = 2024,
) -> list[CorpusItem]:
    """Deterministic corpus: every corrupt_every-th bill carries one
    corruption (cycling through all kinds); the rest are clean with exact
    expected amounts."""
    rng = random.Random(seed)
    items: list[CorpusItem] = []
    corruption_cursor = 0
    for i in range(count):
        with_overage = rng.random() < 0.45
        with_extra = rng.random() < 0.2
        draft = _draft_bill(rng, with_overage, with_extra)
        doc_date = f"2026-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
        item = _finish(draft, f"BILL-{i:04d}", doc_date)
        if corrupt_every and i % corrupt_every == corrupt_every - 1:
            kind = CORRUPTIONS[corruption_cursor % len(CORRUPTIONS)]
            corruption_cursor += 1
            item = _corrupt(item, kind, lexicon, rng)
        items.append(item)
    return items


def corpus_to_jsonl(items: list[CorpusItem]) -> str:
    rows = []
    for item in items:
        rows.append(json.dumps({
            "bill": bill_to_dict(item.bill),
            "truth": {
                "status": item.truth.status,
                "approved": item.truth.approved_minor,
                "deduction": item.truth.deduction_minor,
                "corruption": item.truth.corruption,
            },
        }, sort_keys=True))
    return "\n".join(rows) + "\n"


def corpus_from_jsonl(text: str) -> list[CorpusItem]:
    items = []
    for line in text.splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        t = row["truth"]
        items.append(CorpusItem(
            bill_from_dict(row["bill"]),
            GroundTruth(t["status"], t["approved"], t["deduction"], t["corruption"]),
        ))
    return items
