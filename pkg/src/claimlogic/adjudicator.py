"""Bill adjudication: parse every line, classify the document against the
ontology's classification targets, retrieve the matching benchmark, match
lines by logical equivalence, and price the differences.

Money is integer minor units throughout; quantities are exact rationals
and the single rounding step is round-half-up at the line level.  Any
linguistic or logical doubt (unparseable line, ambiguity, classification
failure, prover timeout, arithmetic inconsistency) escalates with a
machine-readable reason instead of producing a monetary verdict.  The
adjudication carries an ordered trace of every step taken, and identical
inputs serialize to byte-identical reports.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .lexicon import Lexicon
from .lowering import (
    DeltaSet,
    FormulaError,
    LoweringError,
    lower,
    parse_delta,
    serialize_delta,
)
from .matcher import (
    Assignment,
    MatchGraph,
    build_match_graph,
    group_lines,
    solve_assignment,
)
from .ontology import Ontology
from .prover import Budget, EquivalenceVerdict, Verdict, entails, saturate
from .semantics import AnaphoraError, SemanticsError, analyze_text

# escalation reason codes; frozen vocabulary, tested verbatim
UNKNOWN_TOKEN = "UNKNOWN_TOKEN"
UNGRAMMATICAL = "UNGRAMMATICAL"
AMBIGUOUS_PRONOUN = "AMBIGUOUS_PRONOUN"
UNRESOLVED_PRONOUN = "UNRESOLVED_PRONOUN"
MULTIPLE_READINGS = "MULTIPLE_READINGS"
NESTED_EXISTENTIAL = "NESTED_EXISTENTIAL"
HIGHER_ORDER = "HIGHER_ORDER"
INCONSISTENT_BILL = "INCONSISTENT_BILL"
UNCLASSIFIED = "UNCLASSIFIED"
NOT_FOUND = "NOT_FOUND"
BENCHMARK_INVALID = "BENCHMARK_INVALID"
PROVER_TIMEOUT = "PROVER_TIMEOUT"
INCOMPLETE_MATCH_GRAPH = "INCOMPLETE_MATCH_GRAPH"
LINE_TOTAL_MISMATCH = "LINE_TOTAL_MISMATCH"
EMPTY_BILL = "EMPTY_BILL"
MISSING_ID = "MISSING_ID"
NEGATIVE_AMOUNT = "NEGATIVE_AMOUNT"

# deduction codes
UNMATCHED_LINE = "UNMATCHED_LINE"
QUANTITY_ABOVE_BENCHMARK = "QUANTITY_ABOVE_BENCHMARK"
PRICE_ABOVE_BENCHMARK = "PRICE_ABOVE_BENCHMARK"
QUANTITY_AND_PRICE_ABOVE_BENCHMARK = "QUANTITY_AND_PRICE_ABOVE_BENCHMARK"

_SEMANTIC_CODES = {
    "unknown-token": UNKNOWN_TOKEN,
    "ungrammatical": UNGRAMMATICAL,
    "ambiguous-pronoun": AMBIGUOUS_PRONOUN,
    "unresolved-pronoun": UNRESOLVED_PRONOUN,
    "nested-existential": NESTED_EXISTENTIAL,
    "higher-order": HIGHER_ORDER,
    "ambiguous": MULTIPLE_READINGS,
}

# one-directional matches at or below this score are too weak to accept
REVIEW_THRESHOLD = Fraction(1, 2)


class Status(Enum):
    AUTO_APPROVED = "AUTO_APPROVED"
    AUTO_REDUCED = "AUTO_REDUCED"
    ESCALATED = "ESCALATED"


def round_half_up(x: Fraction) -> int:
    """Round a non-negative rational to the nearest integer, halves up."""
    if x < 0:
        raise ValueError("round_half_up expects a non-negative amount")
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


# ---------------------------------------------------------------------------
# documents


class DocumentError(Exception):
    pass


class PreconditionError(DocumentError):
    """A caller handed over a document violating its stated invariants."""


@dataclass(frozen=True)
class BillLine:
    pos: int
    text: str
    quantity: Fraction
    unit_price_minor: int
    line_total_minor: int


@dataclass(frozen=True)
class Bill:
    bill_id: str
    doc_date: str
    lines: tuple[BillLine, ...]
    free_text: str = ""

    @property
    def total_minor(self) -> int:
        return sum(l.line_total_minor for l in self.lines)


@dataclass(frozen=True)
class BenchmarkLine:
    text: str
    delta: DeltaSet
    max_quantity: Fraction
    max_unit_price_minor: int
    source: str  # justification excerpt quoted in deduction reports


@dataclass(frozen=True)
class Benchmark:
    benchmark_id: str
    doc_type: str
    subtype: str
    lines: tuple[BenchmarkLine, ...]
    doc_features: tuple[str, ...] = ()
    source: str = ""  # document-level scope note, quoted for unmatched items


def _fraction_from(value) -> Fraction:
    if isinstance(value, bool):
        raise DocumentError(f"bad quantity {value!r}")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"bad quantity {value!r}") from exc
    raise DocumentError(f"bad quantity {value!r}")


def _int_from(value, label: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"{label} must be an integer amount in minor units, got {value!r}")
    return value


def bill_from_dict(data: dict) -> Bill:
    """Schema check only: field presence and types.  Arithmetic and sign
    violations are the adjudicator's business and escalate rather than
    raising here, so corrupted documents still get an auditable verdict."""
    if not isinstance(data, dict):
        raise DocumentError("bill must be a JSON object")
    try:
        lines = tuple(
            BillLine(
                pos=_int_from(l["pos"], "pos"),
                text=str(l["text"]),
                quantity=_fraction_from(l["qty"]),
                unit_price_minor=_int_from(l["unit_price_minor"], "unit_price_minor"),
                line_total_minor=_int_from(l["total_minor"], "total_minor"),
            )
            for l in data["lines"]
        )
        return Bill(
            bill_id=str(data["id"]),
            doc_date=str(data["date"]),
            lines=lines,
            free_text=str(data.get("free_text", "")),
        )
    except KeyError as exc:
        raise DocumentError(f"bill is missing field {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise DocumentError(f"bill is malformed: {exc}") from exc


def bill_to_dict(bill: Bill) -> dict:
    out = {
        "id": bill.bill_id,
        "date": bill.doc_date,
        "lines": [
            {
                "pos": l.pos,
                "text": l.text,
                "qty": str(l.quantity) if l.quantity.denominator != 1 else l.quantity.numerator,
                "unit_price_minor": l.unit_price_minor,
                "total_minor": l.line_total_minor,
            }
            for l in bill.lines
        ],
    }
    if bill.free_text:
        out["free_text"] = bill.free_text
    return out


def benchmark_from_dict(data: dict) -> Benchmark:
    try:
        return Benchmark(
            benchmark_id=str(data["id"]),
            doc_type=str(data["type"]),
            subtype=str(data["subtype"]),
            doc_features=tuple(str(f) for f in data.get("doc_features", ())),
            source=str(data.get("source", "")),
            lines=tuple(
                BenchmarkLine(
                    text=str(l["text"]),
                    delta=parse_delta(l["delta"]),
                    max_quantity=_fraction_from(l["max_quantity"]),
                    max_unit_price_minor=_int_from(l["max_unit_price"], "max_unit_price"),
                    source=str(l.get("source", "")),
                )
                for l in data["lines"]
            ),
        )
    except KeyError as exc:
        raise DocumentError(f"benchmark is missing field {exc.args[0]!r}") from exc
    except (TypeError, FormulaError) as exc:
        raise DocumentError(f"benchmark is malformed: {exc}") from exc


def benchmark_to_dict(b: Benchmark) -> dict:
    return {
        "id": b.benchmark_id,
        "type": b.doc_type,
        "subtype": b.subtype,
        "doc_features": list(b.doc_features),
        "source": b.source,
        "lines": [
            {
                "text": l.text,
                "delta": serialize_delta(l.delta),
                "max_quantity": str(l.max_quantity),
                "max_unit_price": l.max_unit_price_minor,
                "source": l.source,
            }
            for l in b.lines
        ],
    }


def compile_benchmark(data: dict, lexicon: Lexicon, ontology: Ontology) -> dict:
    """Compile an authored benchmark (texts, caps and source excerpts) into
    its stored form: every line gains its lowered clause set and the
    document gains its derived feature bag.  Lines are lowered
    independently, so stored clause sets are position-free.  Authored text
    must parse cleanly and unambiguously; no spelling correction applies.
    """
    features: Counter[str] = Counter()
    lines: list[dict] = []
    try:
        for l in data["lines"]:
            text = str(l["text"])
            try:
                analysis = analyze_text(text, lexicon, ontology, max_edit=0)
            except SemanticsError as exc:
                raise DocumentError(f"benchmark line {text!r} does not parse: {exc}") from exc
            if any(n != 1 for n in analysis.context.readings_per_sentence()):
                raise DocumentError(f"benchmark line {text!r} is ambiguous")
            chosen = analysis.context.unambiguous_readings()
            assert chosen is not None
            delta = lower(chosen, analysis.context, canonical=ontology.canonical_word)
            features.update(sorted(delta.predicate_names()))
            lines.append(
                {
                    "text": text,
                    "delta": serialize_delta(delta),
                    "max_quantity": str(_fraction_from(l["max_quantity"])),
                    "max_unit_price": _int_from(l["max_unit_price"], "max_unit_price"),
                    "source": str(l.get("source", "")),
                }
            )
        return {
            "id": str(data["id"]),
            "type": str(data["type"]),
            "subtype": str(data["subtype"]),
            "doc_features": sorted(features.elements()),
            "source": str(data.get("source", "")),
            "lines": lines,
        }
    except KeyError as exc:
        raise DocumentError(f"benchmark is missing field {exc.args[0]!r}") from exc


# ---------------------------------------------------------------------------
# adjudication result


@dataclass(frozen=True)
class Escalation:
    code: str
    detail: str
    line: Optional[int] = None  # 0-based bill line index, when applicable


@dataclass(frozen=True)
class Deduction:
    line: int  # bill line index
    amount_minor: int
    code: str
    justification: str
    benchmark_line: Optional[int] = None


@dataclass
class Adjudication:
    bill_id: str
    status: Status
    approved_minor: Optional[int]
    total_minor: int
    deductions: tuple[Deduction, ...] = ()
    escalations: tuple[Escalation, ...] = ()
    classification: Optional[tuple[str, str]] = None
    benchmark_id: Optional[str] = None
    assignment: Optional[Assignment] = None
    matches: tuple[tuple[int, int, Fraction, str], ...] = ()  # (line, bench, score, relation)
    groups: tuple[tuple[int, ...], ...] = ()
    flags: tuple[tuple[str, str], ...] = ()
    trace: tuple[str, ...] = ()


def adjudication_to_dict(adj: Adjudication) -> dict:
    """Complete report payload.  Serialize with canonical JSON for the
    byte-identical-output guarantee; this dict carries no volatile fields
    (no timestamps, no durations)."""
    return {
        "bill": adj.bill_id,
        "status": adj.status.value,
        "approved_minor": adj.approved_minor,
        "total_minor": adj.total_minor,
        "classification": list(adj.classification) if adj.classification else None,
        "benchmark": adj.benchmark_id,
        "deductions": [
            {
                "line": d.line,
                "amount_minor": d.amount_minor,
                "code": d.code,
                "justification": d.justification,
                "benchmark_line": d.benchmark_line,
            }
            for d in adj.deductions
        ],
        "escalations": [
            {"code": e.code, "detail": e.detail, "line": e.line} for e in adj.escalations
        ],
        "assignment": None
        if adj.assignment is None
        else {
            "pairs": [list(p) for p in adj.assignment.pairs],
            "unmatched_bill": list(adj.assignment.unmatched_bill),
            "unmatched_benchmark": list(adj.assignment.unmatched_benchmark),
            "total_score": str(adj.assignment.total_score),
        },
        "matches": [
            {"line": i, "benchmark_line": j, "score": str(s), "relation": r}
            for i, j, s, r in adj.matches
        ],
        "groups": [list(g) for g in adj.groups],
        "flags": [list(f) for f in adj.flags],
        "trace": list(adj.trace),
    }


# ---------------------------------------------------------------------------
# vectorization


@dataclass(frozen=True)
class LineMark:
    """Escalation-grade failure recorded against one line; the other lines
    are still processed."""

    line: int
    code: str
    detail: str


@dataclass
class BillVector:
    logical: tuple[Optional[DeltaSet], ...]  # None where the line failed
    quantitative: tuple[tuple[Fraction, int, int], ...]
    doc_features: tuple[str, ...]  # bag: one entry per line mentioning a predicate
    marks: tuple[LineMark, ...] = ()
    nouns: tuple[frozenset[str], ...] = ()
    flags: tuple[tuple[str, str], ...] = ()

    def deltas(self) -> list[DeltaSet]:
        return [d for d in self.logical if d is not None]

    def predicate_names(self) -> set[str]:
        out: set[str] = set()
        for d in self.deltas():
            out |= d.predicate_names()
        return out


_EVENT_NAME = re.compile(r"e(\d+)\Z")


def _max_indices(delta: DeltaSet) -> tuple[int, int]:
    """Largest witness-constant and event-constant indices in a clause set."""
    best_sk = 0
    best_ev = 0
    for c in delta.fol:
        for _, _, args in c.literals:
            for t in args:
                index = getattr(t, "index", None)
                if isinstance(index, int):
                    best_sk = max(best_sk, index)
                name = getattr(t, "name", "")
                m = _EVENT_NAME.fullmatch(name) if isinstance(name, str) else None
                if m:
                    best_ev = max(best_ev, int(m.group(1)))
    for a, b in delta.temporal:
        for name in (a, b):
            m = _EVENT_NAME.fullmatch(name)
            if m:
                best_ev = max(best_ev, int(m.group(1)))
    return best_sk, best_ev


# analyses are pure functions of (text, lexicon, ontology, max_edit); bills
# repeat line texts heavily, so completed analyses are kept per process.
# Entries pin the lexicon and ontology so the id-based key cannot be reused.
_ANALYSIS_CACHE: dict[tuple, tuple] = {}


def _analyze_cached(text: str, lexicon: Lexicon, ontology: Ontology, max_edit: int):
    key = (text, id(lexicon), id(ontology), max_edit)
    hit = _ANALYSIS_CACHE.get(key)
    if hit is not None:
        value = hit[2]
        if isinstance(value, Exception):
            raise value
        return value
    try:
        analysis = analyze_text(text, lexicon, ontology, max_edit=max_edit)
    except SemanticsError as exc:
        _ANALYSIS_CACHE[key] = (lexicon, ontology, exc)
        raise
    _ANALYSIS_CACHE[key] = (lexicon, ontology, analysis)
    return analysis


def line_invariant_violations(bill: Bill) -> list[Escalation]:
    """Structural failures: empty bill, missing id, negative quantities or
    amounts, line totals that disagree with quantity times unit price."""
    out: list[Escalation] = []
    if not bill.lines:
        out.append(Escalation(EMPTY_BILL, "bill has no lines"))
        return out
    if not bill.bill_id:
        out.append(Escalation(MISSING_ID, "bill id is empty"))
    for i, line in enumerate(bill.lines):
        if line.quantity < 0 or line.unit_price_minor < 0 or line.line_total_minor < 0:
            out.append(Escalation(NEGATIVE_AMOUNT, "negative quantity or amount", i))
        elif round_half_up(line.quantity * line.unit_price_minor) != line.line_total_minor:
            out.append(
                Escalation(
                    LINE_TOTAL_MISMATCH,
                    f"{line.quantity} x {line.unit_price_minor} != {line.line_total_minor}",
                    i,
                )
            )
    return out


def vectorize(
    bill: Bill,
    lexicon: Lexicon,
    ontology: Ontology,
    max_edit: int = 1,
) -> BillVector:
    """Lower each line to its clause set; quantities are copied verbatim.

    Lines are independent discourses, but witness constants are numbered
    consecutively across lines so the combined clause set stays
    collision-free.  A line the pipeline cannot process is recorded as a
    mark and the remaining lines are still processed; the caller decides
    whether marks escalate.  Handing over a bill that violates its own
    arithmetic invariants is a precondition violation and raises.
    """
    violations = line_invariant_violations(bill)
    if violations:
        raise PreconditionError(
            "; ".join(f"{v.code}: {v.detail}" for v in violations)
        )
    logical: list[Optional[DeltaSet]] = []
    nouns: list[frozenset[str]] = []
    marks: list[LineMark] = []
    flags: list[tuple[str, str]] = []
    features: Counter[str] = Counter()
    skolem_start = 1
    event_start = 1
    for i, line in enumerate(bill.lines):
        try:
            analysis = _analyze_cached(line.text, lexicon, ontology, max_edit)
        except AnaphoraError as exc:
            marks.append(LineMark(i, _SEMANTIC_CODES[exc.code], str(exc)))
            logical.append(None)
            nouns.append(frozenset())
            continue
        except SemanticsError as exc:
            marks.append(LineMark(i, _SEMANTIC_CODES.get(exc.code, UNGRAMMATICAL), str(exc)))
            logical.append(None)
            nouns.append(frozenset())
            continue
        per_sentence = analysis.context.readings_per_sentence()
        if any(n != 1 for n in per_sentence):
            marks.append(
                LineMark(i, MULTIPLE_READINGS, f"line {i + 1} has {max(per_sentence)} readings")
            )
            logical.append(None)
            nouns.append(frozenset())
            continue
        chosen = analysis.context.unambiguous_readings()
        assert chosen is not None
        try:
            delta = lower(
                chosen,
                analysis.context,
                skolem_start=skolem_start,
                canonical=ontology.canonical_word,
                event_start=event_start,
            )
        except LoweringError as exc:
            marks.append(
                LineMark(i, _SEMANTIC_CODES.get(exc.code, NESTED_EXISTENTIAL), str(exc))
            )
            logical.append(None)
            nouns.append(frozenset())
            continue
        max_sk, max_ev = _max_indices(delta)
        skolem_start = max(skolem_start, max_sk + 1)
        event_start = max(event_start, max_ev + 1)
        logical.append(delta)
        nouns.append(
            frozenset(ontology.canonical_word(r.predicate) for r in analysis.context.referents)
        )
        features.update(sorted(delta.predicate_names()))
        flags.extend(analysis.context.flags)
    return BillVector(
        logical=tuple(logical),
        quantitative=tuple(
            (l.quantity, l.unit_price_minor, l.line_total_minor) for l in bill.lines
        ),
        doc_features=tuple(sorted(features.elements())),
        marks=tuple(marks),
        nouns=tuple(nouns),
        flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# classification and retrieval


def classify(
    v: BillVector,
    ontology: Ontology,
    budget: Budget,
) -> tuple[Optional[tuple[str, str]], list[Escalation]]:
    """Entailment classification: the combined clause set must entail
    exactly one classification axiom.  Axiom names follow
    ``classify_<type>_<subtype>`` where the type segment contains no
    underscore.  Zero or multiple hits yield no classification."""
    clauses = [c for d in v.deltas() for c in d.fol]
    if not clauses:
        return None, [Escalation(UNCLASSIFIED, "bill has no logical payload")]
    context = ontology.select_context(v.predicate_names()).clauses
    premise = clauses + list(context)

    consistency = saturate(premise, budget)
    if consistency.verdict is Verdict.PROVED:
        return None, [Escalation(INCONSISTENT_BILL, "bill contradicts the ontology")]
    if consistency.verdict is Verdict.TIMEOUT:
        return None, [Escalation(PROVER_TIMEOUT, "consistency check timed out")]

    entailed: list[str] = []
    for axiom in ontology.classification_axioms():
        result = entails(premise, axiom.formula, budget, sos=True)
        if result.verdict is Verdict.TIMEOUT:
            return None, [
                Escalation(PROVER_TIMEOUT, f"classification against {axiom.name} timed out")
            ]
        if result.verdict is Verdict.PROVED:
            entailed.append(axiom.name)
    if not entailed:
        return None, [Escalation(UNCLASSIFIED, "no classification target entailed")]
    if len(entailed) > 1:
        return None, [
            Escalation(UNCLASSIFIED, f"entails {', '.join(sorted(entailed))}")
        ]
    name = entailed[0]
    rest = name[len("classify_"):] if name.startswith("classify_") else name
    doc_type, _, subtype = rest.partition("_")
    if not subtype:
        return None, [
            Escalation(UNCLASSIFIED, f"axiom {name} does not name a type and subtype")
        ]
    return (doc_type, subtype), []


def _feature_overlap(a: Sequence[str], b: Sequence[str]) -> int:
    return sum((Counter(a) & Counter(b)).values())


def retrieve_benchmark(
    kb, doc_type: str, subtype: str, v: BillVector
) -> tuple[Optional[Benchmark], str, list[Escalation]]:
    """Exact (type, subtype) hit preferred; otherwise the same-type
    benchmark with maximal doc-feature overlap, ties broken by benchmark
    id.  Returns the benchmark, a short retrieval note for the trace, and
    any escalations."""

    def load(t: str, s: str) -> tuple[Optional[Benchmark], list[Escalation]]:
        payload = kb.get_benchmark(t, s)
        if payload is None:
            return None, []
        try:
            return benchmark_from_dict(payload), []
        except DocumentError as exc:
            return None, [Escalation(BENCHMARK_INVALID, f"{t}/{s}: {exc}")]

    exact, errors = load(doc_type, subtype)
    if errors:
        return None, "", errors
    if exact is not None:
        return exact, "exact", []
    candidates: list[Benchmark] = []
    for t, s in kb.list_benchmarks():
        if t != doc_type or s == subtype:
            continue
        sibling, errors = load(t, s)
        if errors:
            return None, "", errors
        if sibling is not None:
            candidates.append(sibling)
    if not candidates:
        return None, "", [
            Escalation(NOT_FOUND, f"no benchmark for {doc_type}/{subtype}")
        ]
    best = min(
        candidates,
        key=lambda b: (-_feature_overlap(b.doc_features, v.doc_features), b.benchmark_id),
    )
    overlap = _feature_overlap(best.doc_features, v.doc_features)
    return best, f"sibling {best.subtype}, feature overlap {overlap}", []


# ---------------------------------------------------------------------------
# justification


def justify(deductions: Sequence[Deduction], benchmark: Benchmark) -> list[str]:
    """One justification string per deduction, built from fixed templates
    and the benchmark's own source text."""
    out: list[str] = []
    for d in deductions:
        if d.code == UNMATCHED_LINE:
            out.append(f"Item not covered by benchmark {benchmark.benchmark_id}: {benchmark.source}")
            continue
        assert d.benchmark_line is not None
        excerpt = benchmark.lines[d.benchmark_line].source
        if d.code == PRICE_ABOVE_BENCHMARK:
            out.append(f"Unit price exceeds benchmark maximum by {d.amount_minor}: {excerpt}")
        elif d.code == QUANTITY_ABOVE_BENCHMARK:
            out.append(f"Quantity exceeds benchmark maximum by {d.amount_minor}: {excerpt}")
        else:
            out.append(
                f"Quantity and unit price exceed benchmark maxima by {d.amount_minor}: {excerpt}"
            )
    return out


# ---------------------------------------------------------------------------
# adjudication


@dataclass
class AdjudicatorConfig:
    match_budget: Budget = field(default_factory=lambda: Budget(150, 20000))
    entail_budget: Budget = field(default_factory=lambda: Budget(500, 20000))
    max_edit: int = 1


def _escalated(
    bill: Bill,
    escalations: Sequence[Escalation],
    trace: list[str],
    **kw,
) -> Adjudication:
    for e in escalations:
        where = f" (line {e.line + 1})" if e.line is not None else ""
        trace.append(f"escalate: {e.code}{where}")
    return Adjudication(
        bill_id=bill.bill_id,
        status=Status.ESCALATED,
        approved_minor=None,
        total_minor=bill.total_minor,
        escalations=tuple(escalations),
        trace=tuple(trace),
        **kw,
    )


def adjudicate(
    bill: Bill,
    kb,
    ontology: Ontology,
    lexicon: Lexicon,
    config: Optional[AdjudicatorConfig] = None,
) -> Adjudication:
    config = config or AdjudicatorConfig()
    trace: list[str] = [f"structural: {len(bill.lines)} lines, total {bill.total_minor}"]

    structural = line_invariant_violations(bill)
    if structural:
        return _escalated(bill, structural, trace)

    v = vectorize(bill, lexicon, ontology, config.max_edit)
    lowered = sum(1 for d in v.logical if d is not None)
    trace.append(f"vectorize: {lowered}/{len(bill.lines)} lines lowered")
    if v.marks:
        return _escalated(
            bill,
            [Escalation(m.code, m.detail, m.line) for m in v.marks],
            trace,
            flags=v.flags,
        )

    classification, classify_escalations = classify(v, ontology, config.entail_budget)
    if classify_escalations:
        return _escalated(bill, classify_escalations, trace, flags=v.flags)
    assert classification is not None
    doc_type, subtype = classification
    trace.append(f"classify: {doc_type}/{subtype}")

    benchmark, how, retrieve_escalations = retrieve_benchmark(kb, doc_type, subtype, v)
    if retrieve_escalations:
        return _escalated(
            bill, retrieve_escalations, trace, classification=classification, flags=v.flags
        )
    assert benchmark is not None
    trace.append(f"retrieve: {benchmark.benchmark_id} ({how})")

    names = v.predicate_names()
    for line in benchmark.lines:
        names |= line.delta.predicate_names()
    background = ontology.select_context(names).clauses

    bill_deltas = list(v.logical)
    assert all(d is not None for d in bill_deltas)
    graph = build_match_graph(
        bill_deltas,  # type: ignore[arg-type]
        [l.delta for l in benchmark.lines],
        ontology,
        config.match_budget,
        background=background,
    )
    if graph.incomplete:
        return _escalated(
            bill,
            [
                Escalation(
                    INCOMPLETE_MATCH_GRAPH,
                    "a pairwise equivalence check exceeded its budget",
                )
            ],
            trace,
            classification=classification,
            benchmark_id=benchmark.benchmark_id,
            flags=v.flags,
        )
    assignment = solve_assignment(graph)
    relation = {(i, j): (score, verdict) for i, j, score, verdict in graph.edges}

    # contract guard: one-directional matches at or below the acceptance
    # threshold are not usable matches
    accepted: list[tuple[int, int]] = []
    rejected: list[int] = []
    for i, j in assignment.pairs:
        if relation[(i, j)][0] > REVIEW_THRESHOLD:
            accepted.append((i, j))
        else:
            rejected.append(i)
    if rejected:
        assignment = Assignment(
            accepted,
            sorted(assignment.unmatched_bill + rejected),
            [j for j in range(len(benchmark.lines)) if j not in {p[1] for p in accepted}],
            sum((relation[p][0] for p in accepted), Fraction(0)),
        )
    trace.append(
        f"match: {len(assignment.pairs)} paired, "
        f"{len(assignment.unmatched_bill)} bill unmatched, "
        f"{len(assignment.unmatched_benchmark)} benchmark unused, "
        f"score {assignment.total_score}"
    )

    flags = list(v.flags)
    for i, j in assignment.pairs:
        score, verdict = relation[(i, j)]
        if verdict is not EquivalenceVerdict.EQUIVALENT:
            flags.append(
                (
                    "REVIEW",
                    f"line {i + 1} matches benchmark line {j + 1} "
                    f"one-directionally (score {score})",
                )
            )

    matched_by_line = dict(assignment.pairs)
    deductions: list[Deduction] = []
    for i, line in enumerate(bill.lines):
        if i not in matched_by_line:
            deductions.append(
                Deduction(i, line.line_total_minor, UNMATCHED_LINE, "")
            )
            continue
        j = matched_by_line[i]
        bench_line = benchmark.lines[j]
        qty_cap = min(line.quantity, bench_line.max_quantity)
        price_cap = min(line.unit_price_minor, bench_line.max_unit_price_minor)
        allowed = round_half_up(qty_cap * price_cap)
        excess = line.line_total_minor - allowed
        if excess > 0:
            over_qty = line.quantity > bench_line.max_quantity
            over_price = line.unit_price_minor > bench_line.max_unit_price_minor
            if over_qty and over_price:
                code = QUANTITY_AND_PRICE_ABOVE_BENCHMARK
            elif over_qty:
                code = QUANTITY_ABOVE_BENCHMARK
            else:
                code = PRICE_ABOVE_BENCHMARK
            deductions.append(Deduction(i, excess, code, "", benchmark_line=j))
    justifications = justify(deductions, benchmark)
    deductions = [
        Deduction(d.line, d.amount_minor, d.code, text, d.benchmark_line)
        for d, text in zip(deductions, justifications)
    ]
    trace.append(
        f"deduct: {len(deductions)} deductions totalling "
        f"{sum(d.amount_minor for d in deductions)}"
    )

    approved = bill.total_minor - sum(d.amount_minor for d in deductions)
    # conservation: approved plus deductions reconstructs the bill exactly
    assert approved + sum(d.amount_minor for d in deductions) == bill.total_minor

    groups = group_lines([set(n) for n in v.nouns], ontology)
    matches = tuple(
        (i, j, relation[(i, j)][0], relation[(i, j)][1].value) for i, j in assignment.pairs
    )
    status = Status.AUTO_REDUCED if deductions else Status.AUTO_APPROVED
    trace.append(f"status: {status.value}, approved {approved}")
    return Adjudication(
        bill_id=bill.bill_id,
        status=status,
        approved_minor=approved,
        total_minor=bill.total_minor,
        deductions=tuple(deductions),
        classification=classification,
        benchmark_id=benchmark.benchmark_id,
        assignment=assignment,
        matches=matches,
        groups=tuple(tuple(g) for g in groups),
        flags=tuple(flags),
        trace=tuple(trace),
    )


def line_deltas_text(v: BillVector) -> str:
    return "\n".join(serialize_delta(d) for d in v.deltas())
