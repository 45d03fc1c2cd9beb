"""Lowering from discourse representations to first-order clause sets.

Existential elimination introduces witness constants only; an existential
nested under a universal has no function-free witness and raises an
escalation error instead of inventing function symbols.  Tense is reified
into event constants ordered by explicit before-facts, and modal formulas
translate into their two-sorted first-order form over worlds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

from .discourse import DiscourseContext, Occurrence
from .formulas import (
    And,
    Const,
    Exists,
    ForAll,
    Formula,
    FormulaError,
    Func,
    HigherPred,
    Implies,
    Mod,
    ModKind,
    Not,
    Or,
    Pred,
    Skolem,
    Term,
    Tense,
    Var,
    make_term,
    render_term,
    substitute,
)
from .lexicon import MorphTense


class LoweringError(Exception):
    """Base for escalation-worthy lowering failures."""

    code = "lowering-error"


class NestedExistentialError(LoweringError):
    """An existential under a universal cannot be witnessed by a constant."""

    code = "nested-existential"


class HigherOrderInputError(LoweringError):
    """Predicates over formulas have no first-order clause form."""

    code = "higher-order"


class AmbiguousReadingsError(LoweringError):
    """More than one reading survived disambiguation; lowering refuses to
    pick silently."""

    code = "ambiguous"


# ---------------------------------------------------------------------------
# clauses

Literal = tuple[bool, str, tuple[Term, ...]]


@dataclass(frozen=True)
class Clause:
    literals: frozenset[Literal]

    def __len__(self) -> int:
        return len(self.literals)

    @property
    def is_empty(self) -> bool:
        return not self.literals


def make_clause(literals: Iterable[Literal]) -> Clause:
    return Clause(frozenset(literals))


def clause_is_tautology(c: Clause) -> bool:
    pos = {(name, args) for sign, name, args in c.literals if sign}
    return any((name, args) in pos for sign, name, args in c.literals if not sign)


def render_literal(lit: Literal) -> str:
    sign, name, args = lit
    body = name if not args else name + "(" + ",".join(render_term(t) for t in args) + ")"
    return body if sign else "-" + body


def render_clause(c: Clause) -> str:
    if c.is_empty:
        return "false"
    return " | ".join(sorted(render_literal(l) for l in c.literals))


def parse_literal(text: str) -> Literal:
    text = text.strip()
    sign = True
    if text.startswith("-"):
        sign = False
        text = text[1:].strip()
    if "(" in text:
        if not text.endswith(")"):
            raise FormulaError(f"bad literal {text!r}")
        name, argtext = text[:-1].split("(", 1)
        args = tuple(_parse_term_text(a.strip()) for a in _split_args(argtext))
    else:
        name, args = text, ()
    name = name.strip()
    if not name:
        raise FormulaError(f"bad literal {text!r}")
    return (sign, name, args)


def _split_args(argtext: str) -> list[str]:
    # split on commas not nested inside function terms
    parts: list[str] = []
    depth = 0
    current = ""
    for ch in argtext:
        if ch == "," and depth == 0:
            parts.append(current)
            current = ""
        else:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            current += ch
    parts.append(current)
    return parts


def _parse_term_text(text: str) -> Term:
    if "(" in text:
        name, rest = text.split("(", 1)
        if not rest.endswith(")"):
            raise FormulaError(f"bad term {text!r}")
        args = tuple(_parse_term_text(a.strip()) for a in _split_args(rest[:-1]))
        return Func(name.strip(), args)
    return make_term(text)


def parse_clause(text: str) -> Clause:
    if text.strip() == "false":
        return make_clause([])
    return make_clause(parse_literal(part) for part in text.split("|"))


# ---------------------------------------------------------------------------
# delta sets


@dataclass(frozen=True)
class DeltaSet:
    fol: tuple[Clause, ...] = ()
    temporal: tuple[tuple[str, str], ...] = ()  # before(a, b) event pairs
    modal: tuple[Clause, ...] = ()

    def predicate_names(self) -> set[str]:
        return {name for c in self.fol for _, name, _ in c.literals}


def make_delta(
    fol: Iterable[Clause],
    temporal: Iterable[tuple[str, str]] = (),
    modal: Iterable[Clause] = (),
) -> DeltaSet:
    """Canonical DeltaSet: clauses deduplicated and sorted by rendering."""
    unique_fol = sorted(set(fol), key=render_clause)
    unique_modal = sorted(set(modal), key=render_clause)
    unique_temporal = sorted(set(temporal))
    return DeltaSet(tuple(unique_fol), tuple(unique_temporal), tuple(unique_modal))


def serialize_delta(ds: DeltaSet) -> str:
    lines = ["[fol]"]
    lines.extend(render_clause(c) for c in ds.fol)
    lines.append("[temporal]")
    lines.extend(f"before({a},{b})" for a, b in ds.temporal)
    if ds.modal:
        lines.append("[modal]")
        lines.extend(render_clause(c) for c in ds.modal)
    return "\n".join(lines) + "\n"


def parse_delta(text: str) -> DeltaSet:
    section = None
    fol: list[Clause] = []
    temporal: list[tuple[str, str]] = []
    modal: list[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("[fol]", "[temporal]", "[modal]"):
            section = line
            continue
        if section == "[fol]":
            fol.append(parse_clause(line))
        elif section == "[modal]":
            modal.append(parse_clause(line))
        elif section == "[temporal]":
            if not (line.startswith("before(") and line.endswith(")")):
                raise FormulaError(f"line {lineno}: bad temporal fact {line!r}")
            inner = line[len("before(") : -1]
            a, b = (p.strip() for p in inner.split(","))
            temporal.append((a, b))
        else:
            raise FormulaError(f"line {lineno}: content before section header")
    return make_delta(fol, temporal, modal)


# ---------------------------------------------------------------------------
# negation normal form and clausification


def nnf(f: Formula, negate: bool = False) -> Formula:
    if isinstance(f, HigherPred):
        raise HigherOrderInputError(f"cannot lower higher-order predicate {f.name!r}")
    if isinstance(f, (Pred, Mod)):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return nnf(f.body, not negate)
    if isinstance(f, And):
        ctor = Or if negate else And
        return ctor(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, Or):
        ctor = And if negate else Or
        return ctor(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, Implies):
        if negate:
            return And(nnf(f.left, False), nnf(f.right, True))
        return Or(nnf(f.left, True), nnf(f.right, False))
    if isinstance(f, ForAll):
        ctor = Exists if negate else ForAll
        return ctor(f.var, nnf(f.body, negate))
    if isinstance(f, Exists):
        ctor = ForAll if negate else Exists
        return ctor(f.var, nnf(f.body, negate))
    raise FormulaError(f"unknown node {f!r}")


def skolemize(f: Formula, next_index: int, allow_functions: bool = False) -> tuple[Formula, int]:
    """Eliminate existentials from an NNF formula.

    Existentials outside any universal become fresh witness constants.
    Under universals the witness would be a function of the universal
    variables; with allow_functions=False (the clause pipeline) that raises
    NestedExistentialError, with allow_functions=True (internal proof
    search) a function term is introduced.
    """

    counter = next_index

    def walk(g: Formula, universals: tuple[Var, ...]) -> Formula:
        nonlocal counter
        if isinstance(g, (Pred, Mod, Not)):
            return g
        if isinstance(g, (And, Or)):
            return type(g)(walk(g.left, universals), walk(g.right, universals))
        if isinstance(g, ForAll):
            return ForAll(g.var, walk(g.body, universals + (g.var,)))
        if isinstance(g, Exists):
            if universals and not allow_functions:
                raise NestedExistentialError(
                    f"existential {g.var.name} nested under universals "
                    f"{[v.name for v in universals]}"
                )
            witness: Term
            if universals:
                witness = Func(f"sf{counter}", tuple(universals))
            else:
                witness = Skolem(counter)
            counter += 1
            return walk(substitute(g.body, {g.var: witness}), universals)
        if isinstance(g, Implies):
            raise FormulaError("skolemize expects negation normal form")
        raise FormulaError(f"unknown node {g!r}")

    return walk(f, ()), counter


def clausify(f: Formula) -> list[Clause]:
    """CNF clauses of a skolemized NNF formula.  Universal quantifiers are
    dropped; remaining variables are implicitly universal."""

    def strip(g: Formula) -> Formula:
        if isinstance(g, ForAll):
            return strip(g.body)
        if isinstance(g, (And, Or)):
            return type(g)(strip(g.left), strip(g.right))
        return g

    def to_literal(g: Formula) -> Literal:
        if isinstance(g, Pred):
            return (True, _delta_pred_name(g), g.args)
        if isinstance(g, Mod):
            return (True, "mod" if g.kind is ModKind.POSSESSIVE else "amod", (g.x, g.y))
        if isinstance(g, Not):
            sign, name, args = to_literal(g.body)
            return (not sign, name, args)
        raise FormulaError(f"not a literal: {g!r}")

    def cnf(g: Formula) -> list[frozenset[Literal]]:
        if isinstance(g, And):
            return cnf(g.left) + cnf(g.right)
        if isinstance(g, Or):
            left = cnf(g.left)
            right = cnf(g.right)
            return [l | r for l in left for r in right]
        return [frozenset([to_literal(g)])]

    clauses = [Clause(ls) for ls in cnf(strip(f))]
    return [c for c in clauses if not clause_is_tautology(c)]


def _delta_pred_name(p: Pred) -> str:
    # tense subscripts dissolve into event arguments during lowering, but the
    # intensionality marker stays part of the predicate name
    return p.name + ("_i" if p.intensional else "")


def formula_to_clauses(
    f: Formula, next_skolem: int = 1, allow_functions: bool = False
) -> tuple[list[Clause], int]:
    g = nnf(f)
    g, counter = skolemize(g, next_skolem, allow_functions)
    return clausify(g), counter


# ---------------------------------------------------------------------------
# tense reification

_TENSE_RANK = {MorphTense.PAST: 0, MorphTense.PRESENT: 1, MorphTense.FUTURE: 2}


def reify_tense(
    context: DiscourseContext, event_start: int = 1
) -> tuple[dict[int, str], list[tuple[str, str]]]:
    """Assign event constants to tensed verb occurrences and order them.

    Ordering rule: an event of an earlier tense rank precedes any event of
    a later rank; events of equal rank are ordered by sentence position.
    The emitted relation is transitively closed and irreflexive by
    construction, hence a strict partial order.
    """
    events: dict[int, str] = {}
    ranked: list[tuple[int, int, str]] = []  # (rank, sentence, event)
    n = event_start
    for idx, occ in enumerate(context.occurrences):
        if occ.is_verb and occ.tense in _TENSE_RANK:
            name = f"e{n}"
            n += 1
            events[idx] = name
            ranked.append((_TENSE_RANK[occ.tense], occ.sentence, name))
    before: list[tuple[str, str]] = []
    for rank_a, sent_a, ev_a in ranked:
        for rank_b, sent_b, ev_b in ranked:
            if ev_a == ev_b:
                continue
            if rank_a < rank_b or (rank_a == rank_b and sent_a < sent_b):
                before.append((ev_a, ev_b))
    return events, sorted(set(before))


def _attach_events(
    reading: Formula,
    sentence: int,
    occurrences: Sequence[Occurrence],
    events: dict[int, str],
    occ_offsets: dict[int, int],
) -> Formula:
    """Append each tensed verb predicate's event constant to its argument
    list.  Matching is by (name, args) against the sentence's occurrence
    records, in AST order."""

    matched: set[int] = set()

    def match(p: Pred) -> Optional[int]:
        for idx in occ_offsets:
            if idx in matched:
                continue
            occ = occurrences[idx]
            if occ.sentence == sentence and occ.pred_name == p.name and occ.args == p.args:
                return idx
        return None

    def walk(g: Formula) -> Formula:
        if isinstance(g, Pred):
            idx = match(g)
            if idx is not None and idx in events:
                matched.add(idx)
                return Pred(g.name, g.args + (Const(events[idx]),), g.tense, g.intensional)
            if idx is not None:
                matched.add(idx)
            return g
        if isinstance(g, Mod):
            return g
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(walk(g.left), walk(g.right))
        if isinstance(g, (ForAll, Exists)):
            return type(g)(g.var, walk(g.body))
        if isinstance(g, HigherPred):
            raise HigherOrderInputError(f"cannot lower higher-order predicate {g.name!r}")
        raise FormulaError(f"unknown node {g!r}")

    return walk(reading)


def lower(
    readings: Sequence[Formula],
    context: DiscourseContext,
    skolem_start: int = 1,
    canonical: Optional[Callable[[str], str]] = None,
    event_start: int = 1,
) -> DeltaSet:
    """Lower one chosen reading per sentence into a clause set.

    Discourse referents become witness constants, tensed verb predicates
    gain event arguments with before-facts ordering them, and predicate
    names are canonicalized through the supplied synonym map.  Intensional
    marked predicates carry their marker in the clause-level name and, as
    their objects are anaphoric, contribute no existence assertion of their
    own for the object term.
    """
    if len(readings) != len(context.sentences):
        raise AmbiguousReadingsError(
            f"expected {len(context.sentences)} readings, got {len(readings)}"
        )
    events, before = reify_tense(context, event_start)
    ref_map: dict[Term, Term] = {}
    counter = skolem_start
    for ref in context.referents:
        ref_map[ref.term] = Skolem(counter)
        counter += 1
    occ_by_sentence: dict[int, dict[int, int]] = {}
    for idx, occ in enumerate(context.occurrences):
        occ_by_sentence.setdefault(occ.sentence, {})[idx] = idx

    clauses: list[Clause] = []
    for s_idx, reading in enumerate(readings):
        f = _attach_events(reading, s_idx, context.occurrences, events, occ_by_sentence.get(s_idx, {}))
        f = substitute(f, ref_map)
        if canonical is not None:
            f = _canonicalize_names(f, canonical)
        new_clauses, counter = formula_to_clauses(f, counter)
        clauses.extend(new_clauses)
    return make_delta(clauses, before)


def _canonicalize_names(f: Formula, canonical: Callable[[str], str]) -> Formula:
    if isinstance(f, Pred):
        return Pred(canonical(f.name), f.args, f.tense, f.intensional)
    if isinstance(f, Mod):
        return f
    if isinstance(f, Not):
        return Not(_canonicalize_names(f.body, canonical))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(
            _canonicalize_names(f.left, canonical), _canonicalize_names(f.right, canonical)
        )
    if isinstance(f, (ForAll, Exists)):
        return type(f)(f.var, _canonicalize_names(f.body, canonical))
    if isinstance(f, HigherPred):
        raise HigherOrderInputError(f"cannot lower higher-order predicate {f.name!r}")
    raise FormulaError(f"unknown node {f!r}")


# ---------------------------------------------------------------------------
# modal translation


@dataclass(frozen=True)
class Box:
    body: "ModalFormula"


@dataclass(frozen=True)
class Diamond:
    body: "ModalFormula"


ModalFormula = Union[Box, Diamond, Pred, Not, And, Or, Implies]

ACCESS_PRED = "r"
INITIAL_WORLD = Const("w0")


def standard_translation(f: ModalFormula, world: Term = INITIAL_WORLD, next_var: int = 1) -> Formula:
    """Relational first-order translation of a propositional modal formula.

    Necessity quantifies over accessible worlds, possibility asserts an
    accessible witness world; propositional atoms become unary predicates
    of the evaluation world.
    """

    counter = next_var

    def walk(g: ModalFormula, w: Term) -> Formula:
        nonlocal counter
        if isinstance(g, Pred):
            if g.args:
                raise FormulaError("modal atoms must be propositional (no arguments)")
            return Pred(g.name, (w,))
        if isinstance(g, Not):
            return Not(walk(g.body, w))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(walk(g.left, w), walk(g.right, w))
        if isinstance(g, Box):
            v = Var(f"x{counter}")
            counter += 1
            return ForAll(v, Implies(Pred(ACCESS_PRED, (w, v)), walk(g.body, v)))
        if isinstance(g, Diamond):
            v = Var(f"x{counter}")
            counter += 1
            return Exists(v, And(Pred(ACCESS_PRED, (w, v)), walk(g.body, v)))
        raise FormulaError(f"not a modal formula node: {g!r}")

    return walk(f, world)


def translate_modal_clauses(formulas: Sequence[ModalFormula], next_skolem: int = 1) -> list[Clause]:
    clauses: list[Clause] = []
    counter = next_skolem
    for f in formulas:
        fol = standard_translation(f)
        new, counter = formula_to_clauses(fol, counter)
        clauses.extend(new)
    return clauses
