"""Lowering the intensional representation into clause dialects: witness
numbering, event reification, synonym canonicalization, serialization, and
equisatisfiability of the clausifier against a truth-table check."""

from __future__ import annotations

import random
from itertools import product

from hypothesis import given, settings
from hypothesis import strategies as st

from claimlogic.formulas import (
    And,
    Const,
    Formula,
    Implies,
    Not,
    Or,
    Pred,
    parse_formula,
)
from claimlogic.lowering import (
    Clause,
    DeltaSet,
    NestedExistentialError,
    formula_to_clauses,
    lower,
    make_delta,
    parse_delta,
    render_clause,
    serialize_delta,
)
from claimlogic.semantics import analyze_text

from generators import random_clause_set
from oracles import clauses_satisfiable


def lowered(text, lexicon, ontology) -> DeltaSet:
    analysis = analyze_text(text, lexicon, ontology)
    return lower(
        analysis.context.unambiguous_readings(),
        analysis.context,
        canonical=ontology.canonical_word,
    )


# ---------------------------------------------------------------------------
# golden lowerings


def test_simple_past_event(lexicon, discourse_ontology):
    ds = lowered("The cat caught the mouse.", lexicon, discourse_ontology)
    assert serialize_delta(ds) == "[fol]\ncat(sk1)\ncaught(sk1,sk2,e1)\nmouse(sk2)\n[temporal]\n"


def test_imperative_line_is_untensed(lexicon, glass_ontology):
    ds = lowered("Replace the cracked windscreen.", lexicon, glass_ontology)
    assert serialize_delta(ds) == "[fol]\ncracked(sk1)\nreplace(sk1)\nwindscreen(sk1)\n[temporal]\n"


def test_synonyms_canonicalize_to_identical_bytes(lexicon, glass_ontology):
    a = lowered("Replace the cracked windscreen.", lexicon, glass_ontology)
    b = lowered("Exchange the cracked windshield.", lexicon, glass_ontology)
    assert serialize_delta(a) == serialize_delta(b)


def test_negation_intensionality_and_event_order(lexicon, discourse_ontology):
    text = "John's father did not return. Now John is searching for him."
    ds = lowered(text, lexicon, discourse_ontology)
    rendered = serialize_delta(ds)
    # the negated presence verb keeps its event; the intensional verb keeps
    # its marker; the temporal section orders the two events
    assert "-return(sk1,e1)" in rendered
    assert "searches_i(sk2,sk1,e2)" in rendered
    assert "before(e1,e2)" in rendered


# ---------------------------------------------------------------------------
# skolemization


def test_existential_becomes_witness_constant():
    clauses, nxt = formula_to_clauses(parse_formula("exists x1 p(x1)"), 1)
    assert [render_clause(c) for c in clauses] == ["p(sk1)"]
    assert nxt == 2


def test_witness_counter_threads():
    clauses, nxt = formula_to_clauses(parse_formula("exists x1 p(x1)"), 7)
    assert [render_clause(c) for c in clauses] == ["p(sk7)"]
    assert nxt == 8


def test_nested_existential_is_rejected():
    f = parse_formula("forall x1 exists x2 loves(x1,x2)")
    try:
        formula_to_clauses(f, 1)
        raise AssertionError("expected NestedExistentialError")
    except NestedExistentialError as exc:
        assert "x1" in str(exc)


def test_nested_existential_with_functions_allowed():
    f = parse_formula("forall x1 exists x2 loves(x1,x2)")
    clauses, _ = formula_to_clauses(f, 1, allow_functions=True)
    assert [render_clause(c) for c in clauses] == ["loves(x1,sf1(x1))"]


def test_skolem_numbering_is_deterministic():
    f = parse_formula("exists x1 (p(x1) and exists x2 q(x2))")
    first, _ = formula_to_clauses(f, 1)
    second, _ = formula_to_clauses(f, 1)
    assert [render_clause(c) for c in first] == [render_clause(c) for c in second]


# ---------------------------------------------------------------------------
# serialization round trips


def test_serialize_parse_golden(lexicon, discourse_ontology):
    ds = lowered("The cat caught the mouse.", lexicon, discourse_ontology)
    assert parse_delta(serialize_delta(ds)) == ds


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_serialize_parse_random_clause_sets(seed):
    rng = random.Random(seed)
    ds = make_delta(random_clause_set(rng), temporal=[("e1", "e2")])
    assert parse_delta(serialize_delta(ds)) == ds


def test_delta_canonicalization_dedupes_and_sorts():
    a = make_delta(
        [Clause(frozenset([(True, "p", (Const("a"),))])),
         Clause(frozenset([(True, "p", (Const("a"),))])),
         Clause(frozenset([(False, "q", (Const("b"),))]))]
    )
    assert len(a.fol) == 2
    assert [render_clause(c) for c in a.fol] == sorted(render_clause(c) for c in a.fol)


def test_predicate_names(lexicon, glass_ontology):
    ds = lowered("Replace the cracked windscreen.", lexicon, glass_ontology)
    assert ds.predicate_names() == {"replace", "cracked", "windscreen"}


# ---------------------------------------------------------------------------
# clausifier equisatisfiability, checked by truth tables on ground formulas

_ATOMS = [Pred("p", (Const("a"),)), Pred("q", (Const("b"),)),
          Pred("r", (Const("a"), Const("b"))), Pred("s", ())]


def ground_formulas(depth: int = 3):
    atoms = st.sampled_from(_ATOMS)
    return st.recursive(
        atoms,
        lambda children: st.one_of(
            st.builds(Not, children),
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Implies, children, children),
        ),
        max_leaves=8,
    )


def _eval(f: Formula, world: dict) -> bool:
    if isinstance(f, Pred):
        return world[(f.name, f.args)]
    if isinstance(f, Not):
        return not _eval(f.body, world)
    if isinstance(f, And):
        return _eval(f.left, world) and _eval(f.right, world)
    if isinstance(f, Or):
        return _eval(f.left, world) or _eval(f.right, world)
    if isinstance(f, Implies):
        return (not _eval(f.left, world)) or _eval(f.right, world)
    raise TypeError(f)


def _truth_table_satisfiable(f: Formula) -> bool:
    keys = [(a.name, a.args) for a in _ATOMS]
    return any(
        _eval(f, dict(zip(keys, values)))
        for values in product([False, True], repeat=len(keys))
    )


@settings(max_examples=120, deadline=None)
@given(ground_formulas())
def test_clausifier_preserves_satisfiability(f):
    clauses, _ = formula_to_clauses(f, 1)
    assert clauses_satisfiable(clauses) == _truth_table_satisfiable(f)
