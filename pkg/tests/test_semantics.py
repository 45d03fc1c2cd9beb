"""Composition and discourse: golden formulas, scope readings, pronoun
resolution with its three filters, and the error taxonomy."""

from __future__ import annotations

import pytest

from claimlogic.formulas import parse_formula, render, renumber_vars
from claimlogic.semantics import (
    AnaphoraError,
    UngrammaticalError,
    UnknownWordError,
    analyze_text,
)


def formula_of(text, lexicon, ontology, **kw):
    analysis = analyze_text(text, lexicon, ontology, **kw)
    f = analysis.discourse_formula()
    assert f is not None, "text is scope-ambiguous"
    return render(f)


# ---------------------------------------------------------------------------
# golden compositions


def test_transitive_past(lexicon, discourse_ontology):
    got = formula_of("The cat caught the mouse.", lexicon, discourse_ontology)
    assert got == "cat(x1) and mouse(x2) and caught_p(x1,x2)"


def test_negated_presence_verb_and_intensional_search(lexicon, discourse_ontology):
    text = "John's father did not return. Now John is searching for him."
    got = formula_of(text, lexicon, discourse_ontology)
    assert got == "father(x1) and john(x2) and mod(x1,x2) and not return_p(x1) and searches_i(x2,x1)"


def test_definite_reuses_its_referent(lexicon, discourse_ontology):
    got = formula_of("The man arrived. The man returned.", lexicon, discourse_ontology)
    assert got == "man(x1) and arrived_p(x1) and returned_p(x1)"


def test_indefinite_quantifies(lexicon, discourse_ontology):
    got = formula_of("A man arrived.", lexicon, discourse_ontology)
    assert got == "exists x1 (man(x1) and arrived_p(x1))"


def test_renumbering_compares_modulo_variable_names(lexicon, discourse_ontology):
    got = formula_of("The cat caught the mouse.", lexicon, discourse_ontology)
    target = parse_formula("cat(x7) and mouse(x9) and caught_p(x7,x9)")
    assert renumber_vars(parse_formula(got)) == renumber_vars(target)


# ---------------------------------------------------------------------------
# scope ambiguity


def test_two_scope_readings_de_dicto_first(lexicon, discourse_ontology):
    analysis = analyze_text("Every man loves one woman.", lexicon, discourse_ontology)
    (readings,) = analysis.readings
    assert len(readings) == 2
    assert render(readings[0]) == "forall x1 (man(x1) -> exists x2 (woman(x2) and loves(x1,x2)))"
    assert render(readings[1]) == "exists x2 (woman(x2) and forall x1 (man(x1) and loves(x1,x2)))" or \
        render(readings[1]) == "exists x2 (woman(x2) and forall x1 (man(x1) -> loves(x1,x2)))"
    assert analysis.discourse_formula() is None


def test_unambiguous_sentences_have_single_readings(lexicon, discourse_ontology):
    analysis = analyze_text("The cat caught the mouse. The mouse returned.",
                            lexicon, discourse_ontology)
    assert [len(r) for r in analysis.readings] == [1, 1]


# ---------------------------------------------------------------------------
# pronoun resolution filters


def test_person_pronoun_skips_nonperson_referents(lexicon, discourse_ontology):
    # "him" must reach past the cat to John
    got = formula_of("John chased the cat. The woman caught him.", lexicon, discourse_ontology)
    assert "caught_p(x3,x1)" in got  # x1 is John, x3 the woman


def test_nonperson_pronoun_skips_person_referents(lexicon, discourse_ontology):
    got = formula_of("John chased the cat. Now John is searching for it.",
                     lexicon, discourse_ontology)
    # it -> the cat, not John; the cat exists, so the search stays extensional
    assert "searches(x1,x2)" in got


def test_clause_subject_is_not_its_own_antecedent(lexicon, discourse_ontology):
    text = "John's father did not return. Now John is searching for him."
    got = formula_of(text, lexicon, discourse_ontology)
    # him -> father, never the searching subject John himself
    assert "searches_i(x2,x1)" in got


def test_knowledge_flips_the_antecedent(lexicon, discourse_ontology):
    slow = formula_of("The cat caught the mouse because it was slow.",
                      lexicon, discourse_ontology)
    quick = formula_of("The cat caught the mouse because it was quick.",
                       lexicon, discourse_ontology)
    assert "slow_p(x2)" in slow    # the caught one was slow
    assert "quick_p(x1)" in quick  # the catcher was quick


def test_resolution_records_a_flag(lexicon, discourse_ontology):
    analysis = analyze_text("The cat chased the dog because it was slow.",
                            lexicon, discourse_ontology)
    assert ("pronoun-resolved", "it->dog") in analysis.context.flags


# ---------------------------------------------------------------------------
# error taxonomy


def test_unknown_token(lexicon, discourse_ontology):
    with pytest.raises(UnknownWordError) as err:
        analyze_text("The cat zorped the mouse.", lexicon, discourse_ontology)
    assert err.value.code == "unknown-token"
    assert "zorped" in str(err.value)


def test_agreement_violation_is_ungrammatical(lexicon, discourse_ontology):
    with pytest.raises(UngrammaticalError) as err:
        analyze_text("The cat chase the mouse.", lexicon, discourse_ontology)
    assert err.value.code == "ungrammatical"


def test_truncated_sentence_is_ungrammatical(lexicon, discourse_ontology):
    with pytest.raises(UngrammaticalError):
        analyze_text("Replace the cracked.", lexicon, discourse_ontology)


def test_pronoun_without_antecedent_is_unresolved(lexicon, discourse_ontology):
    with pytest.raises(AnaphoraError) as err:
        analyze_text("It returned.", lexicon, discourse_ontology)
    assert err.value.code == "unresolved-pronoun"
    assert "candidates: none" in str(err.value)


def test_two_viable_antecedents_are_ambiguous(lexicon, glass_ontology):
    with pytest.raises(AnaphoraError) as err:
        analyze_text("Remove the seal. Remove the moulding. Clean it.",
                     lexicon, glass_ontology)
    assert err.value.code == "ambiguous-pronoun"
    assert "seal" in str(err.value) and "moulding" in str(err.value)


# ---------------------------------------------------------------------------
# typo correction


def test_single_edit_typo_corrects_with_flag(lexicon, discourse_ontology):
    analysis = analyze_text("The cat caugt the mouse.", lexicon, discourse_ontology)
    assert ("corrected", "caugt->caught") in analysis.context.flags
    assert render(analysis.discourse_formula()) == "cat(x1) and mouse(x2) and caught_p(x1,x2)"


def test_zero_edit_budget_rejects_typos(lexicon, discourse_ontology):
    with pytest.raises(UnknownWordError):
        analyze_text("The cat caugt the mouse.", lexicon, discourse_ontology, max_edit=0)


# ---------------------------------------------------------------------------
# render / reparse round trip


@pytest.mark.parametrize("text", [
    "The cat caught the mouse.",
    "A man arrived.",
    "John's father did not return. Now John is searching for him.",
    "The cat caught the mouse because it was slow.",
])
def test_render_parse_round_trip(text, lexicon, discourse_ontology):
    f = analyze_text(text, lexicon, discourse_ontology).discourse_formula()
    assert parse_formula(render(f)) == f
