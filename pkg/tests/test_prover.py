"""Resolution prover: golden entailments, the three-valued verdict
contract, proof replay, and agreement with the Herbrand-model oracle."""

from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from claimlogic.formulas import parse_formula
from claimlogic.lowering import parse_clause
from claimlogic.prover import (
    Budget,
    EquivalenceVerdict,
    Verdict,
    entails,
    entails_formulas,
    equivalent,
    render_proof,
    replay_proof,
    saturate,
)

from generators import random_clause_set, random_ground_goal
from oracles import herbrand_entails

WIDE = Budget(2000, 50000)


def clauses(*texts: str):
    return [parse_clause(t) for t in texts]


# ---------------------------------------------------------------------------
# golden verdicts


def test_syllogism_proved():
    delta = clauses("man(socrates)", "-man(x1) | mortal(x1)")
    result = entails(delta, parse_formula("mortal(socrates)"), WIDE)
    assert result.verdict is Verdict.PROVED


def test_unrelated_goal_refuted():
    delta = clauses("man(socrates)", "-man(x1) | mortal(x1)")
    result = entails(delta, parse_formula("mortal(plato)"), WIDE)
    assert result.verdict is Verdict.REFUTED


def test_chained_implications():
    delta = clauses("p(a)", "-p(x1) | q(x1)", "-q(x1) | r(x1)", "-r(x1) | s(x1)")
    assert entails(delta, parse_formula("s(a)"), WIDE).verdict is Verdict.PROVED
    assert entails(delta, parse_formula("s(b)"), WIDE).verdict is Verdict.REFUTED


def test_tautology_needs_no_premises():
    result = entails([], parse_formula("p(a) or not p(a)"), WIDE)
    assert result.verdict is Verdict.PROVED


def test_inconsistent_premises_entail_anything():
    delta = clauses("p(a)", "-p(a)")
    assert entails(delta, parse_formula("q(b)"), WIDE).verdict is Verdict.PROVED


def test_existential_goal_needs_a_witness():
    delta = clauses("owns(john,rex)")
    assert entails(delta, parse_formula("exists x1 owns(john,x1)"), WIDE).verdict is Verdict.PROVED
    assert entails(delta, parse_formula("exists x1 owns(mary,x1)"), WIDE).verdict is Verdict.REFUTED


def test_universal_goal():
    delta = clauses("p(a)", "p(b)")
    # only two constants exist, but FOL semantics quantifies over all models
    assert entails(delta, parse_formula("forall x1 p(x1)"), WIDE).verdict is Verdict.REFUTED
    delta = clauses("p(x1)")
    assert entails(delta, parse_formula("forall x1 p(x1)"), WIDE).verdict is Verdict.PROVED


def test_scope_readings_entail_one_way():
    de_dicto = parse_formula("forall x1 (man(x1) -> exists x2 (woman(x2) and loves(x1,x2)))")
    de_re = parse_formula("exists x2 (woman(x2) and forall x1 (man(x1) -> loves(x1,x2)))")
    assert entails_formulas([de_re], de_dicto, WIDE).verdict is Verdict.PROVED
    assert entails_formulas([de_dicto], de_re, WIDE).verdict is Verdict.REFUTED


# ---------------------------------------------------------------------------
# budget behaviour


def test_zero_time_budget_times_out():
    delta = clauses("p(a)", "-p(x1) | q(x1)")
    result = entails(delta, parse_formula("q(a)"), Budget(0, 50000))
    assert result.verdict is Verdict.TIMEOUT


def test_clause_cap_times_out():
    # transitive chain blowup with a one-clause ceiling
    delta = clauses("e(a,b)", "e(b,c)", "-e(x1,x2) | -e(x2,x3) | e(x1,x3)")
    result = entails(delta, parse_formula("e(a,c)"), Budget(5000, 1))
    assert result.verdict is Verdict.TIMEOUT


def test_verdict_is_deterministic():
    delta = clauses("p(a)", "-p(x1) | q(x1)", "r(b)", "-q(x1) | -r(x2) | s(x1,x2)")
    goal = parse_formula("s(a,b)")
    first = entails(delta, goal, WIDE)
    second = entails(delta, goal, WIDE)
    assert first.verdict is second.verdict is Verdict.PROVED
    assert render_proof(first.proof) == render_proof(second.proof)


# ---------------------------------------------------------------------------
# proofs


def test_proved_results_replay():
    delta = clauses("p(a)", "-p(x1) | q(x1)", "-q(x1) | r(x1)")
    result = entails(delta, parse_formula("r(a)"), WIDE)
    assert result.verdict is Verdict.PROVED
    assert result.proof is not None
    assert replay_proof(result.proof, result.inputs)


def test_saturation_on_consistent_set():
    delta = clauses("p(a)", "-q(b)")
    assert saturate(delta, WIDE).verdict is Verdict.REFUTED


def test_saturation_finds_contradiction():
    delta = clauses("p(a)", "-p(x1) | q(x1)", "-q(a)")
    assert saturate(delta, WIDE).verdict is Verdict.PROVED


# ---------------------------------------------------------------------------
# equivalence


def test_equivalence_verdicts():
    p = clauses("rain", "wet")
    q = clauses("wet", "rain")
    assert equivalent(p, q, WIDE).verdict is EquivalenceVerdict.EQUIVALENT

    stronger = clauses("rain", "wet")
    weaker = clauses("wet")
    assert equivalent(stronger, weaker, WIDE).verdict is EquivalenceVerdict.P_STRICTLY_STRONGER
    assert equivalent(weaker, stronger, WIDE).verdict is EquivalenceVerdict.Q_STRICTLY_STRONGER

    a = clauses("rain")
    b = clauses("wet")
    assert equivalent(a, b, WIDE).verdict is EquivalenceVerdict.INCOMPARABLE


def test_background_closes_the_gap():
    p = clauses("rain")
    q = clauses("wet")
    background = clauses("-rain | wet", "-wet | rain")
    assert equivalent(p, q, WIDE, background).verdict is EquivalenceVerdict.EQUIVALENT


def test_equivalence_timeout_propagates():
    p = clauses("e(a,b)", "e(b,c)", "-e(x1,x2) | -e(x2,x3) | e(x1,x3)")
    q = clauses("e(a,c)")
    assert equivalent(p, q, Budget(5000, 1)).verdict is EquivalenceVerdict.TIMEOUT


# ---------------------------------------------------------------------------
# random clause sets against the Herbrand oracle


def check_against_oracle(seed: int) -> bool:
    """True when the verdicts agree; TIMEOUT counts as agreement here, the
    acceptance run bounds its rate separately."""
    rng = random.Random(seed)
    delta = random_clause_set(rng)
    goal, negated = random_ground_goal(rng)
    result = entails(delta, goal, Budget(500, 20000))
    if result.verdict is Verdict.TIMEOUT:
        return True
    expected = herbrand_entails(delta, negated)
    return (result.verdict is Verdict.PROVED) == expected


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_entailment_matches_herbrand_oracle(seed):
    assert check_against_oracle(seed)
