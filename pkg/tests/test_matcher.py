"""Line matching: pair scoring over the prover, match graph construction,
and the exact assignment solve checked against permutation enumeration."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from claimlogic.lowering import lower
from claimlogic.matcher import (
    SCORE_EQUIVALENT,
    SCORE_ONE_WAY,
    MatchGraph,
    build_match_graph,
    group_lines,
    match_lines,
    score_pair,
    solve_assignment,
)
from claimlogic.prover import Budget, EquivalenceVerdict
from claimlogic.semantics import analyze_text

from generators import random_match_graph
from oracles import brute_force_assignment

BUDGET = Budget(500, 20000)


def delta_of(text, lexicon, ontology):
    analysis = analyze_text(text, lexicon, ontology)
    return lower(
        analysis.context.unambiguous_readings(),
        analysis.context,
        canonical=ontology.canonical_word,
    )


def glass_background(ontology, *deltas):
    names = set()
    for d in deltas:
        names |= d.predicate_names()
    return ontology.select_context(names).clauses


# ---------------------------------------------------------------------------
# pair scoring


def test_identical_lines_score_one(lexicon, glass_ontology):
    d = delta_of("Replace the cracked windscreen.", lexicon, glass_ontology)
    cell = score_pair(d, d, glass_ontology, BUDGET)
    assert cell.score == SCORE_EQUIVALENT == Fraction(1)
    assert cell.verdict is EquivalenceVerdict.EQUIVALENT


def test_synonym_lines_score_one_without_proving(lexicon, glass_ontology):
    # the canonicalized clause sets are byte-identical, hitting the fast path
    p = delta_of("Exchange the cracked windshield.", lexicon, glass_ontology)
    q = delta_of("Replace the cracked windscreen.", lexicon, glass_ontology)
    cell = score_pair(p, q, glass_ontology, Budget(0, 1))
    assert cell.score == Fraction(1)
    assert cell.verdict is EquivalenceVerdict.EQUIVALENT


def test_unrelated_lines_are_incomparable(lexicon, glass_ontology):
    p = delta_of("Replace the cracked windscreen.", lexicon, glass_ontology)
    q = delta_of("Polish the bonnet.", lexicon, glass_ontology)
    cell = score_pair(p, q, glass_ontology, BUDGET)
    assert cell.score == Fraction(0)
    assert cell.verdict is EquivalenceVerdict.INCOMPARABLE


def test_one_directional_entailment_scores_partial(lexicon, glass_ontology):
    # "fit" decomposes to "install" in the ontology, not conversely
    p = delta_of("Fit a new seal.", lexicon, glass_ontology)
    q = delta_of("Install a new seal.", lexicon, glass_ontology)
    cell = score_pair(p, q, glass_ontology, BUDGET, glass_background(glass_ontology, p, q))
    assert cell.score == SCORE_ONE_WAY == Fraction(3, 5)
    assert cell.verdict is EquivalenceVerdict.P_STRICTLY_STRONGER


def test_score_is_one_exactly_on_equivalence(lexicon, glass_ontology):
    texts = ["Replace the cracked windscreen.", "Fit a new seal.",
             "Install a new seal.", "Polish the bonnet."]
    deltas = [delta_of(t, lexicon, glass_ontology) for t in texts]
    bg = glass_background(glass_ontology, *deltas)
    for p in deltas:
        for q in deltas:
            cell = score_pair(p, q, glass_ontology, BUDGET, bg)
            assert (cell.score == 1) == (cell.verdict is EquivalenceVerdict.EQUIVALENT)


# ---------------------------------------------------------------------------
# graph construction


def test_graph_edges_only_for_provable_relations(lexicon, glass_ontology):
    bill = [delta_of("Replace the cracked windscreen.", lexicon, glass_ontology),
            delta_of("Polish the bonnet.", lexicon, glass_ontology)]
    bench = [delta_of("Replace the cracked windscreen.", lexicon, glass_ontology)]
    graph = build_match_graph(bill, bench, glass_ontology, BUDGET)
    assert [(i, j) for i, j, _, _ in graph.edges] == [(0, 0)]
    assert not graph.incomplete
    assert graph.bill_nodes == [0, 1] and graph.benchmark_nodes == [0]


def test_timeout_pairs_leave_no_edge_and_flag_graph(lexicon, glass_ontology):
    # a zero-millisecond budget forces TIMEOUT on any pair needing the prover
    p = delta_of("Fit a new seal.", lexicon, glass_ontology)
    q = delta_of("Install a new seal.", lexicon, glass_ontology)
    graph = build_match_graph([p], [q], glass_ontology, Budget(0, 1),
                              glass_background(glass_ontology, p, q))
    assert graph.edges == []
    assert graph.incomplete


# ---------------------------------------------------------------------------
# assignment goldens


def _graph(n, m, edges):
    built = [
        (i, j, Fraction(s),
         EquivalenceVerdict.EQUIVALENT if Fraction(s) == 1
         else EquivalenceVerdict.P_STRICTLY_STRONGER)
        for i, j, s in edges
    ]
    return MatchGraph(list(range(n)), list(range(m)), built)


def test_empty_graph():
    a = solve_assignment(_graph(0, 0, []))
    assert a.pairs == [] and a.total_score == 0
    assert a.unmatched_bill == [] and a.unmatched_benchmark == []


def test_no_edges_leaves_everything_unmatched():
    a = solve_assignment(_graph(2, 3, []))
    assert a.pairs == []
    assert a.unmatched_bill == [0, 1]
    assert a.unmatched_benchmark == [0, 1, 2]


def test_forced_swap():
    # diagonal is worse than the crossing: optimum must swap
    a = solve_assignment(_graph(2, 2, [(0, 0, "3/5"), (0, 1, 1), (1, 0, 1)]))
    assert a.pairs == [(0, 1), (1, 0)]
    assert a.total_score == 2


def test_tie_breaks_to_lexicographically_smallest():
    a = solve_assignment(_graph(1, 2, [(0, 0, 1), (0, 1, 1)]))
    assert a.pairs == [(0, 0)]
    assert a.unmatched_benchmark == [1]


def test_partial_injection_both_ways():
    a = solve_assignment(_graph(3, 2, [(0, 0, 1), (2, 1, "3/5")]))
    assert a.pairs == [(0, 0), (2, 1)]
    assert a.unmatched_bill == [1]
    assert a.unmatched_benchmark == []
    assert a.total_score == Fraction(8, 5)


def test_every_line_appears_exactly_once():
    graph = _graph(4, 3, [(0, 1, 1), (1, 1, 1), (2, 0, "3/5"), (3, 2, 1)])
    a = solve_assignment(graph)
    bill_seen = sorted([i for i, _ in a.pairs] + a.unmatched_bill)
    bench_seen = sorted([j for _, j in a.pairs] + a.unmatched_benchmark)
    assert bill_seen == graph.bill_nodes
    assert bench_seen == graph.benchmark_nodes


# ---------------------------------------------------------------------------
# assignment properties


@settings(max_examples=120, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_assignment_matches_brute_force(seed):
    graph = random_match_graph(random.Random(seed))
    ours = solve_assignment(graph)
    pairs, total = brute_force_assignment(graph)
    assert ours.total_score == total
    assert sorted(ours.pairs) == pairs


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_adding_an_edge_never_lowers_the_total(seed):
    rng = random.Random(seed)
    graph = random_match_graph(rng)
    before = solve_assignment(graph).total_score
    n, m = len(graph.bill_nodes), len(graph.benchmark_nodes)
    present = {(i, j) for i, j, _, _ in graph.edges}
    absent = [(i, j) for i in range(n) for j in range(m) if (i, j) not in present]
    if not absent:
        return
    i, j = rng.choice(absent)
    graph.edges.append((i, j, Fraction(rng.randint(1, 9), 10),
                        EquivalenceVerdict.P_STRICTLY_STRONGER))
    assert solve_assignment(graph).total_score >= before


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_total_score_is_permutation_invariant(seed):
    rng = random.Random(seed)
    graph = random_match_graph(rng)
    n = len(graph.bill_nodes)
    perm = list(range(n))
    rng.shuffle(perm)
    shuffled = MatchGraph(
        list(range(n)),
        list(graph.benchmark_nodes),
        [(perm[i], j, s, rel) for i, j, s, rel in graph.edges],
        graph.incomplete,
    )
    assert solve_assignment(shuffled).total_score == solve_assignment(graph).total_score


# ---------------------------------------------------------------------------
# line grouping


def test_group_lines_by_shared_parent(glass_ontology):
    # windscreen, seal and camera are all parts of the windscreen assembly
    nouns = [{"windscreen"}, {"seal"}, {"bonnet"}, {"camera"}]
    assert group_lines(nouns, glass_ontology) == [[0, 1, 3], [2]]


def test_group_lines_no_parts_all_singletons(glass_ontology):
    nouns = [{"bonnet"}, set(), {"technician"}]
    assert group_lines(nouns, glass_ontology) == [[0], [1], [2]]


def test_group_lines_bridging_noun_merges(glass_ontology):
    # mounting clips sit in the rear window assembly; a line mentioning both
    # assemblies bridges the two groups
    nouns = [{"windscreen"}, {"rear_window"}, {"seal", "mounting_clips"}]
    groups = group_lines(nouns, glass_ontology)
    assert groups == [[0, 1, 2]]


def test_match_lines_end_to_end(lexicon, glass_ontology):
    bill = [delta_of("Replace the cracked windscreen.", lexicon, glass_ontology),
            delta_of("Remove the old seal.", lexicon, glass_ontology)]
    bench = [delta_of("Remove the old seal.", lexicon, glass_ontology),
             delta_of("Replace the cracked windscreen.", lexicon, glass_ontology)]
    graph, assignment = match_lines(bill, bench, glass_ontology, BUDGET)
    assert assignment.pairs == [(0, 1), (1, 0)]
    assert assignment.total_score == 2
