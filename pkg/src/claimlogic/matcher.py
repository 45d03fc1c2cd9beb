"""Line matching: score bill lines against benchmark lines by logical
equivalence, then pick the assignment maximizing total score.

Scores are exact rationals: 1 for equivalent lines, 3/5 when one side
strictly entails the other; incomparable pairs get no edge at all.  The
assignment is solved over integer weights (scores scaled by their common
denominator); among maximum-score assignments the lexicographically least
one (by bill line order, then benchmark index) is returned, so reruns and
platforms agree.  Two prover-free fast paths keep bills cheap: canonically
identical clause sets score 1 immediately, and lines whose axiom-closed
vocabularies are disjoint score 0 immediately.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .formulas import Const, Skolem, Term
from .lowering import Clause, DeltaSet, render_clause
from .ontology import Ontology
from .prover import (
    Budget,
    EquivalenceResult,
    EquivalenceVerdict,
    equivalent,
)

SCORE_EQUIVALENT = Fraction(1)
SCORE_ONE_WAY = Fraction(3, 5)
SCORE_NONE = Fraction(0)


@dataclass(frozen=True)
class CellScore:
    score: Fraction
    verdict: EquivalenceVerdict


@dataclass
class MatchGraph:
    """Weighted bipartite graph between bill lines and benchmark lines.

    Edges exist only where the prover established a relation (equivalent or
    one side strictly stronger); incomparable pairs get no edge.  A pairwise
    check that ran out of budget also gets no edge, and sets ``incomplete``
    so downstream consumers know the graph may be missing matches.
    """

    bill_nodes: list[int]
    benchmark_nodes: list[int]
    edges: list[tuple[int, int, Fraction, EquivalenceVerdict]]
    incomplete: bool = False


@dataclass
class Assignment:
    """Injective partial matching chosen from a ``MatchGraph``.

    ``pairs`` holds (bill, benchmark) index pairs; every bill node appears
    in exactly one of ``pairs`` or ``unmatched_bill``, likewise benchmark
    nodes and ``unmatched_benchmark``.  ``total_score`` is the exact sum of
    the chosen edge scores.
    """

    pairs: list[tuple[int, int]]
    unmatched_bill: list[int]
    unmatched_benchmark: list[int]
    total_score: Fraction


_EVENT_NAME = re.compile(r"e(\d+)\Z")


def _delta_key(d: DeltaSet) -> tuple[str, ...]:
    """Render the clause set with witness and event constants renumbered by
    index order, so the same line lowered at different offsets within a
    document compares equal."""
    skolems: set[int] = set()
    events: set[int] = set()
    for c in d.fol:
        for _, _, args in c.literals:
            for t in args:
                if isinstance(t, Skolem):
                    skolems.add(t.index)
                elif isinstance(t, Const):
                    m = _EVENT_NAME.fullmatch(t.name)
                    if m:
                        events.add(int(m.group(1)))
    sk_map = {old: new for new, old in enumerate(sorted(skolems), start=1)}
    ev_map = {old: new for new, old in enumerate(sorted(events), start=1)}

    def renumber(t: Term) -> Term:
        if isinstance(t, Skolem):
            return Skolem(sk_map[t.index])
        if isinstance(t, Const):
            m = _EVENT_NAME.fullmatch(t.name)
            if m:
                return Const(f"e{ev_map[int(m.group(1))]}")
        return t

    rendered = [
        render_clause(
            Clause(
                frozenset(
                    (neg, name, tuple(renumber(t) for t in args))
                    for neg, name, args in c.literals
                )
            )
        )
        for c in d.fol
    ]
    return tuple(sorted(rendered))


def _vocab_closure(names: set[str], ontology: Ontology) -> set[str]:
    out = set(names)
    changed = True
    while changed:
        changed = False
        for axiom in ontology.axioms:
            preds = axiom.predicates
            if preds & out and not preds <= out:
                out |= preds
                changed = True
        for child, parent in ontology.isa.items():
            if child in out and parent not in out:
                out.add(parent)
                changed = True
    return out


# completed equivalence verdicts are stable for fixed inputs, so surviving
# results are kept for the life of the process; timeouts are never cached
_SCORE_CACHE: dict[tuple, CellScore] = {}


def score_pair(
    p: DeltaSet,
    q: DeltaSet,
    ontology: Ontology,
    budget: Budget,
    background: Sequence[Clause] = (),
    background_key: Optional[tuple[str, ...]] = None,
) -> CellScore:
    key_p, key_q = _delta_key(p), _delta_key(q)
    if key_p == key_q:
        return CellScore(SCORE_EQUIVALENT, EquivalenceVerdict.EQUIVALENT)
    if not (_vocab_closure(p.predicate_names(), ontology) & _vocab_closure(q.predicate_names(), ontology)):
        return CellScore(SCORE_NONE, EquivalenceVerdict.INCOMPARABLE)
    if background_key is None:
        background_key = tuple(render_clause(c) for c in background)
    cache_key = (key_p, key_q, background_key, budget.max_duration_ms, budget.max_clauses)
    cached = _SCORE_CACHE.get(cache_key)
    if cached is not None:
        return cached
    result: EquivalenceResult = equivalent(
        list(p.fol), list(q.fol), budget, background=background, sos=True
    )
    cell = _cell_from(result)
    if cell.verdict is not EquivalenceVerdict.TIMEOUT:
        _SCORE_CACHE[cache_key] = cell
    return cell


def _cell_from(result: EquivalenceResult) -> CellScore:
    if result.verdict is EquivalenceVerdict.EQUIVALENT:
        return CellScore(SCORE_EQUIVALENT, result.verdict)
    if result.verdict in (
        EquivalenceVerdict.P_STRICTLY_STRONGER,
        EquivalenceVerdict.Q_STRICTLY_STRONGER,
    ):
        return CellScore(SCORE_ONE_WAY, result.verdict)
    if result.verdict is EquivalenceVerdict.TIMEOUT:
        return CellScore(SCORE_NONE, result.verdict)
    return CellScore(SCORE_NONE, result.verdict)


# ---------------------------------------------------------------------------
# assignment

_BIG = 10**9


def hungarian_min(cost: list[list[int]]) -> list[int]:
    """Minimum-cost perfect assignment on a square integer matrix; returns
    the column assigned to each row.  Shortest-augmenting-path form with
    potentials, fully deterministic."""
    n = len(cost)
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row matched to column j (1-based)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [_BIG] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = _BIG
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    out = [0] * n
    for j in range(1, n + 1):
        if p[j]:
            out[p[j] - 1] = j - 1
    return out


def _assignment_cost(cost: list[list[int]], rows: list[int], cols: list[int]) -> int:
    sub = [[cost[i][j] for j in cols] for i in rows]
    if not sub:
        return 0
    assign = hungarian_min(sub)
    return sum(sub[i][assign[i]] for i in range(len(sub)))


def _max_total(weight: dict[tuple[int, int], int], rows: list[int], cols: list[int]) -> int:
    """Maximum achievable weight matching the given rows into the given
    columns (each at most once, absent pairs weigh zero).  Solved as a
    padded square min-cost assignment."""
    if not rows:
        return 0
    k = max(len(rows), len(cols), 1)
    top = max((weight.get((i, j), 0) for i in rows for j in cols), default=0)
    cost = [[top] * k for _ in range(k)]
    for a, i in enumerate(rows):
        for b, j in enumerate(cols):
            cost[a][b] = top - weight.get((i, j), 0)
    return k * top - _assignment_cost(cost, list(range(k)), list(range(k)))


def lex_min_pairs(
    weight: dict[tuple[int, int], int], n: int, m: int
) -> list[tuple[int, int]]:
    """Pairs of a maximum-total matching, lexicographically least as a
    sorted pair list.  Built row by row: a matched row always sorts before
    any later row's pair, so each row takes the smallest column consistent
    with global optimality, or stays unmatched when no column is."""
    rows_all = list(range(n))
    cols_all = list(range(m))
    remaining = _max_total(weight, rows_all, cols_all)
    pairs: list[tuple[int, int]] = []
    used: set[int] = set()
    for i in rows_all:
        rest = list(range(i + 1, n))
        chosen = None
        for j in cols_all:
            if j in used or weight.get((i, j), 0) <= 0:
                continue
            free = [c for c in cols_all if c not in used and c != j]
            if weight[(i, j)] + _max_total(weight, rest, free) == remaining:
                chosen = j
                break
        if chosen is None:
            continue
        pairs.append((i, chosen))
        used.add(chosen)
        remaining -= weight[(i, chosen)]
    return pairs


_EDGE_VERDICTS = (
    EquivalenceVerdict.EQUIVALENT,
    EquivalenceVerdict.P_STRICTLY_STRONGER,
    EquivalenceVerdict.Q_STRICTLY_STRONGER,
)


def build_match_graph(
    bill: Sequence[DeltaSet],
    benchmark: Sequence[DeltaSet],
    ontology: Ontology,
    budget: Budget,
    background: Sequence[Clause] = (),
) -> MatchGraph:
    n, m = len(bill), len(benchmark)
    bg_key = tuple(render_clause(c) for c in background)
    edges: list[tuple[int, int, Fraction, EquivalenceVerdict]] = []
    incomplete = False
    for i in range(n):
        for j in range(m):
            cell = score_pair(bill[i], benchmark[j], ontology, budget, background, bg_key)
            if cell.verdict in _EDGE_VERDICTS:
                edges.append((i, j, cell.score, cell.verdict))
            elif cell.verdict is EquivalenceVerdict.TIMEOUT:
                incomplete = True
    return MatchGraph(list(range(n)), list(range(m)), edges, incomplete)


def solve_assignment(graph: MatchGraph) -> Assignment:
    """Maximum-total-score assignment on the graph; among optima, the one
    whose pair list is lexicographically least.  Exact rational arithmetic
    throughout: scores are scaled by their common denominator before the
    integer assignment solve."""
    n, m = len(graph.bill_nodes), len(graph.benchmark_nodes)
    scale = 1
    for _, _, score, _ in graph.edges:
        scale = scale * score.denominator // math.gcd(scale, score.denominator)
    weight: dict[tuple[int, int], int] = {}
    by_pair: dict[tuple[int, int], Fraction] = {}
    for i, j, score, _ in graph.edges:
        w = int(score * scale)
        if w > weight.get((i, j), 0):
            weight[(i, j)] = w
            by_pair[(i, j)] = score
    pairs = lex_min_pairs(weight, n, m)
    total = sum((by_pair[p] for p in pairs), Fraction(0))
    matched_bill = {i for i, _ in pairs}
    matched_bench = {j for _, j in pairs}
    unmatched_bill = [i for i in range(n) if i not in matched_bill]
    unmatched_benchmark = [j for j in range(m) if j not in matched_bench]
    return Assignment(pairs, unmatched_bill, unmatched_benchmark, total)


def match_lines(
    bill: Sequence[DeltaSet],
    benchmark: Sequence[DeltaSet],
    ontology: Ontology,
    budget: Budget,
    background: Sequence[Clause] = (),
) -> tuple[MatchGraph, Assignment]:
    graph = build_match_graph(bill, benchmark, ontology, budget, background)
    return graph, solve_assignment(graph)


# ---------------------------------------------------------------------------
# grouping


def group_lines(line_nouns: Sequence[set[str]], ontology: Ontology) -> list[list[int]]:
    """Group line indices whose nouns share a part-of parent; lines with no
    tagged parts stay singleton groups.  Groups are ordered by their first
    line."""
    parent_sets: list[set[str]] = []
    for nouns in line_nouns:
        parents = {ontology.part_of[n] for n in nouns if n in ontology.part_of}
        parent_sets.append(parents)
    group_of = list(range(len(line_nouns)))

    def find(i: int) -> int:
        while group_of[i] != i:
            group_of[i] = group_of[group_of[i]]
            i = group_of[i]
        return i

    for i in range(len(line_nouns)):
        for j in range(i + 1, len(line_nouns)):
            if parent_sets[i] & parent_sets[j]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    group_of[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(len(line_nouns)):
        groups.setdefault(find(i), []).append(i)
    return [groups[r] for r in sorted(groups)]
