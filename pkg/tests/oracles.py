"""Independent reference implementations the test suite checks the engine
against.

Nothing here shares algorithms with the package: entailment is decided by
grounding plus DPLL over Herbrand models instead of resolution, assignments
by permutation enumeration instead of the Hungarian reduction, and edit
distance by the plain quadratic table.  Slow is fine; these only need to be
right.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Optional, Sequence

from claimlogic.formulas import Const, Skolem, Term, Var
from claimlogic.lowering import Clause
from claimlogic.matcher import MatchGraph


# ---------------------------------------------------------------------------
# Herbrand-model entailment

GroundAtom = tuple[str, tuple[str, ...]]


def _term_name(t: Term) -> str:
    if isinstance(t, (Const, Skolem)):
        return t.name
    raise ValueError(f"not ground: {t!r}")


def _clause_vars(c: Clause) -> list[Var]:
    seen: list[Var] = []
    for _sign, _name, args in sorted(c.literals, key=repr):
        for t in args:
            if isinstance(t, Var) and t not in seen:
                seen.append(t)
    return seen


def _constants(clauses: Iterable[Clause]) -> list[str]:
    names = set()
    for c in clauses:
        for _sign, _name, args in c.literals:
            for t in args:
                if isinstance(t, (Const, Skolem)):
                    names.add(t.name)
    return sorted(names)


def ground_clauses(clauses: Sequence[Clause]) -> list[frozenset[tuple[bool, GroundAtom]]]:
    """All ground instances over the Herbrand universe of the input.

    Function-free only.  A clause set with no constants still needs one
    witness object, per the usual Herbrand construction.
    """
    universe = _constants(clauses) or ["c0"]
    out: list[frozenset[tuple[bool, GroundAtom]]] = []
    for c in clauses:
        vs = _clause_vars(c)
        for combo in product(universe, repeat=len(vs)):
            sub = dict(zip(vs, combo))
            inst = set()
            for sign, name, args in c.literals:
                ground_args = tuple(
                    sub[t] if isinstance(t, Var) else _term_name(t) for t in args
                )
                inst.add((sign, (name, ground_args)))
            out.append(frozenset(inst))
    return out


def _dpll(clauses: list[frozenset[tuple[bool, GroundAtom]]]) -> bool:
    """Satisfiability of a ground clause set by unit propagation plus
    branching.  Exhaustive over Herbrand interpretations, with pruning."""
    atoms = sorted({atom for c in clauses for _s, atom in c})
    idx = {a: i for i, a in enumerate(atoms)}
    # literal encoding: +(i+1) positive, -(i+1) negative
    enc = [frozenset((1 if s else -1) * (idx[a] + 1) for s, a in c) for c in clauses]

    def solve(cls: list[frozenset[int]], assigned: dict[int, bool]) -> bool:
        while True:
            unit: Optional[int] = None
            for c in cls:
                if not c:
                    return False
                if len(c) == 1:
                    unit = next(iter(c))
                    break
            if unit is None:
                break
            assigned[abs(unit)] = unit > 0
            cls = _condition(cls, unit)
        if not cls:
            return True
        lit = next(iter(cls[0]))
        for choice in (lit, -lit):
            if solve(_condition(cls, choice), dict(assigned)):
                return True
        return False

    def _condition(cls: list[frozenset[int]], lit: int) -> list[frozenset[int]]:
        out = []
        for c in cls:
            if lit in c:
                continue
            out.append(c - {-lit})
        return out

    return solve(enc, {})


def clauses_satisfiable(clauses: Sequence[Clause]) -> bool:
    return _dpll(ground_clauses(clauses))


def herbrand_entails(delta: Sequence[Clause], negated_goal: Sequence[Clause]) -> bool:
    """delta entails the goal iff delta plus the negated goal has no
    Herbrand model.  The caller negates the goal by hand; keeping that step
    out of this module means no clausifier code is shared with the engine."""
    return not clauses_satisfiable(list(delta) + list(negated_goal))


# ---------------------------------------------------------------------------
# assignment by permutation enumeration


def brute_force_assignment(
    graph: MatchGraph,
) -> tuple[list[tuple[int, int]], Fraction]:
    """Maximum-total-score partial matching by trying every padded
    permutation; ties resolved by the lexicographically smallest pair list."""
    n, m = len(graph.bill_nodes), len(graph.benchmark_nodes)
    weight: dict[tuple[int, int], Fraction] = {}
    for i, j, score, _rel in graph.edges:
        weight[(i, j)] = score
    k = max(n, m, 1)
    best_total = Fraction(0)
    best_pairs: Optional[list[tuple[int, int]]] = None
    for perm in permutations(range(k)):
        # zero-score pairs never enter: dropping one keeps the total and
        # shortens the list, and a shorter list sorts lexicographically first
        pairs = sorted(
            (i, perm[i])
            for i in range(min(n, k))
            if weight.get((i, perm[i]), Fraction(0)) > 0
        )
        total = sum((weight[p] for p in pairs), Fraction(0))
        if best_pairs is None or total > best_total or (
            total == best_total and pairs < best_pairs
        ):
            best_total, best_pairs = total, pairs
    assert best_pairs is not None
    return best_pairs, best_total


# ---------------------------------------------------------------------------
# plain edit distance


def edit_distance(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[len(b)]
