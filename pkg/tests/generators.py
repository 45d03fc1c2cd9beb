"""Seeded random input builders shared between the module suites and the
acceptance run.  Everything takes an explicit random.Random so a failing
seed can be replayed in isolation."""

from __future__ import annotations

import random
from fractions import Fraction

from claimlogic.formulas import Const, Pred, Var
from claimlogic.lowering import make_clause
from claimlogic.matcher import MatchGraph
from claimlogic.prover import EquivalenceVerdict

PREDS = [("p", 1), ("q", 1), ("r", 2), ("s", 0), ("t", 1), ("u", 2)]
CONSTS = ["a", "b", "c", "d", "e"]


def random_clause_set(rng: random.Random):
    """Function-free set: <= 8 clauses, <= 3 literals, <= 2 variables per
    clause, drawn over 6 predicates and 5 constants."""
    out = []
    for _ in range(rng.randint(1, 8)):
        vars_here = [Var("x1"), Var("x2")][: rng.randint(0, 2)]
        lits = []
        for _ in range(rng.randint(1, 3)):
            name, arity = rng.choice(PREDS)
            args = tuple(
                rng.choice(vars_here) if vars_here and rng.random() < 0.5
                else Const(rng.choice(CONSTS))
                for _ in range(arity)
            )
            lits.append((rng.random() < 0.55, name, args))
        out.append(make_clause(lits))
    return out


def random_ground_goal(rng: random.Random):
    """Goal atom plus its hand-negated clause form for the oracle side."""
    name, arity = rng.choice([p for p in PREDS if p[1] > 0])
    args = tuple(Const(rng.choice(CONSTS)) for _ in range(arity))
    return Pred(name, args), [make_clause([(False, name, args)])]


def random_match_graph(rng: random.Random, max_side: int = 6) -> MatchGraph:
    """Random bipartite graph honoring the edge contract: scores are
    rationals in (0, 1], exactly 1 only on EQUIVALENT edges."""
    n, m = rng.randint(0, max_side), rng.randint(0, max_side)
    edges = []
    for i in range(n):
        for j in range(m):
            if rng.random() < 0.45:
                tenths = rng.randint(1, 10)
                score = Fraction(tenths, 10)
                relation = (
                    EquivalenceVerdict.EQUIVALENT
                    if tenths == 10
                    else rng.choice(
                        [
                            EquivalenceVerdict.P_STRICTLY_STRONGER,
                            EquivalenceVerdict.Q_STRICTLY_STRONGER,
                        ]
                    )
                )
                edges.append((i, j, score, relation))
    return MatchGraph(list(range(n)), list(range(m)), edges)
