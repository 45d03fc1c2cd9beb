"""Resolution theorem prover over function-free clause sets.

Binary resolution plus factoring with forward and backward subsumption,
run as a given-clause saturation loop with a smallest-clause-first queue
(FIFO among equals).  Entailment is decided by refuting the premise
together with the negated goal; exhausting the queue without the empty
clause is a genuine saturation, which for this clause language certifies
consistency.  Proof objects list every derivation step and replay
mechanically.

Queries whose clause form needs function symbols (an existential under a
universal) leave the saturation-decidable fragment; for those, a proved
refutation is still trusted, and non-entailment is certified instead by an
explicit finite counter-model searched over small domains.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

from .formulas import (
    And,
    Const,
    Exists,
    ForAll,
    Formula,
    FormulaError,
    Func,
    Implies,
    Not,
    Or,
    Pred,
    Skolem,
    Term,
    Var,
)
from .lowering import (
    Clause,
    Literal,
    NestedExistentialError,
    clause_is_tautology,
    formula_to_clauses,
    make_clause,
    render_clause,
)


class Verdict(Enum):
    PROVED = "PROVED"
    REFUTED = "REFUTED"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class Budget:
    max_duration_ms: int = 500
    max_clauses: int = 20000

    def deadline(self, start: float) -> float:
        return start + self.max_duration_ms / 1000.0


@dataclass(frozen=True)
class ProofStep:
    index: int  # 1-based within the proof
    clause: Clause
    rule: str  # "input" | "resolve a b" | "factor a"


@dataclass
class ProofResult:
    verdict: Verdict
    proof: Optional[tuple[ProofStep, ...]] = None
    clauses_generated: int = 0
    elapsed_ms: float = 0.0
    model: Optional[dict] = None  # counter-model witness for some REFUTED results
    inputs: tuple[Clause, ...] = ()  # full clause set the verdict was decided over


class EquivalenceVerdict(Enum):
    EQUIVALENT = "EQUIVALENT"
    P_STRICTLY_STRONGER = "P_STRICTLY_STRONGER"
    Q_STRICTLY_STRONGER = "Q_STRICTLY_STRONGER"
    INCOMPARABLE = "INCOMPARABLE"
    TIMEOUT = "TIMEOUT"


@dataclass
class EquivalenceResult:
    verdict: EquivalenceVerdict
    forward: ProofResult  # p entails q
    backward: ProofResult  # q entails p


# ---------------------------------------------------------------------------
# substitutions and unification

Subst = dict[Var, Term]


def _resolve(t: Term, theta: Subst) -> Term:
    while isinstance(t, Var) and t in theta:
        t = theta[t]
    return t


def _occurs(v: Var, t: Term, theta: Subst) -> bool:
    t = _resolve(t, theta)
    if t == v:
        return True
    if isinstance(t, Func):
        return any(_occurs(v, a, theta) for a in t.args)
    return False


def unify_terms(a: Term, b: Term, theta: Subst) -> Optional[Subst]:
    a = _resolve(a, theta)
    b = _resolve(b, theta)
    if a == b:
        return theta
    if isinstance(a, Var):
        if _occurs(a, b, theta):
            return None
        theta = dict(theta)
        theta[a] = b
        return theta
    if isinstance(b, Var):
        return unify_terms(b, a, theta)
    if isinstance(a, Func) and isinstance(b, Func):
        if a.name != b.name or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            result = unify_terms(x, y, theta)
            if result is None:
                return None
            theta = result
        return theta
    return None


def unify_tuples(xs: tuple[Term, ...], ys: tuple[Term, ...], theta: Subst) -> Optional[Subst]:
    if len(xs) != len(ys):
        return None
    for x, y in zip(xs, ys):
        result = unify_terms(x, y, theta)
        if result is None:
            return None
        theta = result
    return theta


def apply_term(t: Term, theta: Subst) -> Term:
    t = _resolve(t, theta)
    if isinstance(t, Func):
        return Func(t.name, tuple(apply_term(a, theta) for a in t.args))
    return t


def apply_literal(lit: Literal, theta: Subst) -> Literal:
    sign, name, args = lit
    return (sign, name, tuple(apply_term(a, theta) for a in args))


def apply_clause(c: Clause, theta: Subst) -> Clause:
    return Clause(frozenset(apply_literal(l, theta) for l in c.literals))


def clause_vars(c: Clause) -> set[Var]:
    out: set[Var] = set()

    def walk(t: Term) -> None:
        if isinstance(t, Var):
            out.add(t)
        elif isinstance(t, Func):
            for a in t.args:
                walk(a)

    for _, _, args in c.literals:
        for t in args:
            walk(t)
    return out


def _rename_apart(c: Clause, taken: set[Var]) -> Clause:
    clash = clause_vars(c) & taken
    if not clash:
        return c
    theta: Subst = {}
    for v in clash:
        fresh = Var(v.name + "r")
        while fresh in taken:
            fresh = Var(fresh.name + "r")
        theta[v] = fresh
    return apply_clause(c, theta)


# ---------------------------------------------------------------------------
# canonical clause form (for duplicate detection and stable rendering)

_canon_cache: dict[Clause, str] = {}


def _blind_key(lit: Literal) -> tuple:
    sign, name, args = lit

    def kind(t: Term) -> tuple:
        if isinstance(t, Var):
            return ("v",)
        if isinstance(t, Const):
            return ("c", t.name)
        if isinstance(t, Skolem):
            return ("s", t.index)
        return ("f", t.name, tuple(kind(a) for a in t.args))

    return (name, not sign, tuple(kind(a) for a in args))


def canonical_render(c: Clause) -> str:
    """Clause text invariant under variable renaming and literal order.
    Tied literal groups are permuted (small groups only) to find the
    lexicographically least numbering."""
    cached = _canon_cache.get(c)
    if cached is not None:
        return cached
    lits = sorted(c.literals, key=_blind_key)
    groups: list[list[Literal]] = []
    for lit in lits:
        if groups and _blind_key(groups[-1][0]) == _blind_key(lit):
            groups[-1].append(lit)
        else:
            groups.append([lit])

    def render_ordering(ordering: list[Literal]) -> str:
        numbering: dict[Var, str] = {}

        def term_str(t: Term) -> str:
            if isinstance(t, Var):
                if t not in numbering:
                    numbering[t] = f"x{len(numbering) + 1}"
                return numbering[t]
            if isinstance(t, Func):
                return t.name + "(" + ",".join(term_str(a) for a in t.args) + ")"
            return t.name
        parts = []
        for sign, name, args in ordering:
            body = name if not args else name + "(" + ",".join(term_str(a) for a in args) + ")"
            parts.append(body if sign else "-" + body)
        return " | ".join(parts)

    best: Optional[str] = None
    # cap the permutation work; oversized tie groups fall back to one order
    group_perms = [
        list(itertools.permutations(g)) if len(g) <= 4 else [tuple(g)] for g in groups
    ]
    for combo in itertools.product(*group_perms):
        ordering = [lit for group in combo for lit in group]
        s = render_ordering(ordering)
        if best is None or s < best:
            best = s
    result = best if best is not None else "false"
    _canon_cache[c] = result
    return result


# ---------------------------------------------------------------------------
# inference rules


def _sorted_literals(c: Clause) -> list[Literal]:
    return sorted(c.literals, key=_blind_key)


def resolvents(c1: Clause, c2: Clause) -> Iterator[Clause]:
    """All binary resolvents of c1 and c2 (renamed apart)."""
    c2 = _rename_apart(c2, clause_vars(c1))
    lits1 = _sorted_literals(c1)
    lits2 = _sorted_literals(c2)
    for l1 in lits1:
        for l2 in lits2:
            if l1[0] == l2[0] or l1[1] != l2[1] or len(l1[2]) != len(l2[2]):
                continue
            theta = unify_tuples(l1[2], l2[2], {})
            if theta is None:
                continue
            rest = [apply_literal(l, theta) for l in lits1 if l != l1]
            rest += [apply_literal(l, theta) for l in lits2 if l != l2]
            yield make_clause(rest)


def factors(c: Clause) -> Iterator[Clause]:
    lits = _sorted_literals(c)
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            a, b = lits[i], lits[j]
            if a[0] != b[0] or a[1] != b[1] or len(a[2]) != len(b[2]):
                continue
            theta = unify_tuples(a[2], b[2], {})
            if theta is None:
                continue
            yield apply_clause(c, theta)


def subsumes(c: Clause, d: Clause) -> bool:
    """True when some substitution maps every literal of c onto a literal
    of d (variables of c bind to terms of d, one way)."""
    if not c.literals:
        return True
    if len(c.literals) > len(d.literals):
        return False
    d_lits = list(d.literals)

    def match_term(a: Term, b: Term, theta: Subst) -> Optional[Subst]:
        if isinstance(a, Var):
            bound = theta.get(a)
            if bound is None:
                theta = dict(theta)
                theta[a] = b
                return theta
            return theta if bound == b else None
        if isinstance(a, Func):
            if not isinstance(b, Func) or a.name != b.name or len(a.args) != len(b.args):
                return None
            for x, y in zip(a.args, b.args):
                result = match_term(x, y, theta)
                if result is None:
                    return None
                theta = result
            return theta
        return theta if a == b else None

    def match_literal(a: Literal, b: Literal, theta: Subst) -> Optional[Subst]:
        if a[0] != b[0] or a[1] != b[1] or len(a[2]) != len(b[2]):
            return None
        for x, y in zip(a[2], b[2]):
            result = match_term(x, y, theta)
            if result is None:
                return None
            theta = result
        return theta

    c_lits = _sorted_literals(c)

    def backtrack(i: int, theta: Subst) -> bool:
        if i == len(c_lits):
            return True
        for b in d_lits:
            result = match_literal(c_lits[i], b, theta)
            if result is not None and backtrack(i + 1, result):
                return True
        return False

    return backtrack(0, {})


# ---------------------------------------------------------------------------
# saturation

_RULE_INPUT = "input"


@dataclass
class _Step:
    clause: Clause
    rule: str
    parents: tuple[int, ...]
    sos: bool
    alive: bool = True


class _Saturation:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.start = time.monotonic()
        self.deadline = budget.deadline(self.start)
        self.steps: list[_Step] = []
        self.by_canon: dict[str, int] = {}
        self.active: list[int] = []
        self.queue: list[tuple[int, int, int]] = []  # (size, seq, idx)
        self.seq = 0
        self.generated = 0
        self.empty_idx: Optional[int] = None

    def out_of_budget(self) -> bool:
        return time.monotonic() > self.deadline or self.generated > self.budget.max_clauses

    def add(self, clause: Clause, rule: str, parents: tuple[int, ...], sos: bool) -> None:
        if clause_is_tautology(clause):
            return
        canon = canonical_render(clause)
        if canon in self.by_canon:
            return
        # forward subsumption against all live clauses
        for idx in self.by_canon.values():
            step = self.steps[idx]
            if step.alive and len(step.clause) <= len(clause) and subsumes(step.clause, clause):
                return
        idx = len(self.steps)
        self.steps.append(_Step(clause, rule, parents, sos))
        self.by_canon[canon] = idx
        if clause.is_empty:
            self.empty_idx = idx
            return
        # backward subsumption
        for other_idx in self.by_canon.values():
            other = self.steps[other_idx]
            if (
                other_idx != idx
                and other.alive
                and len(clause) <= len(other.clause)
                and subsumes(clause, other.clause)
            ):
                other.alive = False
        import heapq

        heapq.heappush(self.queue, (len(clause), self.seq, idx))
        self.seq += 1

    def run(self, inputs: Sequence[Clause], sos_marks: Optional[Sequence[bool]]) -> Verdict:
        import heapq

        for i, c in enumerate(inputs):
            mark = True if sos_marks is None else sos_marks[i]
            self.add(c, _RULE_INPUT, (), mark)
            if self.empty_idx is not None:
                return Verdict.PROVED
        while self.queue:
            if self.out_of_budget():
                return Verdict.TIMEOUT
            _, _, given_idx = heapq.heappop(self.queue)
            given = self.steps[given_idx]
            if not given.alive:
                continue
            for f in factors(given.clause):
                self.generated += 1
                self.add(f, f"factor {given_idx}", (given_idx,), given.sos)
                if self.empty_idx is not None:
                    return Verdict.PROVED
                if self.out_of_budget():
                    return Verdict.TIMEOUT
            for other_idx in list(self.active):
                other = self.steps[other_idx]
                if not other.alive or not given.alive:
                    continue
                if not (given.sos or other.sos):
                    continue
                for r in resolvents(given.clause, other.clause):
                    self.generated += 1
                    self.add(
                        r,
                        f"resolve {given_idx} {other_idx}",
                        (given_idx, other_idx),
                        True,
                    )
                    if self.empty_idx is not None:
                        return Verdict.PROVED
                    if self.out_of_budget():
                        return Verdict.TIMEOUT
            # self-resolution matters for clauses like transitivity rules
            if given.alive:
                for r in resolvents(given.clause, given.clause):
                    self.generated += 1
                    self.add(r, f"resolve {given_idx} {given_idx}", (given_idx, given_idx), given.sos)
                    if self.empty_idx is not None:
                        return Verdict.PROVED
                    if self.out_of_budget():
                        return Verdict.TIMEOUT
            if given.alive:
                self.active.append(given_idx)
        return Verdict.REFUTED

    def extract_proof(self) -> tuple[ProofStep, ...]:
        assert self.empty_idx is not None
        needed: list[int] = []
        seen: set[int] = set()

        def visit(idx: int) -> None:
            if idx in seen:
                return
            seen.add(idx)
            for p in self.steps[idx].parents:
                visit(p)
            needed.append(idx)

        visit(self.empty_idx)
        renumber = {idx: n + 1 for n, idx in enumerate(needed)}
        out: list[ProofStep] = []
        for idx in needed:
            step = self.steps[idx]
            rule = step.rule
            if rule.startswith("resolve "):
                a, b = rule.split()[1:]
                rule = f"resolve {renumber[int(a)]} {renumber[int(b)]}"
            elif rule.startswith("factor "):
                a = rule.split()[1]
                rule = f"factor {renumber[int(a)]}"
            out.append(ProofStep(renumber[idx], step.clause, rule))
        return tuple(out)


def saturate(
    clauses: Sequence[Clause],
    budget: Budget,
    sos_marks: Optional[Sequence[bool]] = None,
) -> ProofResult:
    engine = _Saturation(budget)
    verdict = engine.run(clauses, sos_marks)
    proof = engine.extract_proof() if verdict is Verdict.PROVED else None
    return ProofResult(
        verdict,
        proof,
        engine.generated,
        (time.monotonic() - engine.start) * 1000.0,
        inputs=tuple(clauses),
    )


# ---------------------------------------------------------------------------
# proof rendering and replay


def render_proof(proof: Sequence[ProofStep]) -> str:
    return "\n".join(f"{s.index}: {render_clause(s.clause)} [{s.rule}]" for s in proof)


def replay_proof(proof: Sequence[ProofStep], inputs: Sequence[Clause]) -> bool:
    """Mechanically re-check a proof: every step is an input clause or
    follows from its parents by one resolution or factoring step, and the
    last step is the empty clause."""
    if not proof:
        return False
    input_canon = {canonical_render(c) for c in inputs}
    by_index: dict[int, Clause] = {}
    for step in proof:
        claimed = canonical_render(step.clause)
        if step.rule == _RULE_INPUT:
            if claimed not in input_canon:
                return False
        elif step.rule.startswith("resolve "):
            a, b = (int(x) for x in step.rule.split()[1:])
            if a not in by_index or b not in by_index:
                return False
            candidates = {canonical_render(r) for r in resolvents(by_index[a], by_index[b])}
            candidates |= {canonical_render(r) for r in resolvents(by_index[b], by_index[a])}
            if claimed not in candidates:
                return False
        elif step.rule.startswith("factor "):
            a = int(step.rule.split()[1])
            if a not in by_index:
                return False
            candidates = {canonical_render(f) for f in factors(by_index[a])}
            if claimed not in candidates:
                return False
        else:
            return False
        by_index[step.index] = step.clause
    return proof[-1].clause.is_empty


# ---------------------------------------------------------------------------
# entailment


def _clauses_have_functions(clauses: Iterable[Clause]) -> bool:
    def term_has(t: Term) -> bool:
        return isinstance(t, Func)

    return any(term_has(t) for c in clauses for _, _, args in c.literals for t in args)


def _max_skolem_index(clauses: Iterable[Clause]) -> int:
    best = 0

    def walk(t: Term) -> None:
        nonlocal best
        if isinstance(t, Skolem):
            best = max(best, t.index)
        elif isinstance(t, Func):
            for a in t.args:
                walk(a)

    for c in clauses:
        for _, _, args in c.literals:
            for t in args:
                walk(t)
    return best


def negated_goal_clauses(goal: Formula, next_skolem: int) -> tuple[list[Clause], bool]:
    """Clause form of the negated goal.  Returns (clauses, used_functions)."""
    try:
        clauses, _ = formula_to_clauses(Not(goal), next_skolem, allow_functions=False)
        return clauses, False
    except NestedExistentialError:
        clauses, _ = formula_to_clauses(Not(goal), next_skolem, allow_functions=True)
        return clauses, True


def entails(
    delta: Sequence[Clause],
    goal: Formula,
    budget: Budget = Budget(),
    sos: bool = False,
) -> ProofResult:
    """Three-valued entailment: PROVED on refutation of delta plus the
    negated goal, REFUTED on saturation (or an explicit finite
    counter-model when the query needs function symbols), TIMEOUT when the
    budget runs out first.

    With sos=True, resolution is restricted to descendants of the negated
    goal; complete only when delta itself is consistent.
    """
    start = time.monotonic()
    neg, used_funcs = negated_goal_clauses(goal, _max_skolem_index(delta) + 1)
    all_clauses = list(delta) + neg
    has_funcs = used_funcs or _clauses_have_functions(all_clauses)
    if not has_funcs:
        marks = [False] * len(delta) + [True] * len(neg) if sos else None
        return saturate(all_clauses, budget, marks)
    # outside the function-free fragment: resolution for PROVED, finite
    # counter-model search for REFUTED
    half = Budget(budget.max_duration_ms // 2, budget.max_clauses)
    result = saturate(all_clauses, half)
    if result.verdict in (Verdict.PROVED, Verdict.REFUTED):
        result.elapsed_ms = (time.monotonic() - start) * 1000.0
        return result
    deadline = budget.deadline(start)
    model = find_finite_model(all_clauses, deadline=deadline)
    elapsed = (time.monotonic() - start) * 1000.0
    if model is not None:
        return ProofResult(
            Verdict.REFUTED, None, result.clauses_generated, elapsed, model,
            inputs=tuple(all_clauses),
        )
    return ProofResult(
        Verdict.TIMEOUT, None, result.clauses_generated, elapsed, inputs=tuple(all_clauses)
    )


def entails_formulas(
    premises: Sequence[Formula],
    goal: Formula,
    budget: Budget = Budget(),
) -> ProofResult:
    """Entailment between formulas; premises may clausify to function terms
    (existentials under universals), in which case the counter-model route
    backs the REFUTED verdict."""
    clauses: list[Clause] = []
    counter = 1
    for f in premises:
        try:
            new, counter = formula_to_clauses(f, counter, allow_functions=False)
        except NestedExistentialError:
            new, counter = formula_to_clauses(f, counter, allow_functions=True)
        clauses.extend(new)
    return entails(clauses, goal, budget)


def consistent(
    clauses: Sequence[Clause], budget: Budget = Budget()
) -> ProofResult:
    """Satisfiability via saturation: PROVED means the empty clause was
    derived (inconsistent), REFUTED means saturated without it
    (consistent)."""
    return saturate(list(clauses), budget)


# ---------------------------------------------------------------------------
# clause sets as goals (for equivalence of lowered representations)


def clauses_goal_formula(clauses: Sequence[Clause]) -> Formula:
    """A formula asserting the content of a clause set: witness constants
    are abstracted to existential variables (they are arbitrary names),
    clause variables stay universal, authored constants stay fixed."""
    if not clauses:
        # empty clause set asserts nothing; use a tautology
        return Implies(Pred("true", ()), Pred("true", ()))
    skolems = sorted(
        {t for c in clauses for _, _, args in c.literals for t in args if isinstance(t, Skolem)},
        key=lambda s: s.index,
    )
    # number abstraction variables above anything used in the clauses
    used = {
        int(v.name[1:])
        for c in clauses
        for v in clause_vars(c)
        if v.name.startswith("x") and v.name[1:].isdigit()
    }
    base = max(used, default=0)
    sk_map: dict[Term, Term] = {
        s: Var(f"x{base + i + 1}") for i, s in enumerate(skolems)
    }
    parts: list[Formula] = []
    for c in clauses:
        lits: list[Formula] = []
        for sign, name, args in sorted(c.literals, key=_blind_key):
            mapped = tuple(sk_map.get(t, t) if not isinstance(t, Func) else t for t in args)
            atom = Pred(name, mapped)
            lits.append(atom if sign else Not(atom))
        body: Formula = lits[0]
        for l in lits[1:]:
            body = Or(body, l)
        for v in sorted(clause_vars(c), key=lambda v: v.name):
            body = ForAll(v, body)
        parts.append(body)
    out: Formula = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    for s in reversed(skolems):
        out = Exists(sk_map[s], out)  # type: ignore[arg-type]
    return out


def equivalent(
    p: Sequence[Clause],
    q: Sequence[Clause],
    budget: Budget = Budget(),
    background: Sequence[Clause] = (),
    sos: bool = False,
) -> EquivalenceResult:
    """Bidirectional entailment between two clause sets, with optional
    shared background axioms on the premise side of both directions."""
    forward = entails(list(p) + list(background), clauses_goal_formula(q), budget, sos=sos)
    backward = entails(list(q) + list(background), clauses_goal_formula(p), budget, sos=sos)
    if Verdict.TIMEOUT in (forward.verdict, backward.verdict):
        verdict = EquivalenceVerdict.TIMEOUT
    elif forward.verdict is Verdict.PROVED and backward.verdict is Verdict.PROVED:
        verdict = EquivalenceVerdict.EQUIVALENT
    elif forward.verdict is Verdict.PROVED:
        verdict = EquivalenceVerdict.P_STRICTLY_STRONGER
    elif backward.verdict is Verdict.PROVED:
        verdict = EquivalenceVerdict.Q_STRICTLY_STRONGER
    else:
        verdict = EquivalenceVerdict.INCOMPARABLE
    return EquivalenceResult(verdict, forward, backward)


# ---------------------------------------------------------------------------
# propositional decision by truth table


class PropSizeError(Exception):
    pass


def prop_decide(f: Formula, max_atoms: int = 20) -> list[dict[str, bool]]:
    """Exhaustive truth-table models of a propositional formula (atoms are
    zero-argument predicates).  Returns every satisfying assignment in
    binary counting order over the sorted atom names; empty list means
    unsatisfiable."""
    atoms: set[str] = set()

    def collect(g: Formula) -> None:
        if isinstance(g, Pred):
            if g.args:
                raise FormulaError("prop_decide expects zero-argument atoms")
            atoms.add(g.name)
        elif isinstance(g, Not):
            collect(g.body)
        elif isinstance(g, (And, Or, Implies)):
            collect(g.left)
            collect(g.right)
        else:
            raise FormulaError(f"not propositional: {g!r}")

    collect(f)
    names = sorted(atoms)
    if len(names) > max_atoms:
        raise PropSizeError(f"{len(names)} atoms exceeds the {max_atoms} atom bound")

    def eval_f(g: Formula, row: dict[str, bool]) -> bool:
        if isinstance(g, Pred):
            return row[g.name]
        if isinstance(g, Not):
            return not eval_f(g.body, row)
        if isinstance(g, And):
            return eval_f(g.left, row) and eval_f(g.right, row)
        if isinstance(g, Or):
            return eval_f(g.left, row) or eval_f(g.right, row)
        if isinstance(g, Implies):
            return (not eval_f(g.left, row)) or eval_f(g.right, row)
        raise FormulaError(f"not propositional: {g!r}")

    models: list[dict[str, bool]] = []
    for bits in range(2 ** len(names)):
        row = {
            name: bool((bits >> (len(names) - 1 - i)) & 1) for i, name in enumerate(names)
        }
        if eval_f(f, row):
            models.append(row)
    return models


# ---------------------------------------------------------------------------
# finite counter-model search

_MAX_DOMAIN = 3
_MAX_FUNC_TABLES = 20000


def find_finite_model(
    clauses: Sequence[Clause],
    max_domain: int = _MAX_DOMAIN,
    deadline: Optional[float] = None,
) -> Optional[dict]:
    """Search for a model over domains of size 1..max_domain.  A found
    model is a sound certificate of satisfiability regardless of domain
    size.  Returns a description of the model or None."""
    consts: set[Term] = set()
    funcs: dict[str, int] = {}
    preds: dict[str, int] = {}

    def scan_term(t: Term) -> None:
        if isinstance(t, (Const, Skolem)):
            consts.add(t)
        elif isinstance(t, Func):
            funcs[t.name] = len(t.args)
            for a in t.args:
                scan_term(a)

    for c in clauses:
        for sign, name, args in c.literals:
            preds[name] = len(args)
            for t in args:
                scan_term(t)

    const_list = sorted(consts, key=lambda t: (isinstance(t, Skolem), getattr(t, "name", "")))
    func_list = sorted(funcs)

    for n in range(1, max_domain + 1):
        if deadline is not None and time.monotonic() > deadline:
            return None
        for const_assign in itertools.product(range(n), repeat=len(const_list)):
            table_space = 1
            func_domains: list[list[tuple[int, ...]]] = []
            for fname in func_list:
                arity = funcs[fname]
                points = n ** arity
                table_space *= n ** points
                func_domains.append(list(itertools.product(range(n), repeat=points)))
            if table_space > _MAX_FUNC_TABLES:
                break  # function tables too large at this domain size
            for tables in itertools.product(*func_domains):
                if deadline is not None and time.monotonic() > deadline:
                    return None
                model = _try_model(
                    clauses, n, const_list, const_assign, func_list, funcs, tables, deadline
                )
                if model is not None:
                    return model
    return None


def _try_model(
    clauses: Sequence[Clause],
    n: int,
    const_list: list[Term],
    const_assign: tuple[int, ...],
    func_list: list[str],
    func_arities: dict[str, int],
    tables: tuple[tuple[int, ...], ...],
    deadline: Optional[float],
) -> Optional[dict]:
    const_val = {c: v for c, v in zip(const_list, const_assign)}
    func_tables: dict[str, dict[tuple[int, ...], int]] = {}
    for fname, table in zip(func_list, tables):
        arity = func_arities[fname]
        points = list(itertools.product(range(n), repeat=arity))
        func_tables[fname] = {pt: val for pt, val in zip(points, table)}

    def eval_term(t: Term, env: dict[Var, int]) -> int:
        if isinstance(t, Var):
            return env[t]
        if isinstance(t, Func):
            return func_tables[t.name][tuple(eval_term(a, env) for a in t.args)]
        return const_val[t]

    # ground all clauses into propositional clauses over (pred, elements)
    ground: list[list[tuple[bool, tuple]]] = []
    for c in clauses:
        vs = sorted(clause_vars(c), key=lambda v: v.name)
        for values in itertools.product(range(n), repeat=len(vs)):
            env = dict(zip(vs, values))
            lits = []
            for sign, name, args in sorted(c.literals, key=_blind_key):
                atom = (name, tuple(eval_term(t, env) for t in args))
                lits.append((sign, atom))
            ground.append(lits)

    assignment: dict[tuple, bool] = {}

    def dpll(clauses_left: list[list[tuple[bool, tuple]]]) -> bool:
        if deadline is not None and time.monotonic() > deadline:
            return False
        # simplify
        simplified: list[list[tuple[bool, tuple]]] = []
        unit: Optional[tuple[bool, tuple]] = None
        for lits in clauses_left:
            keep: list[tuple[bool, tuple]] = []
            satisfied = False
            for sign, atom in lits:
                val = assignment.get(atom)
                if val is None:
                    keep.append((sign, atom))
                elif val == sign:
                    satisfied = True
                    break
            if satisfied:
                continue
            if not keep:
                return False
            if len(keep) == 1 and unit is None:
                unit = keep[0]
            simplified.append(keep)
        if not simplified:
            return True
        if unit is not None:
            sign, atom = unit
            assignment[atom] = sign
            if dpll(simplified):
                return True
            del assignment[atom]
            return False
        sign, atom = simplified[0][0]
        for choice in (sign, not sign):
            assignment[atom] = choice
            if dpll(simplified):
                return True
            del assignment[atom]
        return False

    if dpll(ground):
        return {
            "domain": n,
            "constants": {getattr(c, "name", str(c)): v for c, v in const_val.items()},
            "functions": {f: dict(t) for f, t in func_tables.items()},
            "atoms": {f"{name}({','.join(map(str, elems))})": val for (name, elems), val in sorted(assignment.items())},
        }
    return None
