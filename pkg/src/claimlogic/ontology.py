"""Domain ontologies: named axioms, a taxonomy, synonym groups, part-of
structure and noun kind tags, loaded from a line-oriented text format.

    axiom <name>: <formula>
    isa <child> <parent>
    syn word <a> <b>
    syn phrase <a+b> <c+d>
    partof <part> <whole>
    kind <noun> <kind>
    extern <name> <reference>

The taxonomy must be a tree: every node has at most one parent, there is
exactly one root, and there are no cycles.  Word synonyms form groups
canonicalized to the lexicographically least member; phrase synonyms are
token-sequence rewrites applied before parsing.  Axioms whose name starts
with "classify" double as classification targets for adjudication.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .formulas import Formula, Func, Skolem, Term, Var, parse_formula, predicate_names
from .lowering import Clause, formula_to_clauses

_CLASSIFY_PREFIX = "classify"


def _term_has_skolem(t: Term) -> bool:
    if isinstance(t, Skolem):
        return True
    if isinstance(t, Func):
        return any(_term_has_skolem(a) for a in t.args)
    return False


class OntologyError(Exception):
    pass


@dataclass(frozen=True)
class Axiom:
    name: str
    formula: Formula
    clauses: tuple[Clause, ...]

    @property
    def predicates(self) -> frozenset[str]:
        return frozenset(predicate_names(self.formula))


@dataclass(frozen=True)
class ContextSelection:
    """Axiom clauses relevant to a query, with a parallel source label per
    clause (axiom name, or isa:<child>:<parent> for taxonomy clauses)."""

    clauses: tuple[Clause, ...]
    sources: tuple[str, ...]


@dataclass
class Ontology:
    axioms: tuple[Axiom, ...] = ()
    isa: dict[str, str] = field(default_factory=dict)  # child -> parent
    synonyms: dict[str, str] = field(default_factory=dict)  # word -> canonical
    phrase_rules: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = ()
    part_of: dict[str, str] = field(default_factory=dict)
    kinds: dict[str, str] = field(default_factory=dict)
    extern: dict[str, str] = field(default_factory=dict)

    def canonical_word(self, word: str) -> str:
        return self.synonyms.get(word, word)

    def rewrite_phrases(self, tokens: list[str]) -> list[str]:
        """Leftmost application of phrase rewrite rules, repeated until no
        rule matches.  Rule outputs are themselves subject to later rules,
        bounded to prevent authored rewrite loops from hanging."""
        out = list(tokens)
        limit = (len(tokens) + 1) * (len(self.phrase_rules) + 1)
        for _ in range(limit):
            applied = False
            for i in range(len(out)):
                for src, dst in self.phrase_rules:
                    if tuple(out[i : i + len(src)]) == src:
                        out[i : i + len(src)] = list(dst)
                        applied = True
                        break
                if applied:
                    break
            if not applied:
                break
        return out

    def ancestors(self, noun: str) -> list[str]:
        out: list[str] = []
        cur = self.isa.get(noun)
        while cur is not None:
            out.append(cur)
            cur = self.isa.get(cur)
        return out

    def kind_of(self, noun: str) -> Optional[str]:
        """Kind tag for a noun, inherited along the taxonomy."""
        if noun in self.kinds:
            return self.kinds[noun]
        for anc in self.ancestors(noun):
            if anc in self.kinds:
                return self.kinds[anc]
        return None

    def classification_axioms(self) -> tuple[Axiom, ...]:
        return tuple(a for a in self.axioms if a.name.startswith(_CLASSIFY_PREFIX))

    def taxonomy_clause(self, child: str, parent: str) -> Clause:
        v = Var("x1")
        return Clause(frozenset({(False, child, (v,)), (True, parent, (v,))}))

    def select_context(self, predicates: Iterable[str]) -> ContextSelection:
        """Axioms reachable from a predicate set: an axiom is pulled in when
        it shares a predicate with the growing set, taxonomy edges when
        their child is in it; iterated to a fixpoint so axiom chains are
        followed."""
        names = set(predicates)
        chosen: list[tuple[str, Clause]] = []
        used_axioms: set[str] = set()
        used_edges: set[tuple[str, str]] = set()
        changed = True
        while changed:
            changed = False
            for axiom in self.axioms:
                if axiom.name in used_axioms or axiom.name.startswith(_CLASSIFY_PREFIX):
                    continue
                if axiom.predicates & names:
                    used_axioms.add(axiom.name)
                    for c in axiom.clauses:
                        chosen.append((axiom.name, c))
                    names |= axiom.predicates
                    changed = True
            for child, parent in self.isa.items():
                if (child, parent) in used_edges or child not in names:
                    continue
                used_edges.add((child, parent))
                chosen.append((f"isa:{child}:{parent}", self.taxonomy_clause(child, parent)))
                names.add(parent)
                changed = True
        return ContextSelection(
            tuple(c for _, c in chosen), tuple(s for s, _ in chosen)
        )


def _validate_taxonomy(isa: dict[str, str], lineno_of: dict[str, int]) -> None:
    nodes = set(isa) | set(isa.values())
    if not nodes:
        return
    roots = nodes - set(isa)
    if len(roots) != 1:
        raise OntologyError(
            f"taxonomy must have exactly one root, found {sorted(roots) or 'none'}"
        )
    for start in isa:
        seen = {start}
        cur = isa.get(start)
        while cur is not None:
            if cur in seen:
                raise OntologyError(
                    f"line {lineno_of[start]}: taxonomy cycle through {cur!r}"
                )
            seen.add(cur)
            cur = isa.get(cur)


def load_ontology(path: str | Path) -> Ontology:
    path = Path(path)
    axioms: list[Axiom] = []
    axiom_names: set[str] = set()
    isa: dict[str, str] = {}
    isa_lineno: dict[str, int] = {}
    # (representative, members); the representative is the first word of the
    # line that opened the group
    syn_groups: list[tuple[str, set[str]]] = []
    phrase_rules: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
    part_of: dict[str, str] = {}
    kinds: dict[str, str] = {}
    extern: dict[str, str] = {}

    next_clause_var = 1
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "axiom":
            name, sep, body = rest.partition(":")
            name = name.strip()
            if not sep or not name or not body.strip():
                raise OntologyError(f"line {lineno}: expected 'axiom <name>: <formula>'")
            if name in axiom_names:
                raise OntologyError(f"line {lineno}: duplicate axiom name {name!r}")
            try:
                formula = parse_formula(body.strip())
            except Exception as exc:
                raise OntologyError(f"line {lineno}: {exc}") from exc
            try:
                clauses, next_clause_var = formula_to_clauses(
                    formula, next_clause_var, allow_functions=False
                )
            except Exception as exc:
                raise OntologyError(
                    f"line {lineno}: axiom {name!r} does not clausify without "
                    f"function symbols: {exc}"
                ) from exc
            if not name.startswith(_CLASSIFY_PREFIX):
                # premise axioms must be universal; witness constants they
                # introduced would collide with document witnesses
                has_skolem = any(
                    _term_has_skolem(t)
                    for c in clauses
                    for _, _, args in c.literals
                    for t in args
                )
                if has_skolem:
                    raise OntologyError(
                        f"line {lineno}: axiom {name!r} asserts existence; "
                        f"only classify axioms may do that"
                    )
            axiom_names.add(name)
            axioms.append(Axiom(name, formula, tuple(clauses)))
        elif head == "isa":
            parts = rest.split()
            if len(parts) != 2:
                raise OntologyError(f"line {lineno}: expected 'isa <child> <parent>'")
            child, parent = parts
            if child in isa:
                raise OntologyError(
                    f"line {lineno}: {child!r} already has parent {isa[child]!r}"
                )
            if child == parent:
                raise OntologyError(f"line {lineno}: {child!r} cannot be its own parent")
            isa[child] = parent
            isa_lineno[child] = lineno
        elif head == "syn":
            parts = rest.split()
            if len(parts) != 3 or parts[0] not in ("word", "phrase"):
                raise OntologyError(
                    f"line {lineno}: expected 'syn word <a> <b>' or 'syn phrase <a+b> <c+d>'"
                )
            if parts[0] == "word":
                a, b = parts[1], parts[2]
                hit = [g for g in syn_groups if a in g[1] or b in g[1]]
                if hit:
                    hit[0][1].update((a, b))
                else:
                    syn_groups.append((a, {a, b}))
            else:
                src = tuple(parts[1].split("+"))
                dst = tuple(parts[2].split("+"))
                if not all(src) or not all(dst):
                    raise OntologyError(f"line {lineno}: empty phrase element")
                if src == dst:
                    raise OntologyError(f"line {lineno}: phrase rewrites to itself")
                phrase_rules.append((src, dst))
        elif head == "partof":
            parts = rest.split()
            if len(parts) != 2:
                raise OntologyError(f"line {lineno}: expected 'partof <part> <whole>'")
            part_of[parts[0]] = parts[1]
        elif head == "kind":
            parts = rest.split()
            if len(parts) != 2:
                raise OntologyError(f"line {lineno}: expected 'kind <noun> <kind>'")
            kinds[parts[0]] = parts[1]
        elif head == "extern":
            parts = rest.split(maxsplit=1)
            if len(parts) != 2:
                raise OntologyError(f"line {lineno}: expected 'extern <name> <reference>'")
            extern[parts[0]] = parts[1]
        else:
            raise OntologyError(f"line {lineno}: unknown directive {head!r}")

    # merge transitively overlapping groups; the earliest group keeps its
    # representative
    merged_groups: list[tuple[str, set[str]]] = []
    for rep, group in syn_groups:
        overlapping = [i for i, (_, m) in enumerate(merged_groups) if m & group]
        if overlapping:
            target = merged_groups[overlapping[0]]
            target[1].update(group)
            for i in reversed(overlapping[1:]):
                target[1].update(merged_groups[i][1])
                del merged_groups[i]
        else:
            merged_groups.append((rep, set(group)))
    synonyms: dict[str, str] = {}
    for rep, group in merged_groups:
        for w in group:
            if w != rep:
                synonyms[w] = rep

    _validate_taxonomy(isa, isa_lineno)
    return Ontology(
        axioms=tuple(axioms),
        isa=isa,
        synonyms=synonyms,
        phrase_rules=tuple(phrase_rules),
        part_of=part_of,
        kinds=kinds,
        extern=extern,
    )


def empty_ontology() -> Ontology:
    return Ontology()
