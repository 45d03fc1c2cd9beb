"""Logical formula ASTs shared by the whole pipeline.

The same node types cover the intensional discourse representations built
from text (tense marks, intensionality marks, modifier links) and the plain
first-order formulas used for ontology axioms and prover goals.  Formulas
render to a stable text form and parse back; the renderer and parser are
exact inverses modulo variable naming.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping, Union


class FormulaError(Exception):
    """Raised for malformed formula text or unrepresentable constructs."""


class Tense(Enum):
    NONE = "none"
    PAST = "past"
    FUTURE = "future"


class ModKind(Enum):
    POSSESSIVE = "possessive"
    ATTRIBUTIVE = "attributive"


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name})"


@dataclass(frozen=True)
class Const:
    name: str

    def __repr__(self) -> str:
        return f"Const({self.name})"


@dataclass(frozen=True)
class Skolem:
    """Witness constant introduced by existential elimination.

    Kept distinct from authored constants so ids can never collide with
    input vocabulary and so equivalence checks know which constants are
    abstractable.
    """

    index: int

    @property
    def name(self) -> str:
        return f"sk{self.index}"

    def __repr__(self) -> str:
        return f"Skolem({self.index})"


@dataclass(frozen=True)
class Func:
    """Function term.  Only ever produced inside the proof-search engine;
    the clause pipeline is function free by construction."""

    name: str
    args: tuple["Term", ...]

    def __repr__(self) -> str:
        return f"Func({self.name}, {self.args!r})"


Term = Union[Var, Const, Skolem, Func]


# ---------------------------------------------------------------------------
# formula nodes


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple[Term, ...]
    tense: Tense = Tense.NONE
    intensional: bool = False


@dataclass(frozen=True)
class Mod:
    """Syntactic modification link between two referents, e.g. possessives."""

    x: Term
    y: Term
    kind: ModKind = ModKind.POSSESSIVE


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class HigherPred:
    """Predicate over formulas.  Representable but rejected by first-order
    lowering; inputs containing one are routed to escalation."""

    name: str
    args: tuple[Union["Formula", Term], ...]


Formula = Union[Pred, Mod, Not, And, Or, Implies, ForAll, Exists, HigherPred]

_VAR_RE = re.compile(r"^x[0-9]+$")
_SKOLEM_RE = re.compile(r"^sk[0-9]+$")
_NAME_RE = re.compile(r"^[a-z][a-z0-9_]*$")

_KEYWORDS = {"forall", "exists", "and", "or", "not"}


def conj(parts: list[Formula]) -> Formula:
    """Left-nested conjunction of parts; identity for a single formula."""
    if not parts:
        raise FormulaError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def conjuncts(f: Formula) -> list[Formula]:
    """Flatten a left-nested And chain back into its parts."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def term_is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Func):
        return all(term_is_ground(a) for a in t.args)
    return True


def free_vars(f: Formula) -> set[Var]:
    out: set[Var] = set()

    def term_vars(t: Term) -> Iterator[Var]:
        if isinstance(t, Var):
            yield t
        elif isinstance(t, Func):
            for a in t.args:
                yield from term_vars(a)

    def walk(g: Formula, bound: frozenset[Var]) -> None:
        if isinstance(g, Pred):
            for t in g.args:
                for v in term_vars(t):
                    if v not in bound:
                        out.add(v)
        elif isinstance(g, Mod):
            for t in (g.x, g.y):
                for v in term_vars(t):
                    if v not in bound:
                        out.add(v)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, (And, Or, Implies)):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, (ForAll, Exists)):
            walk(g.body, bound | {g.var})
        elif isinstance(g, HigherPred):
            for a in g.args:
                if isinstance(a, (Var, Const, Skolem, Func)):
                    for v in term_vars(a):
                        if v not in bound:
                            out.add(v)
                else:
                    walk(a, bound)
        else:
            raise FormulaError(f"unknown node {g!r}")

    walk(f, frozenset())
    return out


def substitute_term(t: Term, mapping: Mapping[Term, Term]) -> Term:
    if t in mapping:
        return mapping[t]
    if isinstance(t, Func):
        return Func(t.name, tuple(substitute_term(a, mapping) for a in t.args))
    return t


def substitute(f: Formula, mapping: Mapping[Term, Term]) -> Formula:
    """Replace terms throughout.  Quantified variables shadow the mapping;
    callers keep variable names globally fresh so capture cannot occur."""
    if isinstance(f, Pred):
        return Pred(f.name, tuple(substitute_term(t, mapping) for t in f.args), f.tense, f.intensional)
    if isinstance(f, Mod):
        return Mod(substitute_term(f.x, mapping), substitute_term(f.y, mapping), f.kind)
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, And):
        return And(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Or):
        return Or(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Implies):
        return Implies(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, (ForAll, Exists)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        body = substitute(f.body, inner)
        return type(f)(f.var, body)
    if isinstance(f, HigherPred):
        args = tuple(
            substitute_term(a, mapping) if isinstance(a, (Var, Const, Skolem, Func)) else substitute(a, mapping)
            for a in f.args
        )
        return HigherPred(f.name, args)
    raise FormulaError(f"unknown node {f!r}")


def predicate_names(f: Formula) -> set[str]:
    out: set[str] = set()

    def walk(g: Formula) -> None:
        if isinstance(g, Pred):
            out.add(g.name)
        elif isinstance(g, Mod):
            out.add("mod" if g.kind is ModKind.POSSESSIVE else "amod")
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or, Implies)):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (ForAll, Exists)):
            walk(g.body)
        elif isinstance(g, HigherPred):
            out.add(g.name)
            for a in g.args:
                if not isinstance(a, (Var, Const, Skolem, Func)):
                    walk(a)

    walk(f)
    return out


# ---------------------------------------------------------------------------
# rendering

_TENSE_SUFFIX = {Tense.PAST: "_p", Tense.FUTURE: "_f"}


def render_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Skolem):
        return t.name
    if isinstance(t, Func):
        return t.name + "(" + ",".join(render_term(a) for a in t.args) + ")"
    raise FormulaError(f"unknown term {t!r}")


def atom_name(p: Pred) -> str:
    name = p.name + _TENSE_SUFFIX.get(p.tense, "")
    if p.intensional:
        name += "_i"
    return name


# operator precedence used by both renderer and parser: atoms and negation
# bind tightest, then "and", then "or", then "->" (right associative).
_PREC_IMPLIES = 0
_PREC_OR = 1
_PREC_AND = 2
_PREC_UNARY = 3


def render(f: Formula) -> str:
    """Stable text form.  Chains of one connective render without brackets;
    brackets appear exactly where a looser operator nests inside a tighter
    one, so the output reparses to an identical tree."""
    return _render(f, 0)


def _render(f: Formula, ctx: int) -> str:
    if isinstance(f, Pred):
        if not f.args:
            return atom_name(f)
        return atom_name(f) + "(" + ",".join(render_term(t) for t in f.args) + ")"
    if isinstance(f, Mod):
        name = "mod" if f.kind is ModKind.POSSESSIVE else "amod"
        return f"{name}({render_term(f.x)},{render_term(f.y)})"
    if isinstance(f, Not):
        return "not " + _render(f.body, _PREC_UNARY)
    if isinstance(f, And):
        s = _render(f.left, _PREC_AND) + " and " + _render(f.right, _PREC_AND + 1)
        return "(" + s + ")" if ctx > _PREC_AND else s
    if isinstance(f, Or):
        s = _render(f.left, _PREC_OR) + " or " + _render(f.right, _PREC_OR + 1)
        return "(" + s + ")" if ctx > _PREC_OR else s
    if isinstance(f, Implies):
        s = _render(f.left, _PREC_IMPLIES + 1) + " -> " + _render(f.right, _PREC_IMPLIES)
        return "(" + s + ")" if ctx > _PREC_IMPLIES else s
    if isinstance(f, ForAll):
        return f"forall {f.var.name} ({_render(f.body, 0)})"
    if isinstance(f, Exists):
        return f"exists {f.var.name} ({_render(f.body, 0)})"
    if isinstance(f, HigherPred):
        parts = []
        for a in f.args:
            parts.append(render_term(a) if isinstance(a, (Var, Const, Skolem, Func)) else _render(a, 0))
        return f.name + "(" + ",".join(parts) + ")"
    raise FormulaError(f"unknown node {f!r}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(->|\(|\)|,|[A-Za-z_][A-Za-z0-9_]*)")


def _tokenize_formula(text: str) -> list[str]:
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise FormulaError(f"bad formula character at offset {pos}: {text[pos]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise FormulaError("unexpected end of formula")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise FormulaError(f"expected {tok!r}, got {got!r}")

    def parse(self) -> Formula:
        f = self.implies()
        if self.peek() is not None:
            raise FormulaError(f"trailing tokens starting at {self.peek()!r}")
        return f

    def implies(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.next()
            return Implies(left, self.implies())
        return left

    def disj(self) -> Formula:
        out = self.conj()
        while self.peek() == "or":
            self.next()
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.unary()
        while self.peek() == "and":
            self.next()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "not":
            self.next()
            return Not(self.unary())
        if tok in ("forall", "exists"):
            self.next()
            var = self.next()
            if not _VAR_RE.match(var):
                raise FormulaError(f"quantified variable must look like x1, got {var!r}")
            if self.peek() == "(":
                self.next()
                body = self.implies()
                self.expect(")")
            else:
                # unparenthesized body: a bare atom, negation or nested
                # quantifier extends to the right
                body = self.unary()
            return (ForAll if tok == "forall" else Exists)(Var(var), body)
        if tok == "(":
            self.next()
            body = self.implies()
            self.expect(")")
            return body
        return self.atom()

    def atom(self) -> Formula:
        name = self.next()
        if name in _KEYWORDS or name in ("(", ")", ",", "->"):
            raise FormulaError(f"expected atom, got {name!r}")
        if not _NAME_RE.match(name):
            raise FormulaError(f"bad predicate name {name!r}")
        args: tuple[Term, ...] = ()
        if self.peek() == "(":
            self.next()
            parts = [self.term()]
            while self.peek() == ",":
                self.next()
                parts.append(self.term())
            self.expect(")")
            args = tuple(parts)
        if name == "mod" and len(args) == 2:
            return Mod(args[0], args[1], ModKind.POSSESSIVE)
        if name == "amod" and len(args) == 2:
            return Mod(args[0], args[1], ModKind.ATTRIBUTIVE)
        base, tense, intens = _split_atom_name(name)
        return Pred(base, args, tense, intens)

    def term(self) -> Term:
        name = self.next()
        if name in _KEYWORDS or name in ("(", ")", ",", "->"):
            raise FormulaError(f"expected term, got {name!r}")
        if self.peek() == "(":
            self.next()
            parts = [self.term()]
            while self.peek() == ",":
                self.next()
                parts.append(self.term())
            self.expect(")")
            return Func(name, tuple(parts))
        return make_term(name)


def _split_atom_name(name: str) -> tuple[str, Tense, bool]:
    intens = False
    tense = Tense.NONE
    if name.endswith("_i"):
        intens = True
        name = name[:-2]
    if name.endswith("_p"):
        tense = Tense.PAST
        name = name[:-2]
    elif name.endswith("_f"):
        tense = Tense.FUTURE
        name = name[:-2]
    if not name:
        raise FormulaError("empty predicate name after stripping suffixes")
    return name, tense, intens


def make_term(name: str) -> Term:
    """Classify a bare term name: x<N> is a variable, sk<N> a witness
    constant, anything else an authored constant."""
    if _VAR_RE.match(name):
        return Var(name)
    if _SKOLEM_RE.match(name):
        return Skolem(int(name[2:]))
    return Const(name)


def parse_formula(text: str) -> Formula:
    tokens = _tokenize_formula(text)
    if not tokens:
        raise FormulaError("empty formula")
    return _Parser(tokens).parse()


def renumber_vars(f: Formula) -> Formula:
    """Rename all variables to x1, x2, ... in order of first appearance,
    binders included.  Used for comparing formulas modulo numbering; the
    pipeline keeps variables globally fresh so shadowing cannot occur."""
    order: dict[Var, Var] = {}

    def rename(v: Var) -> Var:
        if v not in order:
            order[v] = Var(f"x{len(order) + 1}")
        return order[v]

    def term(t: Term) -> Term:
        if isinstance(t, Var):
            return rename(t)
        if isinstance(t, Func):
            return Func(t.name, tuple(term(a) for a in t.args))
        return t

    def walk(g: Formula) -> Formula:
        if isinstance(g, Pred):
            return Pred(g.name, tuple(term(t) for t in g.args), g.tense, g.intensional)
        if isinstance(g, Mod):
            return Mod(term(g.x), term(g.y), g.kind)
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(walk(g.left), walk(g.right))
        if isinstance(g, (ForAll, Exists)):
            v = rename(g.var)
            return type(g)(v, walk(g.body))
        if isinstance(g, HigherPred):
            args = tuple(
                term(a) if isinstance(a, (Var, Const, Skolem, Func)) else walk(a)
                for a in g.args
            )
            return HigherPred(g.name, args)
        raise FormulaError(f"unknown node {g!r}")

    return walk(f)
