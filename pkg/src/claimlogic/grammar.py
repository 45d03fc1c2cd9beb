"""Tokenizer and chart parser for the controlled English fragment.

The grammar covers simple declaratives (quantified subjects and objects,
possessive 's, do-support negation, progressives, copula + adjective,
"because" subordination, object pronouns) plus the determiner-less
imperative and noun-phrase forms that occur on bill lines.  Parsing is an
Earley chart over a fixed rule set; lexical categories come from the
lexicon, so every reading of an ambiguous token is explored and whatever
fails the grammar simply yields no tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .lexicon import Aspect, Lexicon, MorphAnalysis, MorphTense, Number, WordClass


class ParseError(Exception):
    pass


class UnknownTokenError(ParseError):
    def __init__(self, token: str):
        super().__init__(f"unknown token {token!r}")
        self.token = token


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_PATTERN = re.compile(
    r"""
    (?P<word>[A-Za-z][A-Za-z-]*)
    | (?P<clitic>'s)
    | (?P<number>\d+(?:\.\d+)?)
    | (?P<punct>[.,;])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # word | clitic | number | punct
    text: str
    start: int


def tokenize(text: str) -> list[Token]:
    """Split text into word, clitic, number and punctuation tokens.
    Anything that is not whitespace and matches no token class is an error."""
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_PATTERN.match(text, pos)
        if not m:
            raise ParseError(f"cannot tokenize at offset {pos}: {text[pos:pos + 12]!r}")
        kind = m.lastgroup or "word"
        tokens.append(Token(kind, m.group(0), pos))
        pos = m.end()
    return tokens


def detokenize(tokens: list[Token]) -> str:
    """Inverse of tokenize up to whitespace: single spaces between tokens,
    none before clitics and sentence punctuation."""
    parts: list[str] = []
    for t in tokens:
        if parts and t.kind not in ("clitic", "punct"):
            parts.append(" ")
        parts.append(t.text)
    return "".join(parts)


def as_tokens(texts: list[str]) -> list[Token]:
    """Rebuild Token records from plain strings (after spelling correction
    and idiom fusion, original offsets no longer apply)."""
    out: list[Token] = []
    pos = 0
    for text in texts:
        if text in (".", ",", ";"):
            kind = "punct"
        elif text == "'s":
            kind = "clitic"
        elif text and text[0].isdigit():
            kind = "number"
        else:
            kind = "word"
        out.append(Token(kind, text, pos))
        pos += len(text) + 1
    return out


def split_sentences(tokens: list[Token]) -> list[list[Token]]:
    """Split a token stream at sentence terminators, keeping the terminator
    with its sentence."""
    out: list[list[Token]] = []
    current: list[Token] = []
    for t in tokens:
        current.append(t)
        if t.kind == "punct" and t.text == ".":
            out.append(current)
            current = []
    if current:
        out.append(current)
    return out


# ---------------------------------------------------------------------------
# grammar

RULES: list[tuple[str, str, tuple[str, ...]]] = [
    ("S1", "S", ("CL", "TERM")),
    ("S2", "S", ("IMP", "TERM")),
    ("S3", "S", ("NPL", "TERM")),
    ("C1", "CL", ("NP", "VP")),
    ("C2", "CL", ("ADV", "CL")),
    ("C3", "CL", ("CL", "SUB", "CL")),
    ("N1", "NP", ("DET", "NOM")),
    ("N2", "NP", ("PN",)),
    ("N3", "NP", ("PRON",)),
    ("N4", "NP", ("NP", "POSS", "NOM")),
    ("M1", "NOM", ("N",)),
    ("M2", "NOM", ("ADJ", "NOM")),
    ("M3", "NOM", ("N", "NOM")),
    ("V1", "VP", ("VFIN",)),
    ("V2", "VP", ("VFIN", "NP")),
    ("V3", "VP", ("VFIN", "PP")),
    ("V4", "VP", ("AUXDO", "NEG", "VBASE")),
    ("V5", "VP", ("AUXDO", "NEG", "VBASE", "NP")),
    ("V6", "VP", ("AUXDO", "NEG", "VBASE", "PP")),
    ("V7", "VP", ("AUXBE", "VPROG")),
    ("V8", "VP", ("AUXBE", "VPROG", "NP")),
    ("V9", "VP", ("AUXBE", "VPROG", "PP")),
    ("V10", "VP", ("AUXBE", "ADJ")),
    ("V11", "VP", ("AUXWILL", "VBASE")),
    ("V12", "VP", ("AUXWILL", "VBASE", "NP")),
    ("V13", "VP", ("AUXWILL", "VBASE", "PP")),
    ("P1", "PP", ("PREP", "NP")),
    ("I1", "IMP", ("VBASE", "NOM")),
    ("I2", "IMP", ("VBASE", "PP")),
    ("I3", "IMP", ("VBASE", "NP")),
    ("L1", "NPL", ("NOM",)),
]

_RULE_BY_ID = {rid: (lhs, rhs) for rid, lhs, rhs in RULES}
_MAX_TREES = 64


@dataclass(frozen=True)
class Leaf:
    token: Token
    cat: str
    analysis: Optional[MorphAnalysis]


@dataclass(frozen=True)
class Node:
    rule_id: str
    cat: str
    children: tuple[Union["Node", Leaf], ...]


TreeChild = Union[Node, Leaf]


def _verb_category(a: MorphAnalysis) -> str:
    aux = a.lexeme.aux
    if aux == "do":
        return "AUXDO"
    if aux == "be":
        return "AUXBE"
    if aux == "will":
        return "AUXWILL"
    if a.features.aspect is Aspect.PROGRESSIVE:
        return "VPROG"
    if a.features.tense in (MorphTense.PRESENT, MorphTense.PAST):
        return "VFIN"
    return "VBASE"


_CLASS_CATEGORY = {
    WordClass.NOUN: "N",
    WordClass.PROPER_NOUN: "PN",
    WordClass.ADJ: "ADJ",
    WordClass.PRON: "PRON",
    WordClass.NEG: "NEG",
    WordClass.ADV: "ADV",
}


def lexical_categories(token: Token, lexicon: Lexicon) -> list[Leaf]:
    if token.kind == "punct":
        if token.text == ".":
            return [Leaf(token, "TERM", None)]
        return []
    if token.kind == "number":
        return [Leaf(token, "NUM", None)]
    analyses = lexicon.analyze(token.text)
    if not analyses:
        raise UnknownTokenError(token.text)
    leaves: list[Leaf] = []
    for a in analyses:
        wc = a.lexeme.word_class
        if wc is WordClass.VERB:
            cat = _verb_category(a)
        elif wc is WordClass.DET:
            cat = "POSS" if a.lexeme.feature("poss") == "true" else "DET"
        elif wc is WordClass.PREP:
            cat = "SUB" if a.lexeme.feature("subord") == "true" else "PREP"
        else:
            cat = _CLASS_CATEGORY[wc]
        leaves.append(Leaf(token, cat, a))
    return leaves


# ---------------------------------------------------------------------------
# Earley chart


@dataclass(frozen=True)
class _Item:
    rule: int  # index into RULES
    dot: int
    origin: int


def parse_syntax(tokens: list[Token], lexicon: Lexicon, target: str = "S") -> list[Node]:
    """All grammatical parse trees for one sentence, in a deterministic
    order.  Trees failing lexical feature constraints (transitivity,
    prepositional objects, agreement) are dropped."""
    leaves = [lexical_categories(t, lexicon) for t in tokens]
    trees = _earley_trees(leaves, target)
    out = [t for t in trees if _validate(t)]
    return out[:_MAX_TREES]


def _earley_trees(leaves: list[list[Leaf]], target: str) -> list[Node]:
    n = len(leaves)
    if n == 0:
        return []
    chart: list[set[_Item]] = [set() for _ in range(n + 1)]
    leaf_cats: dict[tuple[int, str], list[Leaf]] = {}
    for i, cell in enumerate(leaves):
        for leaf in cell:
            leaf_cats.setdefault((i, leaf.cat), []).append(leaf)

    for idx, (_, lhs, _rhs) in enumerate(RULES):
        if lhs == target:
            chart[0].add(_Item(idx, 0, 0))

    for pos in range(n + 1):
        # predict and complete to fixpoint at this position
        changed = True
        while changed:
            changed = False
            for item in list(chart[pos]):
                _, lhs, rhs = RULES[item.rule]
                if item.dot < len(rhs):
                    nxt = rhs[item.dot]
                    for idx, (_, l2, _r2) in enumerate(RULES):
                        if l2 == nxt:
                            cand = _Item(idx, 0, pos)
                            if cand not in chart[pos]:
                                chart[pos].add(cand)
                                changed = True
                else:
                    for waiting in list(chart[item.origin]):
                        _, _wl, wr = RULES[waiting.rule]
                        if waiting.dot < len(wr) and wr[waiting.dot] == lhs:
                            cand = _Item(waiting.rule, waiting.dot + 1, waiting.origin)
                            if cand not in chart[pos]:
                                chart[pos].add(cand)
                                changed = True
        if pos < n:
            for item in list(chart[pos]):
                _, _lhs, rhs = RULES[item.rule]
                if item.dot < len(rhs) and (pos, rhs[item.dot]) in leaf_cats:
                    chart[pos + 1].add(_Item(item.rule, item.dot + 1, item.origin))

    recognized = any(
        RULES[item.rule][1] == target
        and item.dot == len(RULES[item.rule][2])
        and item.origin == 0
        for item in chart[n]
    )
    if not recognized:
        return []

    # tree extraction: memoized exhaustive derivation over spans; safe
    # because the grammar has no epsilon rules and no unary cycles, so
    # every recursive call strictly shrinks the span or moves down the
    # acyclic unary chain
    memo: dict[tuple[str, int, int], list[TreeChild]] = {}

    def derive(cat: str, start: int, end: int) -> list[TreeChild]:
        key = (cat, start, end)
        if key in memo:
            return memo[key]
        results: list[TreeChild] = []
        if end == start + 1 and (start, cat) in leaf_cats:
            results.extend(leaf_cats[(start, cat)])
        for rid, lhs, rhs in RULES:
            if lhs != cat:
                continue
            for split in _splits(rhs, start, end):
                results.append(Node(rid, cat, tuple(split)))
        memo[key] = results
        return results

    def _splits(rhs: tuple[str, ...], start: int, end: int) -> Iterator[list[TreeChild]]:
        if not rhs:
            if start == end:
                yield []
            return
        head, rest = rhs[0], rhs[1:]
        for mid in range(start + 1, end - len(rest) + 1):
            for head_tree in derive(head, start, mid):
                for rest_trees in _splits(rest, mid, end):
                    yield [head_tree] + rest_trees

    roots = [t for t in derive(target, 0, n) if isinstance(t, Node)]
    return roots[: _MAX_TREES * 4]


# ---------------------------------------------------------------------------
# feature constraints


def _np_number(t: TreeChild) -> Number:
    if isinstance(t, Leaf):
        if t.analysis is not None:
            return t.analysis.features.number
        return Number.NONE
    if t.rule_id in ("N2", "N3"):
        return _np_number(t.children[0])
    if t.rule_id == "N1":
        return _nom_number(t.children[1])
    if t.rule_id == "N4":
        return _nom_number(t.children[2])
    return Number.NONE


def _nom_number(t: TreeChild) -> Number:
    if isinstance(t, Leaf):
        return t.analysis.features.number if t.analysis else Number.NONE
    # NOM: head noun is the last N in the chain
    if t.rule_id == "M1":
        return _nom_number(t.children[0])
    if t.rule_id in ("M2", "M3"):
        return _nom_number(t.children[1])
    return Number.NONE


def _leaf(t: TreeChild) -> Leaf:
    assert isinstance(t, Leaf)
    return t


def _validate(tree: TreeChild) -> bool:
    if isinstance(tree, Leaf):
        return True
    if tree.rule_id == "C1":
        np, vp = tree.children
        if not _check_vp(vp, _np_number(np)):
            return False
    if tree.rule_id in ("I1", "I2", "I3"):
        verb = _leaf(tree.children[0]).analysis
        assert verb is not None
        if verb.lexeme.aux:
            return False
        if not verb.lexeme.transitive:
            return False
        if tree.rule_id in ("I1", "I3") and verb.lexeme.object_prep:
            return False
        if tree.rule_id == "I2":
            prep = _leaf(tree.children[1].children[0]).analysis
            if prep is None or verb.lexeme.object_prep != prep.lexeme.lemma:
                return False
    return all(_validate(c) for c in tree.children)


def _agrees(verb_feats, subject_number: Number) -> bool:
    # only 3sg-present and be-forms are number marked in the lexicon
    if verb_feats.number is Number.NONE or subject_number is Number.NONE:
        return True
    return verb_feats.number == subject_number


def _check_vp(vp: TreeChild, subject_number: Number) -> bool:
    if not isinstance(vp, Node):
        return False
    kids = vp.children
    rid = vp.rule_id
    if rid in ("V1", "V2", "V3"):
        verb = _leaf(kids[0]).analysis
        assert verb is not None
        if verb.lexeme.aux:
            return False
        if not _agrees(verb.features, subject_number):
            return False
        if rid == "V1" and verb.lexeme.transitive:
            return False
        if rid == "V2" and (not verb.lexeme.transitive or verb.lexeme.object_prep):
            return False
        if rid == "V3":
            prep = _leaf(kids[1].children[0]).analysis
            if prep is None or not verb.lexeme.transitive:
                return False
            if verb.lexeme.object_prep != prep.lexeme.lemma:
                return False
    elif rid in ("V4", "V5", "V6"):
        aux = _leaf(kids[0]).analysis
        verb = _leaf(kids[2]).analysis
        assert aux is not None and verb is not None
        if verb.lexeme.aux:
            return False
        if not _agrees(aux.features, subject_number):
            return False
        if rid == "V4" and verb.lexeme.transitive:
            return False
        if rid == "V5" and (not verb.lexeme.transitive or verb.lexeme.object_prep):
            return False
        if rid == "V6":
            prep = _leaf(kids[3].children[0]).analysis
            if prep is None or not verb.lexeme.transitive:
                return False
            if verb.lexeme.object_prep != prep.lexeme.lemma:
                return False
    elif rid in ("V7", "V8", "V9"):
        aux = _leaf(kids[0]).analysis
        verb = _leaf(kids[1]).analysis
        assert aux is not None and verb is not None
        if verb.lexeme.aux:
            return False
        if not _agrees(aux.features, subject_number):
            return False
        if rid == "V7" and verb.lexeme.transitive:
            return False
        if rid == "V8" and (not verb.lexeme.transitive or verb.lexeme.object_prep):
            return False
        if rid == "V9":
            prep = _leaf(kids[2].children[0]).analysis
            if prep is None or not verb.lexeme.transitive:
                return False
            if verb.lexeme.object_prep != prep.lexeme.lemma:
                return False
    elif rid == "V10":
        aux = _leaf(kids[0]).analysis
        assert aux is not None
        if not _agrees(aux.features, subject_number):
            return False
    elif rid in ("V11", "V12", "V13"):
        verb = _leaf(kids[1]).analysis
        assert verb is not None
        if verb.lexeme.aux:
            return False
        if rid == "V11" and verb.lexeme.transitive:
            return False
        if rid == "V12" and (not verb.lexeme.transitive or verb.lexeme.object_prep):
            return False
        if rid == "V13":
            prep = _leaf(kids[2].children[0]).analysis
            if prep is None or not verb.lexeme.transitive:
                return False
            if verb.lexeme.object_prep != prep.lexeme.lemma:
                return False
    return True
