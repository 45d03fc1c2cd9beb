"""Discourse state threaded through composition, anaphora and lowering.

A DiscourseContext is an immutable value: every pipeline step returns a new
context.  It tracks, per discourse, the referents introduced by definites
and proper nouns, every verbal or adjectival predication (with its
morphological tense, used later for event reification), unresolved
pronouns, and pending intensionality marks.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .formulas import Formula, Term, Var
from .lexicon import MorphTense, Number


@dataclass(frozen=True)
class Referent:
    term: Var
    predicate: str  # introducing predicate name (noun or proper noun)
    sentence: int
    number: Number = Number.SG
    kind: Optional[str] = None  # person | animal | thing
    gender: Optional[str] = None


@dataclass(frozen=True)
class Occurrence:
    """One predication event in the discourse, in composition order."""

    pred_name: str
    lemma: str
    args: tuple[Term, ...]
    sentence: int
    tense: MorphTense  # morphological tense; NONE for untensed (imperatives, adjectives)
    negated: bool
    is_verb: bool
    presence: bool
    intensional_capable: bool
    transitive: bool
    intensional: bool = False


@dataclass(frozen=True)
class PronounUse:
    var: Var
    lemma: str
    sentence: int
    clause_subject: Optional[Term]
    number: Number = Number.SG
    kind: Optional[str] = None  # person | nonperson
    gender: Optional[str] = None


@dataclass(frozen=True)
class DiscourseContext:
    sentences: tuple[tuple[Formula, ...], ...] = ()
    referents: tuple[Referent, ...] = ()
    occurrences: tuple[Occurrence, ...] = ()
    pronouns: tuple[PronounUse, ...] = ()  # unresolved
    pending_intensional: tuple[int, ...] = ()  # indices into occurrences
    flags: tuple[tuple[str, str], ...] = ()  # (code, detail)
    next_var: int = 1

    def fresh_var_names(self, count: int) -> tuple["DiscourseContext", list[Var]]:
        names = [Var(f"x{self.next_var + i}") for i in range(count)]
        return replace(self, next_var=self.next_var + count), names

    def with_flag(self, code: str, detail: str) -> "DiscourseContext":
        return replace(self, flags=self.flags + ((code, detail),))

    def has_flag(self, code: str) -> bool:
        return any(c == code for c, _ in self.flags)

    def readings_per_sentence(self) -> list[int]:
        return [len(s) for s in self.sentences]

    def unambiguous_readings(self) -> Optional[list[Formula]]:
        """The single chosen reading per sentence, or None when any sentence
        is ambiguous."""
        out: list[Formula] = []
        for readings in self.sentences:
            if len(readings) != 1:
                return None
            out.append(readings[0])
        return out


def ctx_replace(ctx: DiscourseContext, **kw) -> DiscourseContext:
    return replace(ctx, **kw)
