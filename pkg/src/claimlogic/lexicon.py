"""Deterministic lexicon: morphology tables, typo correction, idiom fusion.

Every surface form the system understands is listed explicitly in a lexicon
file; there is no statistical tagging and no morphological guessing.  A
token is either an exact form, within bounded edit distance of exactly one
form, or unknown.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional


class LexiconError(Exception):
    """Malformed lexicon file; message carries the offending line number."""


class WordClass(Enum):
    NOUN = "NOUN"
    PROPER_NOUN = "PROPER_NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    DET = "DET"
    PREP = "PREP"
    PRON = "PRON"
    NEG = "NEG"
    ADV = "ADV"


class MorphTense(Enum):
    PRESENT = "PRESENT"
    PAST = "PAST"
    FUTURE = "FUTURE"
    NONE = "NONE"


class Number(Enum):
    SG = "SG"
    PL = "PL"
    NONE = "NONE"


class Aspect(Enum):
    NONE = "NONE"
    PROGRESSIVE = "prog"


@dataclass(frozen=True)
class FeatureSet:
    tense: MorphTense = MorphTense.NONE
    number: Number = Number.NONE
    person: Optional[int] = None
    aspect: Aspect = Aspect.NONE


@dataclass(frozen=True)
class Lexeme:
    lemma: str
    word_class: WordClass
    features: tuple[tuple[str, str], ...]  # sorted key=value pairs from the entry
    forms: tuple[tuple[str, FeatureSet], ...]  # surface form -> features, file order

    def feature(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.features:
            if k == key:
                return v
        return default

    @property
    def transitive(self) -> bool:
        return self.feature("trans") == "trans"

    @property
    def intensional_capable(self) -> bool:
        return self.feature("intens") == "true"

    @property
    def presence_inducing(self) -> bool:
        return self.feature("presence") == "true"

    @property
    def object_prep(self) -> str | None:
        return self.feature("prep")

    @property
    def aux(self) -> str | None:
        return self.feature("aux")

    def form_features(self, surface: str) -> FeatureSet | None:
        for s, feats in self.forms:
            if s == surface:
                return feats
        return None

    def present_3sg_form(self) -> str:
        """Finite present form used as the predicate name for untensed verb
        occurrences; falls back to the lemma when no such form is listed."""
        for s, feats in self.forms:
            if (
                feats.tense is MorphTense.PRESENT
                and feats.aspect is Aspect.NONE
                and feats.number is Number.SG
            ):
                return s
        return self.lemma


@dataclass(frozen=True)
class MorphAnalysis:
    surface: str
    lexeme: Lexeme
    features: FeatureSet


_FORM_TENSES = {t.value for t in MorphTense}
_FORM_NUMBERS = {n.value for n in Number}
_FORM_ASPECTS = {"prog"}
_RESERVED_SUFFIXES = ("_p", "_f", "_i")


def _parse_form_spec(spec: str, lineno: int) -> tuple[str, FeatureSet]:
    if ":" in spec:
        surface, featspec = spec.split(":", 1)
    else:
        surface, featspec = spec, ""
    surface = surface.strip()
    if not surface:
        raise LexiconError(f"line {lineno}: empty surface form")
    tense = MorphTense.NONE
    number = Number.NONE
    person: Optional[int] = None
    aspect = Aspect.NONE
    if featspec:
        for pair in featspec.split(","):
            pair = pair.strip()
            if not pair:
                continue
            if "=" not in pair:
                raise LexiconError(f"line {lineno}: bad form feature {pair!r}")
            key, value = (p.strip() for p in pair.split("=", 1))
            if key == "tense":
                if value not in _FORM_TENSES:
                    raise LexiconError(f"line {lineno}: bad tense {value!r}")
                tense = MorphTense(value)
            elif key == "number":
                if value not in _FORM_NUMBERS:
                    raise LexiconError(f"line {lineno}: bad number {value!r}")
                number = Number(value)
            elif key == "person":
                person = int(value)
            elif key == "aspect":
                if value not in _FORM_ASPECTS:
                    raise LexiconError(f"line {lineno}: bad aspect {value!r}")
                aspect = Aspect.PROGRESSIVE
            else:
                raise LexiconError(f"line {lineno}: unknown form feature {key!r}")
    return surface.lower(), FeatureSet(tense, number, person, aspect)


class Lexicon:
    def __init__(self, lexemes: list[Lexeme]):
        self.lexemes = lexemes
        # surface -> analyses, deterministic order by (lemma, word class)
        self._by_surface: dict[str, list[MorphAnalysis]] = {}
        for lexeme in lexemes:
            for surface, feats in lexeme.forms:
                self._by_surface.setdefault(surface, []).append(
                    MorphAnalysis(surface, lexeme, feats)
                )
        for analyses in self._by_surface.values():
            analyses.sort(key=lambda a: (a.lexeme.lemma, a.lexeme.word_class.value))
        self._surfaces = sorted(self._by_surface)
        # idioms are read straight off multi-token surface forms: any form
        # containing "_" fuses that many adjacent tokens
        self._idioms: dict[tuple[str, ...], str] = {}
        for surface in self._surfaces:
            if "_" in surface:
                self._idioms[tuple(surface.split("_"))] = surface
        self._max_idiom_len = max((len(k) for k in self._idioms), default=1)

    def __len__(self) -> int:
        return len(self.lexemes)

    def known(self, token: str) -> bool:
        return token.lower() in self._by_surface

    def analyze(self, token: str) -> list[MorphAnalysis]:
        """All morphological readings of an exact surface form."""
        return list(self._by_surface.get(token.lower(), []))

    def correct(self, token: str, max_edit: int = 1) -> Optional[str]:
        """Map a token to the unique closest surface form within max_edit
        edits.  Exact forms pass through; distance ties or distances above
        the bound return None rather than guessing."""
        low = token.lower()
        if low in self._by_surface:
            return low
        # bound makes every returned distance below it exact, so ties are real
        bound = max_edit + 1
        best_d = bound
        best: set[str] = set()
        for surface in self._surfaces:
            d = _levenshtein(low, surface, bound)
            if d >= bound:
                continue
            if d < best_d:
                best_d = d
                best = {surface}
            elif d == best_d:
                best.add(surface)
        if best_d <= max_edit and len(best) == 1:
            return next(iter(best))
        return None

    def fuse_idioms(self, tokens: list[str]) -> list[str]:
        """Greedy leftmost-longest fusion of adjacent tokens into multiword
        surface forms (listed in the lexicon with underscores)."""
        out: list[str] = []
        i = 0
        lowered = [t.lower() for t in tokens]
        while i < len(tokens):
            fused = None
            for width in range(min(self._max_idiom_len, len(tokens) - i), 1, -1):
                key = tuple(lowered[i : i + width])
                if key in self._idioms:
                    fused = self._idioms[key]
                    i += width
                    break
            if fused is None:
                out.append(tokens[i])
                i += 1
            else:
                out.append(fused)
        return out


def load_lexicon(path: str | Path) -> Lexicon:
    """Parse a lexicon file.

    Line format (pipe separated, # starts a comment):

        lemma|WORD_CLASS|key=value,...|form:feat=v,feat=v;form2:...

    The forms field may be empty, in which case the lemma itself is the only
    surface form.  Duplicate (lemma, word class) entries are rejected.
    """
    path = Path(path)
    lexemes: list[Lexeme] = []
    seen: dict[tuple[str, WordClass], int] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 4:
            raise LexiconError(f"line {lineno}: expected 4 pipe-separated fields, got {len(parts)}")
        lemma = parts[0].strip().lower()
        if not lemma:
            raise LexiconError(f"line {lineno}: empty lemma")
        if lemma.endswith(_RESERVED_SUFFIXES):
            raise LexiconError(f"line {lineno}: lemma {lemma!r} ends with a reserved suffix")
        try:
            word_class = WordClass(parts[1].strip())
        except ValueError:
            raise LexiconError(f"line {lineno}: unknown word class {parts[1].strip()!r}") from None
        key = (lemma, word_class)
        if key in seen:
            raise LexiconError(
                f"line {lineno}: duplicate entry for ({lemma}, {word_class.value}), "
                f"first seen on line {seen[key]}"
            )
        seen[key] = lineno

        features: list[tuple[str, str]] = []
        if parts[2].strip():
            for pair in parts[2].split(","):
                pair = pair.strip()
                if not pair:
                    continue
                if "=" not in pair:
                    raise LexiconError(f"line {lineno}: bad feature {pair!r}")
                k, v = (p.strip() for p in pair.split("=", 1))
                features.append((k, v))
        features.sort()

        forms: list[tuple[str, FeatureSet]] = []
        if parts[3].strip():
            for spec in parts[3].split(";"):
                spec = spec.strip()
                if spec:
                    forms.append(_parse_form_spec(spec, lineno))
        if not forms:
            forms = [(lemma, FeatureSet())]
        if word_class is not WordClass.VERB:
            for surface, feats in forms:
                if feats.tense is not MorphTense.NONE:
                    raise LexiconError(
                        f"line {lineno}: tense feature on non-verb form {surface!r}"
                    )
        lexemes.append(Lexeme(lemma, word_class, tuple(features), tuple(forms)))
    return Lexicon(lexemes)


def _levenshtein(a: str, b: str, cutoff: int) -> int:
    """Edit distance with an early-exit cutoff; returns cutoff when the true
    distance is at least that large."""
    if abs(len(a) - len(b)) >= cutoff:
        return cutoff
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        row_min = i
        for j, cb in enumerate(b, start=1):
            cost = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (0 if ca == cb else 1),
            )
            cur.append(cost)
            row_min = min(row_min, cost)
        if row_min >= cutoff:
            return cutoff
        prev = cur
    return min(prev[-1], cutoff)


def levenshtein(a: str, b: str) -> int:
    return _levenshtein(a, b, max(len(a), len(b)) + 1)
