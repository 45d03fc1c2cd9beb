"""Compositional semantics: grammar trees to logical forms.

Discourse referents (proper nouns, definites, possessives, bill-line
objects) become free variables asserted by conjunction, following the
dynamic treatment: re-mentions reuse the variable instead of quantifying
again.  True determiners (every, one, a) quantify sentence-locally; when a
universal and an existential co-occur in one clause both scope orders are
produced, surface order first.  Pronouns are placeholders resolved against
the recent referent window by number and kind compatibility, a binding
constraint (an object pronoun cannot be its own clause's subject), and,
for remaining ties, per-candidate consistency against the ontology.

Verb predicate names follow the surface: present tense uses the lexicon's
third-singular form, past and future keep the surface main verb with the
tense carried as a marker (rendered as a suffix), and the marker dissolves
into an event argument at lowering.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence

from .discourse import (
    DiscourseContext,
    Occurrence,
    PronounUse,
    Referent,
    ctx_replace,
)
from .formulas import (
    And,
    Formula,
    Mod,
    ModKind,
    Not,
    Pred,
    Tense,
    Var,
    conj,
    render,
    substitute,
)
from .grammar import (
    Leaf,
    Node,
    ParseError,
    Token,
    TreeChild,
    UnknownTokenError,
    as_tokens,
    parse_syntax,
    split_sentences,
    tokenize,
)
from .lexicon import Lexeme, Lexicon, MorphAnalysis, MorphTense, Number
from .lowering import lower
from .ontology import Ontology
from .prover import Budget, Verdict, saturate

_WINDOW = 2  # pronoun antecedents come from this many previous sentences
_CONSISTENCY_BUDGET = Budget(max_duration_ms=300, max_clauses=10000)


class SemanticsError(Exception):
    code = "semantics-error"

    def payload(self) -> dict:
        return {"code": self.code, "detail": str(self)}


class UngrammaticalError(SemanticsError):
    code = "ungrammatical"

    def __init__(self, sentence: str, detail: str = ""):
        super().__init__(detail or f"no grammatical parse: {sentence!r}")
        self.sentence = sentence


class UnknownWordError(SemanticsError):
    code = "unknown-token"

    def __init__(self, token: str, sentence_index: int):
        super().__init__(f"unknown token {token!r} in sentence {sentence_index + 1}")
        self.token = token
        self.sentence_index = sentence_index


class AnaphoraError(SemanticsError):
    def __init__(self, code: str, pronoun: str, sentence_index: int, candidates: list[str]):
        self.code = code
        self.pronoun = pronoun
        self.sentence_index = sentence_index
        self.candidates = candidates
        super().__init__(
            f"{code}: {pronoun!r} in sentence {sentence_index + 1}; "
            f"candidates: {', '.join(candidates) or 'none'}"
        )

    def payload(self) -> dict:
        return {
            "code": self.code,
            "pronoun": self.pronoun,
            "sentence": self.sentence_index,
            "candidates": self.candidates,
        }


# ---------------------------------------------------------------------------
# NP meanings

_REF = "ref"
_FORALL = "forall"
_EXISTS = "exists"


@dataclass
class NPMeaning:
    kind: str  # ref | forall | exists
    var: Var
    atoms: tuple[Formula, ...]  # restrictor (quantified) or assertions (ref)
    head: str
    number: Number
    pronoun: Optional[PronounUse] = None


def _analysis(leaf: TreeChild) -> MorphAnalysis:
    assert isinstance(leaf, Leaf) and leaf.analysis is not None
    return leaf.analysis


def _nom_parts(nom: TreeChild) -> tuple[str, list[str], Number, Lexeme]:
    """Head noun lemma, modifier lemmas in surface order, number, head lexeme."""
    if isinstance(nom, Leaf):
        a = _analysis(nom)
        return a.lexeme.lemma, [], a.features.number, a.lexeme
    if nom.rule_id == "M1":
        return _nom_parts(nom.children[0])
    # M2 ADJ NOM and M3 N NOM both prepend a modifier
    mod_leaf = _analysis(nom.children[0])
    head, mods, number, lexeme = _nom_parts(nom.children[1])
    return head, [mod_leaf.lexeme.lemma] + mods, number, lexeme


def _noun_kind(lemma: str, lexeme: Optional[Lexeme], ontology: Ontology) -> Optional[str]:
    if lexeme is not None:
        tagged = lexeme.feature("kind")
        if tagged:
            return tagged
    return ontology.kind_of(lemma)


def _find_referent(
    ctx: DiscourseContext, predicate: str, number: Number
) -> Optional[Referent]:
    for ref in reversed(ctx.referents):
        if ref.predicate == predicate and ref.number == number:
            return ref
    return None


def _restrictor_atoms(var: Var, head: str, mods: list[str]) -> tuple[Formula, ...]:
    return tuple([Pred(head, (var,))] + [Pred(m, (var,)) for m in mods])


def build_np(
    np: Node,
    ctx: DiscourseContext,
    sentence: int,
    ontology: Ontology,
    reuse: bool = True,
) -> tuple[DiscourseContext, NPMeaning]:
    rid = np.rule_id
    if rid == "N2":  # proper noun
        a = _analysis(np.children[0])
        lemma = a.lexeme.lemma
        existing = _find_referent(ctx, lemma, Number.SG) if reuse else None
        if existing is not None:
            return ctx, NPMeaning(_REF, existing.term, (), lemma, Number.SG)
        ctx, (v,) = ctx.fresh_var_names(1)
        ref = Referent(v, lemma, sentence, Number.SG, _noun_kind(lemma, a.lexeme, ontology))
        ctx = ctx_replace(ctx, referents=ctx.referents + (ref,))
        return ctx, NPMeaning(_REF, v, (Pred(lemma, (v,)),), lemma, Number.SG)
    if rid == "N3":  # pronoun placeholder; resolved after the sentence composes
        a = _analysis(np.children[0])
        ctx, (v,) = ctx.fresh_var_names(1)
        use = PronounUse(
            v,
            a.lexeme.lemma,
            sentence,
            clause_subject=None,
            number=a.features.number if a.features.number is not Number.NONE else Number.SG,
            kind=a.lexeme.feature("kind") or None,
        )
        meaning = NPMeaning(_REF, v, (), a.lexeme.lemma, use.number, pronoun=use)
        return ctx, meaning
    if rid == "N1":  # DET NOM
        det = _analysis(np.children[0])
        head, mods, number, head_lex = _nom_parts(np.children[1])
        quant = det.lexeme.feature("quant")
        if quant == "forall":
            ctx, (v,) = ctx.fresh_var_names(1)
            return ctx, NPMeaning(_FORALL, v, _restrictor_atoms(v, head, mods), head, number)
        if quant == "exists":
            ctx, (v,) = ctx.fresh_var_names(1)
            return ctx, NPMeaning(_EXISTS, v, _restrictor_atoms(v, head, mods), head, number)
        # definite: reuse the latest matching referent, else introduce
        existing = _find_referent(ctx, head, number) if reuse else None
        if existing is not None:
            return ctx, NPMeaning(_REF, existing.term, (), head, number)
        ctx, (v,) = ctx.fresh_var_names(1)
        ref = Referent(v, head, sentence, number, _noun_kind(head, head_lex, ontology))
        ctx = ctx_replace(ctx, referents=ctx.referents + (ref,))
        return ctx, NPMeaning(_REF, v, _restrictor_atoms(v, head, mods), head, number)
    if rid == "N4":  # NP 's NOM: possessive; head variable precedes possessor
        head, mods, number, head_lex = _nom_parts(np.children[2])
        ctx, (v,) = ctx.fresh_var_names(1)
        head_atoms = _restrictor_atoms(v, head, mods)
        ref = Referent(v, head, sentence, number, _noun_kind(head, head_lex, ontology))
        ctx = ctx_replace(ctx, referents=ctx.referents + (ref,))
        ctx, possessor = build_np(np.children[0], ctx, sentence, ontology)  # type: ignore[arg-type]
        atoms = head_atoms + possessor.atoms + (Mod(v, possessor.var, ModKind.POSSESSIVE),)
        meaning = NPMeaning(_REF, v, atoms, head, number, pronoun=possessor.pronoun)
        return ctx, meaning
    raise SemanticsError(f"unsupported NP rule {rid}")


def _bare_nom_np(
    nom: TreeChild, ctx: DiscourseContext, sentence: int, ontology: Ontology
) -> tuple[DiscourseContext, NPMeaning]:
    """Determiner-less nominal (bill lines): always a fresh referent."""
    head, mods, number, head_lex = _nom_parts(nom)
    ctx, (v,) = ctx.fresh_var_names(1)
    ref = Referent(v, head, sentence, number, _noun_kind(head, head_lex, ontology))
    ctx = ctx_replace(ctx, referents=ctx.referents + (ref,))
    return ctx, NPMeaning(_REF, v, _restrictor_atoms(v, head, mods), head, number)


# ---------------------------------------------------------------------------
# VP shapes


_GAMMA_TENSE = {
    MorphTense.PRESENT: Tense.NONE,
    MorphTense.PAST: Tense.PAST,
    MorphTense.FUTURE: Tense.FUTURE,
    MorphTense.NONE: Tense.NONE,
}


@dataclass
class VerbShape:
    gamma_name: str
    lexeme: Lexeme
    morph: MorphTense
    negated: bool
    object_np: Optional[TreeChild]  # NP node or None


@dataclass
class CopulaShape:
    adj_lemma: str
    morph: MorphTense


def _gamma_verb_name(verb_leaf: Leaf, morph: MorphTense) -> str:
    """Present predications use the third-singular present form; past and
    future keep the surface main verb, the tense marker carried separately."""
    lexeme = _analysis(verb_leaf).lexeme
    if morph is MorphTense.PRESENT:
        return lexeme.present_3sg_form()
    if morph in (MorphTense.PAST, MorphTense.FUTURE):
        return verb_leaf.token.text.lower()
    return verb_leaf.token.text.lower()


def _vp_shape(vp: Node) -> VerbShape | CopulaShape:
    rid = vp.rule_id
    kids = vp.children
    if rid in ("V1", "V2", "V3"):
        leaf = kids[0]
        a = _analysis(leaf)
        morph = a.features.tense
        obj = None
        if rid == "V2":
            obj = kids[1]
        elif rid == "V3":
            obj = kids[1].children[1]
        return VerbShape(_gamma_verb_name(leaf, morph), a.lexeme, morph, False, obj)
    if rid in ("V4", "V5", "V6"):
        aux = _analysis(kids[0])
        leaf = kids[2]
        morph = aux.features.tense
        obj = None
        if rid == "V5":
            obj = kids[3]
        elif rid == "V6":
            obj = kids[3].children[1]
        return VerbShape(_gamma_verb_name(leaf, morph), _analysis(leaf).lexeme, morph, True, obj)
    if rid in ("V7", "V8", "V9"):
        aux = _analysis(kids[0])
        leaf = kids[1]
        morph = aux.features.tense
        obj = None
        if rid == "V8":
            obj = kids[2]
        elif rid == "V9":
            obj = kids[2].children[1]
        return VerbShape(_gamma_verb_name(leaf, morph), _analysis(leaf).lexeme, morph, False, obj)
    if rid == "V10":
        aux = _analysis(kids[0])
        adj = _analysis(kids[1])
        return CopulaShape(adj.lexeme.lemma, aux.features.tense)
    if rid in ("V11", "V12", "V13"):
        leaf = kids[1]
        obj = None
        if rid == "V12":
            obj = kids[2]
        elif rid == "V13":
            obj = kids[2].children[1]
        return VerbShape(
            _gamma_verb_name(leaf, MorphTense.FUTURE),
            _analysis(leaf).lexeme,
            MorphTense.FUTURE,
            False,
            obj,
        )
    raise SemanticsError(f"unsupported VP rule {rid}")


# ---------------------------------------------------------------------------
# clause composition


def _wrap_quantifier(np: NPMeaning, body: Formula) -> Formula:
    from .formulas import Exists, ForAll, Implies

    restr = conj(list(np.atoms))
    if np.kind == _FORALL:
        return ForAll(np.var, Implies(restr, body))
    return Exists(np.var, And(restr, body))


def _scope_orders(quantified: list[NPMeaning]) -> list[list[NPMeaning]]:
    if len(quantified) == 2 and quantified[0].kind != quantified[1].kind:
        return [quantified, [quantified[1], quantified[0]]]
    return [quantified]


def compose_clause(
    cl: Node,
    ctx: DiscourseContext,
    sentence: int,
    ontology: Ontology,
) -> tuple[DiscourseContext, list[Formula]]:
    rid = cl.rule_id
    if rid == "C2":  # temporal adverb carries no truth-conditional content here
        return compose_clause(cl.children[1], ctx, sentence, ontology)  # type: ignore[arg-type]
    if rid == "C3":
        ctx, left = compose_clause(cl.children[0], ctx, sentence, ontology)  # type: ignore[arg-type]
        ctx, right = compose_clause(cl.children[2], ctx, sentence, ontology)  # type: ignore[arg-type]
        return ctx, [And(l, r) for l in left for r in right]
    assert rid == "C1"
    np_node, vp_node = cl.children
    ctx, subject = build_np(np_node, ctx, sentence, ontology)  # type: ignore[arg-type]
    shape = _vp_shape(vp_node)  # type: ignore[arg-type]

    if isinstance(shape, CopulaShape):
        core: Formula = Pred(shape.adj_lemma, (subject.var,), _GAMMA_TENSE[shape.morph])
        obj = None
    else:
        obj = None
        if shape.object_np is not None:
            ctx, obj = build_np(shape.object_np, ctx, sentence, ontology)  # type: ignore[arg-type]
            args = (subject.var, obj.var)
        else:
            args = (subject.var,)
        core = Pred(shape.gamma_name, args, _GAMMA_TENSE[shape.morph])
        occ = Occurrence(
            pred_name=shape.gamma_name,
            lemma=shape.lexeme.lemma,
            args=args,
            sentence=sentence,
            tense=shape.morph,
            negated=shape.negated,
            is_verb=True,
            presence=shape.lexeme.presence_inducing,
            intensional_capable=shape.lexeme.intensional_capable,
            transitive=shape.lexeme.transitive,
        )
        ctx = ctx_replace(ctx, occurrences=ctx.occurrences + (occ,))
        if shape.negated:
            core = Not(core)

    # the object pronoun's clause subject feeds the binding constraint
    new_pronouns = []
    for np_meaning, is_object in ((subject, False), (obj, True)):
        if np_meaning is not None and np_meaning.pronoun is not None:
            use = np_meaning.pronoun
            if is_object:
                use = dataclasses.replace(use, clause_subject=subject.var)
            new_pronouns.append(use)
    if new_pronouns:
        ctx = ctx_replace(ctx, pronouns=ctx.pronouns + tuple(new_pronouns))

    referential_atoms: list[Formula] = []
    quantified: list[NPMeaning] = []
    for np_meaning in (subject, obj):
        if np_meaning is None:
            continue
        if np_meaning.kind == _REF:
            referential_atoms.extend(np_meaning.atoms)
        else:
            quantified.append(np_meaning)

    readings: list[Formula] = []
    for order in _scope_orders(quantified):
        body = core
        for np_meaning in reversed(order):
            body = _wrap_quantifier(np_meaning, body)
        readings.append(conj(referential_atoms + [body]))
    return ctx, readings


def compose_sentence(
    tree: Node,
    ctx: DiscourseContext,
    sentence: int,
    ontology: Ontology,
) -> tuple[DiscourseContext, list[Formula]]:
    body = tree.children[0]  # under S, before TERM
    assert isinstance(body, Node)
    if body.cat == "CL":
        return compose_clause(body, ctx, sentence, ontology)
    if body.cat == "IMP":
        verb_leaf = body.children[0]
        a = _analysis(verb_leaf)
        if body.rule_id == "I1":
            ctx, obj = _bare_nom_np(body.children[1], ctx, sentence, ontology)
        elif body.rule_id == "I3":
            ctx, obj = build_np(body.children[1], ctx, sentence, ontology)  # type: ignore[arg-type]
        else:  # I2: VBASE PP
            ctx, obj = build_np(body.children[1].children[1], ctx, sentence, ontology)  # type: ignore[arg-type]
        if obj.pronoun is not None:
            # no overt subject, so no binding exclusion applies
            ctx = ctx_replace(ctx, pronouns=ctx.pronouns + (obj.pronoun,))
        name = verb_leaf.token.text.lower()  # type: ignore[union-attr]
        core = Pred(name, (obj.var,))
        occ = Occurrence(
            pred_name=name,
            lemma=a.lexeme.lemma,
            args=(obj.var,),
            sentence=sentence,
            tense=MorphTense.NONE,
            negated=False,
            is_verb=True,
            presence=a.lexeme.presence_inducing,
            intensional_capable=a.lexeme.intensional_capable,
            transitive=a.lexeme.transitive,
        )
        ctx = ctx_replace(ctx, occurrences=ctx.occurrences + (occ,))
        if obj.kind in (_FORALL, _EXISTS):
            return ctx, [_wrap_quantifier(obj, core)]
        return ctx, [conj(list(obj.atoms) + [core])]
    if body.cat == "NPL":
        ctx, np_meaning = _bare_nom_np(body.children[0], ctx, sentence, ontology)
        return ctx, [conj(list(np_meaning.atoms))]
    raise SemanticsError(f"unsupported sentence rule {body.rule_id}")


# ---------------------------------------------------------------------------
# anaphora


def _kind_compatible(pronoun_kind: Optional[str], referent_kind: Optional[str]) -> bool:
    if pronoun_kind == "person":
        return referent_kind == "person"
    if pronoun_kind == "nonperson":
        return referent_kind != "person"
    return True


def _substitute_everywhere(
    ctx: DiscourseContext,
    readings: list[Formula],
    mapping: dict[Var, Var],
) -> tuple[DiscourseContext, list[Formula]]:
    new_readings = [substitute(f, mapping) for f in readings]  # type: ignore[arg-type]
    new_occurrences = tuple(
        dataclasses.replace(
            occ, args=tuple(mapping.get(a, a) if isinstance(a, Var) else a for a in occ.args)
        )
        for occ in ctx.occurrences
    )
    new_sentences = tuple(
        tuple(substitute(f, mapping) for f in sent) for sent in ctx.sentences  # type: ignore[arg-type]
    )
    return ctx_replace(ctx, occurrences=new_occurrences, sentences=new_sentences), new_readings


def _binding_consistent(
    ctx: DiscourseContext,
    readings: list[Formula],
    pronoun: PronounUse,
    candidate: Referent,
    ontology: Ontology,
    budget: Budget,
) -> bool:
    """Lower the discourse so far with the pronoun bound to the candidate
    and check consistency against relevant ontology axioms."""
    mapping = {pronoun.var: candidate.term}
    trial_ctx, trial_readings = _substitute_everywhere(ctx, readings, mapping)
    trial_ctx = ctx_replace(
        trial_ctx, sentences=trial_ctx.sentences + (tuple(trial_readings[:1]),)
    )
    chosen = trial_ctx.unambiguous_readings()
    if chosen is None:
        return True  # ambiguous sentences are escalated elsewhere
    try:
        delta = lower(chosen, trial_ctx, canonical=ontology.canonical_word)
    except Exception:
        return True  # lowering trouble is not the pronoun's fault
    context_clauses = ontology.select_context(delta.predicate_names()).clauses
    result = saturate(list(delta.fol) + list(context_clauses), budget)
    return result.verdict is not Verdict.PROVED  # PROVED means contradiction


def resolve_pronouns(
    ctx: DiscourseContext,
    readings: list[Formula],
    sentence: int,
    ontology: Ontology,
    budget: Budget = _CONSISTENCY_BUDGET,
) -> tuple[DiscourseContext, list[Formula]]:
    pending = [p for p in ctx.pronouns if p.sentence == sentence]
    for use in pending:
        window_floor = sentence - _WINDOW
        candidates = [
            r
            for r in ctx.referents
            if r.sentence >= window_floor
            and r.number == use.number
            and _kind_compatible(
                use.kind,
                r.kind if r.kind is not None else ontology.kind_of(r.predicate),
            )
            and not (use.clause_subject is not None and r.term == use.clause_subject)
            and r.term != use.var
        ]
        if len(candidates) > 1:
            candidates = [
                c
                for c in candidates
                if _binding_consistent(ctx, readings, use, c, ontology, budget)
            ]
        if not candidates:
            raise AnaphoraError("unresolved-pronoun", use.lemma, sentence, [])
        if len(candidates) > 1:
            raise AnaphoraError(
                "ambiguous-pronoun",
                use.lemma,
                sentence,
                [f"{r.predicate}({r.term.name})" for r in candidates],
            )
        target = candidates[0]
        ctx, readings = _substitute_everywhere(ctx, readings, {use.var: target.term})
        ctx = ctx_replace(ctx, pronouns=tuple(p for p in ctx.pronouns if p is not use))
        ctx = ctx.with_flag("pronoun-resolved", f"{use.lemma}->{target.predicate}")
    return ctx, readings


# ---------------------------------------------------------------------------
# intensionality


def mark_intensional(
    ctx: DiscourseContext, readings: list[Formula], sentence: int
) -> tuple[DiscourseContext, list[Formula]]:
    """An intension-capable transitive verb whose object was earlier denied
    presence gets the intensional marker; the object's existence is then
    carried only by its introducing sentence."""
    absent_terms = {
        arg
        for occ in ctx.occurrences
        if occ.sentence < sentence and occ.negated and occ.presence
        for arg in occ.args
        if isinstance(arg, Var)
    }
    if not absent_terms:
        return ctx, readings
    updated = list(ctx.occurrences)
    to_mark: list[tuple[str, tuple]] = []
    for i, occ in enumerate(updated):
        if (
            occ.sentence == sentence
            and occ.is_verb
            and occ.transitive
            and occ.intensional_capable
            and len(occ.args) == 2
            and occ.args[1] in absent_terms
        ):
            updated[i] = dataclasses.replace(occ, intensional=True)
            to_mark.append((occ.pred_name, occ.args))
    if not to_mark:
        return ctx, readings

    def walk(f: Formula) -> Formula:
        if isinstance(f, Pred):
            if (f.name, f.args) in to_mark:
                return Pred(f.name, f.args, f.tense, intensional=True)
            return f
        if isinstance(f, Mod):
            return f
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, (And,)):
            return And(walk(f.left), walk(f.right))
        from .formulas import Exists, ForAll, Implies, Or

        if isinstance(f, Or):
            return Or(walk(f.left), walk(f.right))
        if isinstance(f, Implies):
            return Implies(walk(f.left), walk(f.right))
        if isinstance(f, (ForAll, Exists)):
            return type(f)(f.var, walk(f.body))
        return f

    return ctx_replace(ctx, occurrences=tuple(updated)), [walk(f) for f in readings]


# ---------------------------------------------------------------------------
# pipeline driver


@dataclass
class SentenceRecord:
    text: str
    corrected: list[tuple[str, str]]  # (original, corrected)


@dataclass
class Analysis:
    context: DiscourseContext
    records: list[SentenceRecord]

    @property
    def readings(self) -> tuple[tuple[Formula, ...], ...]:
        return self.context.sentences

    def discourse_formula(self) -> Optional[Formula]:
        chosen = self.context.unambiguous_readings()
        if chosen is None:
            return None
        return conj(list(chosen))


def _prepare_tokens(
    sentence_tokens: list[Token],
    sentence_index: int,
    lexicon: Lexicon,
    ontology: Ontology,
    max_edit: int,
    corrections: list[tuple[str, str]],
) -> list[Token]:
    # fuse before correcting: parts of multiword terms need not be words
    texts = lexicon.fuse_idioms([t.text for t in sentence_tokens])
    fixed_texts: list[str] = []
    for text in texts:
        if not text or not text[0].isalpha():
            fixed_texts.append(text)
            continue
        fixed = lexicon.correct(text, max_edit)
        if fixed is None:
            raise UnknownWordError(text, sentence_index)
        if fixed != text.lower():
            corrections.append((text, fixed))
        fixed_texts.append(fixed)
    # corrections can complete a multiword term, so fuse once more
    texts = lexicon.fuse_idioms(fixed_texts)
    texts = ontology.rewrite_phrases(texts)
    return as_tokens(texts)


def add_sentence(
    ctx: DiscourseContext,
    tree: Node,
    ontology: Ontology,
    budget: Budget = _CONSISTENCY_BUDGET,
) -> DiscourseContext:
    sentence = len(ctx.sentences)
    ctx, readings = compose_sentence(tree, ctx, sentence, ontology)
    ctx, readings = resolve_pronouns(ctx, readings, sentence, ontology, budget)
    ctx, readings = mark_intensional(ctx, readings, sentence)
    # duplicate readings collapse (e.g. scope orders that render identically)
    seen: dict[str, Formula] = {}
    for f in readings:
        seen.setdefault(render(f), f)
    return ctx_replace(ctx, sentences=ctx.sentences + (tuple(seen.values()),))


def analyze_text(
    text: str,
    lexicon: Lexicon,
    ontology: Ontology,
    max_edit: int = 1,
    budget: Budget = _CONSISTENCY_BUDGET,
) -> Analysis:
    """Full front half of the pipeline: tokenize, correct, fuse idioms,
    rewrite phrase synonyms, parse, compose, resolve pronouns, mark
    intensional contexts.  Raises SemanticsError subclasses on anything a
    human must look at."""
    tokens = tokenize(text)
    records: list[SentenceRecord] = []
    ctx = DiscourseContext()
    for s_idx, sent in enumerate(split_sentences(tokens)):
        corrections: list[tuple[str, str]] = []
        prepared = _prepare_tokens(sent, s_idx, lexicon, ontology, max_edit, corrections)
        if not prepared or prepared[-1].text != ".":
            raise UngrammaticalError(
                " ".join(t.text for t in sent), "sentence does not end with '.'"
            )
        try:
            trees = parse_syntax(prepared, lexicon)
        except UnknownTokenError as exc:
            raise UnknownWordError(exc.token, s_idx) from exc
        if not trees:
            raise UngrammaticalError(" ".join(t.text for t in prepared))
        if len(trees) > 1:
            # syntactic ambiguity: compose every tree; downstream treats
            # multiple readings as an escalation
            all_readings: list[Formula] = []
            base_ctx = ctx
            merged: Optional[DiscourseContext] = None
            for tree in trees:
                trial = add_sentence(base_ctx, tree, ontology, budget)
                all_readings.extend(trial.sentences[-1])
                if merged is None:
                    merged = trial
            assert merged is not None
            seen: dict[str, Formula] = {}
            for f in all_readings:
                seen.setdefault(render(f), f)
            ctx = ctx_replace(
                merged, sentences=merged.sentences[:-1] + (tuple(seen.values()),)
            )
        else:
            ctx = add_sentence(ctx, trees[0], ontology, budget)
        records.append(SentenceRecord(" ".join(t.text for t in sent), corrections))
        for orig, fixed in corrections:
            ctx = ctx.with_flag("corrected", f"{orig}->{fixed}")
    return Analysis(ctx, records)
