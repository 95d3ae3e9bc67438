"""Sentence-type classification and phrase extraction.

Every user message is decomposed into the normalized phrase schema
``[subject] [action] [object] [preposition] [object2]`` by one of eight
rule-based extraction branches, selected by a fixed precedence:

    CONDITIONAL > MODAL_EXPECTATION > PASSIVE > NEGATIVE_DECLARATIVE >
    IMPERATIVE > DECLARATIVE_PAST > DECLARATIVE_PRESENT > FRAGMENT

FRAGMENT is the universal fallback, so ``parse`` is total over nonempty text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from bugscribe.errors import EmptyInputError
from bugscribe.nlp.lexicons import Lexicons, load_lexicons
from bugscribe.nlp.normalize import normalize_tokens

_WORD_RE = re.compile(r"[0-9a-zA-Z']+")
_SENTENCE_SPLIT_RE = re.compile(r"[.!?;]+")

_BE_FORMS = frozenset({"is", "are", "was", "were", "be", "been", "being", "am"})
_AUX_BASES = frozenset({"be", "do", "have"})
_CONDITIONAL_LEADS = frozenset({"if", "when", "after"})

# Irregular form -> base, for verbs present in the action lexicon.
_IRREGULAR = {
    "was": "be", "were": "be", "is": "be", "are": "be", "am": "be",
    "been": "be", "being": "be",
    "went": "go", "gone": "go",
    "saw": "see", "seen": "see",
    "got": "get", "gotten": "get",
    "did": "do", "does": "do", "done": "do",
    "had": "have", "has": "have",
    "took": "take", "taken": "take",
    "came": "come",
    "froze": "freeze", "frozen": "freeze",
    "broke": "break", "broken": "break",
    "hung": "hang",
    "shown": "show",
    "gave": "give", "given": "give",
    "made": "make",
    "kept": "keep",
    "left": "leave",
    "lost": "lose",
    "found": "find",
    "sent": "send",
    "ran": "run",
    "chose": "choose", "chosen": "choose",
    "wrote": "write", "written": "write",
    "became": "become",
    "held": "hold",
}

_IRREGULAR_PAST = frozenset({
    "was", "were", "went", "saw", "got", "did", "had", "took", "came",
    "froze", "broke", "hung", "gave", "made", "kept", "left", "lost",
    "found", "sent", "ran", "chose", "wrote", "became", "held",
})

_IRREGULAR_PARTICIPLE = frozenset({
    "been", "gone", "seen", "gotten", "done", "had", "taken", "come",
    "frozen", "broken", "hung", "shown", "given", "made", "kept", "left",
    "lost", "found", "sent", "run", "chosen", "written", "become", "held",
})

# (suffix, restoration) candidates tried against the verb lexicon.
_VERB_SUFFIXES = (
    ("ies", "y"), ("ied", "y"),
    ("ing", ""), ("ing", "e"),
    ("es", ""), ("ed", ""), ("ed", "e"),
    ("s", ""), ("d", ""),
)


class SentenceType(str, Enum):
    IMPERATIVE = "IMPERATIVE"
    DECLARATIVE_PRESENT = "DECLARATIVE_PRESENT"
    DECLARATIVE_PAST = "DECLARATIVE_PAST"
    PASSIVE = "PASSIVE"
    CONDITIONAL = "CONDITIONAL"
    MODAL_EXPECTATION = "MODAL_EXPECTATION"
    NEGATIVE_DECLARATIVE = "NEGATIVE_DECLARATIVE"
    FRAGMENT = "FRAGMENT"


@dataclass(frozen=True)
class ParsedPhrase:
    """Normalized decomposition of one sentence.

    ``rule`` records which extraction branch actually ran, so tests can
    assert it always equals the classified sentence type.
    """

    sentence_type: SentenceType
    subject: tuple[str, ...]
    action: str
    object: tuple[str, ...]
    preposition: str | None
    object2: tuple[str, ...]
    negated: bool
    raw_text: str
    rule: str = field(default="", compare=False)


def verb_base(token: str, lex: Lexicons) -> str | None:
    """Base form of ``token`` if it is a recognizable verb, else None."""
    t = token.lower()
    if t in _IRREGULAR:
        return _IRREGULAR[t]
    if t in lex.verbs:
        return t
    for suffix, restore in _VERB_SUFFIXES:
        if t.endswith(suffix) and len(t) > len(suffix):
            stem = t[: -len(suffix)] + restore
            if stem in lex.verbs:
                return stem
    # undouble final consonants: tapped -> tap, tapping -> tap
    for suffix in ("ed", "ing"):
        cut = len(suffix) + 1
        if t.endswith(suffix) and len(t) > cut and t[-cut] == t[-cut - 1]:
            stem = t[:-cut]
            if stem in lex.verbs:
                return stem
    return None


def _is_past(token: str, lex: Lexicons) -> bool:
    t = token.lower()
    if t in _IRREGULAR_PAST:
        return True
    return t.endswith("ed") and verb_base(t, lex) is not None


def _is_participle(token: str, lex: Lexicons) -> bool:
    t = token.lower()
    if t in _IRREGULAR_PARTICIPLE:
        return True
    return t.endswith("ed") and verb_base(t, lex) is not None


def _words(text: str) -> list[str]:
    return [w.lower() for w in _WORD_RE.findall(text)]


def _marker_pattern(markers: tuple[str, ...]) -> re.Pattern[str]:
    alts = "|".join(re.escape(m) for m in markers)
    return re.compile(rf"\b(?:{alts})\b", re.IGNORECASE)


def _contains_marker(text: str, markers: tuple[str, ...]) -> bool:
    return bool(_marker_pattern(markers).search(text))


def _strip_markers(text: str, markers: tuple[str, ...]) -> tuple[str, bool]:
    stripped, n = _marker_pattern(markers).subn(" ", text)
    return stripped, n > 0


def _leading_imperative(words: list[str], lex: Lexicons) -> bool:
    if words and words[0] == "please":
        words = words[1:]
    if not words:
        return False
    # "long press"-style bigrams lead with a modifier, not the verb
    if words[0] == "long" and len(words) > 1 and words[1] in {"press", "tap", "click", "hold"}:
        return True
    return words[0] in lex.verbs


def _first_verb_index(words: list[str], lex: Lexicons) -> int | None:
    for i, w in enumerate(words):
        if verb_base(w, lex) is not None:
            return i
    return None


def classify_sentence(text: str, lexicons: Lexicons | None = None) -> SentenceType:
    """Classify ``text`` by the documented precedence order."""
    lex = lexicons or load_lexicons()
    stripped = text.strip()
    if not stripped:
        raise EmptyInputError("cannot classify empty text")
    words = _words(stripped)

    if words and words[0] in _CONDITIONAL_LEADS:
        return SentenceType.CONDITIONAL
    if _contains_marker(stripped, lex.modals):
        return SentenceType.MODAL_EXPECTATION
    if _find_passive(words, lex) is not None:
        return SentenceType.PASSIVE
    if _contains_marker(stripped, lex.negations):
        return SentenceType.NEGATIVE_DECLARATIVE
    if _leading_imperative(words, lex):
        return SentenceType.IMPERATIVE
    first_verb = _first_verb_index(words, lex)
    if first_verb is not None and _is_past(words[first_verb], lex):
        return SentenceType.DECLARATIVE_PAST
    if first_verb is not None:
        return SentenceType.DECLARATIVE_PRESENT
    return SentenceType.FRAGMENT


def _find_passive(words: list[str], lex: Lexicons) -> tuple[int, int] | None:
    """Locate a be-verb + past-participle pair (one intervening word allowed)."""
    for i, w in enumerate(words):
        if w not in _BE_FORMS:
            continue
        for j in (i + 1, i + 2):
            if j < len(words) and _is_participle(words[j], lex):
                return i, j
    return None


def split_sentences(text: str) -> list[str]:
    return [part.strip() for part in _SENTENCE_SPLIT_RE.split(text) if part.strip()]


def parse(text: str, lexicons: Lexicons | None = None) -> ParsedPhrase:
    """Extract the normalized phrase for one sentence."""
    lex = lexicons or load_lexicons()
    stripped = text.strip()
    if not stripped:
        raise EmptyInputError("cannot parse empty text")
    sentence_type = classify_sentence(stripped, lex)
    return _extract(sentence_type, stripped, stripped, lex)


def parse_message(text: str, lexicons: Lexicons | None = None) -> list[ParsedPhrase]:
    """Split a message into sentences and parse each one."""
    lex = lexicons or load_lexicons()
    return [parse(sentence, lex) for sentence in split_sentences(text)]


def _extract(
    sentence_type: SentenceType, working: str, raw: str, lex: Lexicons
) -> ParsedPhrase:
    # Negation markers are removed up front for every branch; the flag is
    # orthogonal to the sentence type (a modal sentence can be negated too).
    working, negated = _strip_markers(working, lex.negations)
    words = _words(working)

    if sentence_type is SentenceType.CONDITIONAL:
        return _extract_conditional(working, raw, negated, lex)
    if sentence_type is SentenceType.MODAL_EXPECTATION:
        demodaled, _ = _strip_markers(working, lex.modals)
        phrase = _extract_declarative(_words(demodaled), lex)
        return _finish(phrase, sentence_type, negated, raw, "MODAL_EXPECTATION")
    if sentence_type is SentenceType.PASSIVE:
        phrase = _extract_passive(words, lex)
        return _finish(phrase, sentence_type, negated, raw, "PASSIVE")
    if sentence_type is SentenceType.NEGATIVE_DECLARATIVE:
        return _extract_negative(words, raw, lex)
    if sentence_type is SentenceType.IMPERATIVE:
        phrase = _extract_imperative(words, lex)
        return _finish(phrase, sentence_type, negated, raw, "IMPERATIVE")
    if sentence_type in (SentenceType.DECLARATIVE_PAST, SentenceType.DECLARATIVE_PRESENT):
        phrase = _extract_declarative(words, lex)
        return _finish(phrase, sentence_type, negated, raw, sentence_type.value)
    phrase = _extract_fragment(words, lex)
    return _finish(phrase, SentenceType.FRAGMENT, negated, raw, "FRAGMENT")


_Parts = tuple[tuple[str, ...], str, tuple[str, ...], str | None, tuple[str, ...]]


def _finish(
    parts: _Parts, sentence_type: SentenceType, negated: bool, raw: str, rule: str
) -> ParsedPhrase:
    subject, action, obj, prep, obj2 = parts
    return ParsedPhrase(
        sentence_type=sentence_type,
        subject=subject,
        action=action,
        object=obj,
        preposition=prep,
        object2=obj2,
        negated=negated,
        raw_text=raw,
        rule=rule,
    )


def _extract_conditional(working: str, raw: str, negated: bool, lex: Lexicons) -> ParsedPhrase:
    # The condition clause stays in raw_text only; the main clause is the
    # part after the first comma, or after the lead word when no comma exists.
    if "," in working:
        main = working.split(",", 1)[1].strip()
    else:
        main = working.strip().split(None, 1)[-1]
    if not main:
        parts = _extract_fragment(_words(working), lex)
        return _finish(parts, SentenceType.CONDITIONAL, negated, raw, "CONDITIONAL")
    main_words = _words(main)
    if _leading_imperative(main_words, lex):
        parts = _extract_imperative(main_words, lex)
    elif _first_verb_index(main_words, lex) is not None:
        parts = _extract_declarative(main_words, lex)
    else:
        parts = _extract_fragment(main_words, lex)
    return _finish(parts, SentenceType.CONDITIONAL, negated, raw, "CONDITIONAL")


def _extract_negative(words: list[str], raw: str, lex: Lexicons) -> ParsedPhrase:
    # Markers are already removed; the remainder is parsed by the rules that
    # rank below NEGATIVE_DECLARATIVE in the precedence order.
    if _leading_imperative(words, lex):
        parts = _extract_imperative(words, lex)
    elif _first_verb_index(words, lex) is not None:
        parts = _extract_declarative(words, lex)
    else:
        parts = _extract_fragment(words, lex)
    return _finish(parts, SentenceType.NEGATIVE_DECLARATIVE, True, raw, "NEGATIVE_DECLARATIVE")


def _split_prepositional(rest: list[str], lex: Lexicons) -> tuple[tuple[str, ...], str | None, tuple[str, ...]]:
    prep = None
    obj_words, obj2_words = rest, []
    for i, w in enumerate(rest):
        if w in lex.prepositions:
            prep, obj_words, obj2_words = w, rest[:i], rest[i + 1 :]
            break
    obj = tuple(normalize_tokens(" ".join(obj_words), lex))
    obj2 = tuple(normalize_tokens(" ".join(obj2_words), lex))
    if not obj2:
        prep = None  # a preposition needs a nonempty object2
    return obj, prep, obj2


def _extract_imperative(words: list[str], lex: Lexicons) -> _Parts:
    if words and words[0] == "please":
        words = words[1:]
    if words and words[0] == "long" and len(words) > 1:
        words = words[1:]  # "long press X": the verb is the second word
    action = verb_base(words[0], lex) or words[0]
    obj, prep, obj2 = _split_prepositional(words[1:], lex)
    return (("user",), action, obj, prep, obj2)


def _extract_declarative(words: list[str], lex: Lexicons) -> _Parts:
    v = _first_verb_index(words, lex)
    if v is None:
        return _extract_fragment(words, lex)
    subject = tuple(normalize_tokens(" ".join(words[:v]), lex))
    action_idx = v
    # skip auxiliaries when a content verb follows: "does save", "is loading"
    if verb_base(words[v], lex) in _AUX_BASES:
        for j in (v + 1, v + 2):
            if j < len(words) and verb_base(words[j], lex) is not None:
                action_idx = j
                break
    action = verb_base(words[action_idx], lex) or words[action_idx]
    obj, prep, obj2 = _split_prepositional(words[action_idx + 1 :], lex)
    return (subject, action, obj, prep, obj2)


def _extract_passive(words: list[str], lex: Lexicons) -> _Parts:
    located = _find_passive(words, lex)
    if located is None:
        return _extract_declarative(words, lex)
    be_idx, part_idx = located
    obj = tuple(normalize_tokens(" ".join(words[:be_idx]), lex))
    action = verb_base(words[part_idx], lex) or words[part_idx]
    after = words[part_idx + 1 :]
    if "by" in after:
        j = after.index("by")
        subject = tuple(normalize_tokens(" ".join(after[j + 1 :]), lex))
        middle = after[:j]
    else:
        subject, middle = (), after
    if not subject:
        subject = ("system",)
    _, prep, obj2 = _split_prepositional(middle, lex)
    return (subject, action, obj, prep, obj2)


def _extract_fragment(words: list[str], lex: Lexicons) -> _Parts:
    obj = tuple(normalize_tokens(" ".join(words), lex))
    return ((), "", obj, None, ())
