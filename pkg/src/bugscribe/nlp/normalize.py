"""Token normalization shared by the parser and both matchers.

Both the query side (user text) and the document side (screen/component
labels) run through the same pipeline, so a heuristic mis-lemmatization
degrades a match score instead of breaking it.
"""

from __future__ import annotations

import re

from bugscribe.nlp.lexicons import Lexicons, load_lexicons

_SPLIT_RE = re.compile(r"[^0-9a-zA-Z]+")
_CAMEL_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")

# (suffix, replacement, minimum length of the stripped stem); applied
# first-match-only in this order.
_SUFFIX_RULES = (
    ("ing", "", 3),
    ("ied", "y", 0),
    ("ies", "y", 0),
    ("es", "", 3),
    ("ed", "", 3),
    ("s", "", 3),
)


def _strip_once(token: str) -> str:
    for suffix, replacement, min_len in _SUFFIX_RULES:
        if token.endswith(suffix) and token != suffix:
            stem = token[: -len(suffix)]
            result = stem + replacement
            if len(stem) >= min_len and not result.endswith("s"):
                return result
    return token


def lemmatize(token: str) -> str:
    """Strip suffixes until no rule applies.

    Each pass applies the first rule whose constraints hold; a rule is
    skipped when its result would itself end in "s" (e.g. "press" stays,
    "houses" -> "house"). Iterating to a fixed point keeps double-suffixed
    forms in step with their singulars ("settings" and "setting" both
    become "sett"), which is what makes normalization idempotent.
    """
    while True:
        stripped = _strip_once(token)
        if stripped == token:
            return token
        token = stripped


def normalize_tokens(text: str, lexicons: Lexicons | None = None) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop stopwords, lemmatize.

    Stopwords are checked again after lemmatization so every emitted token
    survives a second normalization unchanged.
    """
    lex = lexicons or load_lexicons()
    out: list[str] = []
    for raw in _SPLIT_RE.split(text.lower()):
        if not raw or raw in lex.stopwords:
            continue
        lemma = lemmatize(raw)
        if lemma and lemma not in lex.stopwords:
            out.append(lemma)
    return out


def split_identifier(name: str) -> str:
    """Expand camelCase and snake_case identifiers into space-separated words.

    "StatsActivity" -> "Stats Activity"; "fill_up_form" -> "fill up form".
    """
    return " ".join(part for part in _CAMEL_RE.sub(" ", name.replace("_", " ")).split() if part)
