"""Editable plain-text lexicons: one entry per line, ``#`` comments allowed.

The shipped defaults live in ``bugscribe/nlp/data``; a directory of override
files with the same names can be supplied (e.g. through the service config).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

_FILES = {
    "stopwords": "stopwords.txt",
    "prepositions": "prepositions.txt",
    "negations": "negations.txt",
    "modals": "modals.txt",
    "verbs": "action_verbs.txt",
}


@dataclass(frozen=True)
class Lexicons:
    stopwords: frozenset[str]
    prepositions: frozenset[str]
    negations: tuple[str, ...]
    modals: tuple[str, ...]
    verbs: frozenset[str]


def _read_entries(text: str) -> list[str]:
    entries = []
    for line in text.splitlines():
        entry = line.split("#", 1)[0].strip().lower()
        if entry:
            entries.append(entry)
    return entries


def _load_file(name: str, override_dir: Path | None) -> list[str]:
    if override_dir is not None:
        candidate = override_dir / name
        if candidate.is_file():
            return _read_entries(candidate.read_text(encoding="utf-8"))
    data = resources.files("bugscribe.nlp") / "data" / name
    return _read_entries(data.read_text(encoding="utf-8"))


def load_lexicons(override_dir: str | Path | None = None) -> Lexicons:
    if override_dir is None:
        return _default_lexicons()
    return _build(Path(override_dir))


@lru_cache(maxsize=1)
def _default_lexicons() -> Lexicons:
    return _build(None)


def _build(override_dir: Path | None) -> Lexicons:
    values = {key: _load_file(fname, override_dir) for key, fname in _FILES.items()}
    # Multi-word negation/modal markers are matched longest-first against raw text.
    by_length = lambda entries: tuple(sorted(entries, key=len, reverse=True))
    return Lexicons(
        stopwords=frozenset(values["stopwords"]),
        prepositions=frozenset(values["prepositions"]),
        negations=by_length(values["negations"]),
        modals=by_length(values["modals"]),
        verbs=frozenset(values["verbs"]),
    )
