"""Rule-based sentence classification, phrase extraction, and token normalization."""

from bugscribe.nlp.lexicons import Lexicons, load_lexicons
from bugscribe.nlp.normalize import normalize_tokens, split_identifier
from bugscribe.nlp.parsing import (
    ParsedPhrase,
    SentenceType,
    classify_sentence,
    parse,
    parse_message,
    split_sentences,
)

__all__ = [
    "Lexicons",
    "load_lexicons",
    "normalize_tokens",
    "split_identifier",
    "ParsedPhrase",
    "SentenceType",
    "classify_sentence",
    "parse",
    "parse_message",
    "split_sentences",
]
