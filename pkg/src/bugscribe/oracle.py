"""Brute-force reference implementations used only by tests.

Everything here is deliberately naive: full enumeration, no early exits, no
shared ranking code with the production matcher/predictor. Agreement between
the two is a test assertion, so this module must stay straight-line simple.
"""

from __future__ import annotations

from fractions import Fraction

from bugscribe.matching import GENERIC_TOKENS, KIND_SYNONYMS, VERB_ACTIONS, edge_ref
from bugscribe.model import ActionType, AppExecutionModel, ComponentKind, Interaction
from bugscribe.nlp.lexicons import load_lexicons
from bugscribe.nlp.normalize import normalize_tokens, split_identifier
from bugscribe.nlp.parsing import ParsedPhrase


def _document(model: AppExecutionModel, fingerprint: str) -> set[str]:
    lex = load_lexicons()
    screen = model.nodes[fingerprint]
    tokens: list[str] = []
    tokens += normalize_tokens(split_identifier(screen.activity), lex)
    if screen.window:
        tokens += normalize_tokens(screen.window, lex)
    for comp in screen.components:
        tokens += normalize_tokens(comp.text, lex)
        tokens += normalize_tokens(comp.content_description, lex)
    return set(tokens)


def _screen_query(phrase: ParsedPhrase) -> set[str]:
    tokens = set(phrase.subject) | set(phrase.object) | set(phrase.object2)
    return tokens - set(GENERIC_TOKENS)


def _verdict(n: int) -> str:
    return "NONE" if n == 0 else ("SINGLE" if n == 1 else "MULTIPLE")


def oracle_match_screen(
    model: AppExecutionModel, phrase: ParsedPhrase, threshold: Fraction = Fraction(1, 2)
) -> tuple[str, list[tuple[str, Fraction]]]:
    query = _screen_query(phrase)
    if not query:
        return "NONE", []
    rows = []
    for fingerprint in model.nodes:
        document = _document(model, fingerprint)
        score = Fraction(len(query & document), len(query))
        if score >= threshold:
            rows.append((fingerprint, score))
    rows.sort(key=lambda r: (-r[1], r[0]))
    return _verdict(len(rows)), rows


def _mapped_action(phrase: ParsedPhrase) -> ActionType | None:
    text = phrase.raw_text.lower()
    for marker in ("long press", "long-press", "long tap", "long-tap", "long click"):
        if marker in text:
            return ActionType.LONG_TAP
    if phrase.action in VERB_ACTIONS:
        return VERB_ACTIONS[phrase.action]
    if "back" in phrase.object or "back" in phrase.object2:
        return ActionType.BACK
    return None


def _edge_score(edge: Interaction, phrase: ParsedPhrase) -> Fraction:
    lex = load_lexicons()
    mapped = _mapped_action(phrase)
    if mapped is None or mapped != edge.action:
        return Fraction(0)
    if edge.action in (ActionType.BACK, ActionType.ROTATE, ActionType.LAUNCH):
        return Fraction(1)
    query = set(phrase.object) - set(GENERIC_TOKENS)
    if not query:
        return Fraction(1)
    lexemes: set[str] = set()
    if edge.target_component is not None:
        kind, text, content_description = edge.target_component
        lexemes |= set(normalize_tokens(text, lex))
        lexemes |= set(normalize_tokens(content_description, lex))
        lexemes |= set(KIND_SYNONYMS.get(ComponentKind(kind), ()))
    return Fraction(len(query & lexemes), len(query))


def _probability(model: AppExecutionModel, edge: Interaction) -> Fraction:
    total = 0
    for other in model.edges:
        if other.source == edge.source:
            total += other.weight
    return Fraction(edge.weight, total)


def oracle_match_step(
    model: AppExecutionModel,
    phrase: ParsedPhrase,
    current_state: str | None,
    threshold: Fraction = Fraction(1, 2),
) -> tuple[str, list[tuple[str, Fraction, int, str | None]]]:
    """Rows are (edge ref, score, hop distance, inferred prefix ref)."""
    if current_state is None:
        pool = list(model.edges)
    else:
        pool = [e for e in model.edges if e.source == current_state]

    rows: list[tuple[str, Fraction, int, str | None]] = []
    for edge in pool:
        score = _edge_score(edge, phrase)
        if score >= threshold:
            rows.append((edge_ref(edge), score, 0, None))

    if not rows and current_state is not None:
        per_target: dict[str, list[tuple[Fraction, str, Fraction]]] = {}
        for prefix in pool:
            for edge in model.edges:
                if edge.source != prefix.target:
                    continue
                score = _edge_score(edge, phrase)
                if score >= threshold:
                    per_target.setdefault(edge_ref(edge), []).append(
                        (-_probability(model, prefix), edge_ref(prefix), score)
                    )
        for ref, options in per_target.items():
            options.sort(key=lambda o: (o[0], o[1]))
            neg_p, prefix_ref, score = options[0]
            rows.append((ref, score, 1, prefix_ref))

    rows.sort(key=lambda r: (-r[1], r[0]))
    return _verdict(len(rows)), rows


def enumerate_best_path(
    model: AppExecutionModel, source: str, target: str
) -> tuple[Fraction, tuple[str, ...]] | None:
    """Exhaustive search over all simple paths; returns (likelihood, refs)."""
    if source == target:
        return Fraction(1), ()
    best: tuple[Fraction, int, tuple[str, ...]] | None = None

    def walk(node: str, visited: frozenset[str], likelihood: Fraction, refs: tuple[str, ...]):
        nonlocal best
        for edge in model.edges:
            if edge.source != node or edge.target in visited:
                continue
            p = likelihood * _probability(model, edge)
            path = refs + (edge_ref(edge),)
            if edge.target == target:
                key = (1 / p, len(path), path)
                if best is None or key < (1 / best[0], best[1], best[2]):
                    best = (p, len(path), path)
            else:
                walk(edge.target, visited | {edge.target}, p, path)

    walk(source, frozenset({source}), Fraction(1), ())
    if best is None:
        return None
    return best[0], best[2]


def all_vocab_tokens(model: AppExecutionModel) -> list[str]:
    """Every distinct document token in the model, for utterance generation."""
    tokens: set[str] = set()
    for fingerprint in model.nodes:
        tokens |= _document(model, fingerprint)
    return sorted(tokens)
