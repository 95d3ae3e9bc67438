"""Quality verification: match parsed descriptions to screens and edges.

A description is high-quality iff it matches the model. Scoring is query
coverage: the fraction of the query's tokens found in the candidate's
document. Scores are exact rationals so rankings (and the test oracle) are
reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from bugscribe.errors import NotFoundError
from bugscribe.model import (
    ActionType,
    AppExecutionModel,
    ComponentKind,
    ComponentSignature,
    Interaction,
)
from bugscribe.nlp.lexicons import Lexicons, load_lexicons
from bugscribe.nlp.normalize import normalize_tokens
from bugscribe.nlp.parsing import ParsedPhrase

DEFAULT_THRESHOLD = Fraction(1, 2)
PAGE_SIZE = 5

#: tokens too unspecific to discriminate between screens
GENERIC_TOKENS = frozenset(
    {"user", "app", "application", "screen", "page", "button", "option", "item"}
)

#: verb lemma -> gesture; includes intent verbs that imply taps
VERB_ACTIONS: dict[str, ActionType] = {
    "tap": ActionType.TAP,
    "click": ActionType.TAP,
    "press": ActionType.TAP,
    "select": ActionType.TAP,
    "choose": ActionType.TAP,
    "save": ActionType.TAP,
    "add": ActionType.TAP,
    "delete": ActionType.TAP,
    "confirm": ActionType.TAP,
    "cancel": ActionType.TAP,
    "submit": ActionType.TAP,
    "type": ActionType.TYPE,
    "enter": ActionType.TYPE,
    "input": ActionType.TYPE,
    "write": ActionType.TYPE,
    "fill": ActionType.TYPE,
    "hold": ActionType.LONG_TAP,
    "swipe": ActionType.SWIPE,
    "scroll": ActionType.SWIPE,
    "slide": ActionType.SWIPE,
    "back": ActionType.BACK,
    "return": ActionType.BACK,
    "open": ActionType.LAUNCH,
    "launch": ActionType.LAUNCH,
    "start": ActionType.LAUNCH,
    "rotate": ActionType.ROTATE,
    "turn": ActionType.ROTATE,
}

_LONG_PRESS_MARKERS = ("long press", "long-press", "long tap", "long-tap", "long click")

KIND_SYNONYMS: dict[ComponentKind, tuple[str, ...]] = {
    ComponentKind.BUTTON: ("button",),
    ComponentKind.TEXT_FIELD: ("field", "textbox", "input", "box"),
    ComponentKind.CHECKBOX: ("checkbox", "check"),
    ComponentKind.LIST_ITEM: ("list", "item", "entry", "row"),
    ComponentKind.TEXT_VIEW: ("text", "label"),
    ComponentKind.IMAGE: ("image", "icon", "picture"),
    ComponentKind.MENU_ITEM: ("menu", "option", "item"),
    ComponentKind.OTHER: (),
}

#: actions whose edges carry no meaningful target component
TARGETLESS_ACTIONS = frozenset({ActionType.BACK, ActionType.ROTATE, ActionType.LAUNCH})


class MatchVerdict(str, Enum):
    SINGLE = "SINGLE"
    MULTIPLE = "MULTIPLE"
    NONE = "NONE"


@dataclass(frozen=True)
class ScreenCandidate:
    fingerprint: str
    score: Fraction


@dataclass(frozen=True)
class ScreenMatchResult:
    verdict: MatchVerdict
    candidates: tuple[ScreenCandidate, ...]
    page_size: int = PAGE_SIZE


@dataclass(frozen=True)
class EdgeCandidate:
    edge: Interaction
    score: Fraction
    hop_distance: int
    inferred_prefix: Interaction | None = None

    def __post_init__(self) -> None:
        assert (self.inferred_prefix is not None) == (self.hop_distance == 1)


@dataclass(frozen=True)
class EdgeMatchResult:
    verdict: MatchVerdict
    candidates: tuple[EdgeCandidate, ...]
    page_size: int = PAGE_SIZE


def edge_ref(edge: Interaction) -> str:
    """Compact printable identity for an edge."""
    comp = ",".join(edge.target_component) if edge.target_component else ""
    return "|".join((edge.source, edge.action.value, comp, edge.target))


def screen_query(phrase: ParsedPhrase) -> frozenset[str]:
    """Query tokens for screen matching: all slots minus the generic noise."""
    tokens = frozenset(phrase.subject) | frozenset(phrase.object) | frozenset(phrase.object2)
    return tokens - GENERIC_TOKENS


def _verdict(count: int) -> MatchVerdict:
    if count == 0:
        return MatchVerdict.NONE
    if count == 1:
        return MatchVerdict.SINGLE
    return MatchVerdict.MULTIPLE


def coverage(query: frozenset[str], document: set[str] | frozenset[str]) -> Fraction:
    if not query:
        return Fraction(0)
    return Fraction(len(query & document), len(query))


def match_screen(
    model: AppExecutionModel,
    phrase: ParsedPhrase,
    threshold: Fraction = DEFAULT_THRESHOLD,
    lexicons: Lexicons | None = None,
) -> ScreenMatchResult:
    lex = lexicons or load_lexicons()
    query = screen_query(phrase)
    if not query:
        return ScreenMatchResult(verdict=MatchVerdict.NONE, candidates=())
    scored = []
    for fingerprint in model.nodes:
        document = set(model.screen_document(fingerprint, lex))
        score = coverage(query, document)
        if score >= threshold:
            scored.append(ScreenCandidate(fingerprint, score))
    scored.sort(key=lambda c: (-c.score, c.fingerprint))
    return ScreenMatchResult(verdict=_verdict(len(scored)), candidates=tuple(scored))


def match_eb_against_ob(
    model: AppExecutionModel,
    phrase: ParsedPhrase,
    ob_fingerprint: str,
    threshold: Fraction = DEFAULT_THRESHOLD,
    lexicons: Lexicons | None = None,
) -> bool:
    """True iff the expected-behavior text covers the OB screen's vocabulary."""
    lex = lexicons or load_lexicons()
    if ob_fingerprint not in model.nodes:
        raise NotFoundError(f"unknown screen {ob_fingerprint}")
    query = screen_query(phrase)
    if not query:
        return False
    document = set(model.screen_document(ob_fingerprint, lex))
    return coverage(query, document) >= threshold


def map_action(phrase: ParsedPhrase) -> ActionType | None:
    """Resolve the gesture a phrase describes, or None when undeterminable."""
    raw = phrase.raw_text.lower()
    if any(marker in raw for marker in _LONG_PRESS_MARKERS):
        return ActionType.LONG_TAP
    action = VERB_ACTIONS.get(phrase.action)
    if action is not None:
        return action
    # "go back", "went back": the gesture hides in the object slot
    if "back" in phrase.object or "back" in phrase.object2:
        return ActionType.BACK
    return None


def component_lexemes(
    signature: ComponentSignature | None, lexicons: Lexicons | None = None
) -> frozenset[str]:
    """Document tokens for an edge's target component."""
    if signature is None:
        return frozenset()
    lex = lexicons or load_lexicons()
    kind_raw, text, content_description = signature
    tokens = set(normalize_tokens(text, lex))
    tokens.update(normalize_tokens(content_description, lex))
    try:
        tokens.update(KIND_SYNONYMS[ComponentKind(kind_raw)])
    except ValueError:
        pass
    return frozenset(tokens)


def step_query(phrase: ParsedPhrase) -> frozenset[str]:
    return frozenset(phrase.object) - GENERIC_TOKENS


def score_edge(
    edge: Interaction,
    mapped_action: ActionType | None,
    query: frozenset[str],
    lexicons: Lexicons | None = None,
) -> Fraction:
    if mapped_action is None or mapped_action is not edge.action:
        return Fraction(0)
    if edge.action in TARGETLESS_ACTIONS or not query:
        return Fraction(1)
    return coverage(query, component_lexemes(edge.target_component, lexicons))


def match_step(
    model: AppExecutionModel,
    phrase: ParsedPhrase,
    current_state: str | None,
    threshold: Fraction = DEFAULT_THRESHOLD,
    lexicons: Lexicons | None = None,
) -> EdgeMatchResult:
    """Match one step description to a model interaction.

    With a known state, hop-0 candidates come from the state's outgoing
    edges; the one-transition-away fallback runs only when nothing at hop 0
    clears the threshold. With an unknown state the whole edge set is
    searched at hop 0 and no fallback applies.
    """
    lex = lexicons or load_lexicons()
    if current_state is not None and not model.has_node(current_state):
        raise NotFoundError(f"unknown screen {current_state}")
    mapped = map_action(phrase)
    query = step_query(phrase)

    if current_state is None:
        pool = list(model.edges)
    else:
        pool = model.outgoing_edges(current_state)
    scored = [
        EdgeCandidate(edge, score, hop_distance=0)
        for edge in pool
        if (score := score_edge(edge, mapped, query, lex)) >= threshold
    ]

    if not scored and current_state is not None:
        scored = _hop1_candidates(model, mapped, query, current_state, threshold, lex)

    scored.sort(key=lambda c: (-c.score, edge_ref(c.edge)))
    return EdgeMatchResult(verdict=_verdict(len(scored)), candidates=tuple(scored))


def _edge_probability(model: AppExecutionModel, edge: Interaction) -> Fraction:
    total = sum(e.weight for e in model.edges if e.source == edge.source)
    return Fraction(edge.weight, total)


def _hop1_candidates(
    model: AppExecutionModel,
    mapped: ActionType | None,
    query: frozenset[str],
    current_state: str,
    threshold: Fraction,
    lex: Lexicons,
) -> list[EdgeCandidate]:
    # one candidate per target edge; prefix chosen by probability, then key
    best: dict[tuple, tuple[Fraction, str, EdgeCandidate]] = {}
    for prefix in model.outgoing_edges(current_state):
        for edge in model.outgoing_edges(prefix.target):
            score = score_edge(edge, mapped, query, lex)
            if score < threshold:
                continue
            candidate = EdgeCandidate(edge, score, hop_distance=1, inferred_prefix=prefix)
            rank = (-_edge_probability(model, prefix), edge_ref(prefix))
            held = best.get(edge.key)
            if held is None or rank < (held[0], held[1]):
                best[edge.key] = (rank[0], rank[1], candidate)
    return [item[2] for item in best.values()]
