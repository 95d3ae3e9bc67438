"""Weighted directed multigraph of app screens and GUI interactions.

Nodes are screens identified by a content fingerprint; edges are the
interactions observed between them, weighted by how often (and by whom)
they were traversed. Models are immutable once built.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum

from bugscribe.errors import ModelIntegrityError, NotFoundError
from bugscribe.nlp.lexicons import Lexicons, load_lexicons
from bugscribe.nlp.normalize import normalize_tokens, split_identifier

START_NODE = "START"

AUTOMATED_WEIGHT = 1
MANUAL_WEIGHT = 3

Bounds = tuple[int, int, int, int]
ComponentSignature = tuple[str, str, str]


class ComponentKind(str, Enum):
    BUTTON = "BUTTON"
    TEXT_FIELD = "TEXT_FIELD"
    CHECKBOX = "CHECKBOX"
    LIST_ITEM = "LIST_ITEM"
    TEXT_VIEW = "TEXT_VIEW"
    IMAGE = "IMAGE"
    MENU_ITEM = "MENU_ITEM"
    OTHER = "OTHER"


class ActionType(str, Enum):
    LAUNCH = "LAUNCH"
    TAP = "TAP"
    LONG_TAP = "LONG_TAP"
    TYPE = "TYPE"
    SWIPE = "SWIPE"
    BACK = "BACK"
    ROTATE = "ROTATE"


class SwipeDirection(str, Enum):
    UP = "UP"
    DOWN = "DOWN"
    LEFT = "LEFT"
    RIGHT = "RIGHT"


#: actions that must name the component they act on
TARGETED_ACTIONS = frozenset({ActionType.TAP, ActionType.LONG_TAP, ActionType.TYPE})


@dataclass(frozen=True)
class GuiComponent:
    uid: str
    kind: ComponentKind
    text: str = ""
    content_description: str = ""
    bounds: Bounds = (0, 0, 0, 0)
    parent: str | None = None

    def __post_init__(self) -> None:
        if not self.uid:
            raise ModelIntegrityError("component uid must be nonempty")
        x1, y1, x2, y2 = self.bounds
        if x1 > x2 or y1 > y2:
            raise ModelIntegrityError(f"malformed bounds {self.bounds} on {self.uid}")

    @property
    def signature(self) -> ComponentSignature:
        return (self.kind.value, self.text, self.content_description)


def fingerprint_screen(
    activity: str,
    window: str | None,
    components: tuple[GuiComponent, ...] | list[GuiComponent],
) -> str:
    """Stable content hash of a screen's identity.

    Geometry (bounds), uids, and parent links are excluded so scroll
    position and minor layout jitter do not split graph states.
    """
    parts = sorted(",".join(c.signature) for c in components)
    canonical = f"{activity}|{window or ''}|" + ";".join(parts)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Screen:
    fingerprint: str
    activity: str
    window: str | None
    components: tuple[GuiComponent, ...]
    screenshot: str | None = None

    @classmethod
    def build(
        cls,
        activity: str,
        components: tuple[GuiComponent, ...] | list[GuiComponent],
        window: str | None = None,
        screenshot: str | None = None,
    ) -> Screen:
        comps = tuple(components)
        uids = {c.uid for c in comps}
        for c in comps:
            if c.parent is not None and c.parent not in uids:
                raise ModelIntegrityError(
                    f"component {c.uid} references unknown parent {c.parent}"
                )
        return cls(
            fingerprint=fingerprint_screen(activity, window, comps),
            activity=activity,
            window=window,
            components=comps,
            screenshot=screenshot,
        )


@dataclass(frozen=True)
class Interaction:
    source: str
    target: str
    action: ActionType
    target_component: ComponentSignature | None = None
    swipe_direction: SwipeDirection | None = None
    weight: int = 1
    screenshot: str | None = None
    highlight_bounds: Bounds | None = None

    def __post_init__(self) -> None:
        if self.weight <= 0:
            raise ModelIntegrityError("edge weight must be positive")
        if self.action in TARGETED_ACTIONS and self.target_component is None:
            raise ModelIntegrityError(f"{self.action.value} edge needs a target_component")
        if self.action is ActionType.LAUNCH and self.source != START_NODE:
            raise ModelIntegrityError("LAUNCH edges may only originate from START")

    @property
    def key(self) -> tuple[str, str, ComponentSignature, str]:
        """Identity for weight merging; typed text is deliberately excluded."""
        return (self.source, self.action.value, self.target_component or ("", "", ""), self.target)


def _edge_sort_key(edge: Interaction) -> tuple:
    return (edge.action.value, edge.target_component or ("", "", ""), edge.target)


@dataclass(frozen=True)
class AppExecutionModel:
    app_id: str
    app_name: str
    app_version: str
    nodes: dict[str, Screen]
    edges: tuple[Interaction, ...]
    built_at: str = ""

    def has_node(self, fingerprint: str) -> bool:
        return fingerprint == START_NODE or fingerprint in self.nodes

    def screen(self, fingerprint: str) -> Screen:
        try:
            return self.nodes[fingerprint]
        except KeyError:
            raise NotFoundError(f"unknown screen {fingerprint}") from None

    def outgoing_edges(self, fingerprint: str) -> list[Interaction]:
        if not self.has_node(fingerprint):
            raise NotFoundError(f"unknown screen {fingerprint}")
        return sorted(
            (e for e in self.edges if e.source == fingerprint), key=_edge_sort_key
        )

    def screen_document(self, fingerprint: str, lexicons: Lexicons | None = None) -> Counter[str]:
        """Token multiset describing one screen, for query-coverage matching."""
        lex = lexicons or load_lexicons()
        screen = self.screen(fingerprint)
        doc: Counter[str] = Counter()
        doc.update(normalize_tokens(split_identifier(screen.activity), lex))
        if screen.window:
            doc.update(normalize_tokens(screen.window, lex))
        for comp in screen.components:
            doc.update(normalize_tokens(comp.text, lex))
            doc.update(normalize_tokens(comp.content_description, lex))
        return doc

    def validate(self) -> None:
        launches = 0
        for edge in self.edges:
            for endpoint in (edge.source, edge.target):
                if not self.has_node(endpoint):
                    raise ModelIntegrityError(f"edge endpoint {endpoint} is not a node")
            if edge.target == START_NODE:
                raise ModelIntegrityError("no edge may point at START")
            if edge.action is ActionType.LAUNCH:
                launches += 1
            if (
                edge.target_component is not None
                and edge.screenshot is not None
                and edge.highlight_bounds is None
            ):
                raise ModelIntegrityError(
                    f"edge {edge.key} has a screenshot but no highlight bounds"
                )
        if launches == 0:
            raise ModelIntegrityError("model has no LAUNCH edge")


@dataclass
class ModelBuilder:
    """Accumulates screens and transitions, then freezes an immutable model."""

    app_id: str
    app_name: str
    app_version: str
    built_at: str = ""
    _nodes: dict[str, Screen] = field(default_factory=dict)
    _edges: dict[tuple, Interaction] = field(default_factory=dict)

    def register_screen(self, screen: Screen) -> str:
        existing = self._nodes.get(screen.fingerprint)
        # keep the first screenshot seen for a screen
        if existing is None or (existing.screenshot is None and screen.screenshot):
            self._nodes[screen.fingerprint] = screen
        return screen.fingerprint

    def upsert_transition(
        self,
        source: str,
        target: str,
        action: ActionType,
        source_kind: str,
        target_component: ComponentSignature | None = None,
        swipe_direction: SwipeDirection | None = None,
        screenshot: str | None = None,
        highlight_bounds: Bounds | None = None,
    ) -> Interaction:
        for endpoint in (source, target):
            if endpoint != START_NODE and endpoint not in self._nodes:
                raise ModelIntegrityError(f"transition endpoint {endpoint} not registered")
        if source_kind not in ("automated", "manual"):
            raise ModelIntegrityError(f"unknown trace source kind {source_kind!r}")
        increment = MANUAL_WEIGHT if source_kind == "manual" else AUTOMATED_WEIGHT
        edge = Interaction(
            source=source,
            target=target,
            action=action,
            target_component=target_component,
            swipe_direction=swipe_direction,
            weight=increment,
            screenshot=screenshot,
            highlight_bounds=highlight_bounds,
        )
        existing = self._edges.get(edge.key)
        if existing is not None:
            edge = replace(
                existing,
                weight=existing.weight + increment,
                screenshot=existing.screenshot or screenshot,
                highlight_bounds=existing.highlight_bounds or highlight_bounds,
            )
        self._edges[edge.key] = edge
        return edge

    def build(self) -> AppExecutionModel:
        model = AppExecutionModel(
            app_id=self.app_id,
            app_name=self.app_name,
            app_version=self.app_version,
            nodes=dict(sorted(self._nodes.items())),
            edges=tuple(sorted(self._edges.values(), key=lambda e: (e.source,) + _edge_sort_key(e))),
            built_at=self.built_at,
        )
        model.validate()
        return model
