"""Most-likely-path prediction for suggesting next reproduction steps.

Each node's outgoing weights normalize to edge probabilities; the best
path maximizes their product. Probabilities are exact rationals and the
search is Dijkstra over reciprocal likelihood (equivalent to min-sum of
-ln p, but with no float drift), with deterministic tie-breaking: fewer
edges first, then lexicographic edge identities.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction

from bugscribe.errors import NotFoundError, StalePredictionError
from bugscribe.matching import edge_ref
from bugscribe.model import ActionType, AppExecutionModel, Interaction

BATCH_SIZE = 5


@dataclass(frozen=True)
class StepSuggestion:
    edge: Interaction
    caption: str
    rank: int
    screenshot: str | None = None
    highlight_bounds: tuple[int, int, int, int] | None = None


@dataclass(frozen=True)
class PathPrediction:
    origin: str
    target: str
    path: tuple[Interaction, ...]
    likelihood: Fraction

    def batch(self, offset: int = 0) -> tuple[StepSuggestion, ...]:
        """Suggestions for path[offset:offset+5], ranks restarting at 1."""
        window = self.path[offset : offset + BATCH_SIZE]
        return tuple(
            StepSuggestion(
                edge=edge,
                caption=caption_edge(edge),
                rank=i + 1,
                screenshot=edge.screenshot,
                highlight_bounds=edge.highlight_bounds,
            )
            for i, edge in enumerate(window)
        )

    def has_more(self, offset: int) -> bool:
        return offset < len(self.path)


def edge_probability(model: AppExecutionModel, edge: Interaction) -> Fraction:
    """weight(e) over the total outgoing weight of e.source."""
    total = sum(e.weight for e in model.edges if e.source == edge.source)
    return Fraction(edge.weight, total)


def caption_edge(edge: Interaction) -> str:
    """Deterministic natural-language step text for an edge."""
    label = ""
    if edge.target_component is not None:
        kind, text, content_description = edge.target_component
        label = text or content_description or kind
    if edge.action is ActionType.TAP:
        return f"Tap '{label}'"
    if edge.action is ActionType.TYPE:
        return f"Type into '{label}'"
    if edge.action is ActionType.LONG_TAP:
        return f"Long-press '{label}'"
    if edge.action is ActionType.SWIPE:
        return f"Swipe {edge.swipe_direction.value}" if edge.swipe_direction else "Swipe"
    if edge.action is ActionType.BACK:
        return "Press back"
    if edge.action is ActionType.LAUNCH:
        return "Open the app"
    return "Rotate the device"


def predict_path(
    model: AppExecutionModel, current: str, ob: str
) -> PathPrediction | None:
    """Highest-likelihood path from current to ob, or None when unreachable."""
    for fingerprint in (current, ob):
        if not model.has_node(fingerprint):
            raise NotFoundError(f"unknown screen {fingerprint}")
    if current == ob:
        return PathPrediction(origin=current, target=ob, path=(), likelihood=Fraction(1))

    out_weight: dict[str, int] = {}
    adjacency: dict[str, list[Interaction]] = {}
    for edge in model.edges:
        out_weight[edge.source] = out_weight.get(edge.source, 0) + edge.weight
        adjacency.setdefault(edge.source, []).append(edge)
    for edges in adjacency.values():
        edges.sort(key=edge_ref)

    counter = itertools.count()
    # key: (reciprocal likelihood, edge count, edge-ref tuple) — all exact
    start_key = (Fraction(1), 0, ())
    heap: list[tuple] = [(start_key, next(counter), current, ())]
    settled: set[str] = set()
    while heap:
        (recip, n_edges, refs), _, node, path = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        if node == ob:
            return PathPrediction(
                origin=current, target=ob, path=path, likelihood=1 / recip
            )
        for edge in adjacency.get(node, ()):
            if edge.target in settled:
                continue
            p = Fraction(edge.weight, out_weight[node])
            key = (recip / p, n_edges + 1, refs + (edge_ref(edge),))
            heapq.heappush(heap, (key, next(counter), edge.target, path + (edge,)))
    return None


def next_batch(
    prediction: PathPrediction, current_state: str | None, offset: int = 0
) -> tuple[StepSuggestion, ...] | None:
    """Page of suggestions, or None when exhausted; guards stale cursors."""
    if prediction.origin != current_state:
        raise StalePredictionError(
            f"prediction made from {prediction.origin[:12]}, state is now "
            f"{(current_state or 'unknown')[:12]}"
        )
    window = prediction.batch(offset)
    return window or None
