"""Model persistence: one JSON file per published model, schema_version 1.

Serialization is deterministic (sorted nodes, canonical edge order, sorted
keys) so byte-identical files mean identical models. Screenshots are not
embedded; they live next to the model file and are referenced by relative
path.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from bugscribe.errors import ModelIntegrityError
from bugscribe.model import (
    ActionType,
    AppExecutionModel,
    ComponentKind,
    GuiComponent,
    Interaction,
    Screen,
    SwipeDirection,
    fingerprint_screen,
)

SCHEMA_VERSION = 1


def _component_to_dict(c: GuiComponent) -> dict[str, Any]:
    return {
        "uid": c.uid,
        "kind": c.kind.value,
        "text": c.text,
        "content_description": c.content_description,
        "bounds": list(c.bounds),
        "parent": c.parent,
    }


def _component_from_dict(d: dict[str, Any]) -> GuiComponent:
    return GuiComponent(
        uid=d["uid"],
        kind=ComponentKind(d["kind"]),
        text=d.get("text", ""),
        content_description=d.get("content_description", ""),
        bounds=tuple(d.get("bounds", (0, 0, 0, 0))),
        parent=d.get("parent"),
    )


def model_to_dict(model: AppExecutionModel) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "app_id": model.app_id,
        "app_name": model.app_name,
        "app_version": model.app_version,
        "built_at": model.built_at,
        "nodes": [
            {
                "fingerprint": s.fingerprint,
                "activity": s.activity,
                "window": s.window,
                "screenshot": s.screenshot,
                "components": [_component_to_dict(c) for c in s.components],
            }
            for _, s in sorted(model.nodes.items())
        ],
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "action": e.action.value,
                "target_component": list(e.target_component) if e.target_component else None,
                "swipe_direction": e.swipe_direction.value if e.swipe_direction else None,
                "weight": e.weight,
                "screenshot": e.screenshot,
                "highlight_bounds": list(e.highlight_bounds) if e.highlight_bounds else None,
            }
            for e in model.edges
        ],
    }


def model_from_dict(data: dict[str, Any]) -> AppExecutionModel:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ModelIntegrityError(f"unsupported model schema_version {version!r}")
    nodes: dict[str, Screen] = {}
    for nd in data["nodes"]:
        components = tuple(_component_from_dict(cd) for cd in nd["components"])
        screen = Screen(
            fingerprint=nd["fingerprint"],
            activity=nd["activity"],
            window=nd.get("window"),
            components=components,
            screenshot=nd.get("screenshot"),
        )
        recomputed = fingerprint_screen(screen.activity, screen.window, components)
        if recomputed != screen.fingerprint:
            raise ModelIntegrityError(
                f"stored fingerprint {screen.fingerprint[:12]} does not match content"
            )
        nodes[screen.fingerprint] = screen
    edges = tuple(
        Interaction(
            source=ed["source"],
            target=ed["target"],
            action=ActionType(ed["action"]),
            target_component=tuple(ed["target_component"]) if ed.get("target_component") else None,
            swipe_direction=SwipeDirection(ed["swipe_direction"]) if ed.get("swipe_direction") else None,
            weight=ed["weight"],
            screenshot=ed.get("screenshot"),
            highlight_bounds=tuple(ed["highlight_bounds"]) if ed.get("highlight_bounds") else None,
        )
        for ed in data["edges"]
    )
    model = AppExecutionModel(
        app_id=data["app_id"],
        app_name=data["app_name"],
        app_version=data["app_version"],
        nodes=nodes,
        edges=edges,
        built_at=data.get("built_at", ""),
    )
    model.validate()
    return model


def save_model(model: AppExecutionModel, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_model(path: str | Path) -> AppExecutionModel:
    raw = Path(path).read_text(encoding="utf-8")
    return model_from_dict(json.loads(raw))
