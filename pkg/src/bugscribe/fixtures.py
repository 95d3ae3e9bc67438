"""Synthetic trace generation: the inverse of model building.

A fixture spec names screens and weighted edges; generation emits trace
files whose ingestion reproduces that topology and those weights exactly.
Bare weights decompose as manual = w // 3 traversals plus automated = w % 3
traversals (the inverse of the ingestion weight scheme).

Not every weight assignment is realizable by LAUNCH-anchored traces: within
each source kind, every non-START node must absorb at least as many
traversals as it emits. Specs violating that flow condition are rejected, as
are edge pairs that share an ingestion identity (source, action, component
signature, target): those would merge into one edge, so the spec must
already write them as one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator

from bugscribe.errors import FixtureSpecError
from bugscribe.model import (
    ActionType,
    ComponentKind,
    GuiComponent,
    START_NODE,
    SwipeDirection,
    TARGETED_ACTIONS,
)
from bugscribe.traces import TraceFile, parse_trace, trace_to_dict

#: minimal valid 1x1 PNG, for synthesized screenshot files
PNG_1PX = bytes.fromhex(
    "89504e470d0a1a0a0000000d4948445200000001000000010806000000"
    "1f15c4890000000d49444154789c626001000000ffff03000006000557"
    "bfabd40000000049454e44ae426082"
)


@dataclass(frozen=True)
class FixtureScreen:
    key: str
    activity: str
    components: tuple[GuiComponent, ...] = ()
    window: str | None = None
    screenshot: str | None = None


@dataclass(frozen=True)
class FixtureEdge:
    source: str
    target: str
    action: ActionType
    target_uid: str | None = None
    swipe_direction: SwipeDirection | None = None
    automated: int = 0
    manual: int = 0

    @property
    def weight(self) -> int:
        return self.automated + 3 * self.manual


def counts_for_weight(weight: int) -> tuple[int, int]:
    """(automated, manual) traversal counts realizing a bare weight."""
    if weight < 1:
        raise FixtureSpecError(f"edge weight must be >= 1, got {weight}")
    return weight % 3, weight // 3


@dataclass(frozen=True)
class FixtureSpec:
    app_name: str
    app_version: str
    screens: tuple[FixtureScreen, ...]
    edges: tuple[FixtureEdge, ...]
    app_package: str = ""


def _validate(spec: FixtureSpec) -> dict[str, FixtureScreen]:
    screens: dict[str, FixtureScreen] = {}
    for screen in spec.screens:
        if screen.key == START_NODE:
            raise FixtureSpecError(f"screen key {START_NODE!r} is reserved")
        if screen.key in screens:
            raise FixtureSpecError(f"duplicate screen key {screen.key!r}")
        screens[screen.key] = screen
    if not screens:
        raise FixtureSpecError("spec has no screens")

    for edge in spec.edges:
        if edge.source != START_NODE and edge.source not in screens:
            raise FixtureSpecError(f"edge source {edge.source!r} is not a screen")
        if edge.target not in screens:
            raise FixtureSpecError(f"edge target {edge.target!r} is not a screen")
        if (edge.action is ActionType.LAUNCH) != (edge.source == START_NODE):
            raise FixtureSpecError(
                f"LAUNCH edges pair exactly with source {START_NODE}; "
                f"got {edge.action.value} from {edge.source!r}"
            )
        if edge.automated < 0 or edge.manual < 0 or edge.automated + edge.manual < 1:
            raise FixtureSpecError(
                f"edge {edge.source}->{edge.target} needs at least one traversal"
            )
        if edge.action in TARGETED_ACTIONS:
            if edge.target_uid is None:
                raise FixtureSpecError(
                    f"{edge.action.value} edge {edge.source}->{edge.target} needs target_uid"
                )
            source_screen = screens[edge.source]
            if all(c.uid != edge.target_uid for c in source_screen.components):
                raise FixtureSpecError(
                    f"target_uid {edge.target_uid!r} not on screen {edge.source!r}"
                )

    identities: set[tuple] = set()
    for edge in spec.edges:
        signature = None
        if edge.action in TARGETED_ACTIONS:
            source_screen = screens[edge.source]
            signature = next(
                c.signature for c in source_screen.components if c.uid == edge.target_uid
            )
        identity = (edge.source, edge.action.value, signature, edge.target)
        if identity in identities:
            raise FixtureSpecError(
                f"{edge.action.value} edges {edge.source!r}->{edge.target!r} "
                "merge on ingestion; write them as one spec edge"
            )
        identities.add(identity)

    reachable = {START_NODE}
    frontier = [START_NODE]
    while frontier:
        node = frontier.pop()
        for edge in spec.edges:
            if edge.source == node and edge.target not in reachable:
                reachable.add(edge.target)
                frontier.append(edge.target)
    unreachable = sorted(set(screens) - reachable)
    if unreachable:
        raise FixtureSpecError("unreachable screen in spec: " + ", ".join(unreachable))

    for kind in ("automated", "manual"):
        _check_flow(spec, kind)
    return screens


def _count(edge: FixtureEdge, kind: str) -> int:
    return edge.automated if kind == "automated" else edge.manual


def _check_flow(spec: FixtureSpec, kind: str) -> None:
    arcs = [e for e in spec.edges if _count(e, kind) > 0]
    if not arcs:
        return
    inflow: dict[str, int] = {}
    outflow: dict[str, int] = {}
    for edge in arcs:
        n = _count(edge, kind)
        outflow[edge.source] = outflow.get(edge.source, 0) + n
        inflow[edge.target] = inflow.get(edge.target, 0) + n
    for node, out in outflow.items():
        if node == START_NODE:
            continue
        if out > inflow.get(node, 0):
            raise FixtureSpecError(
                f"{kind} traversals not realizable: {node!r} emits {out} "
                f"but absorbs {inflow.get(node, 0)}"
            )
    reachable = {START_NODE}
    frontier = [START_NODE]
    while frontier:
        node = frontier.pop()
        for edge in arcs:
            if edge.source == node and edge.target not in reachable:
                reachable.add(edge.target)
                frontier.append(edge.target)
    for edge in arcs:
        if edge.source not in reachable:
            raise FixtureSpecError(
                f"{kind} edge {edge.source}->{edge.target} unreachable from {START_NODE}"
            )


def _arc_sort_key(edge: FixtureEdge) -> tuple:
    return (
        edge.action.value,
        edge.target_uid or "",
        edge.target,
        edge.swipe_direction.value if edge.swipe_direction else "",
    )


_VIRTUAL = None


def _trails(spec: FixtureSpec, kind: str) -> Iterator[list[FixtureEdge]]:
    """Decompose the kind's traversal counts into LAUNCH-anchored trails."""
    arcs: dict[str, list[FixtureEdge | None]] = {}
    inflow: dict[str, int] = {}
    outflow: dict[str, int] = {}
    for edge in sorted(spec.edges, key=_arc_sort_key):
        n = _count(edge, kind)
        if n == 0:
            continue
        arcs.setdefault(edge.source, []).extend([edge] * n)
        outflow[edge.source] = outflow.get(edge.source, 0) + n
        inflow[edge.target] = inflow.get(edge.target, 0) + n
    if not arcs:
        return
    for node, inbound in inflow.items():
        surplus = inbound - outflow.get(node, 0)
        # virtual return arcs balance the graph so one Euler circuit exists
        arcs.setdefault(node, []).extend([_VIRTUAL] * surplus)

    pointer: dict[str, int] = {}
    stack: list[tuple[str, FixtureEdge | None]] = [(START_NODE, _VIRTUAL)]
    circuit: list[FixtureEdge | None] = []
    while stack:
        node, via = stack[-1]
        out = arcs.get(node, [])
        i = pointer.get(node, 0)
        if i < len(out):
            pointer[node] = i + 1
            arc = out[i]
            stack.append((arc.target if arc is not None else START_NODE, arc))
        else:
            stack.pop()
            if stack:
                circuit.append(via)
    circuit.reverse()

    trail: list[FixtureEdge] = []
    for arc in circuit:
        if arc is _VIRTUAL:
            if trail:
                yield trail
                trail = []
        else:
            trail.append(arc)
    if trail:
        yield trail


def _screen_payload(screen: FixtureScreen) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "activity": screen.activity,
        "components": [
            {
                "uid": c.uid,
                "kind": c.kind.value,
                "text": c.text,
                "content_description": c.content_description,
                "bounds": list(c.bounds),
                **({"parent": c.parent} if c.parent else {}),
            }
            for c in screen.components
        ],
    }
    if screen.window:
        payload["window"] = screen.window
    if screen.screenshot:
        payload["screenshot"] = screen.screenshot
    return payload


def generate_fixture(spec: FixtureSpec) -> list[TraceFile]:
    """Emit traces whose ingestion reproduces the spec exactly."""
    screens = _validate(spec)
    traces: list[TraceFile] = []
    for kind in ("automated", "manual"):
        for i, trail in enumerate(_trails(spec, kind), start=1):
            events = []
            for seq, edge in enumerate(trail, start=1):
                event: dict[str, Any] = {
                    "sequence": seq,
                    "action": edge.action.value,
                    "result_screen": _screen_payload(screens[edge.target]),
                }
                if edge.target_uid is not None:
                    source_screen = screens[edge.source]
                    component = next(
                        c for c in source_screen.components if c.uid == edge.target_uid
                    )
                    event["target"] = {
                        "uid": component.uid,
                        "kind": component.kind.value,
                        "text": component.text,
                        "content_description": component.content_description,
                        "bounds": list(component.bounds),
                    }
                if edge.action is ActionType.TYPE:
                    event["input_text"] = f"sample {seq}"
                if edge.swipe_direction is not None:
                    event["swipe_direction"] = edge.swipe_direction.value
                events.append(event)
            payload = {
                "schema_version": 1,
                "app": {
                    "name": spec.app_name,
                    "version": spec.app_version,
                    "package": spec.app_package,
                },
                "source": kind,
                "trace_id": f"{kind}-{i:03d}",
                "events": events,
            }
            traces.append(parse_trace(json.dumps(payload)))
    return traces


# --- spec (de)serialization ----------------------------------------------


def spec_to_dict(spec: FixtureSpec) -> dict[str, Any]:
    return {
        "app": {
            "name": spec.app_name,
            "version": spec.app_version,
            "package": spec.app_package,
        },
        "screens": [
            {
                "key": s.key,
                "activity": s.activity,
                **({"window": s.window} if s.window else {}),
                **({"screenshot": s.screenshot} if s.screenshot else {}),
                "components": [
                    {
                        "uid": c.uid,
                        "kind": c.kind.value,
                        "text": c.text,
                        "content_description": c.content_description,
                        "bounds": list(c.bounds),
                        **({"parent": c.parent} if c.parent else {}),
                    }
                    for c in s.components
                ],
            }
            for s in spec.screens
        ],
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "action": e.action.value,
                **({"target_uid": e.target_uid} if e.target_uid else {}),
                **({"swipe_direction": e.swipe_direction.value} if e.swipe_direction else {}),
                "automated": e.automated,
                "manual": e.manual,
            }
            for e in spec.edges
        ],
    }


def spec_from_dict(data: dict[str, Any]) -> FixtureSpec:
    try:
        app = data.get("app", {})
        screens = tuple(
            FixtureScreen(
                key=s["key"],
                activity=s["activity"],
                window=s.get("window"),
                screenshot=s.get("screenshot"),
                components=tuple(
                    GuiComponent(
                        uid=c["uid"],
                        kind=ComponentKind(c["kind"]),
                        text=c.get("text", ""),
                        content_description=c.get("content_description", ""),
                        bounds=tuple(c.get("bounds", (0, 0, 0, 0))),
                        parent=c.get("parent"),
                    )
                    for c in s.get("components", ())
                ),
            )
            for s in data["screens"]
        )
        edges = []
        for e in data["edges"]:
            if "weight" in e:
                automated, manual = counts_for_weight(e["weight"])
            else:
                automated, manual = e.get("automated", 0), e.get("manual", 0)
            edges.append(
                FixtureEdge(
                    source=e["source"],
                    target=e["target"],
                    action=ActionType(e["action"]),
                    target_uid=e.get("target_uid"),
                    swipe_direction=SwipeDirection(e["swipe_direction"])
                    if e.get("swipe_direction")
                    else None,
                    automated=automated,
                    manual=manual,
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureSpecError(f"bad fixture spec: {exc}") from exc
    return FixtureSpec(
        app_name=app.get("name", "App"),
        app_version=app.get("version", "1.0"),
        app_package=app.get("package", ""),
        screens=screens,
        edges=tuple(edges),
    )


def load_spec(path: str | Path) -> FixtureSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FixtureSpecError(f"spec is not valid JSON: {exc}") from exc
    return spec_from_dict(data)


def write_traces(
    traces: list[TraceFile], out_dir: str | Path, screenshots: bool = True
) -> list[Path]:
    """Write trace files (and placeholder screenshots) under out_dir."""
    out = Path(out_dir)
    trace_dir = out / "traces"
    trace_dir.mkdir(parents=True, exist_ok=True)
    written = []
    shots: set[str] = set()
    for trace in traces:
        path = trace_dir / f"{trace.trace_id}.json"
        path.write_text(
            json.dumps(trace_to_dict(trace), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        written.append(path)
        for event in trace.events:
            if event.result_screen.screenshot:
                shots.add(event.result_screen.screenshot)
    if screenshots:
        for shot in sorted(shots):
            if ".." in Path(shot).parts:
                continue
            path = out / shot
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(PNG_1PX)
    return written


def package_zip(
    traces: list[TraceFile],
    screenshots: dict[str, bytes] | None = None,
    icon: bytes | None = None,
) -> bytes:
    """Bundle traces (plus screenshots/icon) into an upload-ready ZIP."""
    import zipfile
    from io import BytesIO

    shots = dict(screenshots or {})
    if screenshots is None:
        for trace in traces:
            for event in trace.events:
                shot = event.result_screen.screenshot
                if shot:
                    shots[shot] = PNG_1PX
    buffer = BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        for trace in traces:
            archive.writestr(
                f"traces/{trace.trace_id}.json",
                json.dumps(trace_to_dict(trace), indent=2, sort_keys=True),
            )
        for name, blob in sorted(shots.items()):
            archive.writestr(name, blob)
        if icon is not None:
            archive.writestr("icon.png", icon)
    return buffer.getvalue()


# --- the demo app ---------------------------------------------------------


def demo_spec() -> FixtureSpec:
    """A small fuel-tracking app exercising every dialogue flow."""

    def btn(uid: str, text: str, x: int, y: int) -> GuiComponent:
        return GuiComponent(uid=uid, kind=ComponentKind.BUTTON, text=text, bounds=(x, y, x + 200, y + 60))

    def label(uid: str, text: str, x: int, y: int) -> GuiComponent:
        return GuiComponent(uid=uid, kind=ComponentKind.TEXT_VIEW, text=text, bounds=(x, y, x + 200, y + 40))

    def fld(uid: str, text: str, cd: str, x: int, y: int) -> GuiComponent:
        return GuiComponent(
            uid=uid, kind=ComponentKind.TEXT_FIELD, text=text, content_description=cd,
            bounds=(x, y, x + 300, y + 50),
        )

    screens = (
        FixtureScreen(
            key="home",
            activity="HomeActivity",
            screenshot="screenshots/home.png",
            components=(
                label("t_welcome", "Welcome", 20, 20),
                btn("b_add", "Add fillup", 20, 100),
                btn("b_stats", "Stats", 20, 200),
            ),
        ),
        FixtureScreen(
            key="form",
            activity="FillupFormActivity",
            screenshot="screenshots/form.png",
            components=(
                fld("f_amount", "Amount", "fillup amount", 20, 20),
                fld("f_price", "Price", "", 20, 100),
                btn("b_save", "Save car fillup", 20, 200),
            ),
        ),
        FixtureScreen(
            key="filled",
            activity="FillupFormActivity",
            screenshot="screenshots/filled.png",
            components=(
                fld("f_amount", "12.5", "fillup amount", 20, 20),
                fld("f_price", "Price", "", 20, 100),
                btn("b_save", "Save car fillup", 20, 200),
            ),
        ),
        FixtureScreen(
            key="stats",
            activity="StatsActivity",
            screenshot="screenshots/stats.png",
            components=(
                label("t_fuel", "Fuel economy", 20, 20),
                label("t_total", "Total value", 20, 80),
                btn("b_hist", "Fuel history", 20, 160),
            ),
        ),
        FixtureScreen(
            key="history",
            activity="HistoryActivity",
            screenshot="screenshots/history.png",
            components=(label("t_log", "Fuel economy log", 20, 20),),
        ),
    )
    edges = (
        FixtureEdge(source=START_NODE, target="home", action=ActionType.LAUNCH, automated=1, manual=1),
        FixtureEdge(source="home", target="form", action=ActionType.TAP, target_uid="b_add", manual=1),
        FixtureEdge(source="form", target="filled", action=ActionType.TYPE, target_uid="f_amount", manual=1),
        FixtureEdge(source="filled", target="stats", action=ActionType.TAP, target_uid="b_save", manual=1),
        FixtureEdge(source="stats", target="history", action=ActionType.TAP, target_uid="b_hist", automated=1),
        FixtureEdge(source="history", target="stats", action=ActionType.BACK, automated=1),
        FixtureEdge(source="home", target="stats", action=ActionType.TAP, target_uid="b_stats", automated=1),
    )
    return FixtureSpec(
        app_name="DemoPad", app_version="1.0", app_package="dev.demopad", screens=screens, edges=edges
    )
