"""Execution-trace parsing, validation, and model construction.

A trace file is UTF-8 JSON (schema_version 1) describing one app run as a
LAUNCH-anchored event list; a ZIP package bundles traces plus optional
screenshots and icon. Ingestion is all-or-nothing: a single invalid trace
blocks publication.
"""

from __future__ import annotations

import json
import re
import zipfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from io import BytesIO
from pathlib import Path
from typing import Any

from bugscribe.errors import ModelIntegrityError, TraceParseError, TraceValidationError
from bugscribe.model import (
    ActionType,
    AppExecutionModel,
    ComponentKind,
    GuiComponent,
    ModelBuilder,
    Screen,
    START_NODE,
    SwipeDirection,
    TARGETED_ACTIONS,
)
from bugscribe.model_io import save_model

TRACE_SCHEMA_VERSION = 1

#: actions that must not name a target component
UNTARGETED_ACTIONS = frozenset({ActionType.LAUNCH, ActionType.BACK, ActionType.ROTATE})


@dataclass(frozen=True)
class TraceEvent:
    sequence: int
    action: ActionType
    result_screen: Screen
    target: GuiComponent | None = None
    input_text: str | None = None
    swipe_direction: SwipeDirection | None = None


@dataclass(frozen=True)
class TraceFile:
    schema_version: int
    app_name: str
    app_version: str
    app_package: str
    source: str
    trace_id: str
    events: tuple[TraceEvent, ...]


@dataclass(frozen=True)
class IngestIssue:
    file: str
    sequence: int | None
    message: str


@dataclass
class ValidationReport:
    ok: bool
    app_name: str = ""
    app_version: str = ""
    trace_count: int = 0
    event_count: int = 0
    errors: list[IngestIssue] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "app_name": self.app_name,
            "app_version": self.app_version,
            "trace_count": self.trace_count,
            "event_count": self.event_count,
            "errors": [
                {"file": e.file, "sequence": e.sequence, "message": e.message}
                for e in self.errors
            ],
        }


def slugify(text: str) -> str:
    slug = re.sub(r"[^a-z0-9.]+", "-", text.lower()).strip("-")
    return slug or "app"


def app_id_for(name: str, version: str) -> str:
    return f"{slugify(name)}-{slugify(version)}"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _require(data: dict[str, Any], key: str, kind: type, where: str, sequence: int | None = None):
    if key not in data:
        raise TraceValidationError(f"missing {where}.{key}", field=key, sequence=sequence)
    value = data[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise TraceValidationError(
            f"{where}.{key} must be {kind.__name__}", field=key, sequence=sequence
        )
    return value


def _parse_component(data: Any, sequence: int) -> GuiComponent:
    if not isinstance(data, dict):
        raise TraceValidationError("component must be an object", field="components", sequence=sequence)
    uid = _require(data, "uid", str, "component", sequence)
    kind_raw = _require(data, "kind", str, "component", sequence)
    try:
        kind = ComponentKind(kind_raw)
    except ValueError:
        raise TraceValidationError(
            f"unknown component kind {kind_raw!r}", field="kind", sequence=sequence
        ) from None
    bounds_raw = data.get("bounds", [0, 0, 0, 0])
    if (
        not isinstance(bounds_raw, list)
        or len(bounds_raw) != 4
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in bounds_raw)
    ):
        raise TraceValidationError("bounds must be four integers", field="bounds", sequence=sequence)
    x1, y1, x2, y2 = bounds_raw
    if x1 > x2 or y1 > y2:
        raise TraceValidationError(f"malformed bounds {bounds_raw}", field="bounds", sequence=sequence)
    return GuiComponent(
        uid=uid,
        kind=kind,
        text=data.get("text", "") or "",
        content_description=data.get("content_description", "") or "",
        bounds=(x1, y1, x2, y2),
        parent=data.get("parent"),
    )


def _parse_screen(data: Any, sequence: int) -> Screen:
    if not isinstance(data, dict):
        raise TraceValidationError("result_screen must be an object", field="result_screen", sequence=sequence)
    activity = _require(data, "activity", str, "result_screen", sequence)
    if not activity:
        raise TraceValidationError("result_screen.activity is empty", field="activity", sequence=sequence)
    components_raw = data.get("components", [])
    if not isinstance(components_raw, list):
        raise TraceValidationError("components must be a list", field="components", sequence=sequence)
    components = tuple(_parse_component(c, sequence) for c in components_raw)
    uids = {c.uid for c in components}
    for c in components:
        if c.parent is not None and c.parent not in uids:
            raise TraceValidationError(
                f"component {c.uid} references unknown parent {c.parent}",
                field="parent",
                sequence=sequence,
            )
    window = data.get("window")
    screenshot = data.get("screenshot")
    return Screen.build(
        activity=activity,
        components=components,
        window=window if isinstance(window, str) and window else None,
        screenshot=screenshot if isinstance(screenshot, str) and screenshot else None,
    )


def _parse_event(data: Any, position: int, last_sequence: int) -> TraceEvent:
    if not isinstance(data, dict):
        raise TraceValidationError(f"event {position} must be an object", field="events", sequence=position)
    sequence = _require(data, "sequence", int, "event", position)
    if sequence <= last_sequence:
        raise TraceValidationError(
            f"non-increasing sequence at event {position}", field="sequence", sequence=position
        )
    action_raw = _require(data, "action", str, "event", sequence)
    try:
        action = ActionType(action_raw)
    except ValueError:
        raise TraceValidationError(
            f"unknown action {action_raw!r}", field="action", sequence=sequence
        ) from None

    target = None
    if data.get("target") is not None:
        target = _parse_component(data["target"], sequence)
    if action in TARGETED_ACTIONS and target is None:
        raise TraceValidationError(
            f"{action.value} event requires a target", field="target", sequence=sequence
        )
    if action in UNTARGETED_ACTIONS and target is not None:
        raise TraceValidationError(
            f"{action.value} event must not carry a target", field="target", sequence=sequence
        )

    input_text = data.get("input_text")
    if action is ActionType.TYPE:
        if not isinstance(input_text, str):
            raise TraceValidationError("TYPE event requires input_text", field="input_text", sequence=sequence)
    elif input_text is not None:
        raise TraceValidationError(
            f"input_text not allowed on {action.value}", field="input_text", sequence=sequence
        )

    swipe_direction = None
    if data.get("swipe_direction") is not None:
        if action is not ActionType.SWIPE:
            raise TraceValidationError(
                f"swipe_direction not allowed on {action.value}", field="swipe_direction", sequence=sequence
            )
        try:
            swipe_direction = SwipeDirection(data["swipe_direction"])
        except ValueError:
            raise TraceValidationError(
                f"unknown swipe_direction {data['swipe_direction']!r}",
                field="swipe_direction",
                sequence=sequence,
            ) from None

    if "result_screen" not in data:
        raise TraceValidationError("event missing result_screen", field="result_screen", sequence=sequence)
    result_screen = _parse_screen(data["result_screen"], sequence)
    return TraceEvent(
        sequence=sequence,
        action=action,
        result_screen=result_screen,
        target=target,
        input_text=input_text,
        swipe_direction=swipe_direction,
    )


def parse_trace(raw: bytes | str) -> TraceFile:
    """Parse and validate one trace file; raises on any schema violation."""
    text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceParseError(f"malformed trace: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(data, dict):
        raise TraceValidationError("trace root must be an object", field="root")

    version = data.get("schema_version")
    if version != TRACE_SCHEMA_VERSION:
        raise TraceValidationError(
            f"unsupported schema_version {version!r}", field="schema_version"
        )
    app = _require(data, "app", dict, "trace")
    name = _require(app, "name", str, "app")
    app_version = _require(app, "version", str, "app")
    package = app.get("package", "")
    source = _require(data, "source", str, "trace")
    if source not in ("automated", "manual"):
        raise TraceValidationError(f"source must be automated|manual, got {source!r}", field="source")
    trace_id = _require(data, "trace_id", str, "trace")
    if not trace_id:
        raise TraceValidationError("trace_id is empty", field="trace_id")

    events_raw = _require(data, "events", list, "trace")
    if not events_raw:
        raise TraceValidationError("events must be nonempty", field="events")
    events = []
    last_sequence = 0
    for position, ev in enumerate(events_raw, start=1):
        event = _parse_event(ev, position, last_sequence)
        last_sequence = event.sequence
        events.append(event)
    if events[0].sequence != 1:
        raise TraceValidationError("sequence numbers must start at 1", field="sequence", sequence=1)
    if events[0].action is not ActionType.LAUNCH:
        raise TraceValidationError("first event must be LAUNCH", field="action", sequence=events[0].sequence)

    return TraceFile(
        schema_version=version,
        app_name=name,
        app_version=app_version,
        app_package=package,
        source=source,
        trace_id=trace_id,
        events=tuple(events),
    )


def _component_payload(component: GuiComponent) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "uid": component.uid,
        "kind": component.kind.value,
        "text": component.text,
        "content_description": component.content_description,
        "bounds": list(component.bounds),
    }
    if component.parent is not None:
        payload["parent"] = component.parent
    return payload


def trace_to_dict(trace: TraceFile) -> dict[str, Any]:
    """Inverse of parse_trace: parse_trace(dumps(trace_to_dict(t))) == t."""
    events = []
    for event in trace.events:
        payload: dict[str, Any] = {"sequence": event.sequence, "action": event.action.value}
        if event.target is not None:
            payload["target"] = _component_payload(event.target)
        if event.input_text is not None:
            payload["input_text"] = event.input_text
        if event.swipe_direction is not None:
            payload["swipe_direction"] = event.swipe_direction.value
        screen: dict[str, Any] = {
            "activity": event.result_screen.activity,
            "components": [_component_payload(c) for c in event.result_screen.components],
        }
        if event.result_screen.window:
            screen["window"] = event.result_screen.window
        if event.result_screen.screenshot:
            screen["screenshot"] = event.result_screen.screenshot
        payload["result_screen"] = screen
        events.append(payload)
    return {
        "schema_version": trace.schema_version,
        "app": {
            "name": trace.app_name,
            "version": trace.app_version,
            "package": trace.app_package,
        },
        "source": trace.source,
        "trace_id": trace.trace_id,
        "events": events,
    }


def build_model(
    traces: list[TraceFile], app_id: str, built_at: str | None = None
) -> AppExecutionModel:
    """Fold validated traces into an immutable execution model.

    Traces are ingested in trace_id order so the result is independent of
    the order in which files arrived.
    """
    if not traces:
        raise TraceValidationError("no traces to build from", field="traces")
    reference = traces[0]
    offending = sorted(
        t.trace_id
        for t in traces
        if (t.app_name, t.app_version) != (reference.app_name, reference.app_version)
    )
    if offending:
        raise TraceValidationError(
            "mixed app name/version in traces: " + ", ".join(offending), field="app"
        )

    builder = ModelBuilder(
        app_id=app_id,
        app_name=reference.app_name,
        app_version=reference.app_version,
        built_at=built_at if built_at is not None else utc_now(),
    )
    for trace in sorted(traces, key=lambda t: t.trace_id):
        previous: Screen | None = None
        for event in trace.events:
            builder.register_screen(event.result_screen)
            source_fp = START_NODE if previous is None else previous.fingerprint
            source_shot = previous.screenshot if previous is not None else None
            builder.upsert_transition(
                source=source_fp,
                target=event.result_screen.fingerprint,
                action=event.action,
                source_kind=trace.source,
                target_component=event.target.signature if event.target else None,
                swipe_direction=event.swipe_direction,
                screenshot=source_shot,
                highlight_bounds=event.target.bounds if event.target and source_shot else None,
            )
            previous = event.result_screen
    return builder.build()


def read_zip_package(zip_bytes: bytes) -> tuple[list[tuple[str, bytes]], dict[str, bytes], bytes | None]:
    """Split a package ZIP into (trace files, screenshot files, icon)."""
    try:
        archive = zipfile.ZipFile(BytesIO(zip_bytes))
    except zipfile.BadZipFile as exc:
        raise TraceParseError(f"not a ZIP archive: {exc}", offset=0) from exc
    traces: list[tuple[str, bytes]] = []
    screenshots: dict[str, bytes] = {}
    icon: bytes | None = None
    for info in archive.infolist():
        if info.is_dir():
            continue
        name = info.filename
        if name.startswith("traces/"):
            traces.append((name, archive.read(info)))
        elif name.startswith("screenshots/"):
            screenshots[name] = archive.read(info)
        elif name == "icon.png":
            icon = archive.read(info)
    traces.sort(key=lambda item: item[0])
    return traces, screenshots, icon


def ingest_app_package(
    zip_bytes: bytes,
    storage_dir: str | Path,
    icon_bytes: bytes | None = None,
    built_at: str | None = None,
) -> tuple[ValidationReport, AppExecutionModel | None]:
    """Validate a package and, if fully clean, publish its model.

    Returns the per-file validation report and the published model (None
    whenever ok is false — partial packages never publish).
    """
    report = ValidationReport(ok=False)
    try:
        members, screenshots, zip_icon = read_zip_package(zip_bytes)
    except TraceParseError as exc:
        report.errors.append(IngestIssue(file="", sequence=None, message=str(exc)))
        return report, None
    if not members:
        report.errors.append(IngestIssue(file="", sequence=None, message="no traces found"))
        return report, None

    traces: list[TraceFile] = []
    for name, blob in members:
        try:
            traces.append(parse_trace(blob))
        except TraceParseError as exc:
            report.errors.append(IngestIssue(file=name, sequence=None, message=str(exc)))
        except TraceValidationError as exc:
            report.errors.append(IngestIssue(file=name, sequence=exc.sequence, message=str(exc)))

    if traces:
        report.app_name = traces[0].app_name
        report.app_version = traces[0].app_version
        report.trace_count = len(traces)
        report.event_count = sum(len(t.events) for t in traces)
    if report.errors:
        return report, None

    app_id = app_id_for(traces[0].app_name, traces[0].app_version)
    try:
        model = build_model(traces, app_id=app_id, built_at=built_at)
    except (TraceValidationError, ModelIntegrityError) as exc:
        report.errors.append(IngestIssue(file="", sequence=None, message=str(exc)))
        return report, None

    app_dir = Path(storage_dir) / app_id
    save_model(model, app_dir / "model.json")
    for name, blob in screenshots.items():
        path = app_dir / name
        # refuse entries that would escape the app directory
        if ".." in Path(name).parts:
            continue
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(blob)
    icon = icon_bytes if icon_bytes is not None else zip_icon
    if icon is not None:
        (app_dir / "icon.png").write_bytes(icon)
    report.ok = True
    return report, model
