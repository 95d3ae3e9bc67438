"""Bug report assembly and rendering.

A report is a frozen snapshot of whatever the dialogue collected: observed
and expected behavior, ordered steps with captures, and quality flags for
the parts that never matched the model. Rendering is pure; the structured
form round-trips losslessly and the markdown form is for humans.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from bugscribe.dialogue import DialogueSession
from bugscribe.nlp.parsing import split_sentences
from bugscribe.traces import utc_now

SCHEMA_VERSION = 1
TITLE_LIMIT = 100


@dataclass(frozen=True)
class ReportedStep:
    index: int
    text: str
    action: str | None = None
    component_text: str | None = None
    screenshot: str | None = None
    highlight_bounds: tuple[int, int, int, int] | None = None
    inferred: bool = False
    matched: bool = False


@dataclass(frozen=True)
class ObservedBehavior:
    text: str
    fingerprint: str | None = None
    screenshot: str | None = None


@dataclass(frozen=True)
class ExpectedBehavior:
    text: str


@dataclass(frozen=True)
class ReportQuality:
    ob_matched: bool
    eb_matched: bool
    unmatched_step_indices: tuple[int, ...]


@dataclass(frozen=True)
class BugReport:
    app_name: str
    app_version: str
    created_at: str
    title: str
    observed_behavior: ObservedBehavior
    expected_behavior: ExpectedBehavior
    steps: tuple[ReportedStep, ...]
    quality: ReportQuality


def make_title(ob_text: str, app_name: str, app_version: str) -> str:
    sentences = split_sentences(ob_text)
    if sentences:
        return sentences[0][:TITLE_LIMIT]
    if app_name:
        return f"Bug report for {app_name} {app_version}".rstrip()
    return "Bug report"


def generate_report(session: DialogueSession, created_at: str | None = None) -> BugReport:
    """Snapshot the session into a report. Always succeeds, even half-filled."""
    model = session.model
    app_name = model.app_name if model else ""
    app_version = model.app_version if model else ""

    ob_screenshot = None
    if model is not None and session.ob.fingerprint is not None:
        screen = model.nodes.get(session.ob.fingerprint)
        ob_screenshot = screen.screenshot if screen else None

    steps = []
    for record in session.steps:
        edge = record.edge
        component_text = None
        if edge is not None and edge.target_component is not None:
            kind, text, content_description = edge.target_component
            component_text = text or content_description or kind
        steps.append(
            ReportedStep(
                index=record.index,
                text=record.text,
                action=edge.action.value if edge else None,
                component_text=component_text,
                screenshot=record.screenshot,
                highlight_bounds=edge.highlight_bounds if edge else None,
                inferred=record.inferred,
                matched=record.matched,
            )
        )

    return BugReport(
        app_name=app_name,
        app_version=app_version,
        created_at=created_at or utc_now(),
        title=make_title(session.ob.text, app_name, app_version),
        observed_behavior=ObservedBehavior(
            text=session.ob.text,
            fingerprint=session.ob.fingerprint,
            screenshot=ob_screenshot,
        ),
        expected_behavior=ExpectedBehavior(text=session.eb.text),
        steps=tuple(steps),
        quality=ReportQuality(
            ob_matched=session.ob.matched,
            eb_matched=session.eb.matched,
            unmatched_step_indices=tuple(s.index for s in steps if not s.matched),
        ),
    )


def _prune(mapping: dict[str, Any]) -> dict[str, Any]:
    return {k: v for k, v in mapping.items() if v is not None}


def report_to_dict(report: BugReport) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "app": {"name": report.app_name, "version": report.app_version},
        "created_at": report.created_at,
        "title": report.title,
        "observed_behavior": _prune(
            {
                "text": report.observed_behavior.text,
                "fingerprint": report.observed_behavior.fingerprint,
                "screenshot": report.observed_behavior.screenshot,
            }
        ),
        "expected_behavior": {"text": report.expected_behavior.text},
        "steps": [
            _prune(
                {
                    "index": s.index,
                    "text": s.text,
                    "action": s.action,
                    "component_text": s.component_text,
                    "screenshot": s.screenshot,
                    "highlight_bounds": list(s.highlight_bounds)
                    if s.highlight_bounds
                    else None,
                    "inferred": s.inferred,
                    "matched": s.matched,
                }
            )
            for s in report.steps
        ],
        "quality": {
            "ob_matched": report.quality.ob_matched,
            "eb_matched": report.quality.eb_matched,
            "unmatched_step_indices": list(report.quality.unmatched_step_indices),
        },
    }


def report_from_dict(payload: dict[str, Any]) -> BugReport:
    ob = payload["observed_behavior"]
    steps = tuple(
        ReportedStep(
            index=s["index"],
            text=s["text"],
            action=s.get("action"),
            component_text=s.get("component_text"),
            screenshot=s.get("screenshot"),
            highlight_bounds=tuple(s["highlight_bounds"])
            if s.get("highlight_bounds")
            else None,
            inferred=s["inferred"],
            matched=s["matched"],
        )
        for s in payload["steps"]
    )
    quality = payload["quality"]
    return BugReport(
        app_name=payload["app"]["name"],
        app_version=payload["app"]["version"],
        created_at=payload["created_at"],
        title=payload["title"],
        observed_behavior=ObservedBehavior(
            text=ob["text"],
            fingerprint=ob.get("fingerprint"),
            screenshot=ob.get("screenshot"),
        ),
        expected_behavior=ExpectedBehavior(text=payload["expected_behavior"]["text"]),
        steps=steps,
        quality=ReportQuality(
            ob_matched=quality["ob_matched"],
            eb_matched=quality["eb_matched"],
            unmatched_step_indices=tuple(quality["unmatched_step_indices"]),
        ),
    )


def verify_assets(report: BugReport, asset_dir: str | Path) -> list[str]:
    """Screenshot paths referenced by the report but missing on disk."""
    base = Path(asset_dir)
    referenced = []
    if report.observed_behavior.screenshot:
        referenced.append(report.observed_behavior.screenshot)
    referenced.extend(s.screenshot for s in report.steps if s.screenshot)
    missing = []
    for rel in referenced:
        if not (base / rel).is_file() and rel not in missing:
            missing.append(rel)
    return missing


def render(
    report: BugReport, format: str = "structured", asset_dir: str | Path | None = None
) -> bytes:
    """Serialize a report.

    With an asset_dir, markdown image links are emitted only for captures
    that actually exist there; everything else degrades to plain text.
    """
    if format == "structured":
        text = json.dumps(report_to_dict(report), indent=2, sort_keys=True)
        return (text + "\n").encode("utf-8")
    if format == "markdown":
        return _render_markdown(report, asset_dir).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def _image_ok(path: str | None, asset_dir: str | Path | None) -> bool:
    if path is None:
        return False
    if asset_dir is None:
        return True
    return (Path(asset_dir) / path).is_file()


def _render_markdown(report: BugReport, asset_dir: str | Path | None) -> str:
    lines = [f"# {report.title}", ""]
    if report.app_name:
        lines.append(f"App: {report.app_name} {report.app_version}".rstrip())
    lines.append(f"Created: {report.created_at}")
    lines.append("")

    lines.append("## Observed Behavior")
    lines.append("")
    lines.append(report.observed_behavior.text or "(not provided)")
    if _image_ok(report.observed_behavior.screenshot, asset_dir):
        lines.append("")
        lines.append(f"![observed screen]({report.observed_behavior.screenshot})")
    lines.append("")

    lines.append("## Expected Behavior")
    lines.append("")
    lines.append(report.expected_behavior.text or "(not provided)")
    lines.append("")

    lines.append("## Steps to Reproduce")
    lines.append("")
    for step in report.steps:
        suffix = " (inferred)" if step.inferred else ""
        lines.append(f"{step.index}. {step.text}{suffix}")
        if _image_ok(step.screenshot, asset_dir):
            lines.append(f"   ![step {step.index}]({step.screenshot})")
    lines.append("")
    return "\n".join(lines)
