"""Command line behavior: output shapes, exit codes, and parity with the library.

Each command runs in-process through main(argv) so exit codes and output
streams are captured exactly as a shell would see them.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from pathlib import Path

import pytest

from bugscribe.cli import main
from bugscribe.fixtures import demo_spec, generate_fixture, spec_to_dict, write_traces
from bugscribe.matching import MatchVerdict, match_screen
from bugscribe.model import (
    ActionType,
    ComponentKind,
    GuiComponent,
    START_NODE,
)
from bugscribe.fixtures import FixtureEdge, FixtureScreen, FixtureSpec
from bugscribe.model_io import load_model
from bugscribe.nlp.lexicons import load_lexicons
from bugscribe.nlp.parsing import parse_message


@pytest.fixture(scope="module")
def workspace(tmp_path_factory) -> dict[str, Path]:
    """A demo fixture directory and the ingested model, built once."""
    root = tmp_path_factory.mktemp("cli")
    spec_path = root / "spec.json"
    spec_path.write_text(json.dumps(spec_to_dict(demo_spec())), encoding="utf-8")
    model_path = root / "model.json"
    assert main(["fixture", "--spec", str(spec_path), "--out", str(root / "fix")]) == 0
    assert main(["ingest", "--traces", str(root / "fix"), "--out", str(model_path)]) == 0
    return {"root": root, "spec": spec_path, "fixture": root / "fix", "model": model_path}


@pytest.fixture(scope="module")
def model_arg(workspace) -> str:
    return str(workspace["model"])


def screen_fp(workspace, activity: str) -> str:
    model = load_model(workspace["model"])
    matches = [fp for fp, s in model.nodes.items() if s.activity == activity]
    assert len(matches) == 1
    return matches[0]


class TestIngest:
    def test_summary_line(self, workspace, capsys):
        out = workspace["root"] / "again.json"
        assert main(["ingest", "--traces", str(workspace["fixture"]), "--out", str(out)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "app=demopad-1.0 nodes=5 edges=7 total_weight=16"
        assert lines[1] == f"model written to {out}"

    def test_json_payload(self, workspace, capsys):
        out = workspace["root"] / "again.json"
        code = main(
            ["ingest", "--traces", str(workspace["fixture"]), "--out", str(out), "--json"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload == {
            "app_id": "demopad-1.0",
            "nodes": 5,
            "edges": 7,
            "total_weight": 16,
            "out": str(out),
        }

    def test_missing_directory(self, tmp_path, capsys):
        code = main(["ingest", "--traces", str(tmp_path / "nope"), "--out", str(tmp_path / "m")])
        assert code == 1
        assert "does not exist" in capsys.readouterr().err

    def test_broken_trace_file(self, tmp_path, capsys):
        (tmp_path / "t1.json").write_text("{nope", encoding="utf-8")
        code = main(["ingest", "--traces", str(tmp_path), "--out", str(tmp_path / "m")])
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error: t1.json: malformed trace")

    def test_mixed_app_versions(self, tmp_path, capsys):
        traces = generate_fixture(demo_spec())
        bumped = dataclasses.replace(traces[1], app_version="2.0")
        write_traces([traces[0], bumped], tmp_path / "mixed")
        code = main(["ingest", "--traces", str(tmp_path / "mixed"), "--out", str(tmp_path / "m")])
        assert code == 1
        assert "mixed app name/version" in capsys.readouterr().err


class TestMatch:
    def test_screen_multiple(self, workspace, model_arg, capsys):
        code = main(
            ["match", "--model", model_arg, "--text",
             "The fuel economy shows a NaN value on the page"]
        )
        assert code == 0
        stats = screen_fp(workspace, "StatsActivity")
        history = screen_fp(workspace, "HistoryActivity")
        assert capsys.readouterr().out.splitlines() == [
            "verdict: MULTIPLE",
            f"  {stats[:12]}  score=3/4",
            f"  {history[:12]}  score=1/2",
        ]

    def test_screen_none(self, model_arg, capsys):
        for text in ("zorp blee", "The app crashed"):
            assert main(["match", "--model", model_arg, "--text", text]) == 0
            assert capsys.readouterr().out == "verdict: NONE\n"

    def test_screen_json_matches_library(self, workspace, model_arg, capsys):
        text = "The fuel economy shows a NaN value on the page"
        assert main(["match", "--model", model_arg, "--text", text, "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)

        model = load_model(workspace["model"])
        lexicons = load_lexicons()
        result = match_screen(model, parse_message(text, lexicons)[0], lexicons=lexicons)
        assert result.verdict is MatchVerdict.MULTIPLE
        assert payload["verdict"] == "MULTIPLE"
        assert payload["candidates"] == [
            {
                "fingerprint": c.fingerprint,
                "score": str(c.score),
                "score_float": float(c.score),
            }
            for c in result.candidates
        ]

    def test_edge_mode_with_inferred_prefix(self, workspace, model_arg, capsys):
        model = load_model(workspace["model"])
        form = next(
            fp
            for fp, s in model.nodes.items()
            if s.activity == "FillupFormActivity" and any(c.text == "Amount" for c in s.components)
        )
        code = main(
            ["match", "--model", model_arg, "--text", "Tap the Save car fillup button",
             "--mode", "edge", "--state", form[:12]]
        )
        assert code == 0
        assert capsys.readouterr().out.splitlines() == [
            "verdict: SINGLE",
            "  Tap 'Save car fillup'  score=1 hop=1 (via Type into 'Amount')",
        ]

    def test_edge_mode_requires_state(self, model_arg, capsys):
        code = main(["match", "--model", model_arg, "--text", "Tap it", "--mode", "edge"])
        assert code == 2
        assert capsys.readouterr().err == "usage error: --mode edge requires --state\n"


def test_fingerprint_prefixes(workspace, model_arg, capsys):
    history = screen_fp(workspace, "HistoryActivity")

    code = main(["predict", "--model", model_arg, "--from", history[:8], "--to", history])
    assert code == 0
    assert "likelihood: 1" in capsys.readouterr().out

    code = main(["predict", "--model", model_arg, "--from", history[:6], "--to", history])
    assert code == 2
    assert "shorter than 8 characters" in capsys.readouterr().err

    code = main(["predict", "--model", model_arg, "--from", "0123456789ab", "--to", history])
    assert code == 1
    assert "no screen matches prefix" in capsys.readouterr().err


class TestPredict:
    def test_best_path_listing(self, workspace, model_arg, capsys):
        history = screen_fp(workspace, "HistoryActivity")
        assert main(["predict", "--model", model_arg, "--from", START_NODE, "--to", history]) == 0
        assert capsys.readouterr().out.splitlines() == [
            "likelihood: 3/4",
            "  1. Open the app  p=1",
            "  2. Tap 'Add fillup'  p=3/4",
            "  3. Type into 'Amount'  p=1",
            "  4. Tap 'Save car fillup'  p=1",
            "  5. Tap 'Fuel history'  p=1",
        ]

    def test_json_payload(self, workspace, model_arg, capsys):
        history = screen_fp(workspace, "HistoryActivity")
        code = main(
            ["predict", "--model", model_arg, "--from", START_NODE, "--to", history, "--json"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["reachable"] is True
        assert payload["likelihood"] == "3/4"
        assert payload["likelihood_float"] == 0.75
        assert payload["first_batch"] == [
            "Open the app",
            "Tap 'Add fillup'",
            "Type into 'Amount'",
            "Tap 'Save car fillup'",
            "Tap 'Fuel history'",
        ]
        assert [Fraction(s["probability"]) for s in payload["steps"]] == [
            Fraction(1), Fraction(3, 4), Fraction(1), Fraction(1), Fraction(1),
        ]

    def test_same_endpoint(self, workspace, model_arg, capsys):
        history = screen_fp(workspace, "HistoryActivity")
        assert main(["predict", "--model", model_arg, "--from", history, "--to", history]) == 0
        assert capsys.readouterr().out == "likelihood: 1\n  (already there: empty path)\n"

    def test_unreachable(self, workspace, model_arg, capsys):
        stats = screen_fp(workspace, "StatsActivity")
        model = load_model(workspace["model"])
        empty_form = next(
            fp
            for fp, s in model.nodes.items()
            if s.activity == "FillupFormActivity" and any(c.text == "Amount" for c in s.components)
        )
        assert main(["predict", "--model", model_arg, "--from", stats, "--to", empty_form]) == 0
        assert capsys.readouterr().out == "no path\n"


class TestFixture:
    def test_writes_traces_and_screenshots(self, workspace, capsys):
        out = workspace["root"] / "fresh"
        assert main(["fixture", "--spec", str(workspace["spec"]), "--out", str(out)]) == 0
        assert capsys.readouterr().out == f"wrote 2 traces (8 events) to {out}\n"
        assert sorted(p.name for p in (out / "traces").iterdir()) == [
            "automated-001.json",
            "manual-001.json",
        ]
        assert (out / "screenshots" / "home.png").exists()

    def test_round_trip_through_ingest(self, workspace, tmp_path):
        from bugscribe.traces import build_model

        out = tmp_path / "model.json"
        assert main(["ingest", "--traces", str(workspace["fixture"]), "--out", str(out)]) == 0
        direct = build_model(generate_fixture(demo_spec()), app_id="demopad-1.0")
        loaded = load_model(out)
        assert set(loaded.nodes) == set(direct.nodes)
        assert len(loaded.edges) == len(direct.edges)

    def test_bad_spec(self, tmp_path, capsys):
        path = tmp_path / "spec.json"
        path.write_text("[1, 2", encoding="utf-8")
        code = main(["fixture", "--spec", str(path), "--out", str(tmp_path / "out")])
        assert code == 1
        assert "not valid JSON" in capsys.readouterr().err


def flaky_spec() -> FixtureSpec:
    """One button that lands on two different screens across traces."""
    screens = (
        FixtureScreen(
            key="lobby",
            activity="LobbyActivity",
            components=(GuiComponent("b_go", ComponentKind.BUTTON, text="Go"),),
        ),
        FixtureScreen(
            key="x",
            activity="XActivity",
            components=(GuiComponent("t", ComponentKind.TEXT_VIEW, text="X marks"),),
        ),
        FixtureScreen(
            key="y",
            activity="YActivity",
            components=(GuiComponent("t", ComponentKind.TEXT_VIEW, text="Y marks"),),
        ),
    )
    edges = (
        FixtureEdge(START_NODE, "lobby", ActionType.LAUNCH, automated=2),
        FixtureEdge("lobby", "x", ActionType.TAP, target_uid="b_go", automated=1),
        FixtureEdge("lobby", "y", ActionType.TAP, target_uid="b_go", automated=1),
    )
    return FixtureSpec("Flaky", "1.0", screens, edges)


class TestStats:
    def test_summary_and_histogram(self, model_arg, capsys):
        assert main(["stats", "--model", model_arg]) == 0
        assert capsys.readouterr().out.splitlines() == [
            "app=demopad-1.0 nodes=5 edges=7",
            "weight histogram:",
            "  weight=1: 3 edges",
            "  weight=3: 3 edges",
            "  weight=4: 1 edges",
            "nondeterministic nodes: none",
        ]

    def test_json_payload(self, model_arg, capsys):
        assert main(["stats", "--model", model_arg, "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["weight_histogram"] == {"1": 3, "3": 3, "4": 1}
        assert payload["nondeterministic_nodes"] == []

    def test_nondeterministic_nodes_reported(self, tmp_path, capsys):
        traces = generate_fixture(flaky_spec())
        write_traces(traces, tmp_path / "fix")
        model_path = tmp_path / "model.json"
        assert main(["ingest", "--traces", str(tmp_path / "fix"), "--out", str(model_path)]) == 0
        capsys.readouterr()
        assert main(["stats", "--model", str(model_path)]) == 0
        out = capsys.readouterr().out
        model = load_model(model_path)
        lobby = next(fp for fp, s in model.nodes.items() if s.activity == "LobbyActivity")
        assert "nondeterministic nodes:" in out
        assert f"  {lobby}" in out.splitlines()

    def test_out_dir_writes_figures(self, workspace, model_arg, capsys, tmp_path):
        out_dir = tmp_path / "figs"
        assert main(["stats", "--model", model_arg, "--out-dir", str(out_dir), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["out_dir"] == str(out_dir)

        csv_lines = (out_dir / "weights.csv").read_text(encoding="utf-8").strip().splitlines()
        assert csv_lines[0] == "source,action,component_kind,component_text,target,weight"
        assert len(csv_lines) == 1 + 7

        png = (out_dir / "weight_histogram.png").read_bytes()
        assert png.startswith(b"\x89PNG\r\n\x1a\n")


def test_serve_reports_config_without_network(monkeypatch, tmp_path, capsys):
    import uvicorn

    calls = {}

    def fake_run(app, **kwargs):
        calls.update(kwargs)

    monkeypatch.setattr(uvicorn, "run", fake_run)
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"address": "127.0.0.1:9999"}), encoding="utf-8")
    assert main(["serve", "--config", str(config_path)]) == 0
    assert "serving on http://127.0.0.1:9999" in capsys.readouterr().out
    assert calls["port"] == 9999
