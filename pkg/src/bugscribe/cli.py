"""Operator command line: build models, query them, generate fixtures, serve.

Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path

from bugscribe.errors import BugscribeError
from bugscribe.matching import edge_ref, match_screen, match_step
from bugscribe.model import AppExecutionModel, START_NODE
from bugscribe.model_io import load_model, save_model
from bugscribe.nlp.lexicons import load_lexicons
from bugscribe.nlp.parsing import parse_message
from bugscribe.predictor import caption_edge, edge_probability, predict_path
from bugscribe.traces import app_id_for, build_model, parse_trace

MIN_PREFIX = 8


class UsageError(Exception):
    pass


def resolve_fingerprint(model: AppExecutionModel, prefix: str) -> str:
    """Accept START, a full fingerprint, or a unique hex prefix of >= 8 chars."""
    if prefix == START_NODE or prefix in model.nodes:
        return prefix
    if len(prefix) < MIN_PREFIX:
        raise UsageError(
            f"fingerprint prefix {prefix!r} is shorter than {MIN_PREFIX} characters"
        )
    matches = [fp for fp in model.nodes if fp.startswith(prefix)]
    if not matches:
        raise BugscribeError(f"no screen matches prefix {prefix!r}")
    if len(matches) > 1:
        raise BugscribeError(
            f"ambiguous prefix {prefix!r}: " + ", ".join(fp[:12] for fp in matches)
        )
    return matches[0]


def _emit(args: argparse.Namespace, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


# -- ingest -------------------------------------------------------------------


def _trace_files(directory: Path) -> list[Path]:
    files = sorted(directory.glob("*.json"))
    nested = directory / "traces"
    if nested.is_dir():
        files.extend(sorted(nested.glob("*.json")))
    return files


def cmd_ingest(args: argparse.Namespace) -> int:
    directory = Path(args.traces)
    if not directory.is_dir():
        raise BugscribeError(f"trace directory {directory} does not exist")
    files = _trace_files(directory)
    if not files:
        raise BugscribeError(f"no trace files in {directory}")

    traces = []
    failures = []
    for path in files:
        try:
            traces.append(parse_trace(path.read_bytes()))
        except BugscribeError as exc:
            failures.append(f"{path.name}: {exc}")
    if failures:
        for failure in failures:
            print(f"error: {failure}", file=sys.stderr)
        return 1

    app_id = app_id_for(traces[0].app_name, traces[0].app_version)
    model = build_model(traces, app_id=app_id)
    save_model(model, args.out)
    total_weight = sum(e.weight for e in model.edges)
    payload = {
        "app_id": model.app_id,
        "nodes": len(model.nodes),
        "edges": len(model.edges),
        "total_weight": total_weight,
        "out": str(args.out),
    }
    _emit(
        args,
        payload,
        [
            f"app={model.app_id} nodes={len(model.nodes)} edges={len(model.edges)} "
            f"total_weight={total_weight}",
            f"model written to {args.out}",
        ],
    )
    return 0


# -- match ----------------------------------------------------------------------


def cmd_match(args: argparse.Namespace) -> int:
    if args.mode == "edge" and args.state is None:
        raise UsageError("--mode edge requires --state")
    model = load_model(args.model)
    lexicons = load_lexicons()
    phrases = parse_message(args.text, lexicons)
    if not phrases:
        raise BugscribeError("no parsable sentence in --text")
    phrase = phrases[0]

    if args.mode == "screen":
        result = match_screen(model, phrase, lexicons=lexicons)
        payload = {
            "verdict": result.verdict.value,
            "candidates": [
                {
                    "fingerprint": c.fingerprint,
                    "score": str(c.score),
                    "score_float": float(c.score),
                }
                for c in result.candidates
            ],
        }
        lines = [f"verdict: {result.verdict.value}"]
        lines.extend(
            f"  {c.fingerprint[:12]}  score={c.score}" for c in result.candidates
        )
        _emit(args, payload, lines)
        return 0

    state = resolve_fingerprint(model, args.state)
    result = match_step(model, phrase, state, lexicons=lexicons)
    payload = {
        "verdict": result.verdict.value,
        "candidates": [
            {
                "edge": edge_ref(c.edge),
                "caption": caption_edge(c.edge),
                "score": str(c.score),
                "score_float": float(c.score),
                "hop_distance": c.hop_distance,
                "inferred_prefix": edge_ref(c.inferred_prefix)
                if c.inferred_prefix
                else None,
            }
            for c in result.candidates
        ],
    }
    lines = [f"verdict: {result.verdict.value}"]
    for c in result.candidates:
        suffix = f" (via {caption_edge(c.inferred_prefix)})" if c.inferred_prefix else ""
        lines.append(f"  {caption_edge(c.edge)}  score={c.score} hop={c.hop_distance}{suffix}")
    _emit(args, payload, lines)
    return 0


# -- predict -----------------------------------------------------------------


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    origin = resolve_fingerprint(model, args.from_fp)
    target = resolve_fingerprint(model, args.to_fp)
    prediction = predict_path(model, origin, target)
    if prediction is None:
        _emit(args, {"reachable": False}, ["no path"])
        return 0
    steps = [
        {
            "edge": edge_ref(edge),
            "caption": caption_edge(edge),
            "probability": str(edge_probability(model, edge)),
            "probability_float": float(edge_probability(model, edge)),
        }
        for edge in prediction.path
    ]
    payload = {
        "reachable": True,
        "likelihood": str(prediction.likelihood),
        "likelihood_float": float(prediction.likelihood),
        "steps": steps,
        "first_batch": [s.caption for s in prediction.batch(0)],
    }
    lines = [f"likelihood: {prediction.likelihood}"]
    lines.extend(f"  {i + 1}. {s['caption']}  p={s['probability']}" for i, s in enumerate(steps))
    if not steps:
        lines.append("  (already there: empty path)")
    _emit(args, payload, lines)
    return 0


# -- fixture ----------------------------------------------------------------


def cmd_fixture(args: argparse.Namespace) -> int:
    from bugscribe.fixtures import generate_fixture, load_spec, write_traces

    spec = load_spec(args.spec)
    traces = generate_fixture(spec)
    write_traces(traces, args.out)
    payload = {
        "traces": len(traces),
        "events": sum(len(t.events) for t in traces),
        "out": str(args.out),
    }
    _emit(
        args,
        payload,
        [f"wrote {len(traces)} traces ({payload['events']} events) to {args.out}"],
    )
    return 0


# -- stats -----------------------------------------------------------------


def _nondeterministic_nodes(model: AppExecutionModel) -> list[str]:
    seen: dict[tuple, set[str]] = {}
    for edge in model.edges:
        trigger = (edge.source, edge.action.value, edge.target_component, edge.swipe_direction)
        seen.setdefault(trigger, set()).add(edge.target)
    return sorted({trigger[0] for trigger, targets in seen.items() if len(targets) > 1})


def cmd_stats(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    histogram = Counter(e.weight for e in model.edges)
    nondet = _nondeterministic_nodes(model)
    payload = {
        "app_id": model.app_id,
        "nodes": len(model.nodes),
        "edges": len(model.edges),
        "weight_histogram": {str(w): n for w, n in sorted(histogram.items())},
        "nondeterministic_nodes": nondet,
    }
    lines = [
        f"app={model.app_id} nodes={len(model.nodes)} edges={len(model.edges)}",
        "weight histogram:",
    ]
    lines.extend(f"  weight={w}: {n} edges" for w, n in sorted(histogram.items()))
    if nondet:
        lines.append("nondeterministic nodes:")
        lines.extend(f"  {fp}" for fp in nondet)
    else:
        lines.append("nondeterministic nodes: none")

    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / "weights.csv"
        with csv_path.open("w", encoding="utf-8", newline="") as fh:
            import csv

            writer = csv.writer(fh)
            writer.writerow(
                ["source", "action", "component_kind", "component_text", "target", "weight"]
            )
            for edge in model.edges:
                kind, text, _ = edge.target_component or ("", "", "")
                writer.writerow([edge.source, edge.action.value, kind, text, edge.target, edge.weight])
        png_path = out_dir / "weight_histogram.png"
        _plot_histogram(histogram, png_path)
        payload["out_dir"] = str(out_dir)
        lines.append(f"wrote {csv_path} and {png_path}")

    _emit(args, payload, lines)
    return 0


def _plot_histogram(histogram: Counter, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    weights = sorted(histogram)
    counts = [histogram[w] for w in weights]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([str(w) for w in weights], counts, color="#4c72b0")
    ax.set_xlabel("edge weight")
    ax.set_ylabel("edges")
    ax.set_title("Edge weight distribution")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


# -- serve -------------------------------------------------------------------


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from bugscribe.service import create_app, load_config

    config = load_config(args.config)
    payload = {
        "host": config.host,
        "port": config.port,
        "asset_dir": str(config.asset_dir),
        "threshold_screen": str(config.threshold_screen),
        "threshold_edge": str(config.threshold_edge),
        "upload_limit_bytes": config.upload_limit_bytes,
    }
    _emit(
        args,
        payload,
        [f"serving on http://{config.host}:{config.port} (assets in {config.asset_dir})"],
    )
    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="warning")
    return 0


# -- wiring --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bugscribe", description="Guided bug reporting over app execution models."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a model from a directory of traces")
    p.add_argument("--traces", required=True, help="directory of trace files")
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("match", help="match an utterance against a model")
    p.add_argument("--model", required=True)
    p.add_argument("--text", required=True, help="utterance to match")
    p.add_argument("--state", help="current screen fingerprint (edge mode)")
    p.add_argument("--mode", choices=("screen", "edge"), default="screen")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("predict", help="most likely path between two screens")
    p.add_argument("--model", required=True)
    p.add_argument("--from", dest="from_fp", required=True, metavar="FROM")
    p.add_argument("--to", dest="to_fp", required=True, metavar="TO")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("fixture", help="generate traces from a fixture spec")
    p.add_argument("--spec", required=True, help="fixture spec file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("stats", help="print model statistics")
    p.add_argument("--model", required=True)
    p.add_argument("--out-dir", help="also write weights.csv and weight_histogram.png")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except BugscribeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
