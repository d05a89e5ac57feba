"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .annotation import load_annotation, write_overlay
from .baselines import ActionMatchConfig
from .dataset import load_dataset, load_traces, validate_dataset
from .errors import ConfigError, DataError, TouchstoneError
from .matcher import MatchConfig, parse_categories
from .metrics import (
    DISABLE_ALL_ROW,
    EVALUATORS,
    ABLATION_ROWS,
    ablation_markdown,
    ablation_run,
    build_report,
    evaluate_dataset,
    outcomes_for,
    read_labels,
    report_markdown,
)
from .similarity import SimilarityConfig, make_embedder
from .trace import load_trace
from .vh import load_vh, simplify_to_html

ENDPOINT_ENV = "TOUCHSTONE_EMBED_ENDPOINT"

# flag dest -> evaluators that accept it
_ESSENTIAL_ONLY = ("theta_screen", "theta_textbox", "ablate", "backend", "embed_endpoint")
_BASELINE_ONLY = ("click_tolerance",)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _write(path, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- config ---------------------------------------------------------------------------

def match_config_from_args(args) -> MatchConfig:
    endpoint = args.embed_endpoint or os.environ.get(ENDPOINT_ENV) or None
    backend = args.backend or ("external" if args.embed_endpoint else "lexical")
    sim = SimilarityConfig(
        backend=backend,
        theta_screen=SimilarityConfig.theta_screen if args.theta_screen is None else args.theta_screen,
        theta_textbox=SimilarityConfig.theta_textbox if args.theta_textbox is None else args.theta_textbox,
        external_endpoint=endpoint if backend == "external" else None,
    )
    ablation = parse_categories(args.ablate) if args.ablate else frozenset()
    return MatchConfig(similarity=sim, ablation=ablation)


def action_config_from_args(args) -> ActionMatchConfig:
    if args.click_tolerance is None:
        return ActionMatchConfig()
    return ActionMatchConfig(click_tolerance=args.click_tolerance)


def _check_evaluator_flags(args) -> None:
    wrong = _BASELINE_ONLY if args.evaluator == "essential" else _ESSENTIAL_ONLY
    given = [name for name in wrong if getattr(args, name) is not None]
    if given:
        flags = ", ".join("--" + g.replace("_", "-") for g in given)
        raise ConfigError(f"{flags} not applicable to the {args.evaluator} evaluator")


def effective_config(args) -> dict:
    cfg = {"evaluator": args.evaluator, "dataset": str(args.dataset), "traces": str(args.traces),
           "labels": None if args.labels is None else str(args.labels), "jobs": args.jobs}
    if args.evaluator == "essential":
        cfg["match"] = match_config_from_args(args).to_json()
    else:
        cfg["action_match"] = action_config_from_args(args).to_json()
    return cfg


# -- commands -------------------------------------------------------------------------

def cmd_eval(args) -> int:
    _check_evaluator_flags(args)
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    config = effective_config(args)
    match_cfg = match_config_from_args(args) if args.evaluator == "essential" else None
    action_cfg = action_config_from_args(args) if args.evaluator != "essential" else None
    embedder = make_embedder(match_cfg.similarity) if match_cfg else None

    entries = load_dataset(args.dataset)
    traces = load_traces(args.traces, entries)
    labels = read_labels(args.labels) if args.labels else None
    results = evaluate_dataset(entries, traces, args.evaluator, match_cfg, action_cfg, args.jobs, embedder)
    outcomes = outcomes_for(results, entries, labels)
    report = build_report(outcomes)

    doc = {
        "config": config,
        "report": report.to_json(),
        "tasks": [
            {
                "task_id": r.task_id,
                "completed": r.completed,
                "human_label": o.human_label,
                "tags": list(o.tags),
                **({"verdict": r.verdict.to_json()} if r.verdict is not None else {}),
            }
            for r, o in zip(results, outcomes)
        ],
    }
    if not args.deterministic:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    if args.report_json:
        _write(args.report_json, _dump_json(doc))
    md = report_markdown(report, f"Evaluation report ({args.evaluator})",
                         [(r.task_id, r.completed, o.human_label) for r, o in zip(results, outcomes)])
    if args.report_md:
        _write(args.report_md, md)
    acc = "-" if report.accuracy is None else f"{100 * report.accuracy:.2f}%"
    print(f"{args.evaluator}: {report.n} tasks, TCR {100 * report.tcr:.2f}%, accuracy {acc}")
    return 0


def cmd_validate(args) -> int:
    entries = load_dataset(args.dataset)
    issues = validate_dataset(entries)
    for task_id, issue in issues:
        print(f"{task_id}: {issue}")
    print(f"{len(entries)} tasks, {len(issues)} issues")
    return 2 if issues else 0


def cmd_overlay(args) -> int:
    gt = load_trace(args.trace)
    ann = load_annotation(args.annotation) if args.annotation else None
    write_overlay(gt, args.out, ann)
    print(args.out)
    return 0


def cmd_simplify(args) -> int:
    sys.stdout.write(simplify_to_html(load_vh(args.vh)) + "\n")
    return 0


def cmd_record(args) -> int:
    from .agentenv import Session, load_app_pack, load_script, record_session, run_script

    model = load_app_pack(args.pack)
    script = load_script(args.script)
    session = Session.simulated(model, script.task, script.packages)
    run_script(session, script.actions)
    if session.running:
        raise ConfigError("script did not end with task_complete or task_impossible")
    trace = record_session(session, args.out)
    print(f"{args.out}: {len(trace)} steps, status {session.status.value}")
    return 0


def cmd_serve(args) -> int:
    from .agentenv import load_app_pack
    from .agentenv.server import AgentEnvService, make_server

    service = AgentEnvService(load_app_pack(args.pack), args.record_dir)
    server = make_server(service, args.host, args.port)
    host, port = server.server_address[:2]
    print(f"serving {service.model.app_id} on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_ablation(args) -> int:
    cfg = match_config_from_args(args)
    entries = load_dataset(args.dataset)
    traces = load_traces(args.traces, entries)
    labels = read_labels(args.labels) if args.labels else None
    rows = list(ABLATION_ROWS) + ([DISABLE_ALL_ROW] if args.disable_all else [])
    table = ablation_run(entries, traces, rows, cfg, labels, make_embedder(cfg.similarity), args.jobs)
    md = ablation_markdown(table)
    if args.report_md:
        _write(args.report_md, md)
    if args.report_json:
        doc = {"config": cfg.to_json(), "rows": [{"design": label, **r.to_json()} for label, r in table]}
        _write(args.report_json, _dump_json(doc))
    sys.stdout.write(md)
    return 0


# -- parser ---------------------------------------------------------------------------

def _add_match_flags(p) -> None:
    p.add_argument("--theta-screen", type=float, help="screen similarity threshold (default 0.85)")
    p.add_argument("--theta-textbox", type=float, help="textbox similarity threshold (default 0.85)")
    p.add_argument("--backend", choices=("lexical", "external"),
                   help="similarity backend (default lexical, or external when --embed-endpoint is given)")
    p.add_argument("--embed-endpoint", help=f"external embedding service URL (default ${ENDPOINT_ENV})")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="touchstone", description="Essential-state evaluation of mobile agent traces.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate agent traces against an annotated dataset")
    p.add_argument("--dataset", required=True, type=Path)
    p.add_argument("--traces", required=True, type=Path)
    p.add_argument("--evaluator", choices=EVALUATORS, default="essential")
    _add_match_flags(p)
    p.add_argument("--ablate", help="disable categories, e.g. exact or activity,action")
    p.add_argument("--click-tolerance", type=float, help="baseline click distance tolerance (default 0.14)")
    p.add_argument("--labels", type=Path, help="human labels, one 'task_id<TAB>true|false' per line")
    p.add_argument("--report-json", type=Path)
    p.add_argument("--report-md", type=Path)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--deterministic", action="store_true", help="omit the timestamp from the JSON report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("validate", help="lint every annotation of a dataset")
    p.add_argument("dataset", type=Path)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("overlay", help="write an HTML page of numbered components per step")
    p.add_argument("trace", type=Path)
    p.add_argument("--annotation", type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("simplify", help="print the simplified HTML of a view hierarchy")
    p.add_argument("vh", type=Path)
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("record", help="run a scripted agent on an app pack and record the trace")
    p.add_argument("--pack", required=True, type=Path)
    p.add_argument("--script", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("serve", help="serve the agent API over HTTP for an app pack")
    p.add_argument("--pack", required=True, type=Path)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--record-dir", type=Path, help="write each finished session's trace here")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("ablation", help="TCR and accuracy with primitive categories disabled")
    p.add_argument("--dataset", required=True, type=Path)
    p.add_argument("--traces", required=True, type=Path)
    p.add_argument("--labels", type=Path)
    _add_match_flags(p)
    p.add_argument("--disable-all", action="store_true", help="add a row with every category disabled")
    p.add_argument("--report-json", type=Path)
    p.add_argument("--report-md", type=Path)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_ablation, ablate=None)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except TouchstoneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
