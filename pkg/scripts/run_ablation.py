"""Ablation table and threshold sweep over the shipped agent runs.

    python3 scripts/run_ablation.py [--fixtures fixtures] [--out results]

Writes ablation.md / ablation.json (one row per disabled-category design)
and theta_sweep.md (TCR and accuracy as both thresholds move together).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from touchstone.dataset import load_dataset, load_traces
from touchstone.matcher import MatchConfig
from touchstone.metrics import (
    DISABLE_ALL_ROW,
    ABLATION_ROWS,
    ablation_markdown,
    ablation_run,
    build_report,
    evaluate_dataset,
    outcomes_for,
    read_labels,
)
from touchstone.similarity import SimilarityConfig

THETAS = (0.5, 0.7, 0.85, 0.95)


def main(argv=None) -> int:
    root = Path(__file__).resolve().parent.parent
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixtures", type=Path, default=root / "fixtures")
    ap.add_argument("--traces", type=Path, help="agent traces (default <fixtures>/runs/agent)")
    ap.add_argument("--labels", type=Path, help="human labels (default <fixtures>/labels/agent.tsv)")
    ap.add_argument("--out", type=Path, default=root / "results")
    args = ap.parse_args(argv)

    entries = load_dataset(args.fixtures)
    traces = load_traces(args.traces or args.fixtures / "runs" / "agent", entries)
    labels = read_labels(args.labels or args.fixtures / "labels" / "agent.tsv")
    args.out.mkdir(parents=True, exist_ok=True)

    table = ablation_run(entries, traces, list(ABLATION_ROWS) + [DISABLE_ALL_ROW], labels=labels)
    md = ablation_markdown(table)
    (args.out / "ablation.md").write_text(md)
    (args.out / "ablation.json").write_text(
        json.dumps([{"design": label, **r.to_json()} for label, r in table], indent=2, sort_keys=True) + "\n")
    print(md)

    lines = ["| theta | TCR | Acc. |", "|---:|---:|---:|"]
    for theta in THETAS:
        cfg = MatchConfig(similarity=SimilarityConfig(theta_screen=theta, theta_textbox=theta))
        results = evaluate_dataset(entries, traces, "essential", cfg)
        r = build_report(outcomes_for(results, entries, labels))
        lines.append(f"| {theta} | {100 * r.tcr:.2f} | {100 * r.accuracy:.2f} |")
    sweep = "\n".join(lines) + "\n"
    (args.out / "theta_sweep.md").write_text(sweep)
    print(sweep)
    return 0


if __name__ == "__main__":
    sys.exit(main())
