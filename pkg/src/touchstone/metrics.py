"""Task completion rate, accuracy against human labels, and ablation tables."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .baselines import ActionMatchConfig, evaluate_actions
from .dataset import TaskEntry
from .errors import ConfigError, DataError, EmptyInputError, IoFailureError, MissingLabelError
from .matcher import ALL_CATEGORIES, Category, EXACT_CATEGORIES, FUZZY_CATEGORIES, MatchConfig, StateMatcher, Verdict
from .similarity import Embedder
from .trace import Trace, step_count

EVALUATORS = ("essential", "stepwise", "lcs")


@dataclass(frozen=True)
class LabeledOutcome:
    task_id: str
    completed: bool
    human_label: bool | None = None
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class Confusion:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_json(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


@dataclass(frozen=True)
class Report:
    n: int
    tcr: float
    accuracy: float | None
    confusion: Confusion
    breakdowns: dict[str, tuple[float, float | None]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "tcr": self.tcr,
            "accuracy": self.accuracy,
            "confusion": self.confusion.to_json(),
            "breakdowns": {k: {"tcr": t, "accuracy": a} for k, (t, a) in sorted(self.breakdowns.items())},
        }


def _unique(outcomes: Sequence[LabeledOutcome]) -> None:
    ids = [o.task_id for o in outcomes]
    if len(set(ids)) != len(ids):
        raise DataError("task ids in a report must be unique")


def compute_tcr(outcomes: Sequence[LabeledOutcome]) -> float:
    if not outcomes:
        raise EmptyInputError("no outcomes")
    return float(Fraction(sum(o.completed for o in outcomes), len(outcomes)))


def compute_accuracy(outcomes: Sequence[LabeledOutcome]) -> float:
    """Fraction of tasks where the evaluator agrees with the human label."""
    if not outcomes:
        raise EmptyInputError("no outcomes")
    missing = [o.task_id for o in outcomes if o.human_label is None]
    if missing:
        raise MissingLabelError(f"no human label for {missing[:5]}{'...' if len(missing) > 5 else ''}")
    agree = sum(o.completed == o.human_label for o in outcomes)
    return float(Fraction(agree, len(outcomes)))


def confusion(outcomes: Iterable[LabeledOutcome]) -> Confusion:
    tp = fp = tn = fn = 0
    for o in outcomes:
        if o.human_label is None:
            continue
        if o.completed and o.human_label:
            tp += 1
        elif o.completed:
            fp += 1
        elif o.human_label:
            fn += 1
        else:
            tn += 1
    return Confusion(tp, fp, tn, fn)


def build_report(outcomes: Sequence[LabeledOutcome]) -> Report:
    _unique(outcomes)
    labeled = any(o.human_label is not None for o in outcomes)
    acc = compute_accuracy(outcomes) if labeled else None
    groups: dict[str, list[LabeledOutcome]] = {}
    for o in outcomes:
        for tag in o.tags:
            groups.setdefault(tag, []).append(o)
    breakdowns = {
        tag: (compute_tcr(group), compute_accuracy(group) if labeled else None) for tag, group in groups.items()
    }
    return Report(len(outcomes), compute_tcr(outcomes), acc, confusion(outcomes), breakdowns)


# -- labels & tags ---------------------------------------------------------------

def parse_labels(text: str) -> dict[str, bool]:
    labels = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) != 2 or parts[1] not in ("true", "false"):
            raise DataError(f"labels line {lineno}: expected 'task_id<TAB>true|false'")
        if parts[0] in labels:
            raise DataError(f"labels line {lineno}: duplicate task {parts[0]!r}")
        labels[parts[0]] = parts[1] == "true"
    return labels


def read_labels(path) -> dict[str, bool]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc
    return parse_labels(text)


def format_labels(labels: dict[str, bool]) -> str:
    return "".join(f"{k}\t{'true' if v else 'false'}\n" for k, v in sorted(labels.items()))


def step_bucket(steps: int) -> str:
    if steps <= 4:
        return "steps<=4"
    if steps <= 8:
        return "steps5-8"
    return "steps>8"


def task_tags(gt: Trace) -> tuple[str, ...]:
    return (f"source:{gt.task.source_tag.value}", step_bucket(step_count(gt)))


# -- evaluation over a dataset ---------------------------------------------------------

@dataclass(frozen=True)
class TaskResult:
    task_id: str
    completed: bool
    verdict: Verdict | None = None


def evaluate_dataset(
    entries: Sequence[TaskEntry],
    traces: dict[str, Trace],
    evaluator: str = "essential",
    match_cfg: MatchConfig | None = None,
    action_cfg: ActionMatchConfig | None = None,
    jobs: int = 1,
    embedder: Embedder | None = None,
) -> list[TaskResult]:
    """Evaluate every dataset task that has a trace; results sorted by task id."""
    if evaluator not in EVALUATORS:
        raise ConfigError(f"unknown evaluator {evaluator!r}")
    todo = [e for e in sorted(entries, key=lambda e: e.task_id) if e.task_id in traces]
    matcher = StateMatcher(match_cfg, embedder) if evaluator == "essential" else None

    def run(entry: TaskEntry) -> TaskResult:
        trace = traces[entry.task_id]
        if matcher is not None:
            verdict = matcher.evaluate(trace, entry.gt, entry.annotation)
            return TaskResult(entry.task_id, verdict.completed, verdict)
        return TaskResult(entry.task_id, evaluate_actions(evaluator, trace, entry.gt, action_cfg))

    if jobs <= 1:
        return [run(e) for e in todo]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run, todo))


def outcomes_for(results: Sequence[TaskResult], entries: Sequence[TaskEntry],
                 labels: dict[str, bool] | None = None) -> list[LabeledOutcome]:
    by_id = {e.task_id: e for e in entries}
    labels = labels or {}
    return [
        LabeledOutcome(r.task_id, r.completed, labels.get(r.task_id), task_tags(by_id[r.task_id].gt))
        for r in results
    ]


# -- ablation --------------------------------------------------------------------------

_NONE = frozenset()

# (row label, disabled categories): full pipeline, then each family off with one member re-enabled at a time.
ABLATION_ROWS: tuple[tuple[str, frozenset[Category]], ...] = (
    ("complete", _NONE),
    ("w/o exact match", EXACT_CATEGORIES),
    ("+ activity exact match", EXACT_CATEGORIES - {Category.ACTIVITY}),
    ("+ action exact match", EXACT_CATEGORIES - {Category.ACTION}),
    ("+ UI component exact match", EXACT_CATEGORIES - {Category.UI_COMPONENT_EXACT}),
    ("+ system state exact match", EXACT_CATEGORIES - {Category.SYSTEM}),
    ("w/o fuzzy match", FUZZY_CATEGORIES),
    ("+ screen-level fuzzy match", FUZZY_CATEGORIES - {Category.SCREEN_FUZZY}),
    ("+ textbox fuzzy match", FUZZY_CATEGORIES - {Category.TEXTBOX_FUZZY}),
)

DISABLE_ALL_ROW = ("w/o all primitives", ALL_CATEGORIES)


def ablation_run(
    entries: Sequence[TaskEntry],
    traces: dict[str, Trace],
    rows: Sequence[tuple[str, frozenset[Category]]] = ABLATION_ROWS,
    cfg: MatchConfig | None = None,
    labels: dict[str, bool] | None = None,
    embedder: Embedder | None = None,
    jobs: int = 1,
) -> list[tuple[str, Report]]:
    cfg = cfg or MatchConfig()
    out = []
    for label, disabled in rows:
        results = evaluate_dataset(entries, traces, "essential", cfg.with_ablation(disabled), jobs=jobs,
                                   embedder=embedder)
        out.append((label, build_report(outcomes_for(results, entries, labels))))
    return out


def _pct(v: float | None) -> str:
    return "-" if v is None else f"{100 * v:.2f}"


def ablation_markdown(rows: Sequence[tuple[str, Report]]) -> str:
    tags = sorted({t for _, r in rows for t in r.breakdowns if t.startswith("source:")})
    head = "| Evaluation design | TCR | Acc. |" + "".join(f" {t[7:]} TCR | {t[7:]} Acc. |" for t in tags)
    sep = "|---|---:|---:|" + "---:|---:|" * len(tags)
    lines = [head, sep]
    for label, r in rows:
        cells = [label, _pct(r.tcr), _pct(r.accuracy)]
        for t in tags:
            tcr, acc = r.breakdowns.get(t, (None, None))
            cells += [_pct(tcr), _pct(acc)]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def report_markdown(report: Report, title: str = "Evaluation report", task_rows=None) -> str:
    lines = [f"# {title}", "", "| metric | value |", "|---|---:|",
             f"| tasks | {report.n} |", f"| TCR (%) | {_pct(report.tcr)} |",
             f"| accuracy (%) | {_pct(report.accuracy)} |"]
    c = report.confusion
    if c.total:
        lines.append(f"| TP / FP / TN / FN | {c.tp} / {c.fp} / {c.tn} / {c.fn} |")
    if report.breakdowns:
        lines += ["", "| category | TCR (%) | accuracy (%) |", "|---|---:|---:|"]
        for tag, (tcr, acc) in sorted(report.breakdowns.items()):
            lines.append(f"| {tag} | {_pct(tcr)} | {_pct(acc)} |")
    if task_rows:
        lines += ["", "| task | completed | human |", "|---|---|---|"]
        for tid, done, human in task_rows:
            lines.append(f"| {tid} | {'yes' if done else 'no'} | {'-' if human is None else ('yes' if human else 'no')} |")
    return "\n".join(lines) + "\n"
