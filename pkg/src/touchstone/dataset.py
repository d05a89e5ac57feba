"""Dataset of annotated ground-truth traces and lookup of agent traces.

    <dataset>/<task_id>/gt/             ground-truth trace
    <dataset>/<task_id>/annotation.txt  essential states

Directories without an ``annotation.txt`` are skipped, so packs, scripts and
runs can live next to the tasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .annotation import Annotation, Issue, lint_annotation, load_annotation
from .errors import DataError, DatasetTraceMismatchError, MissingFileError
from .trace import Trace, load_trace

ANNOTATION_FILE = "annotation.txt"


@dataclass(frozen=True)
class TaskEntry:
    task_id: str
    gt: Trace
    annotation: Annotation
    path: Path


def load_task(directory) -> TaskEntry:
    root = Path(directory)
    ann = load_annotation(root / ANNOTATION_FILE)
    gt = load_trace(root / "gt")
    return TaskEntry(gt.task.task_id, gt, ann, root)


def load_dataset(directory) -> list[TaskEntry]:
    root = Path(directory)
    if not root.is_dir():
        raise MissingFileError(f"dataset directory {root} not found")
    entries = [load_task(d) for d in sorted(root.iterdir()) if (d / ANNOTATION_FILE).is_file()]
    seen = set()
    for e in entries:
        if e.task_id in seen:
            raise DataError(f"duplicate task_id {e.task_id}")
        seen.add(e.task_id)
    return entries


def validate_dataset(entries: list[TaskEntry]) -> list[tuple[str, Issue]]:
    issues = []
    for e in entries:
        if e.path.name != e.task_id:
            issues.append((e.task_id, Issue(None, f"directory name {e.path.name!r} differs from task_id")))
        issues.extend((e.task_id, i) for i in lint_annotation(e.annotation, e.gt))
    return issues


def find_trace_dir(traces_root, task_id: str) -> Path | None:
    """``<root>/<task_id>/`` holding a trace, or a ground-truth ``gt/`` inside it."""
    base = Path(traces_root) / task_id
    for cand in (base, base / "gt"):
        if (cand / "task.json").is_file():
            return cand
    return None


def load_traces(traces_root, entries: list[TaskEntry]) -> dict[str, Trace]:
    """Agent traces for the dataset tasks that have one.

    Every trace directory under ``traces_root`` must belong to a dataset task.
    """
    root = Path(traces_root)
    if not root.is_dir():
        raise MissingFileError(f"traces directory {root} not found")
    known = {e.task_id for e in entries}
    out: dict[str, Trace] = {}
    for d in sorted(root.iterdir()):
        trace_dir = find_trace_dir(root, d.name) if d.is_dir() else None
        if trace_dir is None:
            continue
        trace = load_trace(trace_dir)
        if trace.task.task_id != d.name:
            raise DatasetTraceMismatchError(f"{trace_dir} holds task {trace.task.task_id!r}")
        if d.name not in known:
            raise DatasetTraceMismatchError(f"trace for unknown task {d.name!r}")
        out[d.name] = trace
    if not out:
        raise DatasetTraceMismatchError(f"no traces for dataset tasks under {root}")
    return out
