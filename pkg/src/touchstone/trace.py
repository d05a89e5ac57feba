"""Tasks, actions, observations and traces, plus their on-disk layout.

Trace directory layout::

    <trace>/task.json
    <trace>/steps/0000/screenshot.png
    <trace>/steps/0000/vh.xml
    <trace>/steps/0000/activity.txt
    <trace>/steps/0000/action.json
    <trace>/steps/0000/packages.txt      (optional)

The action stored at step i is the action executed from screen i.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import (
    GapInStepsError,
    IoFailureError,
    MalformedActionError,
    MissingFileError,
    TraceFormatError,
    VhError,
)
from .vh import UiTree, parse_vh, serialize_vh

STEP_DIR_RE = re.compile(r"^\d{4}$")


class SourceTag(str, Enum):
    AITW = "aitw"
    GENERATED = "generated"
    SYNTHETIC = "synthetic"


class ActionKind(str, Enum):
    CLICK = "click"
    SWIPE = "swipe"
    TYPE = "type"
    PRESS_HOME = "press_home"
    PRESS_BACK = "press_back"
    STATUS_COMPLETE = "status_complete"
    STATUS_IMPOSSIBLE = "status_impossible"


STATUS_KINDS = frozenset({ActionKind.STATUS_COMPLETE, ActionKind.STATUS_IMPOSSIBLE})

_PARAMS = {
    ActionKind.CLICK: ("x", "y", "xpath"),
    ActionKind.SWIPE: ("touch_x", "touch_y", "lift_x", "lift_y", "duration_ms"),
    ActionKind.TYPE: ("text",),
}
_OPTIONAL = {"xpath"}
_COORDS = ("x", "y", "touch_x", "touch_y", "lift_x", "lift_y")
_ALL_PARAMS = _COORDS + ("duration_ms", "text", "xpath")


@dataclass(frozen=True)
class TaskRecord:
    task_id: str
    instruction: str
    source_tag: SourceTag = SourceTag.SYNTHETIC

    def __post_init__(self):
        if not self.task_id:
            raise TraceFormatError("task_id must be nonempty")
        if not self.instruction:
            raise TraceFormatError("instruction must be nonempty")
        try:
            object.__setattr__(self, "source_tag", SourceTag(self.source_tag))
        except ValueError:
            raise TraceFormatError(f"unknown source_tag {self.source_tag!r}") from None

    def to_json(self) -> dict:
        return {"task_id": self.task_id, "instruction": self.instruction, "source_tag": self.source_tag.value}

    @classmethod
    def from_json(cls, data: dict) -> TaskRecord:
        try:
            return cls(data["task_id"], data["instruction"], data.get("source_tag", "synthetic"))
        except (KeyError, TypeError) as exc:
            raise TraceFormatError(f"bad task record: {exc}") from None


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    x: float | None = None
    y: float | None = None
    touch_x: float | None = None
    touch_y: float | None = None
    lift_x: float | None = None
    lift_y: float | None = None
    duration_ms: int | None = None
    text: str | None = None
    xpath: str | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", ActionKind(self.kind))
        except ValueError:
            raise MalformedActionError(f"unknown action kind {self.kind!r}") from None
        allowed = _PARAMS.get(self.kind, ())
        for name in _ALL_PARAMS:
            value = getattr(self, name)
            if name not in allowed:
                if value is not None:
                    raise MalformedActionError(f"{self.kind.value} action does not take {name!r}")
                continue
            if value is None:
                if name not in _OPTIONAL:
                    raise MalformedActionError(f"{self.kind.value} action requires {name!r}")
                continue
            if name in _COORDS:
                if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                    raise MalformedActionError(f"{name} must be a number")
                if not 0.0 <= value <= 1.0:
                    raise MalformedActionError(f"{name}={value} outside [0,1]")
                object.__setattr__(self, name, float(value))
            elif name == "duration_ms":
                if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                    raise MalformedActionError("duration_ms must be a positive integer")
            elif not isinstance(value, str):
                raise MalformedActionError(f"{name} must be a string")

    @classmethod
    def click(cls, x: float, y: float, xpath: str | None = None) -> Action:
        return cls(ActionKind.CLICK, x=x, y=y, xpath=xpath)

    @classmethod
    def swipe(cls, touch_x, touch_y, lift_x, lift_y, duration_ms: int = 300) -> Action:
        return cls(ActionKind.SWIPE, touch_x=touch_x, touch_y=touch_y, lift_x=lift_x, lift_y=lift_y,
                   duration_ms=duration_ms)

    @classmethod
    def type_text(cls, text: str) -> Action:
        return cls(ActionKind.TYPE, text=text)

    @classmethod
    def of(cls, kind: ActionKind | str) -> Action:
        return cls(ActionKind(kind))

    @property
    def is_status(self) -> bool:
        return self.kind in STATUS_KINDS

    def to_json(self) -> dict:
        out = {"kind": self.kind.value}
        for name in _ALL_PARAMS:
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    @classmethod
    def from_json(cls, data) -> Action:
        if not isinstance(data, dict) or "kind" not in data:
            raise MalformedActionError("action record must be an object with a 'kind'")
        unknown = set(data) - {"kind", *_ALL_PARAMS}
        if unknown:
            raise MalformedActionError(f"unknown action fields {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class Observation:
    step_index: int
    ui_tree: UiTree
    activity: str
    action: Action
    screenshot: bytes = field(default=b"", repr=False)
    packages: frozenset[str] | None = None
    screenshot_ref: Path | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.step_index < 0:
            raise TraceFormatError("step_index must be nonnegative")
        if not self.activity:
            raise TraceFormatError(f"step {self.step_index}: activity must be nonempty")
        if self.packages is not None and not isinstance(self.packages, frozenset):
            object.__setattr__(self, "packages", frozenset(self.packages))

    @property
    def screenshot_hash(self) -> str:
        return hashlib.sha256(self.screenshot).hexdigest()


@dataclass(frozen=True)
class Trace:
    task: TaskRecord
    observations: tuple[Observation, ...]

    def __post_init__(self):
        object.__setattr__(self, "observations", tuple(self.observations))
        if not self.observations:
            raise TraceFormatError("a trace needs at least one observation")
        for i, obs in enumerate(self.observations):
            if obs.step_index != i:
                raise GapInStepsError(f"observation {i} has step_index {obs.step_index}")

    @property
    def final_packages(self) -> frozenset[str] | None:
        """Installed packages at the end of the run, if they were recorded."""
        return self.observations[-1].packages

    @property
    def actions(self) -> list[Action]:
        return [obs.action for obs in self.observations]

    def __len__(self):
        return len(self.observations)


def step_count(trace: Trace) -> int:
    """Number of non-status actions."""
    return sum(1 for a in trace.actions if not a.is_status)


# -- persistence -----------------------------------------------------------------

def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise MissingFileError(f"missing {path}") from None


def load_trace(directory) -> Trace:
    root = Path(directory)
    try:
        task = TaskRecord.from_json(json.loads(_read_text(root / "task.json")))
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"{root / 'task.json'}: {exc}") from None
    steps_dir = root / "steps"
    if not steps_dir.is_dir():
        raise MissingFileError(f"missing {steps_dir}")
    names = sorted(p.name for p in steps_dir.iterdir() if p.is_dir())
    bad = [n for n in names if not STEP_DIR_RE.match(n)]
    if bad:
        raise TraceFormatError(f"unexpected step directories {bad}")
    if not names:
        raise MissingFileError(f"{steps_dir} has no steps")
    indices = [int(n) for n in names]
    if indices != list(range(len(indices))):
        raise GapInStepsError(f"step indices {indices} are not contiguous from 0")

    observations = []
    for i, name in enumerate(names):
        step = steps_dir / name
        shot = step / "screenshot.png"
        try:
            screenshot = shot.read_bytes()
        except FileNotFoundError:
            raise MissingFileError(f"missing {shot}") from None
        try:
            tree = parse_vh(_read_text(step / "vh.xml"))
        except VhError as exc:
            raise type(exc)(f"{step / 'vh.xml'}: {exc}") from None
        activity = _read_text(step / "activity.txt").rstrip("\r\n")
        try:
            action = Action.from_json(json.loads(_read_text(step / "action.json")))
        except json.JSONDecodeError as exc:
            raise MalformedActionError(f"{step / 'action.json'}: {exc}") from None
        except MalformedActionError as exc:
            raise MalformedActionError(f"{step / 'action.json'}: {exc}") from None
        packages = None
        pkg_file = step / "packages.txt"
        if pkg_file.exists():
            packages = frozenset(line.strip() for line in _read_text(pkg_file).splitlines() if line.strip())
        observations.append(
            Observation(i, tree, activity, action, screenshot, packages, screenshot_ref=shot)
        )
    return Trace(task, tuple(observations))


def save_trace(trace: Trace, directory) -> None:
    root = Path(directory)
    try:
        if root.exists():
            if not root.is_dir() or any(root.iterdir()):
                raise IoFailureError(f"{root} exists and is not an empty directory")
        root.mkdir(parents=True, exist_ok=True)
        (root / "task.json").write_text(json.dumps(trace.task.to_json(), indent=2, ensure_ascii=False) + "\n",
                                        encoding="utf-8")
        for obs in trace.observations:
            step = root / "steps" / f"{obs.step_index:04d}"
            step.mkdir(parents=True)
            (step / "screenshot.png").write_bytes(obs.screenshot)
            (step / "vh.xml").write_text(serialize_vh(obs.ui_tree), encoding="utf-8")
            (step / "activity.txt").write_text(obs.activity + "\n", encoding="utf-8")
            (step / "action.json").write_text(json.dumps(obs.action.to_json(), ensure_ascii=False) + "\n",
                                              encoding="utf-8")
            if obs.packages is not None:
                (step / "packages.txt").write_text("".join(p + "\n" for p in sorted(obs.packages)),
                                                   encoding="utf-8")
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc
