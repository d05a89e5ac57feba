"""Essential-state annotations: parsing, printing, linting and overlay reports.

File format (UTF-8, one file per task)::

    task_id: bestbuy_empty_cart
    keystate @2:
      activity
      exact<13>

Keyword lines are indented by two spaces. Blank lines and lines starting
with ``#`` are ignored.
"""

from __future__ import annotations

import base64
import html
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import (
    AnnotationError,
    AnnotationSyntaxError,
    DuplicateKeyStateError,
    IoFailureError,
    NonMonotoneStepsError,
    UnknownKeywordError,
)
from .trace import ActionKind, Trace
from .vh import DEFAULT_COMPARED_ATTRS, find_equal_node, xpath_of


class Keyword(str, Enum):
    FUZZY_SCREEN = "fuzzy_screen"
    FUZZY_TEXTBOX = "fuzzy_textbox"
    ACTIVITY = "activity"
    EXACT = "exact"
    EXCLUDE = "exclude"
    INSTALLED = "installed"
    UNINSTALLED = "uninstalled"
    CLICK = "click"
    TYPE = "type"


INDEXED = frozenset({Keyword.EXACT, Keyword.EXCLUDE, Keyword.FUZZY_TEXTBOX, Keyword.CLICK})
SYSTEM = frozenset({Keyword.INSTALLED, Keyword.UNINSTALLED})
SCREEN_GATES = frozenset({Keyword.ACTIVITY, Keyword.FUZZY_SCREEN})


@dataclass(frozen=True)
class Primitive:
    keyword: Keyword
    component_index: int | None = None
    app_id: str | None = None
    input_text: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "keyword", Keyword(self.keyword))
        kw = self.keyword
        if (self.component_index is not None) != (kw in INDEXED):
            raise AnnotationError(f"{kw.value}: component_index must be given iff keyword takes one")
        if self.component_index is not None and self.component_index < 0:
            raise AnnotationError(f"{kw.value}: component_index must be nonnegative")
        if (self.app_id is not None) != (kw in SYSTEM):
            raise AnnotationError(f"{kw.value}: app_id must be given iff keyword is (un)installed")
        if (self.input_text is not None) != (kw is Keyword.TYPE):
            raise AnnotationError(f"{kw.value}: input_text must be given iff keyword is type")
        for value in (self.app_id, self.input_text):
            if value and value.splitlines() != [value]:
                raise AnnotationError(f"{kw.value}: argument must fit on one line")

    @property
    def is_system(self) -> bool:
        return self.keyword in SYSTEM

    def __str__(self) -> str:
        kw = self.keyword
        if kw is Keyword.FUZZY_SCREEN:
            return "fuzzy<-1>"
        if kw is Keyword.FUZZY_TEXTBOX:
            return f"fuzzy<{self.component_index}>"
        if kw is Keyword.ACTIVITY:
            return "activity"
        if kw in INDEXED:
            return f"{kw.value}<{self.component_index}>"
        if kw in SYSTEM:
            return f"{kw.value}<{self.app_id}>"
        return f"type<{self.input_text}>"


@dataclass(frozen=True)
class KeyState:
    gt_step: int
    primitives: tuple[Primitive, ...]

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))
        if not self.primitives:
            raise AnnotationError(f"keystate @{self.gt_step} has no primitives")
        if self.gt_step < 0:
            raise AnnotationError("gt_step must be nonnegative")


@dataclass(frozen=True)
class Annotation:
    task_id: str
    keystates: tuple[KeyState, ...]

    def __post_init__(self):
        if not self.task_id or self.task_id != self.task_id.strip() or self.task_id.splitlines() != [self.task_id]:
            raise AnnotationError(f"bad task_id {self.task_id!r}")
        object.__setattr__(self, "keystates", tuple(self.keystates))
        steps = [k.gt_step for k in self.keystates]
        if len(set(steps)) != len(steps):
            raise DuplicateKeyStateError("two keystates share a gt_step")
        if steps != sorted(steps):
            raise NonMonotoneStepsError("keystate gt_steps must increase")

    @property
    def primitives(self) -> list[Primitive]:
        return [p for k in self.keystates for p in k.primitives]


# -- parsing -------------------------------------------------------------------

_TASK_RE = re.compile(r"^task_id:[ \t]*(\S.*?)[ \t]*$")
_KEYSTATE_RE = re.compile(r"^keystate[ \t]+@(\d+):[ \t]*$")
_BRACKET_RE = re.compile(r"^([a-z_]+)<(.*)>$")
_INT_RE = re.compile(r"^(0|[1-9]\d*)$")


def parse_primitive(text: str, line: int | None = None, column: int | None = None) -> Primitive:
    if text == "activity":
        return Primitive(Keyword.ACTIVITY)
    m = _BRACKET_RE.match(text)
    if m is None:
        word = re.match(r"[A-Za-z_]*", text).group(0)
        if word and word not in ("fuzzy", "exact", "exclude", "installed", "uninstalled", "click", "type"):
            raise UnknownKeywordError(f"unknown keyword {word!r}", line, column)
        raise AnnotationSyntaxError(f"malformed keyword line {text!r}", line, column)
    word, arg = m.groups()
    arg_col = None if column is None else column + len(word) + 1
    if word == "fuzzy":
        if arg == "-1":
            return Primitive(Keyword.FUZZY_SCREEN)
        if _INT_RE.match(arg):
            return Primitive(Keyword.FUZZY_TEXTBOX, component_index=int(arg))
        raise AnnotationSyntaxError(f"fuzzy<> takes -1 or a component index, got {arg!r}", line, arg_col)
    if word in ("exact", "exclude", "click"):
        if not _INT_RE.match(arg):
            raise AnnotationSyntaxError(f"{word}<> takes a component index, got {arg!r}", line, arg_col)
        return Primitive(Keyword(word), component_index=int(arg))
    if word in ("installed", "uninstalled"):
        if not arg.strip() or arg != arg.strip():
            raise AnnotationSyntaxError(f"{word}<> takes a package id, got {arg!r}", line, arg_col)
        return Primitive(Keyword(word), app_id=arg)
    if word == "type":
        return Primitive(Keyword.TYPE, input_text=arg)
    raise UnknownKeywordError(f"unknown keyword {word!r}", line, column)


def parse_annotation(text: str) -> Annotation:
    task_id = None
    blocks: list[tuple[int, int, list[Primitive]]] = []  # (gt_step, line, primitives)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line or line.lstrip().startswith("#"):
            continue
        if task_id is None:
            m = _TASK_RE.match(line)
            if m is None:
                raise AnnotationSyntaxError("expected 'task_id: <string>'", lineno, 1)
            task_id = m.group(1)
            continue
        if line.startswith("  "):
            body = line[2:]
            if body.startswith((" ", "\t")):
                raise AnnotationSyntaxError("keyword lines are indented by exactly two spaces", lineno, 3)
            if not blocks:
                raise AnnotationSyntaxError("keyword line outside a keystate block", lineno, 3)
            blocks[-1][2].append(parse_primitive(body, lineno, 3))
            continue
        m = _KEYSTATE_RE.match(line)
        if m is None:
            raise AnnotationSyntaxError(f"expected 'keystate @<int>:', got {line!r}", lineno, 1)
        step = int(m.group(1))
        if blocks:
            if any(s == step for s, _, _ in blocks):
                raise DuplicateKeyStateError(f"keystate @{step} repeated", lineno, 1)
            if step < blocks[-1][0]:
                raise NonMonotoneStepsError(f"keystate @{step} after @{blocks[-1][0]}", lineno, 1)
            if not blocks[-1][2]:
                raise AnnotationSyntaxError(f"keystate @{blocks[-1][0]} has no primitives", blocks[-1][1], 1)
        blocks.append((step, lineno, []))
    if task_id is None:
        raise AnnotationSyntaxError("empty annotation", 1, 1)
    if blocks and not blocks[-1][2]:
        raise AnnotationSyntaxError(f"keystate @{blocks[-1][0]} has no primitives", blocks[-1][1], 1)
    return Annotation(task_id, tuple(KeyState(step, tuple(prims)) for step, _, prims in blocks))


def format_annotation(ann: Annotation) -> str:
    lines = [f"task_id: {ann.task_id}"]
    for ks in ann.keystates:
        lines.append(f"keystate @{ks.gt_step}:")
        lines.extend(f"  {p}" for p in ks.primitives)
    return "\n".join(lines) + "\n"


def load_annotation(path) -> Annotation:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc
    return parse_annotation(text)


# -- linting -------------------------------------------------------------------

@dataclass(frozen=True)
class Issue:
    gt_step: int | None
    message: str
    primitive: str | None = None

    def __str__(self) -> str:
        where = "" if self.gt_step is None else f"@{self.gt_step} "
        what = "" if self.primitive is None else f"{self.primitive}: "
        return f"{where}{what}{self.message}"


def lint_annotation(ann: Annotation, gt: Trace, compared_attrs=None) -> list[Issue]:
    """Check an annotation against the ground-truth trace it was written on.

    Besides range checks this verifies that every ``click<n>`` target is the
    first node on its screen carrying its compared attributes, otherwise
    the click could never match the annotated component.
    """
    compared_attrs = tuple(compared_attrs or DEFAULT_COMPARED_ATTRS)
    issues = []
    if ann.task_id != gt.task.task_id:
        issues.append(Issue(None, f"task_id {ann.task_id!r} does not match trace task {gt.task.task_id!r}"))
    if not ann.keystates:
        issues.append(Issue(None, "annotation has no keystates"))
    for ks in ann.keystates:
        if ks.gt_step >= len(gt.observations):
            issues.append(Issue(ks.gt_step, f"gt_step beyond trace length {len(gt.observations)}"))
            continue
        obs = gt.observations[ks.gt_step]
        comps = obs.ui_tree.components
        for prim in ks.primitives:
            label = str(prim)
            if prim.is_system:
                if not prim.app_id or not prim.app_id.strip():
                    issues.append(Issue(ks.gt_step, "empty app id", label))
                if gt.final_packages is None:
                    issues.append(Issue(ks.gt_step, "ground-truth trace has no final packages snapshot", label))
                continue
            if prim.component_index is None:
                continue
            if prim.component_index not in comps:
                issues.append(Issue(ks.gt_step, f"component index out of range (screen has {len(comps)})", label))
                continue
            node = comps.node(prim.component_index)
            if prim.keyword is Keyword.FUZZY_TEXTBOX and not node.text:
                issues.append(Issue(ks.gt_step, "fuzzy textbox component has no text", label))
            if prim.keyword is Keyword.CLICK:
                action = obs.action
                if action.kind is not ActionKind.CLICK:
                    issues.append(Issue(ks.gt_step, f"ground-truth action is {action.kind.value}, not click", label))
                elif find_equal_node(node, obs.ui_tree, compared_attrs) is not node:
                    issues.append(Issue(ks.gt_step, "an earlier node has identical compared attributes", label))
    return issues


# -- overlay report ------------------------------------------------------------

OVERLAY_WIDTH = 360

_OVERLAY_CSS = """
body { font-family: sans-serif; margin: 1em; }
section { display: inline-block; vertical-align: top; margin: 0 1.5em 2em 0; }
.screen { position: relative; border: 1px solid #888; }
.screen img { display: block; }
.box { position: absolute; box-sizing: border-box; border: 1px solid #d22; }
.box span { position: absolute; left: 0; top: 0; background: #d22; color: #fff; font-size: 10px; padding: 0 2px; }
.box.annotated { border: 3px solid #1a1; }
.box.annotated span { background: #1a1; }
.meta { font-size: 12px; max-width: 360px; word-break: break-all; }
"""


def overlay_boxes(obs, width: int = OVERLAY_WIDTH) -> list[tuple[int, tuple[float, float, float, float]]]:
    """(index, (left, top, width, height)) of every component, scaled to display width."""
    tree = obs.ui_tree
    scale = width / tree.screen_w
    boxes = []
    for i, node in tree.components:
        left, top, right, bottom = node.bounds
        boxes.append((i, (left * scale, top * scale, (right - left) * scale, (bottom - top) * scale)))
    return boxes


def render_overlay(gt: Trace, ann: Annotation | None = None, width: int = OVERLAY_WIDTH) -> str:
    """Self-contained HTML page marking every functional component with its index."""
    marked: dict[int, set[int]] = {}
    prims_at: dict[int, list[str]] = {}
    if ann is not None:
        for ks in ann.keystates:
            prims_at[ks.gt_step] = [str(p) for p in ks.primitives]
            marked[ks.gt_step] = {p.component_index for p in ks.primitives if p.component_index is not None}
    esc = html.escape
    parts = [
        "<!DOCTYPE html>",
        '<html><head><meta charset="utf-8">',
        f"<title>{esc(gt.task.task_id)}</title>",
        f"<style>{_OVERLAY_CSS}</style></head><body>",
        f"<h1>{esc(gt.task.task_id)}</h1>",
        f"<p>{esc(gt.task.instruction)}</p>",
    ]
    for obs in gt.observations:
        tree = obs.ui_tree
        height = tree.screen_h * width / tree.screen_w
        data = base64.b64encode(obs.screenshot).decode("ascii")
        parts.append(f'<section id="step-{obs.step_index}">')
        parts.append(f"<h2>step {obs.step_index}</h2>")
        parts.append(f'<div class="screen" style="width:{width}px;height:{height:.2f}px">')
        parts.append(f'<img src="data:image/png;base64,{data}" width="{width}" height="{height:.2f}" alt="">')
        for i, (left, top, w, h) in overlay_boxes(obs, width):
            cls = "box annotated" if i in marked.get(obs.step_index, ()) else "box"
            node = tree.components.node(i)
            title = esc(f"{node.cls} {node.text or node.content_desc} {xpath_of(tree, node)}")
            parts.append(
                f'<div class="{cls}" data-index="{i}" title="{title}" '
                f'style="left:{left:.2f}px;top:{top:.2f}px;width:{w:.2f}px;height:{h:.2f}px"><span>{i}</span></div>'
            )
        parts.append("</div>")
        parts.append(f'<div class="meta">activity: {esc(obs.activity)}<br>action: '
                     f"{esc(str(obs.action.to_json()))}")
        if obs.step_index in prims_at:
            parts.append("<br>keystate: " + esc(", ".join(prims_at[obs.step_index])))
        parts.append("</div></section>")
    parts.append("</body></html>")
    return "\n".join(parts) + "\n"


def write_overlay(gt: Trace, path, ann: Annotation | None = None) -> None:
    try:
        Path(path).write_text(render_overlay(gt, ann), encoding="utf-8")
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc
