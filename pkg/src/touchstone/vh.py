"""UIAutomator view hierarchy parsing, component indexing and XPath helpers.

A dump looks like::

    <hierarchy rotation="0">
      <node class="android.widget.FrameLayout" bounds="[0,0][1080,2400]" ...>
        <node class="android.widget.Button" text="OK" bounds="[0,0][100,50]" .../>
      </node>
    </hierarchy>

The tree root is a synthetic node standing for ``<hierarchy>``; every real
``<node>`` element hangs below it.
"""

from __future__ import annotations

import html
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

from .errors import (
    BadAttributeError,
    BadBoundsError,
    BadXPathSyntaxError,
    EmptyHierarchyError,
    IoFailureError,
    NodeNotFoundError,
    NodeNotInTreeError,
    XmlSyntaxError,
)

BOUNDS_RE = re.compile(r"^\[(-?\d+),(-?\d+)\]\[(-?\d+),(-?\d+)\]$")
XPATH_RE = re.compile(r"^/hierarchy((?:/node\[[1-9]\d*\])*)$")
XPATH_STEP_RE = re.compile(r"/node\[(\d+)\]")

BOOLEAN_ATTRS = (
    "checkable",
    "checked",
    "clickable",
    "enabled",
    "focusable",
    "focused",
    "scrollable",
    "long-clickable",
    "password",
    "selected",
)

# Attribute order used when building dumps from scratch.
STANDARD_ATTRS = (
    "index",
    "text",
    "resource-id",
    "class",
    "package",
    "content-desc",
    "checkable",
    "checked",
    "clickable",
    "enabled",
    "focusable",
    "focused",
    "scrollable",
    "long-clickable",
    "password",
    "selected",
    "bounds",
)

# Attributes an exact component match compares; position is deliberately absent.
DEFAULT_COMPARED_ATTRS = ("class", "text", "content-desc", "resource-id", "checked", "selected")

XML_DECLARATION = "<?xml version='1.0' encoding='UTF-8' standalone='yes' ?>"

Bounds = tuple[int, int, int, int]


def parse_bounds(text: str) -> Bounds:
    m = BOUNDS_RE.match(text or "")
    if m is None:
        raise BadBoundsError(f"bounds {text!r} do not match '[l,t][r,b]'")
    left, top, right, bottom = (int(g) for g in m.groups())
    if left > right or top > bottom:
        raise BadBoundsError(f"bounds {text!r} have l>r or t>b")
    return left, top, right, bottom


def format_bounds(bounds: Bounds) -> str:
    left, top, right, bottom = bounds
    return f"[{left},{top}][{right},{bottom}]"


@dataclass(eq=False)
class UiNode:
    """One ``<node>`` element. Identity semantics: two nodes are the same
    node only if they are the same object."""

    attrs: dict[str, str]
    bounds: Bounds
    children: list[UiNode] = field(default_factory=list)
    parent: UiNode | None = field(default=None, repr=False)
    position: int = 0  # 1-based among siblings; 0 for the hierarchy root
    depth: int = 0

    def get(self, name: str, default: str = "") -> str:
        return self.attrs.get(name, default)

    def flag(self, name: str) -> bool:
        return self.attrs.get(name) == "true"

    @property
    def cls(self) -> str:
        return self.get("class")

    @property
    def text(self) -> str:
        return self.get("text")

    @property
    def content_desc(self) -> str:
        return self.get("content-desc")

    @property
    def area(self) -> int:
        left, top, right, bottom = self.bounds
        return (right - left) * (bottom - top)

    def contains_point(self, px: float, py: float) -> bool:
        left, top, right, bottom = self.bounds
        return left <= px <= right and top <= py <= bottom

    def iter(self) -> Iterator[UiNode]:
        """Pre-order walk, self first."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def structure_key(self) -> tuple:
        return (tuple(self.attrs.items()), tuple(c.structure_key() for c in self.children))


@dataclass(eq=False)
class UiTree:
    root: UiNode
    screen_w: int
    screen_h: int

    def __post_init__(self):
        if self.screen_w <= 0 or self.screen_h <= 0:
            raise BadBoundsError("screen dimensions must be positive")

    def __eq__(self, other):
        if not isinstance(other, UiTree):
            return NotImplemented
        return (
            self.screen_w == other.screen_w
            and self.screen_h == other.screen_h
            and self.root.structure_key() == other.root.structure_key()
        )

    __hash__ = None

    @cached_property
    def nodes(self) -> list[UiNode]:
        """All ``<node>`` elements in pre-order (the hierarchy root excluded)."""
        return list(self.root.iter())[1:]

    @cached_property
    def components(self) -> ComponentIndex:
        return ComponentIndex(
            tuple(
                (i, n)
                for i, n in enumerate(n for n in self.nodes if is_functional(n, self.screen_w, self.screen_h))
            )
        )


@dataclass(frozen=True)
class ComponentIndex:
    """Functional components keyed by their 0-based pre-order marker index."""

    entries: tuple[tuple[int, UiNode], ...]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, index) -> bool:
        return isinstance(index, int) and 0 <= index < len(self.entries)

    @property
    def nodes(self) -> list[UiNode]:
        return [n for _, n in self.entries]

    def node(self, index: int) -> UiNode:
        if index not in self:
            raise IndexError(f"no functional component with index {index}")
        return self.entries[index][1]

    def index_of(self, node: UiNode) -> int | None:
        for i, n in self.entries:
            if n is node:
                return i
        return None


# -- parsing ------------------------------------------------------------------

def _build(elem: ET.Element, parent: UiNode, position: int) -> UiNode:
    if elem.tag != "node":
        raise XmlSyntaxError(f"unexpected element <{elem.tag}> inside hierarchy")
    attrs = dict(elem.attrib)
    for name in BOOLEAN_ATTRS:
        if name in attrs and attrs[name] not in ("true", "false"):
            raise BadAttributeError(f"attribute {name}={attrs[name]!r} is not 'true'/'false'")
    if "bounds" not in attrs:
        raise BadBoundsError("node without bounds attribute")
    node = UiNode(attrs, parse_bounds(attrs["bounds"]), parent=parent, position=position, depth=parent.depth + 1)
    node.children = [_build(child, node, i) for i, child in enumerate(elem, start=1)]
    return node


def parse_vh(xml_text: str, screen_size: tuple[int, int] | None = None) -> UiTree:
    """Parse a UIAutomator dump.

    Without ``screen_size`` the screen is taken to be the union of the
    top-level node bounds, which is what a full-screen dump reports.
    """
    try:
        elem = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise XmlSyntaxError(str(exc)) from exc
    if elem.tag != "hierarchy":
        raise XmlSyntaxError(f"root element is <{elem.tag}>, expected <hierarchy>")
    if len(elem) == 0:
        raise EmptyHierarchyError("hierarchy has no nodes")
    root = UiNode(dict(elem.attrib), (0, 0, 0, 0))
    root.children = [_build(child, root, i) for i, child in enumerate(elem, start=1)]
    if screen_size is None:
        w = max(c.bounds[2] for c in root.children)
        h = max(c.bounds[3] for c in root.children)
    else:
        w, h = screen_size
    root.bounds = (0, 0, w, h)
    return UiTree(root, w, h)


def _to_element(node: UiNode) -> ET.Element:
    elem = ET.Element("node", node.attrs)
    elem.extend(_to_element(c) for c in node.children)
    return elem


def serialize_vh(tree: UiTree) -> str:
    top = ET.Element("hierarchy", tree.root.attrs)
    top.extend(_to_element(c) for c in tree.root.children)
    return XML_DECLARATION + ET.tostring(top, encoding="unicode")


def load_vh(path) -> UiTree:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc
    return parse_vh(text)


# -- functional components ------------------------------------------------------

def is_visible(node: UiNode, screen_w: int, screen_h: int) -> bool:
    left, top, right, bottom = node.bounds
    if node.area <= 0:
        return False
    return min(right, screen_w) > max(left, 0) and min(bottom, screen_h) > max(top, 0)


def is_functional(node: UiNode, screen_w: int, screen_h: int) -> bool:
    if not is_visible(node, screen_w, screen_h):
        return False
    return (
        node.flag("clickable")
        or node.flag("checkable")
        or node.flag("long-clickable")
        or node.flag("scrollable")
        or "EditText" in node.cls
        or node.text != ""
        or node.content_desc != ""
    )


def functional_components(tree: UiTree) -> ComponentIndex:
    return tree.components


def find_equal_node(target: UiNode, tree: UiTree, compared_attrs=DEFAULT_COMPARED_ATTRS) -> UiNode | None:
    """First node of ``tree`` in pre-order whose compared attributes equal the target's."""
    want = [target.get(a) for a in compared_attrs]
    for node in tree.nodes:
        if [node.get(a) for a in compared_attrs] == want:
            return node
    return None


# -- xpath ----------------------------------------------------------------------

def xpath_of(tree: UiTree, node: UiNode) -> str:
    steps = []
    cur = node
    while cur is not None and cur is not tree.root:
        steps.append(cur.position)
        cur = cur.parent
    if cur is not tree.root:
        raise NodeNotInTreeError("node does not belong to this tree")
    return "/hierarchy" + "".join(f"/node[{p}]" for p in reversed(steps))


def resolve_xpath(tree: UiTree, xpath: str) -> UiNode:
    m = XPATH_RE.match(xpath or "")
    if m is None:
        raise BadXPathSyntaxError(f"not a canonical positional xpath: {xpath!r}")
    node = tree.root
    for pos in (int(p) for p in XPATH_STEP_RE.findall(m.group(1))):
        if pos > len(node.children):
            raise NodeNotFoundError(f"{xpath} does not address a node")
        node = node.children[pos - 1]
    return node


def node_at_point(tree: UiTree, x: float, y: float) -> UiNode | None:
    """Deepest functional component containing the normalized point."""
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"coordinates ({x}, {y}) outside [0,1]")
    return node_at_pixel(tree, x * tree.screen_w, y * tree.screen_h)


def node_at_pixel(tree: UiTree, px: float, py: float) -> UiNode | None:
    # ties: deeper wins, then later in pre-order
    best = None
    for i, node in tree.components:
        if node.contains_point(px, py):
            key = (node.depth, i)
            if best is None or key > best[0]:
                best = (key, node)
    return None if best is None else best[1]


# -- simplification -------------------------------------------------------------

def _esc(text: str, quote: bool = True) -> str:
    # keep one component per output line
    return html.escape(text, quote=quote).replace("\r", "&#13;").replace("\n", "&#10;")


def _label(node: UiNode) -> str:
    return node.text if node.text != "" else node.content_desc


def simplify_node(index: int, node: UiNode) -> str:
    cls = node.cls
    if "Button" in cls:
        return f"<button id={index}>{_esc(_label(node), quote=False)}</button>"
    if "EditText" in cls:
        return f'<input id={index} value="{_esc(_label(node))}">'
    if "CheckBox" in cls or "Switch" in cls:
        return f"<checkbox id={index} checked={node.get('checked', 'false')}>"
    if "Image" in cls:
        return f'<img id={index} alt="{_esc(node.content_desc)}">'
    return f"<p id={index}>{_esc(_label(node), quote=False)}</p>"


def simplify_to_html(tree: UiTree) -> str:
    return "\n".join(simplify_node(i, n) for i, n in tree.components)
