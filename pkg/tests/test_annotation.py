import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES, make_trace, node, obs, vh
from touchstone.annotation import (
    Annotation,
    KeyState,
    Keyword,
    Primitive,
    format_annotation,
    lint_annotation,
    overlay_boxes,
    parse_annotation,
    parse_primitive,
    render_overlay,
    write_overlay,
)
from touchstone.errors import (
    AnnotationError,
    AnnotationSyntaxError,
    DuplicateKeyStateError,
    IoFailureError,
    NonMonotoneStepsError,
    UnknownKeywordError,
)
from touchstone.trace import Action


def test_parse_example():
    ann = parse_annotation("task_id: bestbuy_empty_cart\nkeystate @2:\n  activity\n  exact<13>\n")
    assert ann.task_id == "bestbuy_empty_cart"
    assert ann.keystates == (KeyState(2, (Primitive(Keyword.ACTIVITY), Primitive(Keyword.EXACT, 13))),)


@pytest.mark.parametrize("text, kw, field, value", [
    ("fuzzy<-1>", Keyword.FUZZY_SCREEN, None, None),
    ("fuzzy<4>", Keyword.FUZZY_TEXTBOX, "component_index", 4),
    ("exclude<0>", Keyword.EXCLUDE, "component_index", 0),
    ("click<12>", Keyword.CLICK, "component_index", 12),
    ("installed<com.a.b>", Keyword.INSTALLED, "app_id", "com.a.b"),
    ("uninstalled<com.a.b>", Keyword.UNINSTALLED, "app_id", "com.a.b"),
    ("type<hello world>", Keyword.TYPE, "input_text", "hello world"),
    ("type<>", Keyword.TYPE, "input_text", ""),
    ("type<a>b>", Keyword.TYPE, "input_text", "a>b"),
])
def test_parse_each_keyword(text, kw, field, value):
    p = parse_primitive(text)
    assert p.keyword is kw
    if field:
        assert getattr(p, field) == value
    assert str(p) == text


def test_comments_and_blank_lines():
    ann = parse_annotation("# header\n\ntask_id: t\n\nkeystate @0:\n  # note\n  activity\n")
    assert len(ann.primitives) == 1


@pytest.mark.parametrize("text, err, line", [
    ("", AnnotationSyntaxError, 1),
    ("task: t\n", AnnotationSyntaxError, 1),
    ("task_id: t\n  activity\n", AnnotationSyntaxError, 2),
    ("task_id: t\nkeystate @0:\n  jump<3>\n", UnknownKeywordError, 3),
    ("task_id: t\nkeystate @0:\n  hover\n", UnknownKeywordError, 3),
    ("task_id: t\nkeystate @0:\n  exact<x>\n", AnnotationSyntaxError, 3),
    ("task_id: t\nkeystate @0:\n  exact<-1>\n", AnnotationSyntaxError, 3),
    ("task_id: t\nkeystate @0:\n  fuzzy<-2>\n", AnnotationSyntaxError, 3),
    ("task_id: t\nkeystate @0:\n  installed< >\n", AnnotationSyntaxError, 3),
    ("task_id: t\nkeystate @0:\n   activity\n", AnnotationSyntaxError, 3),
    ("task_id: t\nkeystate @0:\nkeystate @1:\n  activity\n", AnnotationSyntaxError, 2),
    ("task_id: t\nkeystate @0:\n", AnnotationSyntaxError, 2),
    ("task_id: t\nkeystate 0:\n  activity\n", AnnotationSyntaxError, 2),
    ("task_id: t\nkeystate @1:\n  activity\nkeystate @1:\n  activity\n", DuplicateKeyStateError, 4),
    ("task_id: t\nkeystate @2:\n  activity\nkeystate @1:\n  activity\n", NonMonotoneStepsError, 4),
])
def test_parse_errors_carry_line(text, err, line):
    with pytest.raises(err) as info:
        parse_annotation(text)
    assert info.value.line == line


def test_model_invariants():
    with pytest.raises(AnnotationError):
        Primitive(Keyword.EXACT)
    with pytest.raises(AnnotationError):
        Primitive(Keyword.ACTIVITY, component_index=1)
    with pytest.raises(AnnotationError):
        Primitive(Keyword.TYPE, input_text="a\nb")
    with pytest.raises(AnnotationError):
        KeyState(0, ())
    with pytest.raises(DuplicateKeyStateError):
        Annotation("t", (KeyState(1, (Primitive("activity"),)), KeyState(1, (Primitive("activity"),))))
    with pytest.raises(AnnotationError):
        Annotation(" t", ())


@pytest.mark.parametrize("task", sorted(p.parent.name for p in FIXTURES.glob("*/annotation.txt")))
def test_fixture_annotations_lint_clean_and_round_trip(task, entries_by_id):
    text = (FIXTURES / task / "annotation.txt").read_text()
    ann = parse_annotation(text)
    assert format_annotation(ann) == text
    assert lint_annotation(ann, entries_by_id[task].gt) == []


# -- lint --------------------------------------------------------------------------------------------

def _gt():
    screen = vh(
        node("android.widget.Button", "Add", (0, 0, 100, 100), clickable=True),
        node("android.widget.Button", "Add", (0, 100, 100, 200), clickable=True),
        node("android.widget.EditText", "", (0, 200, 100, 300)),
    )
    return make_trace("t", [
        obs(0, screen, action=Action.click(0.01, 0.06, "/hierarchy/node[1]/node[2]"), packages={"a"}),
        obs(1, screen, action=Action.of("status_complete"), packages={"a"}),
    ])


def _messages(text, gt):
    return [i.message for i in lint_annotation(parse_annotation(text), gt)]


def test_lint_reports_problems():
    gt = _gt()
    assert _messages("task_id: t\nkeystate @0:\n  exact<0>\n", gt) == []
    assert "does not match" in _messages("task_id: u\nkeystate @0:\n  activity\n", gt)[0]
    assert "beyond trace length" in _messages("task_id: t\nkeystate @5:\n  activity\n", gt)[0]
    assert "out of range" in _messages("task_id: t\nkeystate @0:\n  exact<3>\n", gt)[0]
    assert "no text" in _messages("task_id: t\nkeystate @0:\n  fuzzy<2>\n", gt)[0]
    assert "earlier node" in _messages("task_id: t\nkeystate @0:\n  click<1>\n", gt)[0]
    assert "not click" in _messages("task_id: t\nkeystate @1:\n  click<0>\n", gt)[0]
    assert _messages("task_id: t\nkeystate @0:\n  click<0>\n", gt) == []


def test_lint_system_needs_packages():
    xml = vh(node(text="x"))
    gt = make_trace("t", [obs(0, xml, packages=None)])
    msgs = _messages("task_id: t\nkeystate @0:\n  installed<com.a>\n", gt)
    assert any("final packages" in m for m in msgs)


# -- overlay -----------------------------------------------------------------------------------------

def test_overlay_geometry(entries_by_id):
    e = entries_by_id["bestbuy_empty_cart"]
    o = e.gt.observations[2]
    boxes = overlay_boxes(o, width=540)
    assert [i for i, _ in boxes] == list(range(len(o.ui_tree.components)))
    scale = 540 / o.ui_tree.screen_w
    for i, (left, top, w, h) in boxes:
        l, t, r, b = o.ui_tree.components.node(i).bounds
        assert (left, top, w, h) == pytest.approx((l * scale, t * scale, (r - l) * scale, (b - t) * scale))


def test_overlay_html(entries_by_id, tmp_path):
    e = entries_by_id["bestbuy_empty_cart"]
    page = render_overlay(e.gt, e.annotation)
    assert page.count("<section") == len(e.gt)
    assert len(re.findall(r'class="box annotated" data-index="3"', page)) == 1
    assert "data:image/png;base64," in page
    out = tmp_path / "o.html"
    write_overlay(e.gt, out, e.annotation)
    assert out.read_text() == page
    with pytest.raises(IoFailureError):
        write_overlay(e.gt, tmp_path / "missing" / "o.html")


# -- properties --------------------------------------------------------------------------------------

one_line = st.text(st.characters(blacklist_categories=("Cs", "Cc", "Zl", "Zp")), max_size=10).filter(
    lambda s: s.splitlines() in ([s], []) and s == s.rstrip())
pkg = st.from_regex(r"[a-z]{1,5}(\.[a-z]{1,5}){1,2}", fullmatch=True)
idx = st.integers(0, 40)
prims = st.one_of(
    st.just(Primitive(Keyword.ACTIVITY)),
    st.just(Primitive(Keyword.FUZZY_SCREEN)),
    st.builds(lambda i: Primitive(Keyword.FUZZY_TEXTBOX, i), idx),
    st.builds(lambda k, i: Primitive(k, i), st.sampled_from([Keyword.EXACT, Keyword.EXCLUDE, Keyword.CLICK]), idx),
    st.builds(lambda k, a: Primitive(k, app_id=a), st.sampled_from([Keyword.INSTALLED, Keyword.UNINSTALLED]), pkg),
    st.builds(lambda t: Primitive(Keyword.TYPE, input_text=t), one_line),
)


@st.composite
def annotations(draw):
    steps = sorted(draw(st.sets(st.integers(0, 30), min_size=1, max_size=4)))
    return Annotation(
        draw(st.from_regex(r"[a-z][a-z0-9_]{0,12}", fullmatch=True)),
        tuple(KeyState(s, tuple(draw(st.lists(prims, min_size=1, max_size=4)))) for s in steps),
    )


@given(annotations())
def test_format_parse_round_trip(ann):
    assert parse_annotation(format_annotation(ann)) == ann
