import json
import shutil

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, make_trace, node, obs, vh
from touchstone.agentenv import Session, load_app_pack, run_script
from touchstone.errors import GapInStepsError, IoFailureError, MalformedActionError, MissingFileError, TraceFormatError
from touchstone.trace import (
    Action,
    ActionKind,
    Observation,
    SourceTag,
    TaskRecord,
    Trace,
    load_trace,
    save_trace,
    step_count,
)
from touchstone.vh import parse_vh


def three_step_trace():
    xml = vh(node(text="hello", bounds=(0, 0, 500, 200), clickable=True))
    return make_trace("t3", [
        obs(0, xml, action=Action.click(0.1, 0.05, "/hierarchy/node[1]/node[1]"), packages={"a"}),
        obs(1, xml, action=Action.type_text("hi")),
        obs(2, xml, action=Action.of("status_complete"), packages={"a", "b"}),
    ])


def trace_equal_by_hash(a: Trace, b: Trace) -> bool:
    if a.task != b.task or len(a) != len(b):
        return False
    for x, y in zip(a.observations, b.observations):
        if (x.step_index, x.ui_tree, x.activity, x.action, x.packages) != (
                y.step_index, y.ui_tree, y.activity, y.action, y.packages):
            return False
        if x.screenshot_hash != y.screenshot_hash:
            return False
    return True


# -- data model ----------------------------------------------------------------------------------

def test_task_record_validation():
    assert TaskRecord("a", "b").source_tag is SourceTag.SYNTHETIC
    with pytest.raises(TraceFormatError):
        TaskRecord("", "b")
    with pytest.raises(TraceFormatError):
        TaskRecord("a", "")
    with pytest.raises(TraceFormatError):
        TaskRecord("a", "b", "reddit")


@pytest.mark.parametrize("kwargs", [
    {"kind": "click", "x": 0.5},
    {"kind": "click", "x": 0.5, "y": 1.5},
    {"kind": "click", "x": True, "y": 0.5},
    {"kind": "swipe", "touch_x": 0, "touch_y": 0, "lift_x": 1, "lift_y": 1, "duration_ms": 0},
    {"kind": "swipe", "touch_x": 0, "touch_y": 0, "lift_x": 1, "lift_y": 1},
    {"kind": "type"},
    {"kind": "type", "text": "a", "x": 0.1},
    {"kind": "press_home", "text": "x"},
    {"kind": "long_press"},
    {"kind": "status_complete", "xpath": "/hierarchy/node[1]"},
])
def test_malformed_actions_rejected(kwargs):
    with pytest.raises(MalformedActionError):
        Action.from_json(kwargs)


def test_action_json_round_trip_and_optional_xpath():
    a = Action.click(0.25, 0.75)
    assert a.to_json() == {"kind": "click", "x": 0.25, "y": 0.75}
    assert Action.from_json(a.to_json()) == a
    b = Action.swipe(0.5, 0.8, 0.5, 0.2, 400)
    assert Action.from_json(json.loads(json.dumps(b.to_json()))) == b
    with pytest.raises(MalformedActionError):
        Action.from_json({"kind": "click", "x": 0.1, "y": 0.1, "extra": 1})


def test_step_index_must_match_position():
    xml = vh(node(text="x"))
    with pytest.raises(GapInStepsError):
        make_trace("t", [obs(1, xml)])
    with pytest.raises(TraceFormatError):
        Trace(TaskRecord("t", "i"), ())


def test_final_packages_is_last_snapshot():
    t = three_step_trace()
    assert t.final_packages == frozenset({"a", "b"})
    xml = vh(node(text="x"))
    assert make_trace("t", [obs(0, xml, packages={"z"}), obs(1, xml)]).final_packages is None


def test_step_count_ignores_status_actions():
    assert step_count(three_step_trace()) == 2


# -- persistence ---------------------------------------------------------------------------------

def test_load_three_step_dir(tmp_path):
    save_trace(three_step_trace(), tmp_path / "t")
    t = load_trace(tmp_path / "t")
    assert [o.step_index for o in t.observations] == [0, 1, 2]
    assert t.observations[0].screenshot_ref == tmp_path / "t" / "steps" / "0000" / "screenshot.png"


def test_gap_in_steps(tmp_path):
    save_trace(three_step_trace(), tmp_path / "t")
    shutil.rmtree(tmp_path / "t" / "steps" / "0001")
    with pytest.raises(GapInStepsError):
        load_trace(tmp_path / "t")


@pytest.mark.parametrize("name", ["vh.xml", "activity.txt", "action.json", "screenshot.png"])
def test_missing_required_file(tmp_path, name):
    save_trace(three_step_trace(), tmp_path / "t")
    (tmp_path / "t" / "steps" / "0001" / name).unlink()
    with pytest.raises(MissingFileError):
        load_trace(tmp_path / "t")


def test_missing_packages_file_is_allowed(tmp_path):
    save_trace(three_step_trace(), tmp_path / "t")
    assert not (tmp_path / "t" / "steps" / "0001" / "packages.txt").exists()
    assert load_trace(tmp_path / "t").observations[1].packages is None


def test_bad_action_record(tmp_path):
    save_trace(three_step_trace(), tmp_path / "t")
    (tmp_path / "t" / "steps" / "0000" / "action.json").write_text('{"kind": "fling"}')
    with pytest.raises(MalformedActionError):
        load_trace(tmp_path / "t")


def test_save_into_nonempty_dir(tmp_path):
    (tmp_path / "junk").write_text("x")
    with pytest.raises(IoFailureError):
        save_trace(three_step_trace(), tmp_path)


def test_one_step_round_trip(tmp_path):
    t = make_trace("one", [obs(0, vh(node(text="a")), action=Action.of("status_impossible"), packages=set())])
    save_trace(t, tmp_path / "one")
    assert load_trace(tmp_path / "one") == t


def test_excel_open_has_five_clicks(oracles):
    t = load_trace(FIXTURES / "excel_open" / "gt")
    clicks = sum(a.kind is ActionKind.CLICK for a in t.actions)
    assert clicks == oracles["excel_open_gt_clicks"] == 5
    assert len(t) == oracles["excel_open_gt_steps"]


def test_ten_step_recorded_run_round_trips(tmp_path):
    model = load_app_pack(FIXTURES / "packs" / "settings.pack")
    session = Session.simulated(model, TaskRecord("tour", "wander around settings"))
    steps = [
        {"do": "click", "target": {"text": "Display"}},
        {"do": "click", "target": {"resource-id": "com.android.settings:id/dark_theme_switch"}},
        {"do": "press_back"},
        {"do": "click", "target": {"text": "Network & internet"}},
        {"do": "click", "target": {"resource-id": "android:id/switch_widget"}},
        {"do": "press_back"},
        {"do": "swipe", "direction": "up"},
        {"do": "click", "target": {"text": "About phone"}},
        {"do": "press_back"},
        {"do": "task_complete"},
    ]
    run_script(session, steps)
    t = session.to_trace()
    assert len(t) == 10
    save_trace(t, tmp_path / "tour")
    back = load_trace(tmp_path / "tour")
    assert trace_equal_by_hash(t, back)
    assert back == t


# -- properties ----------------------------------------------------------------------------------

coord = st.floats(0, 1, allow_nan=False)
text = st.text(st.characters(blacklist_categories=("Cs", "Cc")), max_size=12)

actions = st.one_of(
    st.builds(Action.click, coord, coord, st.none() | st.just("/hierarchy/node[1]")),
    st.builds(Action.swipe, coord, coord, coord, coord, st.integers(1, 5000)),
    st.builds(Action.type_text, text),
    st.sampled_from(["press_home", "press_back", "status_complete", "status_impossible"]).map(Action.of),
)


@st.composite
def traces(draw):
    n = draw(st.integers(1, 4))
    observations = []
    for i in range(n):
        label = draw(text)
        xml = vh(node(text=label.replace("&", "&amp;").replace("<", "&lt;").replace('"', "&quot;"),
                      bounds=(0, 0, 300, 300), clickable=draw(st.booleans())))
        pkgs = draw(st.none() | st.frozensets(st.from_regex(r"[a-z]{1,6}(\.[a-z]{1,6}){1,2}", fullmatch=True),
                                              max_size=3))
        observations.append(Observation(i, parse_vh(xml), draw(st.from_regex(r"[a-z]+(\.[A-Za-z$]+)+",
                                                                              fullmatch=True)),
                                        draw(actions), draw(st.binary(max_size=16)), pkgs))
    return make_trace(draw(st.from_regex(r"[a-z][a-z0-9_]{0,10}", fullmatch=True)), observations,
                      instruction=draw(text.filter(str.strip)))


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(traces())
def test_save_load_round_trip_property(tmp_path_factory, t):
    d = tmp_path_factory.mktemp("rt") / "trace"
    save_trace(t, d)
    assert load_trace(d) == t
