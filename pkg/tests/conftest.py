from __future__ import annotations

import json
from pathlib import Path

import pytest

from touchstone.dataset import load_dataset
from touchstone.trace import Action, Observation, TaskRecord, Trace
from touchstone.vh import parse_vh

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


# -- small builders --------------------------------------------------------------------------

def node(cls="android.widget.TextView", text="", bounds=(0, 0, 100, 100), children=(), **attrs):
    """XML for one node; boolean attributes are given as python bools."""
    parts = {"text": text, "class": cls, "content-desc": attrs.pop("desc", ""),
             "resource-id": attrs.pop("rid", "")}
    for k, v in attrs.items():
        parts[k.replace("_", "-")] = ("true" if v else "false") if isinstance(v, bool) else v
    parts["bounds"] = "[{},{}][{},{}]".format(*bounds)
    a = " ".join(f'{k}="{v}"' for k, v in parts.items())
    inner = "".join(children)
    return f"<node {a}>{inner}</node>" if inner else f"<node {a} />"


def vh(*nodes, w=1080, h=2400):
    return f'<hierarchy rotation="0">{node("android.widget.FrameLayout", bounds=(0, 0, w, h), children=nodes)}</hierarchy>'


def tree(*nodes, **kw):
    return parse_vh(vh(*nodes, **kw))


def obs(i, xml, activity="com.example.Main", action=None, packages=None):
    t = parse_vh(xml) if isinstance(xml, str) else xml
    return Observation(i, t, activity, action or Action.of("press_back"), b"png", packages)


def make_trace(task_id, observations, instruction="do the thing"):
    return Trace(TaskRecord(task_id, instruction), tuple(observations))


# -- shared fixtures -------------------------------------------------------------------------

@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def oracles():
    return json.loads((FIXTURES / "oracles.json").read_text())


@pytest.fixture(scope="session")
def dataset():
    return load_dataset(FIXTURES)


@pytest.fixture(scope="session")
def entries_by_id(dataset):
    return {e.task_id: e for e in dataset}


# -- acceptance summary ------------------------------------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    num, title = marker.args
    prev = _CRITERIA.get(num, (title, "PASS"))[1]
    if rep.failed:
        _CRITERIA[num] = (title, "FAIL")
    elif rep.when == "call":
        _CRITERIA[num] = (title, prev if not rep.skipped else "SKIP")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, status = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {status} - {title}")


# -- truth-table instances for the matcher ------------------------------------------------------

def truth_table_instance(table: list[list[bool]]):
    """(trace, gt, annotation) where keystate k holds on candidate j iff table[j][k].

    Ground-truth step k shows one marker text ``K<k>``; the keystate is
    ``exact<0>`` on it, so it holds wherever that marker is present.
    """
    from touchstone.annotation import Annotation, KeyState, Keyword, Primitive

    m = len(table[0])
    gt = make_trace("tt", [obs(k, vh(node(text=f"K{k}", bounds=(0, 0, 500, 100)))) for k in range(m)])
    cands = []
    for j, row in enumerate(table):
        markers = [node(text=f"K{k}", bounds=(0, 100 * i, 500, 100 * i + 100))
                   for i, k in enumerate(k for k in range(m) if row[k])]
        cands.append(obs(j, vh(*markers)))
    ann = Annotation("tt", tuple(KeyState(k, (Primitive(Keyword.EXACT, 0),)) for k in range(m)))
    return make_trace("tt", cands), gt, ann


def exists_ordered_assignment(table: list[list[bool]]) -> bool:
    """Brute force: some strictly increasing choice of candidates satisfies every keystate in order."""
    import itertools

    m = len(table[0])
    return any(all(table[j][k] for k, j in enumerate(combo))
               for combo in itertools.combinations(range(len(table)), m))
