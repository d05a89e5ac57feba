from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES
from touchstone.dataset import load_traces
from touchstone.errors import ConfigError, DataError, EmptyInputError, MissingLabelError
from touchstone.matcher import ALL_CATEGORIES
from touchstone.metrics import (
    DISABLE_ALL_ROW,
    ABLATION_ROWS,
    LabeledOutcome,
    ablation_markdown,
    ablation_run,
    build_report,
    compute_accuracy,
    compute_tcr,
    confusion,
    evaluate_dataset,
    format_labels,
    outcomes_for,
    parse_labels,
    read_labels,
    report_markdown,
    step_bucket,
)


def outcomes(completed, labels=None):
    labels = labels or [None] * len(completed)
    return [LabeledOutcome(f"t{i}", c, h) for i, (c, h) in enumerate(zip(completed, labels))]


def test_tcr_examples():
    assert compute_tcr(outcomes([True, False, False, False])) == 0.25
    assert compute_tcr(outcomes([False, False])) == 0.0
    with pytest.raises(EmptyInputError):
        compute_tcr([])


def test_tcr_proportion_of_43_in_496():
    # hand count: 43 completed tasks out of 496
    got = compute_tcr(outcomes([True] * 43 + [False] * 453))
    assert f"{100 * got:.2f}" == "8.67"


def test_accuracy_examples():
    assert compute_accuracy(outcomes([True, False, False], [True, False, True])) == pytest.approx(2 / 3)
    assert compute_accuracy(outcomes([True, False], [True, False])) == 1.0
    with pytest.raises(MissingLabelError):
        compute_accuracy(outcomes([True, False], [True, None]))
    with pytest.raises(EmptyInputError):
        compute_accuracy([])


def test_confusion_counts():
    c = confusion(outcomes([True, True, False, False, True], [True, False, False, True, None]))
    assert (c.tp, c.fp, c.tn, c.fn, c.total) == (1, 1, 1, 1, 4)


def test_report_breakdowns_and_uniqueness():
    outs = [LabeledOutcome("a", True, True, ("steps<=4",)), LabeledOutcome("b", False, True, ("steps<=4", "x"))]
    r = build_report(outs)
    assert r.tcr == 0.5 and r.accuracy == 0.5
    assert r.breakdowns["x"] == (0.0, 0.0)
    assert build_report(outcomes([True])).accuracy is None
    with pytest.raises(DataError):
        build_report([LabeledOutcome("a", True), LabeledOutcome("a", False)])
    md = report_markdown(r)
    assert "| TCR (%) | 50.00 |" in md


def test_step_buckets():
    assert [step_bucket(n) for n in (1, 4, 5, 8, 9)] == ["steps<=4", "steps<=4", "steps5-8", "steps5-8", "steps>8"]


def test_labels_parse_and_format():
    text = "# header\nb\tfalse\n\na\ttrue\n"
    labels = parse_labels(text)
    assert labels == {"a": True, "b": False}
    assert parse_labels(format_labels(labels)) == labels
    for bad in ["a true\n", "a\tyes\n", "a\ttrue\na\tfalse\n"]:
        with pytest.raises(DataError):
            parse_labels(bad)


def test_accuracy20_fixture_hand_count():
    human = read_labels(FIXTURES / "labels" / "accuracy20_human.tsv")
    evaluator = read_labels(FIXTURES / "labels" / "accuracy20_evaluator.tsv")
    assert len(human) == len(evaluator) == 20
    agree = sum(human[k] == evaluator[k] for k in human)
    assert agree == 19
    outs = [LabeledOutcome(k, evaluator[k], human[k]) for k in sorted(human)]
    assert compute_accuracy(outs) == 0.95


def test_table_has_nine_rows(dataset):
    traces = load_traces(FIXTURES / "runs" / "agent", dataset)
    labels = read_labels(FIXTURES / "labels" / "agent.tsv")
    table = ablation_run(dataset, traces, labels=labels)
    assert len(table) == len(ABLATION_ROWS) == 9
    assert table[0][0] == "complete"
    md = ablation_markdown(table)
    assert len(md.splitlines()) == 11
    full = table[0][1]
    assert full.tcr == pytest.approx(7 / 13)
    assert (full.confusion.tp, full.confusion.fp, full.confusion.tn, full.confusion.fn) == (7, 0, 5, 1)
    assert table[1][1].tcr >= full.tcr


def test_disable_all_is_length_check(dataset):
    traces = load_traces(FIXTURES / "runs" / "agent", dataset)
    [(label, r)] = ablation_run(dataset, traces, [DISABLE_ALL_ROW])
    assert DISABLE_ALL_ROW[1] == ALL_CATEGORIES
    expected = Fraction(sum(len(traces[e.task_id]) >= len(e.annotation.keystates) for e in dataset), len(dataset))
    assert r.tcr == float(expected)


def test_evaluators_and_jobs(dataset):
    traces = load_traces(FIXTURES / "runs" / "alt_paths", dataset)
    serial = evaluate_dataset(dataset, traces, "essential")
    parallel = evaluate_dataset(dataset, traces, "essential", jobs=4)
    assert [(r.task_id, r.completed) for r in serial] == [(r.task_id, r.completed) for r in parallel]
    assert all(r.completed for r in serial)
    assert not any(r.completed for r in evaluate_dataset(dataset, traces, "stepwise"))
    with pytest.raises(ConfigError):
        evaluate_dataset(dataset, traces, "vibes")
    outs = outcomes_for(serial, dataset)
    assert all(o.human_label is None and o.tags for o in outs)


pairs = st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=40)


@given(pairs)
def test_accuracy_identity(rows):
    outs = [LabeledOutcome(f"t{i}", e, h) for i, (e, h) in enumerate(rows)]
    c = confusion(outs)
    acc = compute_accuracy(outs)
    assert acc == float(1 - Fraction(c.fp + c.fn, len(outs)))
    assert 0.0 <= acc <= 1.0 and 0.0 <= compute_tcr(outs) <= 1.0
