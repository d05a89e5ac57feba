import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from touchstone.baselines import ActionMatchConfig, action_equal, evaluate_actions, lcs_match, stepwise_match
from touchstone.errors import ConfigError
from touchstone.trace import Action, load_trace


def lcs_length_dp(gt, executed, cfg=None) -> int:
    """Classic O(nm) longest common subsequence under ``action_equal``."""
    n, m = len(gt), len(executed)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if action_equal(gt[i - 1], executed[j - 1], cfg):
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[n][m]


def test_click_tolerance_boundary():
    cfg = ActionMatchConfig()
    assert cfg.click_tolerance == 0.14
    a = Action.click(0.5, 0.5)
    assert action_equal(a, Action.click(0.5, 0.63), cfg)
    assert not action_equal(a, Action.click(0.5, 0.65), cfg)
    assert action_equal(a, Action.click(0.5, 0.65), ActionMatchConfig(click_tolerance=0.2))


def test_click_tolerance_range():
    with pytest.raises(ConfigError):
        ActionMatchConfig(click_tolerance=-0.1)
    with pytest.raises(ConfigError):
        ActionMatchConfig(click_tolerance=1.5)
    ActionMatchConfig(click_tolerance=math.sqrt(2))


def test_swipe_compares_direction_signs():
    up = Action.swipe(0.5, 0.8, 0.5, 0.2, 300)
    assert action_equal(up, Action.swipe(0.1, 0.9, 0.1, 0.5, 900))
    assert not action_equal(up, Action.swipe(0.5, 0.2, 0.5, 0.8, 300))
    assert not action_equal(up, Action.swipe(0.5, 0.8, 0.6, 0.2, 300))


def test_type_and_keys():
    assert action_equal(Action.type_text("Excel"), Action.type_text("Excel"))
    assert not action_equal(Action.type_text("Excel"), Action.type_text("excel"))
    loose = ActionMatchConfig(text_exact=False)
    assert action_equal(Action.type_text("Excel  sheet"), Action.type_text("excel sheet"), loose)
    assert action_equal(Action.of("press_back"), Action.of("press_back"))
    assert not action_equal(Action.of("press_back"), Action.of("press_home"))


def test_stepwise_needs_equal_length():
    a = [Action.of("press_home"), Action.click(0.1, 0.1)]
    assert stepwise_match(a, list(a))
    assert not stepwise_match(a, a + [Action.of("press_back")])
    assert not stepwise_match(a, a[:1])


def test_lcs_subsequence():
    g = [Action.click(0.1, 0.1), Action.type_text("x")]
    e = [Action.of("press_home"), Action.click(0.12, 0.1), Action.of("press_back"), Action.type_text("x")]
    assert lcs_match(g, e)
    assert not lcs_match(g, list(reversed(e)))
    assert lcs_match([], e)


def test_excel_alt_path_fails_baselines(entries_by_id):
    e = entries_by_id["excel_open"]
    alt = load_trace(FIXTURES / "runs" / "alt_paths" / "excel_open")
    assert not evaluate_actions("stepwise", alt, e.gt)
    assert not evaluate_actions("lcs", alt, e.gt)
    assert evaluate_actions("stepwise", e.gt, e.gt)
    with pytest.raises(ConfigError):
        evaluate_actions("fuzzy", alt, e.gt)


coord = st.sampled_from([0.1, 0.2, 0.5, 0.55, 0.9])
small_actions = st.one_of(
    st.builds(Action.click, coord, coord),
    st.sampled_from([Action.swipe(0.5, 0.8, 0.5, 0.2, 300), Action.swipe(0.5, 0.2, 0.5, 0.8, 300)]),
    st.sampled_from(["a", "b"]).map(Action.type_text),
    st.sampled_from(["press_home", "press_back"]).map(Action.of),
)


@settings(max_examples=300)
@given(st.lists(small_actions, max_size=5), st.lists(small_actions, max_size=8))
def test_lcs_match_agrees_with_dp(gt, executed):
    assert lcs_match(gt, executed) == (lcs_length_dp(gt, executed) == len(gt))


@given(st.lists(small_actions, max_size=6))
def test_stepwise_implies_lcs(actions):
    assert stepwise_match(actions, actions)
    assert lcs_match(actions, actions)
