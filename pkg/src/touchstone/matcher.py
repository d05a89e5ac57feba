"""Multi-level essential-state matching.

A trace completes a task when its observations pass through every annotated
keystate in order. Each keystate is matched against the earliest remaining
observation on which all of its screen and component primitives hold;
screen gates (activity, fuzzy screen) are checked before the per-component
and action primitives. Installation primitives are checked once against the
packages recorded with the last observation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .annotation import SCREEN_GATES, Annotation, Keyword, KeyState, Primitive
from .errors import AnnotationError, ConfigError, MissingPackagesSnapshotError
from .similarity import Embedder, SimilarityConfig, cosine, make_embedder
from .trace import ActionKind, Observation, Trace
from .vh import DEFAULT_COMPARED_ATTRS, UiNode, UiTree, find_equal_node, node_at_point, simplify_to_html, xpath_of


class Category(str, Enum):
    ACTIVITY = "activity"
    UI_COMPONENT_EXACT = "ui_component_exact"
    ACTION = "action"
    SYSTEM = "system"
    SCREEN_FUZZY = "screen_fuzzy"
    TEXTBOX_FUZZY = "textbox_fuzzy"


CATEGORY_OF = {
    Keyword.ACTIVITY: Category.ACTIVITY,
    Keyword.EXACT: Category.UI_COMPONENT_EXACT,
    Keyword.EXCLUDE: Category.UI_COMPONENT_EXACT,
    Keyword.CLICK: Category.ACTION,
    Keyword.TYPE: Category.ACTION,
    Keyword.INSTALLED: Category.SYSTEM,
    Keyword.UNINSTALLED: Category.SYSTEM,
    Keyword.FUZZY_SCREEN: Category.SCREEN_FUZZY,
    Keyword.FUZZY_TEXTBOX: Category.TEXTBOX_FUZZY,
}

EXACT_CATEGORIES = frozenset({Category.ACTIVITY, Category.UI_COMPONENT_EXACT, Category.ACTION, Category.SYSTEM})
FUZZY_CATEGORIES = frozenset({Category.SCREEN_FUZZY, Category.TEXTBOX_FUZZY})
ALL_CATEGORIES = EXACT_CATEGORIES | FUZZY_CATEGORIES

# Short names accepted on the command line.
CATEGORY_ALIASES = {
    "exact": EXACT_CATEGORIES,
    "fuzzy": FUZZY_CATEGORIES,
    "all": ALL_CATEGORIES,
    "component": frozenset({Category.UI_COMPONENT_EXACT}),
    "screen": frozenset({Category.SCREEN_FUZZY}),
    "textbox": frozenset({Category.TEXTBOX_FUZZY}),
}


def parse_categories(spec: str) -> frozenset[Category]:
    """``"exact"`` / ``"activity,action"`` -> set of categories."""
    out: set[Category] = set()
    for part in (p.strip() for p in spec.split(",")):
        if not part:
            continue
        if part in CATEGORY_ALIASES:
            out |= CATEGORY_ALIASES[part]
            continue
        try:
            out.add(Category(part))
        except ValueError:
            raise ConfigError(f"unknown ablation category {part!r}") from None
    return frozenset(out)


@dataclass(frozen=True)
class MatchConfig:
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    compared_attrs: tuple[str, ...] = DEFAULT_COMPARED_ATTRS
    ablation: frozenset[Category] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "compared_attrs", tuple(dict.fromkeys(self.compared_attrs)))
        if not self.compared_attrs:
            raise ConfigError("compared_attrs must be nonempty")
        if "bounds" in self.compared_attrs:
            raise ConfigError("bounds cannot be a compared attribute")
        try:
            object.__setattr__(self, "ablation", frozenset(Category(c) for c in self.ablation))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def with_ablation(self, categories) -> MatchConfig:
        return MatchConfig(self.similarity, self.compared_attrs, frozenset(categories))

    def to_json(self) -> dict:
        return {
            "similarity": {
                "backend": self.similarity.backend,
                "theta_screen": self.similarity.theta_screen,
                "theta_textbox": self.similarity.theta_textbox,
                "external_endpoint": self.similarity.external_endpoint,
            },
            "compared_attrs": list(self.compared_attrs),
            "ablation": sorted(c.value for c in self.ablation),
        }


@dataclass(frozen=True)
class PrimitiveResult:
    primitive: Primitive
    matched: bool
    evidence: str

    def to_json(self) -> dict:
        return {"primitive": str(self.primitive), "matched": self.matched, "evidence": self.evidence}


@dataclass(frozen=True)
class KeystateResult:
    gt_step: int
    matched_index: int | None
    results: tuple[PrimitiveResult, ...] = ()
    # observation that satisfied the most primitives when nothing matched
    closest_index: int | None = None

    def to_json(self) -> dict:
        return {
            "gt_step": self.gt_step,
            "matched_index": self.matched_index,
            "closest_index": self.closest_index,
            "primitives": [r.to_json() for r in self.results],
        }


@dataclass(frozen=True)
class Verdict:
    completed: bool
    keystate_results: tuple[KeystateResult, ...]
    system_results: tuple[PrimitiveResult, ...] = ()
    first_unmatched: int | None = None

    @property
    def matched_indices(self) -> list[int]:
        return [k.matched_index for k in self.keystate_results if k.matched_index is not None]

    def to_json(self) -> dict:
        return {
            "completed": self.completed,
            "first_unmatched": self.first_unmatched,
            "keystates": [k.to_json() for k in self.keystate_results],
            "system": [r.to_json() for r in self.system_results],
        }


class StateMatcher:
    """Evaluates primitives with memoized screen simplification and embeddings."""

    def __init__(self, cfg: MatchConfig | None = None, embedder: Embedder | None = None):
        self.cfg = cfg or MatchConfig()
        self.embedder = embedder or make_embedder(self.cfg.similarity)
        self._html: dict[int, tuple[UiTree, str]] = {}
        self._vectors: dict[str, object] = {}

    # -- helpers

    def _simplified(self, tree: UiTree) -> str:
        hit = self._html.get(id(tree))
        if hit is None or hit[0] is not tree:
            hit = (tree, simplify_to_html(tree))
            self._html[id(tree)] = hit
        return hit[1]

    def _vector(self, text: str):
        vec = self._vectors.get(text)
        if vec is None:
            vec = self.embedder.embed(text)
            self._vectors[text] = vec
        return vec

    def score(self, a: str, b: str) -> float:
        return cosine(self._vector(a), self._vector(b))

    @staticmethod
    def _gt_node(gt_obs: Observation, n: int) -> UiNode:
        comps = gt_obs.ui_tree.components
        if n not in comps:
            raise AnnotationError(f"component {n} not on ground-truth step {gt_obs.step_index} ({len(comps)} components)")
        return comps.node(n)

    # -- primitives

    def activity(self, gt_obs: Observation, cand_obs: Observation) -> bool:
        return gt_obs.activity == cand_obs.activity

    def screen_score(self, gt_obs: Observation, cand_obs: Observation) -> float:
        return self.score(self._simplified(gt_obs.ui_tree), self._simplified(cand_obs.ui_tree))

    def screen_fuzzy(self, gt_obs: Observation, cand_obs: Observation) -> bool:
        return self.screen_score(gt_obs, cand_obs) >= self.cfg.similarity.theta_screen

    def component_exact(self, gt_obs: Observation, n: int, cand_obs: Observation) -> UiNode | None:
        return find_equal_node(self._gt_node(gt_obs, n), cand_obs.ui_tree, self.cfg.compared_attrs)

    def textbox_best(self, gt_obs: Observation, n: int, cand_obs: Observation) -> tuple[float, UiNode | None]:
        want = self._gt_node(gt_obs, n).text
        best: tuple[float, UiNode | None] = (0.0, None)
        if not want:
            return best
        for node in cand_obs.ui_tree.nodes:
            if node.text:
                s = self.score(want, node.text)
                if s > best[0]:
                    best = (s, node)
        return best

    def textbox_fuzzy(self, gt_obs: Observation, n: int, cand_obs: Observation) -> bool:
        score, node = self.textbox_best(gt_obs, n, cand_obs)
        return node is not None and score >= self.cfg.similarity.theta_textbox

    @staticmethod
    def clicked_xpath(cand_obs: Observation) -> str | None:
        action = cand_obs.action
        if action.kind is not ActionKind.CLICK:
            return None
        if action.xpath:
            return action.xpath
        node = node_at_point(cand_obs.ui_tree, action.x, action.y)
        return None if node is None else xpath_of(cand_obs.ui_tree, node)

    def action(self, gt_obs: Observation, prim: Primitive, cand_obs: Observation) -> bool:
        return self._check_action(gt_obs, prim, cand_obs).matched

    def _check_action(self, gt_obs, prim, cand_obs) -> PrimitiveResult:
        if prim.keyword is Keyword.TYPE:
            a = cand_obs.action
            ok = a.kind is ActionKind.TYPE and a.text == prim.input_text
            return PrimitiveResult(prim, ok, f"typed {a.text!r}" if a.kind is ActionKind.TYPE else f"action {a.kind.value}")
        if prim.keyword is not Keyword.CLICK:
            raise ValueError(f"{prim} is not an action primitive")
        clicked = self.clicked_xpath(cand_obs)
        if clicked is None:
            return PrimitiveResult(prim, False, f"action {cand_obs.action.kind.value} hit no component")
        target = self.component_exact(gt_obs, prim.component_index, cand_obs)
        if target is None:
            return PrimitiveResult(prim, False, "target component absent")
        want = xpath_of(cand_obs.ui_tree, target)
        return PrimitiveResult(prim, clicked == want, clicked if clicked == want else f"clicked {clicked}, target {want}")

    def system(self, prim: Primitive, trace: Trace) -> bool:
        return self._check_system(prim, trace).matched

    def _check_system(self, prim: Primitive, trace: Trace) -> PrimitiveResult:
        pkgs = trace.final_packages
        if pkgs is None:
            raise MissingPackagesSnapshotError(f"trace {trace.task.task_id} has no final packages snapshot")
        present = prim.app_id in pkgs
        if prim.keyword is Keyword.INSTALLED:
            return PrimitiveResult(prim, present, prim.app_id if present else f"{prim.app_id} not installed")
        if prim.keyword is Keyword.UNINSTALLED:
            return PrimitiveResult(prim, not present, prim.app_id if not present else f"{prim.app_id} still installed")
        raise ValueError(f"{prim} is not a system primitive")

    def check(self, prim: Primitive, gt_obs: Observation, cand_obs: Observation) -> PrimitiveResult:
        """Evaluate one non-system primitive on one candidate observation."""
        if CATEGORY_OF[prim.keyword] in self.cfg.ablation:
            return PrimitiveResult(prim, True, "ablated")
        kw = prim.keyword
        if kw is Keyword.ACTIVITY:
            ok = self.activity(gt_obs, cand_obs)
            return PrimitiveResult(prim, ok, cand_obs.activity)
        if kw is Keyword.FUZZY_SCREEN:
            s = self.screen_score(gt_obs, cand_obs)
            return PrimitiveResult(prim, s >= self.cfg.similarity.theta_screen, f"score={s:.4f}")
        if kw in (Keyword.EXACT, Keyword.EXCLUDE):
            node = self.component_exact(gt_obs, prim.component_index, cand_obs)
            where = "absent" if node is None else xpath_of(cand_obs.ui_tree, node)
            return PrimitiveResult(prim, (node is not None) == (kw is Keyword.EXACT), where)
        if kw is Keyword.FUZZY_TEXTBOX:
            s, node = self.textbox_best(gt_obs, prim.component_index, cand_obs)
            ok = node is not None and s >= self.cfg.similarity.theta_textbox
            where = "no text nodes" if node is None else f"score={s:.4f} at {xpath_of(cand_obs.ui_tree, node)}"
            return PrimitiveResult(prim, ok, where)
        if kw in (Keyword.CLICK, Keyword.TYPE):
            return self._check_action(gt_obs, prim, cand_obs)
        raise ValueError(f"{prim} is evaluated against the final state, not a screen")

    def check_system(self, prim: Primitive, trace: Trace) -> PrimitiveResult:
        if Category.SYSTEM in self.cfg.ablation:
            return PrimitiveResult(prim, True, "ablated")
        return self._check_system(prim, trace)

    # -- trace evaluation

    def _screen_prims(self, ks: KeyState) -> list[Primitive]:
        prims = [p for p in ks.primitives if not p.is_system]
        # gates first; stable otherwise
        return sorted(prims, key=lambda p: p.keyword not in SCREEN_GATES)

    def _holds(self, prims, gt_obs, cand_obs) -> bool:
        return all(self.check(p, gt_obs, cand_obs).matched for p in prims)

    def evaluate(self, trace: Trace, gt: Trace, ann: Annotation) -> Verdict:
        results: list[KeystateResult] = []
        cursor = 0
        first_unmatched = None
        for ks in ann.keystates:
            if ks.gt_step >= len(gt.observations):
                raise AnnotationError(f"keystate @{ks.gt_step} beyond ground-truth trace of {len(gt)} steps")
            if first_unmatched is not None:
                results.append(KeystateResult(ks.gt_step, None))
                continue
            gt_obs = gt.observations[ks.gt_step]
            prims = self._screen_prims(ks)
            hit = None
            for j in range(cursor, len(trace.observations)):
                if self._holds(prims, gt_obs, trace.observations[j]):
                    hit = j
                    break
            if hit is not None:
                cand = trace.observations[hit]
                results.append(KeystateResult(ks.gt_step, hit, tuple(self.check(p, gt_obs, cand) for p in prims)))
                cursor = hit + 1
                continue
            first_unmatched = ks.gt_step
            best = None
            for j in range(cursor, len(trace.observations)):
                res = tuple(self.check(p, gt_obs, trace.observations[j]) for p in prims)
                n_ok = sum(r.matched for r in res)
                if best is None or n_ok > best[0]:
                    best = (n_ok, j, res)
            if best is None:
                results.append(KeystateResult(ks.gt_step, None))
            else:
                results.append(KeystateResult(ks.gt_step, None, best[2], closest_index=best[1]))
        system = tuple(self.check_system(p, trace) for ks in ann.keystates for p in ks.primitives if p.is_system)
        completed = first_unmatched is None and all(r.matched for r in system)
        return Verdict(completed, tuple(results), system, first_unmatched)


# -- function API ------------------------------------------------------------------

def match_activity(gt_obs: Observation, cand_obs: Observation) -> bool:
    return gt_obs.activity == cand_obs.activity


def match_screen_fuzzy(gt_obs, cand_obs, cfg: MatchConfig | None = None, embedder=None) -> bool:
    return StateMatcher(cfg, embedder).screen_fuzzy(gt_obs, cand_obs)


def match_component_exact(gt_obs, n: int, cand_obs, cfg: MatchConfig | None = None) -> UiNode | None:
    return StateMatcher(cfg).component_exact(gt_obs, n, cand_obs)


def match_component_exclude(gt_obs, n: int, cand_obs, cfg: MatchConfig | None = None) -> bool:
    return match_component_exact(gt_obs, n, cand_obs, cfg) is None


def match_textbox_fuzzy(gt_obs, n: int, cand_obs, cfg: MatchConfig | None = None, embedder=None) -> bool:
    return StateMatcher(cfg, embedder).textbox_fuzzy(gt_obs, n, cand_obs)


def match_action(gt_obs, primitive: Primitive, cand_obs, cfg: MatchConfig | None = None) -> bool:
    return StateMatcher(cfg).action(gt_obs, primitive, cand_obs)


def match_system(primitive: Primitive, trace: Trace) -> bool:
    return StateMatcher()._check_system(primitive, trace).matched


def evaluate_trace(trace: Trace, gt: Trace, ann: Annotation, cfg: MatchConfig | None = None,
                   embedder: Embedder | None = None) -> Verdict:
    return StateMatcher(cfg, embedder).evaluate(trace, gt, ann)
