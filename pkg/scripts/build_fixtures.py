"""Regenerate everything under fixtures/.

    python3 scripts/build_fixtures.py [--out fixtures]

Ground-truth traces are recorded by running scripted agents on the app packs,
and annotation indices are looked up by selector on the recorded screens, so
the numbers in annotation.txt always point at the intended component.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from layout import E, gap, page  # noqa: E402
from packs import CANDY, EXCEL, PACKS, SONY, cart_empty_screen, cart_screen, resolve_pack  # noqa: E402

from touchstone.agentenv import Session, parse_app_pack, record_session, run_script  # noqa: E402
from touchstone.annotation import Annotation, KeyState, Keyword, Primitive, format_annotation, lint_annotation  # noqa: E402
from touchstone.metrics import format_labels  # noqa: E402
from touchstone.trace import TaskRecord  # noqa: E402


def click(**target):
    return {"do": "click", "target": target}


def type_(text):
    return {"do": "type", "text": text}


DONE = {"do": "task_complete"}
BACK = {"do": "press_back"}
SWIPE_UP = {"do": "swipe", "direction": "up"}

WITH_EXCEL = "with_excel"

# Each task: pack, source tag, instruction, ground-truth script, annotation
# template, and agent runs. Annotation templates list (gt_step, primitives);
# a primitive is a keyword name, or (keyword, selector) for indexed keywords,
# or (keyword, argument) for installed/uninstalled/type.
TASKS = {
    "excel_open": dict(
        pack="excel", source="aitw",
        instruction="Open Microsoft Excel and go to its sign-in page, installing it first if needed",
        gt=[click(text="Play Store"), type_("Microsoft Excel"), click(text="Microsoft Excel: Spreadsheets"),
            click(text="Install"), click(text="Open"), click(text="Sign in"), DONE],
        ann=[(5, ["activity", ("exact", {"text": "Welcome to Excel"})]),
             (6, ["activity", ("exact", {"text": "Sign in", "class": "android.widget.TextView"}),
                  ("installed", EXCEL)])],
        alt=("already_installed", WITH_EXCEL, [click(text="Excel"), click(text="Sign in"), DONE]),
        agent=("alt", True),
    ),
    "excel_install": dict(
        pack="excel", source="aitw",
        instruction="Install Microsoft Excel from the Play Store",
        gt=[click(text="Play Store"), type_("Microsoft Excel"), click(text="Microsoft Excel: Spreadsheets"),
            click(text="Install"), DONE],
        ann=[(4, ["activity", ("exact", {"text": "Open"}), ("installed", EXCEL)])],
        alt=("already_installed", WITH_EXCEL,
             [click(text="Play Store"), type_("Microsoft Excel"), click(text="Microsoft Excel: Spreadsheets"), DONE]),
        agent=("alt", True),
    ),
    "store_search": dict(
        pack="excel", source="aitw",
        instruction="Search for Microsoft Excel in the Play Store",
        gt=[click(text="Play Store"), type_("Microsoft Excel"), DONE],
        ann=[(2, ["activity", ("fuzzy", {"resource-id": "com.android.vending:id/search_bar_text"})])],
        alt=("tab_then_lowercase", None,
             [click(text="Play Store"), click(text="Top charts"), type_("microsoft excel"), DONE]),
        agent=("run", False, [click(text="Play Store"), type_("Excel"), DONE]),
    ),
    "wifi_on": dict(
        pack="settings", source="aitw",
        instruction="Turn on Wi-Fi",
        gt=[click(text="Network & internet"), click(**{"resource-id": "android:id/switch_widget"}), DONE],
        ann=[(2, ["activity", ("exact", {"resource-id": "android:id/switch_widget"})])],
        alt=("detour_via_display", None,
             [click(text="Display"), BACK, click(text="Network & internet"),
              click(**{"resource-id": "android:id/switch_widget"}), DONE]),
        agent=("alt", True),
    ),
    "dark_mode_off": dict(
        pack="settings", source="generated",
        instruction="Turn off dark theme",
        gt=[click(text="Display"), click(**{"resource-id": "com.android.settings:id/dark_theme_switch"}), DONE],
        ann=[(1, ["activity", ("click", {"resource-id": "com.android.settings:id/dark_theme_switch"})]),
             (2, [("exact", {"resource-id": "com.android.settings:id/dark_theme_switch"})])],
        alt=("from_scrolled_list", None,
             [SWIPE_UP, click(text="Display"),
              click(**{"resource-id": "com.android.settings:id/dark_theme_switch"}), DONE]),
        agent=("run", False, [click(text="Display"), BACK, DONE]),
    ),
    "settings_about": dict(
        pack="settings", source="generated",
        instruction="Open the About phone page in Settings",
        gt=[SWIPE_UP, click(text="About phone"), DONE],
        ann=[(2, ["activity", "fuzzy<-1>"])],
        alt=("double_swipe", None, [SWIPE_UP, SWIPE_UP, click(text="About phone"), DONE]),
        agent=("alt", True),
    ),
    "uninstall_candy": dict(
        pack="settings", source="generated",
        instruction="Uninstall Candy Crush Saga",
        gt=[click(text="Apps"), click(text="Candy Crush Saga"), click(text="Uninstall"), click(text="OK"), DONE],
        # the row is indexed on the screen where it is still present
        ann=[(1, ["activity", ("exclude", {"text": "Candy Crush Saga"}), ("uninstalled", CANDY)])],
        alt=None,
        agent=("run", False, [click(text="Apps"), click(text="Candy Crush Saga"), click(text="Uninstall"),
                              click(text="Cancel"), DONE]),
    ),
    "bestbuy_empty_cart": dict(
        pack="shop", source="generated",
        instruction="Empty my Best Buy shopping cart",
        gt=[click(**{"content-desc": "Cart"}), click(text="Remove"), DONE],
        ann=[(2, ["activity", ("exact", {"text": "Your cart is empty"})])],
        alt=("via_product_page", None,
             [click(text=SONY), click(**{"content-desc": "Cart"}), click(text="Remove"), DONE]),
        agent=("alt", True),
    ),
    "bestbuy_remove_item": dict(
        pack="shop", source="generated",
        instruction="Remove the Sony headphones from my Best Buy cart",
        gt=[click(**{"content-desc": "Cart"}), click(text="Remove"), DONE],
        ann=[(1, ["activity", ("exclude", {"text": SONY})])],
        alt=None,
        agent=("run", False, [click(**{"content-desc": "Cart"}), DONE]),
    ),
    "bestbuy_search": dict(
        pack="shop", source="synthetic",
        instruction="Search Best Buy for a laptop",
        gt=[click(text="Search Best Buy"), type_("laptop"), DONE],
        ann=[(1, ["activity", ("type", "laptop")]), (2, ["activity"])],
        alt=None,
        # a human accepts the plural query; the type primitive does not
        agent=("run", True, [click(text="Search Best Buy"), type_("laptops"), DONE]),
    ),
    "shop_add_to_cart": dict(
        pack="shop", source="synthetic",
        instruction="Add the Sony WH-1000XM5 headphones to the cart",
        gt=[click(text=SONY), click(text="Add to Cart"), DONE],
        ann=[(1, ["activity", ("click", {"text": "Add to Cart"})]), (2, [("exact", {"text": "Added to Cart"})])],
        alt=None,
        agent=("gt", True),
    ),
    "notes_create": dict(
        pack="notes", source="synthetic",
        instruction="Create a note titled Groceries",
        gt=[click(**{"content-desc": "New note"}), type_("Groceries"), click(**{"content-desc": "Save"}), DONE],
        ann=[(1, ["activity", ("type", "Groceries")]),
             (3, ["fuzzy<-1>", ("exact", {"text": "Groceries"})])],
        alt=("refocus_title", None,
             [click(**{"content-desc": "New note"}), click(text="Note"), click(text="Title"), type_("Groceries"),
              click(**{"content-desc": "Save"}), DONE]),
        agent=("alt", True),
    ),
    "notes_delete": dict(
        pack="notes", source="synthetic",
        instruction="Delete the note called Meeting notes",
        gt=[click(text="Meeting notes"), click(**{"content-desc": "Delete"}), click(text="Delete"), DONE],
        ann=[(1, ["activity"]), (3, ["activity", ("exact", {"text": "No notes yet"})])],
        alt=None,
        agent=("run", False, [click(text="Meeting notes"), click(**{"content-desc": "Delete"}),
                              click(text="Cancel"), DONE]),
    ),
}

KEYWORDS = {
    "activity": Keyword.ACTIVITY, "exact": Keyword.EXACT, "exclude": Keyword.EXCLUDE,
    "fuzzy": Keyword.FUZZY_TEXTBOX, "fuzzy<-1>": Keyword.FUZZY_SCREEN, "click": Keyword.CLICK,
    "installed": Keyword.INSTALLED, "uninstalled": Keyword.UNINSTALLED, "type": Keyword.TYPE,
}


def component_index(tree, selector) -> int:
    for i, node in tree.components:
        if all(node.get(k) == v for k, v in selector.items()):
            return i
    raise KeyError(f"no component matches {selector!r}")


def build_annotation(task_id, template, gt) -> Annotation:
    keystates = []
    for step, prims in template:
        tree = gt.observations[step].ui_tree
        out = []
        for p in prims:
            if isinstance(p, str):
                out.append(Primitive(KEYWORDS[p]))
                continue
            name, arg = p
            kw = KEYWORDS[name]
            if kw in (Keyword.INSTALLED, Keyword.UNINSTALLED):
                out.append(Primitive(kw, app_id=arg))
            elif kw is Keyword.TYPE:
                out.append(Primitive(kw, input_text=arg))
            else:
                out.append(Primitive(kw, component_index=component_index(tree, arg)))
        keystates.append(KeyState(step, tuple(out)))
    return Annotation(task_id, tuple(keystates))


def record(model, task, actions, out, packages=None):
    session = Session.simulated(model, task, packages)
    run_script(session, actions)
    return record_session(session, out)


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


# -- standalone VH fixtures ------------------------------------------------------------------

def vh_fixtures(out: Path) -> None:
    d = out / "vh"
    d.mkdir(parents=True)
    (d / "one_button.xml").write_text(page("com.example", [E("Button", "OK", clickable=True, h=200)]) + "\n")

    # 1 frame + 7 groups of (row + 5 children) + 7 leaves = 50 nodes
    rows = []
    for g in range(7):
        kids = [E("Text", f"Item {g}.{k}", "com.example:id/item", clickable=(k % 2 == 0), h=60) for k in range(5)]
        rows.append(E("Linear", rid="com.example:id/row", kids=kids, h=300))
    leaves = [E("View", h=20) for _ in range(7)]
    (d / "fifty_nodes.xml").write_text(page("com.example", rows + leaves) + "\n")

    # three attribute-equal "Add" buttons among 20 nodes
    def product(name, price):
        return E("Linear", kids=[E("Text", name, "com.example:id/name"), E("Text", price, "com.example:id/price"),
                                 E("Button", "Add", "com.example:id/add", clickable=True)], layout="h", h=200)

    twenty = [E("Text", "Shopping", "com.example:id/title", h=160),
              product("Apples", "$3"), product("Bread", "$4"), product("Cheese", "$7"),
              E("Linear", kids=[E("Text", "Total"), E("Text", "$14"), E("Button", "Checkout", clickable=True)],
                layout="h", h=200),
              gap(100), E("Text", "Prices include tax", "com.example:id/footer", h=100)]
    (d / "twenty_nodes.xml").write_text(page("com.example", twenty) + "\n")

    nested = [gap(200), E("Linear", rid="com.example:id/card", clickable=True, h=600, pad=60, kids=[
        E("Text", "Card title", "com.example:id/card_title", h=150),
        E("Linear", rid="com.example:id/actions", clickable=True, h=300, pad=40, kids=[
            E("Button", "Share", "com.example:id/share", clickable=True, h=200)]),
    ])]
    (d / "nested_clickable.xml").write_text(page("com.example", nested) + "\n")

    (d / "bestbuy_cart_empty.xml").write_text(cart_empty_screen() + "\n")
    (d / "bestbuy_cart_a.xml").write_text(
        cart_screen([(SONY, "$329.99"), ("Apple AirPods Pro (2nd generation)", "$249.99")], "$579.98") + "\n")
    (d / "bestbuy_cart_b.xml").write_text(
        cart_screen([(SONY, "$329.99"), ("Bose QuietComfort Ultra Earbuds", "$299.00")], "$628.99") + "\n")


# -- accuracy fixture ----------------------------------------------------------------------------

def accuracy_fixture(out: Path) -> None:
    ids = [f"task{i:02d}" for i in range(1, 21)]
    human = {t: i % 3 != 0 for i, t in enumerate(ids)}
    verdicts = dict(human)
    verdicts["task07"] = not human["task07"]  # the single disagreement
    (out / "labels").mkdir(parents=True, exist_ok=True)
    (out / "labels" / "accuracy20_human.tsv").write_text(format_labels(human))
    (out / "labels" / "accuracy20_evaluator.tsv").write_text(format_labels(verdicts))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "fixtures")
    args = ap.parse_args(argv)
    out: Path = args.out
    if out.exists():
        shutil.rmtree(out)
    out.mkdir(parents=True)

    models = {}
    for name, make in PACKS.items():
        doc = resolve_pack(make())
        write_json(out / "packs" / f"{name}.pack", doc)
        models[name] = parse_app_pack(doc)

    labels = {}
    for task_id, spec in TASKS.items():
        model = models[spec["pack"]]
        task = TaskRecord(task_id, spec["instruction"], spec["source"])
        with_excel = sorted(model.initial_packages | {EXCEL})
        write_json(out / "scripts" / f"{task_id}.json", {"task": task.to_json(), "actions": spec["gt"]})
        gt = record(model, task, spec["gt"], out / task_id / "gt")
        ann = build_annotation(task_id, spec["ann"], gt)
        issues = lint_annotation(ann, gt)
        if issues:
            raise SystemExit(f"{task_id}: {[str(i) for i in issues]}")
        (out / task_id / "annotation.txt").write_text(format_annotation(ann), encoding="utf-8")

        if spec["alt"] is not None:
            name, pkgs, actions = spec["alt"]
            packages = with_excel if pkgs == WITH_EXCEL else None
            script = {"task": task.to_json(), "actions": actions}
            if packages is not None:
                script["packages"] = packages
            write_json(out / "scripts" / f"{task_id}.{name}.json", script)
            record(model, task, actions, out / "runs" / "alt_paths" / task_id, packages)

        kind, human, *rest = spec["agent"]
        agent_dir = out / "runs" / "agent" / task_id
        if kind == "alt":
            _, pkgs, actions = spec["alt"]
            record(model, task, actions, agent_dir, with_excel if pkgs == WITH_EXCEL else None)
        elif kind == "gt":
            record(model, task, spec["gt"], agent_dir)
        else:
            record(model, task, rest[0], agent_dir)
        labels[task_id] = human

    (out / "labels").mkdir(exist_ok=True)
    (out / "labels" / "agent.tsv").write_text(format_labels(labels))
    accuracy_fixture(out)
    vh_fixtures(out)
    print(f"wrote {len(TASKS)} tasks to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
