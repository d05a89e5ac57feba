"""Reference values for the test suite, computed without the package.

    python3 scripts/compute_oracles.py [--fixtures fixtures]

Everything here is a deliberately naive re-derivation (regex counts, brute
force over all nodes, list-based trigram cosine) so the tests compare the
package against something it does not share code with. Writes
``<fixtures>/oracles.json`` and the golden simplified HTML.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

BOUNDS = re.compile(r"\[(-?\d+),(-?\d+)\]\[(-?\d+),(-?\d+)\]")


# -- text similarity ------------------------------------------------------------------------

def grams(text):
    t = " ".join(text.lower().split(" "))
    t = re.sub(r"\s+", " ", t)
    if not t:
        return []
    if len(t) < 3:
        return [t]
    return [t[i:i + 3] for i in range(len(t) - 2)]


def cos(a, b):
    ga, gb = grams(a), grams(b)
    keys = sorted(set(ga) | set(gb))
    va = [ga.count(k) for k in keys]
    vb = [gb.count(k) for k in keys]
    dot = sum(x * y for x, y in zip(va, vb))
    na = math.sqrt(sum(x * x for x in va))
    nb = math.sqrt(sum(y * y for y in vb))
    return 0.0 if na == 0 or nb == 0 else dot / (na * nb)


# -- view hierarchy ------------------------------------------------------------------------------

def walk(path):
    """Pre-order (element, xpath, depth) list, plus screen size."""
    root = ET.parse(path).getroot()
    out = []

    def rec(elem, xp, depth):
        for i, child in enumerate(list(elem), start=1):
            p = f"{xp}/node[{i}]"
            out.append((child, p, depth))
            rec(child, p, depth + 1)

    rec(root, "/hierarchy", 1)
    tops = [BOUNDS.match(c.get("bounds")).groups() for c in root]
    w = max(int(t[2]) for t in tops)
    h = max(int(t[3]) for t in tops)
    return out, w, h


def box(elem):
    return tuple(int(v) for v in BOUNDS.match(elem.get("bounds")).groups())


def functional(elem, w, h):
    l, t, r, b = box(elem)
    if (r - l) <= 0 or (b - t) <= 0:
        return False
    if not (min(r, w) > max(l, 0) and min(b, h) > max(t, 0)):
        return False
    flags = any(elem.get(f) == "true" for f in ("clickable", "checkable", "long-clickable", "scrollable"))
    return flags or "EditText" in elem.get("class", "") or elem.get("text", "") != "" or elem.get("content-desc", "") != ""


def components(path):
    nodes, w, h = walk(path)
    return [(e, xp, d) for e, xp, d in nodes if functional(e, w, h)], w, h


def esc(s, quote=True):
    s = s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    if quote:
        s = s.replace('"', "&quot;").replace("'", "&#x27;")
    return s.replace("\r", "&#13;").replace("\n", "&#10;")


def html_line(i, e):
    cls = e.get("class", "")
    label = e.get("text", "") or e.get("content-desc", "")
    if "Button" in cls:
        return f"<button id={i}>{esc(label, False)}</button>"
    if "EditText" in cls:
        return f'<input id={i} value="{esc(label)}">'
    if "CheckBox" in cls or "Switch" in cls:
        return f"<checkbox id={i} checked={e.get('checked', 'false')}>"
    if "Image" in cls:
        return f'<img id={i} alt="{esc(e.get("content-desc", ""))}">'
    return f"<p id={i}>{esc(label, False)}</p>"


def simplified(path):
    comps, _, _ = components(path)
    return "\n".join(html_line(i, e) for i, (e, _, _) in enumerate(comps))


# -- traces -------------------------------------------------------------------------------------

def actions(trace_dir):
    return [json.loads(p.read_text()) for p in sorted(Path(trace_dir).glob("steps/*/action.json"))]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixtures", type=Path, default=Path(__file__).resolve().parent.parent / "fixtures")
    fx = ap.parse_args(argv).fixtures
    vh = fx / "vh"
    o = {}

    o["node_count_fifty"] = len(re.findall(r"<node\b", (vh / "fifty_nodes.xml").read_text()))
    o["node_count_twenty"] = len(re.findall(r"<node\b", (vh / "twenty_nodes.xml").read_text()))
    o["excel_open_gt_clicks"] = sum(a["kind"] == "click" for a in actions(fx / "excel_open" / "gt"))
    o["excel_open_gt_steps"] = len(actions(fx / "excel_open" / "gt"))

    comps, _, _ = components(vh / "bestbuy_cart_empty.xml")
    o["cart_empty_index"] = next(i for i, (e, _, _) in enumerate(comps) if e.get("text") == "Your cart is empty")
    o["cart_empty_components"] = len(comps)
    (vh / "bestbuy_cart_empty.html").write_text(simplified(vh / "bestbuy_cart_empty.xml") + "\n")

    nodes, _, _ = walk(vh / "twenty_nodes.xml")
    adds = [xp for e, xp, _ in nodes if e.get("text") == "Add" and e.get("class") == "android.widget.Button"]
    o["twenty_equal_candidates"] = adds
    o["twenty_first_candidate"] = adds[0]

    # deepest functional node containing the Share button centre; ties go to later pre-order
    nodes, w, h = walk(vh / "nested_clickable.xml")
    share = next(e for e, _, _ in nodes if e.get("text") == "Share")
    l, t, r, b = box(share)
    px, py = (l + r) / 2, (t + b) / 2
    hits = [(d, k, xp) for k, (e, xp, d) in enumerate(nodes)
            if functional(e, w, h) and box(e)[0] <= px <= box(e)[2] and box(e)[1] <= py <= box(e)[3]]
    o["nested_point"] = [px / w, py / h]
    o["nested_containing"] = [xp for _, _, xp in sorted(hits)]
    o["nested_target"] = sorted(hits)[-1][2]

    o["cos_microsoft_excel_vs_excel"] = cos("Microsoft Excel", "Excel")
    o["cos_microsoft_excel_vs_lower"] = cos("Microsoft Excel", "microsoft excel")
    o["excel_vs_excel_matches_at_085"] = o["cos_microsoft_excel_vs_excel"] >= 0.85

    ha, hb = simplified(vh / "bestbuy_cart_a.xml"), simplified(vh / "bestbuy_cart_b.xml")
    o["cart_a_vs_b_screen_score"] = cos(ha, hb)
    o["cart_a_vs_b_matches_at_085"] = o["cart_a_vs_b_screen_score"] >= 0.85

    # fuzzy textbox on the failed store search: best gt-text vs candidate-text score
    gt_step = fx / "store_search" / "gt" / "steps" / "0002" / "vh.xml"
    run_step = fx / "runs" / "agent" / "store_search" / "steps" / "0002" / "vh.xml"
    want = next(e.get("text") for e, _, _ in components(gt_step)[0]
                if e.get("resource-id") == "com.android.vending:id/search_bar_text")
    texts = [e.get("text") for e, _, _ in walk(run_step)[0] if e.get("text")]
    best = max(cos(want, t) for t in texts)
    o["store_search_failed_best_textbox_score"] = best
    o["store_search_failed_textbox_matches_at_085"] = best >= 0.85

    (fx / "oracles.json").write_text(json.dumps(o, indent=2, sort_keys=True) + "\n")
    print(json.dumps(o, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
