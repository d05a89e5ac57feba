"""Tiny layout DSL for writing UIAutomator-style view hierarchies by hand.

Elements stack vertically (``layout="v"``) or split their width evenly
(``layout="h"``). Nothing is clamped to the screen, so rows pushed past the
bottom edge end up invisible, like off-screen list items in a real dump.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

W, H = 1080, 2400

CLASSES = {
    "Frame": "android.widget.FrameLayout",
    "Linear": "android.widget.LinearLayout",
    "Recycler": "androidx.recyclerview.widget.RecyclerView",
    "Text": "android.widget.TextView",
    "Button": "android.widget.Button",
    "Edit": "android.widget.EditText",
    "Switch": "android.widget.Switch",
    "Check": "android.widget.CheckBox",
    "Image": "android.widget.ImageView",
    "ImageButton": "android.widget.ImageButton",
    "View": "android.view.View",
}

FLAGS = ("checkable", "checked", "clickable", "enabled", "focusable", "focused", "scrollable",
         "long-clickable", "password", "selected")


def E(cls, text="", rid="", desc="", kids=(), h=140, layout="v", pad=0, **flags):
    flags = {k.replace("_", "-"): v for k, v in flags.items()}
    flags.setdefault("enabled", True)
    if cls in ("Edit", "Button", "ImageButton", "Switch", "Check"):
        flags.setdefault("focusable", True)
    if cls in ("Switch", "Check"):
        flags.setdefault("checkable", True)
    return {"cls": CLASSES.get(cls, cls), "text": text, "rid": rid, "desc": desc, "kids": list(kids),
            "h": h, "layout": layout, "pad": pad, "flags": flags}


def gap(h=40):
    return E("View", h=h, enabled=False)


def _place(e, box):
    e["bounds"] = box
    left, top, right, _ = box
    pad = e["pad"]
    left, right = left + pad, right - pad
    kids = e["kids"]
    if not kids:
        return
    if e["layout"] == "v":
        y = top
        for k in kids:
            _place(k, (left, y, right, y + k["h"]))
            y += k["h"]
    else:
        width = (right - left) // len(kids)
        for i, k in enumerate(kids):
            r = right if i == len(kids) - 1 else left + (i + 1) * width
            _place(k, (left + i * width, top, r, top + e["bounds"][3] - e["bounds"][1]))


def _xml(e, package, index, out):
    attrs = [("index", str(index)), ("text", e["text"]), ("resource-id", e["rid"]), ("class", e["cls"]),
             ("package", package), ("content-desc", e["desc"])]
    attrs += [(f, "true" if e["flags"].get(f) else "false") for f in FLAGS]
    left, top, right, bottom = e["bounds"]
    attrs.append(("bounds", f"[{left},{top}][{right},{bottom}]"))
    a = " ".join(f'{k}="{escape(v, {chr(34): "&quot;"})}"' for k, v in attrs)
    if not e["kids"]:
        out.append(f"<node {a} />")
        return
    out.append(f"<node {a}>")
    for i, k in enumerate(e["kids"]):
        _xml(k, package, i, out)
    out.append("</node>")


def page(package, kids, extra_roots=()):
    """A full-screen hierarchy; ``extra_roots`` are (package, element, bounds) overlay windows."""
    root = E("Frame", kids=kids)
    _place(root, (0, 0, W, H))
    out = ["<?xml version='1.0' encoding='UTF-8' standalone='yes' ?>", '<hierarchy rotation="0">']
    _xml(root, package, 0, out)
    for i, (pkg, extra, box) in enumerate(extra_roots, start=1):
        _place(extra, box)
        _xml(extra, pkg, i, out)
    out.append("</hierarchy>")
    return "".join(out)
