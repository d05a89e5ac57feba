"""Wireframe screenshots for simulated screens.

Matching never looks at pixels, so a screenshot only has to be a faithful
enough picture for a human annotator: component boxes and their labels.
"""

from __future__ import annotations

import io

from PIL import Image, ImageDraw, ImageFont

from ..vh import UiTree

SCALE = 0.25


def render_screenshot(tree: UiTree, background: str = "#ffffff", scale: float = SCALE) -> bytes:
    w, h = max(1, round(tree.screen_w * scale)), max(1, round(tree.screen_h * scale))
    img = Image.new("RGB", (w, h), background)
    draw = ImageDraw.Draw(img)
    font = ImageFont.load_default()
    for _, node in tree.components:
        left, top, right, bottom = (round(v * scale) for v in node.bounds)
        fill = "#dde8f7" if node.flag("clickable") else None
        if "Switch" in node.cls or "CheckBox" in node.cls:
            fill = "#7bc67b" if node.flag("checked") else "#cccccc"
        draw.rectangle((left, top, max(left, right - 1), max(top, bottom - 1)), outline="#555555", fill=fill)
        label = node.text or node.content_desc
        if label:
            draw.text((left + 3, top + 2), label[:40], fill="#111111", font=font)
    buf = io.BytesIO()
    img.save(buf, format="PNG", optimize=False)
    return buf.getvalue()
