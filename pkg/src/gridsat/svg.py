"""SVG drawings of grid layouts (20 px per grid unit, row 1 at the top)."""
from __future__ import annotations

import xml.etree.ElementTree as ET

from .encoders.base import BoxLayout, Layout2D

UNIT = 20
VERTEX_FILL = "#222222"
EDGE_FILL = "#bbbbbb"
BOX_FILL = "#4477aa"


def _canvas(width_units: int, height_units: int, grid: bool) -> ET.Element:
    root = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": str(width_units * UNIT),
        "height": str(height_units * UNIT),
        "viewBox": f"0 0 {width_units * UNIT} {height_units * UNIT}",
    })
    if grid:
        g = ET.SubElement(root, "g", {"class": "grid", "stroke": "#eeeeee", "stroke-width": "1"})
        for x in range(width_units + 1):
            ET.SubElement(g, "line", {"x1": str(x * UNIT), "y1": "0",
                                      "x2": str(x * UNIT), "y2": str(height_units * UNIT)})
        for y in range(height_units + 1):
            ET.SubElement(g, "line", {"x1": "0", "y1": str(y * UNIT),
                                      "x2": str(width_units * UNIT), "y2": str(y * UNIT)})
    return root


def _rect(parent, x, y, w, h, fill, cls, ident, opacity=None):
    attrs = {"x": str(x), "y": str(y), "width": str(w), "height": str(h),
             "fill": fill, "class": cls, "data-id": ident}
    if opacity is not None:
        attrs["fill-opacity"] = opacity
    return ET.SubElement(parent, "rect", attrs)


def layout2d_svg(layout: Layout2D, grid: bool = False) -> str:
    root = _canvas(layout.width, layout.height, grid)
    # edges first so vertex bars are drawn on top
    for (u, w), (c, r0, r1) in sorted(layout.edge_bars.items()):
        x = (c - 1) * UNIT + UNIT * 3 // 8
        y = (r0 - 1) * UNIT + UNIT // 2
        _rect(root, x, y, UNIT // 4, (r1 - r0) * UNIT, EDGE_FILL, "edge", f"{u}-{w}")
    for v, (r, c0, c1) in sorted(layout.vertex_bars.items()):
        y = (r - 1) * UNIT + UNIT // 4
        _rect(root, (c0 - 1) * UNIT, y, (c1 - c0 + 1) * UNIT, UNIT // 2, VERTEX_FILL, "vertex", str(v))
    return ET.tostring(root, encoding="unicode")


def boxes_svg(layout: BoxLayout, grid: bool = False) -> str:
    """Two-dimensional box layouts only; dimension 0 is drawn vertically."""
    root = _canvas(layout.side, layout.side, grid)
    for v, box in sorted(layout.boxes.items()):
        if len(box.bounds) != 2:
            raise ValueError("only 2-dimensional box layouts can be drawn")
        (r0, r1), (c0, c1) = box.bounds
        _rect(root, (c0 - 1) * UNIT, (r0 - 1) * UNIT, (c1 - c0 + 1) * UNIT, (r1 - r0 + 1) * UNIT,
              BOX_FILL, "box", str(v), opacity="0.4")
    return ET.tostring(root, encoding="unicode")
