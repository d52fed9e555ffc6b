"""
SVG Rendering
=============

Minimal line plots and heatmaps written as standalone SVG documents.
"""

import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

WIDTH = 640
HEIGHT = 240
MARGIN = 40
MAX_ROWS = 64
MAX_COLS = 200
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _document(width: int, height: int, title: str) -> ET.Element:
    root = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(width),
        height=str(height),
        viewBox=f"0 0 {width} {height}",
    )
    ET.SubElement(root, "rect", x="0", y="0", width=str(width), height=str(height), fill="white")
    text = ET.SubElement(root, "text", x=str(MARGIN), y="20", attrib={"font-size": "14"})
    text.text = title
    return root


def _write(root: ET.Element, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)
    return path


def _scale(values: np.ndarray, lo: float, hi: float, out_lo: float, out_hi: float) -> np.ndarray:
    span = hi - lo if hi > lo else 1.0
    return out_lo + (values - lo) / span * (out_hi - out_lo)


def line_plot(
    path: Union[str, Path],
    x: np.ndarray,
    series: Mapping[str, np.ndarray],
    title: str = "",
    max_points: int = 2000,
) -> Path:
    """One polyline per series on shared axes; long series are decimated."""
    root = _document(WIDTH, HEIGHT, title)
    x = np.asarray(x, dtype=np.float64)
    step = max(1, x.size // max_points)
    xs = x[::step]
    stacked = np.concatenate([np.asarray(v, dtype=np.float64)[::step] for v in series.values()])
    y_lo, y_hi = float(np.min(stacked)), float(np.max(stacked))
    px = _scale(xs, float(xs[0]), float(xs[-1]), MARGIN, WIDTH - MARGIN)

    for i, (name, values) in enumerate(series.items()):
        py = _scale(np.asarray(values, dtype=np.float64)[::step], y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
        points = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(px, py))
        color = PALETTE[i % len(PALETTE)]
        ET.SubElement(root, "polyline", points=points, fill="none", stroke=color, attrib={"stroke-width": "1"})
        label = ET.SubElement(root, "text", x=str(WIDTH - MARGIN - 120), y=str(20 + 14 * i), fill=color, attrib={"font-size": "11"})
        label.text = name
    return _write(root, path)


def _pool(matrix: np.ndarray, max_rows: int, max_cols: int) -> np.ndarray:
    row_blocks = np.array_split(np.arange(matrix.shape[0]), min(matrix.shape[0], max_rows))
    col_blocks = np.array_split(np.arange(matrix.shape[1]), min(matrix.shape[1], max_cols))
    return np.array([[matrix[np.ix_(r, c)].mean() for c in col_blocks] for r in row_blocks])


def heatmap(
    path: Union[str, Path],
    matrix: np.ndarray,
    title: str = "",
    vmax: Optional[float] = None,
) -> Path:
    """Grayscale heatmap, row 0 at the top; darker is larger. Large maps are block-averaged."""
    matrix = _pool(np.asarray(matrix, dtype=np.float64), MAX_ROWS, MAX_COLS)
    rows, cols = matrix.shape
    root = _document(WIDTH, HEIGHT, title)
    cell_w = (WIDTH - 2 * MARGIN) / max(cols, 1)
    cell_h = (HEIGHT - 2 * MARGIN) / max(rows, 1)
    top = float(vmax if vmax is not None else np.max(matrix))
    shade = np.zeros_like(matrix) if top <= 0 else np.clip(matrix / top, 0.0, 1.0)
    for r in range(rows):
        for c in range(cols):
            level = int(round(255 * (1.0 - shade[r, c])))
            ET.SubElement(
                root,
                "rect",
                x=f"{MARGIN + c * cell_w:.2f}",
                y=f"{MARGIN + r * cell_h:.2f}",
                width=f"{cell_w:.2f}",
                height=f"{cell_h:.2f}",
                fill=f"rgb({level},{level},{level})",
            )
    return _write(root, path)
