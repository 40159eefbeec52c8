"""Deterministic SVG scatter plots of 2-D embeddings."""

from __future__ import annotations

from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
MARGIN = 40
INLIER_COLOR = "#8c8c8c"
OUTLIER_COLOR = "#d62728"


def _num(x: float) -> str:
    # fixed precision keeps output byte-stable across platforms
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def scatter_svg(coords, ranks, flags: Optional[np.ndarray] = None, top: int = 10,
                title: Optional[str] = None) -> str:
    """Render the first two coordinate columns.

    Points flagged as structural outliers are red, all others grey. The
    ``top`` highest-ranked points carry their rank as a text label.
    """
    xy = np.asarray(coords, dtype=float)
    if xy.ndim != 2 or xy.shape[1] < 2:
        raise ValueError("need at least 2 embedding columns to plot")
    xy = xy[:, :2]
    ranks = np.asarray(ranks, dtype=int)
    flags = np.zeros(len(xy), dtype=bool) if flags is None else np.asarray(flags, dtype=bool)

    lo, hi = xy.min(axis=0), xy.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    px = MARGIN + (xy[:, 0] - lo[0]) / span[0] * (WIDTH - 2 * MARGIN)
    py = HEIGHT - MARGIN - (xy[:, 1] - lo[1]) / span[1] * (HEIGHT - 2 * MARGIN)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="16">{escape(title)}</text>')
    # inliers first so outliers stay visible on top
    for i in np.r_[np.flatnonzero(~flags), np.flatnonzero(flags)]:
        color = OUTLIER_COLOR if flags[i] else INLIER_COLOR
        out.append(f'<circle cx="{_num(px[i])}" cy="{_num(py[i])}" r="4" fill="{color}" '
                   f'data-index="{i}" data-rank="{ranks[i]}"/>')
    for i in np.argsort(ranks, kind="stable")[:max(top, 0)]:
        out.append(f'<text x="{_num(px[i] + 6)}" y="{_num(py[i] - 6)}" font-family="sans-serif" '
                   f'font-size="11" class="rank">{ranks[i]}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
