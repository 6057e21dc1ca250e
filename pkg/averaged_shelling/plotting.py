from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .shelling import shellRecord

PANEL_WIDTH = 400
PANEL_HEIGHT = 300
MARGIN = 50
TICKS = 5


def _nice_max(value: float) -> float:
    return value * 1.05 if value > 0 else 1.0


def _panel(
    values: Sequence[tuple[float, float]],
    offset: float,
    xlabel: str,
    ylabel: str,
) -> str:
    """One scatter panel; markers carry their data as data-value="x,y"."""
    xmax = _nice_max(max(x for x, _ in values))
    ymax = _nice_max(max(y for _, y in values))
    left = offset + MARGIN
    bottom = MARGIN + PANEL_HEIGHT

    def sx(x: float) -> float:
        return left + PANEL_WIDTH * x / xmax

    def sy(y: float) -> float:
        return bottom - PANEL_HEIGHT * y / ymax

    parts = [
        '<g class="panel">',
        f'<line x1="{left:.2f}" y1="{bottom:.2f}" x2="{left + PANEL_WIDTH:.2f}" y2="{bottom:.2f}" stroke="black"/>',
        f'<line x1="{left:.2f}" y1="{bottom:.2f}" x2="{left:.2f}" y2="{MARGIN:.2f}" stroke="black"/>',
    ]
    for k in range(TICKS + 1):
        tx = xmax * k / TICKS
        ty = ymax * k / TICKS
        parts.append(
            f'<text x="{sx(tx):.2f}" y="{bottom + 15:.2f}" font-size="10" text-anchor="middle">{tx:.3g}</text>'
        )
        parts.append(
            f'<text x="{left - 5:.2f}" y="{sy(ty) + 3:.2f}" font-size="10" text-anchor="end">{ty:.3g}</text>'
        )
    parts.append(
        f'<text x="{left + PANEL_WIDTH / 2:.2f}" y="{bottom + 35:.2f}" font-size="12" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="{left - 35:.2f}" y="{MARGIN + PANEL_HEIGHT / 2:.2f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 {left - 35:.2f} {MARGIN + PANEL_HEIGHT / 2:.2f})">{ylabel}</text>'
    )
    for x, y in values:
        parts.append(
            f'<circle class="marker" cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" data-value="{x!r},{y!r}"/>'
        )
    parts.append("</g>")
    return "\n".join(parts)


def render_svg(records: Sequence[shellRecord], title: str = "") -> str:
    """
    Scatter plots of a shelling table: sigma against r on the left and
    against r_int on the right.

    Parameters
    ----------
    records : sequence of shellRecord
        The shells to plot, at least one.
    title : str, optional
        Caption written above the panels.
        default = ""

    Returns
    -------
    str
        A self-contained SVG document; the same records give the same text.
    """
    if not records:
        raise ValueError("cannot plot an empty shelling table")
    width = 2 * (PANEL_WIDTH + 2 * MARGIN)
    height = PANEL_HEIGHT + 2 * MARGIN + 20
    physical = _panel(
        [(rec.r, rec.sigma_float) for rec in records], 0, "r", "sigma(r)"
    )
    internal = _panel(
        [(rec.r_int, rec.sigma_float) for rec in records],
        PANEL_WIDTH + 2 * MARGIN,
        "r_int",
        "sigma(r)",
    )
    return f"""<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg width="{width}" height="{height}" viewBox="0 0 {width} {height}" xmlns="http://www.w3.org/2000/svg">
<text x="{width / 2:.2f}" y="25" font-size="14" text-anchor="middle">{escape(title)}</text>
{physical}
{internal}
</svg>
"""


def render_points_svg(coords: np.ndarray, title: str = "") -> str:
    """
    Plot of a point patch read back from a point-set dump.

    Parameters
    ----------
    coords : numpy.ndarray
        Physical coordinates, one row per point; a single column is drawn
        on the horizontal axis.
    title : str, optional
        default = ""

    Returns
    -------
    str
        A self-contained SVG document with one marker per point.
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or len(coords) == 0:
        raise ValueError("cannot plot an empty point patch")
    if coords.shape[1] == 1:
        coords = np.hstack([coords, np.zeros_like(coords)])
    extent = _nice_max(float(np.abs(coords[:, :2]).max()))
    size = PANEL_HEIGHT + 2 * MARGIN
    half = PANEL_HEIGHT / 2
    centre = MARGIN + half
    parts = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg width="{size}" height="{size + 20}" viewBox="0 0 {size} {size + 20}" '
        'xmlns="http://www.w3.org/2000/svg">',
        f'<text x="{size / 2:.2f}" y="25" font-size="14" text-anchor="middle">{escape(title)}</text>',
        '<g class="patch">',
    ]
    for x, y in coords[:, :2].tolist():
        parts.append(
            f'<circle class="point" cx="{centre + half * x / extent:.2f}" '
            f'cy="{20 + centre - half * y / extent:.2f}" r="1.5" data-value="{x!r},{y!r}"/>'
        )
    parts.extend(["</g>", "</svg>", ""])
    return "\n".join(parts)
