"""Scalp-map SVG: one disc per electrode, shaded by attribution magnitude.

Positions come from the built-in 10-20 coordinate table unless the
caller supplies explicit coordinates.  Fill intensity is |score| scaled
by the maximum magnitude (all-zero scores render uniformly white), and
selected channels get a heavy dark outline.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .. import montage
from ..errors import ConfigError

_CX, _CY, _SCALE = 200.0, 210.0, 155.0
_FILL_RGB = (178, 24, 43)  # deep red at intensity 1; white at 0


def _svg_xy(x: float, y: float) -> tuple[float, float]:
    return _CX + x * _SCALE, _CY - y * _SCALE


def _fill(intensity: float) -> str:
    r = round(255 + (_FILL_RGB[0] - 255) * intensity)
    g = round(255 + (_FILL_RGB[1] - 255) * intensity)
    b = round(255 + (_FILL_RGB[2] - 255) * intensity)
    return f"rgb({r},{g},{b})"


def emit_topomap_svg(
    scores,
    channel_labels: list[str] | tuple[str, ...],
    path: str | Path,
    selected: set[int] | None = None,
    coords: dict[str, tuple[float, float]] | None = None,
) -> Path:
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.shape[0] != len(channel_labels):
        raise ConfigError(
            f"{len(channel_labels)} labels for score vector of shape "
            f"{scores.shape}"
        )
    if not np.all(np.isfinite(scores)):
        raise ConfigError("scores contain non-finite values")
    selected = selected or set()
    for i in selected:
        if not 0 <= i < scores.shape[0]:
            raise ConfigError(f"selected index {i} out of range")
    coords = coords or {}
    positions = []
    for label in channel_labels:
        if label in coords:
            positions.append(coords[label])
        else:
            positions.append(montage.lookup(label))

    peak = float(np.max(np.abs(scores))) if scores.size else 0.0
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="400" height="430" '
        'viewBox="0 0 400 430">',
        '<rect width="400" height="430" fill="white"/>',
        # head outline, nose, ears
        f'<circle cx="{_CX:.1f}" cy="{_CY:.1f}" r="{_SCALE + 12:.1f}" '
        'fill="none" stroke="#222" stroke-width="2"/>',
        f'<path d="M {_CX - 14:.1f} {_CY - _SCALE - 10:.1f} '
        f'L {_CX:.1f} {_CY - _SCALE - 30:.1f} '
        f'L {_CX + 14:.1f} {_CY - _SCALE - 10:.1f}" '
        'fill="none" stroke="#222" stroke-width="2"/>',
        f'<path d="M {_CX - _SCALE - 12:.1f} {_CY - 18:.1f} '
        f'q -14 18 0 36" fill="none" stroke="#222" stroke-width="2"/>',
        f'<path d="M {_CX + _SCALE + 12:.1f} {_CY - 18:.1f} '
        f'q 14 18 0 36" fill="none" stroke="#222" stroke-width="2"/>',
    ]
    for i, (label, (x, y)) in enumerate(zip(channel_labels, positions)):
        sx, sy = _svg_xy(x, y)
        intensity = abs(float(scores[i])) / peak if peak > 0 else 0.0
        if i in selected:
            stroke, width = "#111", 3.0
        else:
            stroke, width = "#888", 1.0
        parts.append(
            f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="12" '
            f'fill="{_fill(intensity)}" stroke="{stroke}" '
            f'stroke-width="{width:.1f}"/>'
        )
        parts.append(
            f'<text x="{sx:.2f}" y="{sy + 2.6:.2f}" font-size="7" '
            f'font-family="sans-serif" text-anchor="middle" '
            f'fill="#222">{label}</text>'
        )
    parts.append("</svg>")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return out
