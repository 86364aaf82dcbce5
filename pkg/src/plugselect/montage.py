"""Built-in 2-D scalp coordinates for a 64-position 10-20/10-10 layout.

Coordinates live on a unit head circle (nose up): x grows to the right,
y toward the nose.  The two cerebellar leads sit just below the circle.
Lookup is case-insensitive so montage files with nonstandard casing
("FP1", "Poz") resolve to the same positions.
"""
from __future__ import annotations

import math

from .errors import ConfigError

_RING_DEG = {
    "Fp1": -18.0, "Fp2": 18.0,
    "AF7": -36.0, "AF8": 36.0,
    "F7": -54.0, "F8": 54.0,
    "FT7": -72.0, "FT8": 72.0,
    "T7": -90.0, "T8": 90.0,
    "TP7": -108.0, "TP8": 108.0,
    "P7": -126.0, "P8": 126.0,
    "PO7": -144.0, "PO8": 144.0,
    "O1": -162.0, "O2": 162.0,
}

_MIDLINE_Y = {
    "Fpz": 1.0, "Fz": 0.5, "FCz": 0.25, "Cz": 0.0,
    "CPz": -0.25, "Pz": -0.5, "POz": -0.75, "Oz": -1.0,
}

# inner rows: (midline anchor, left ring anchor, labels at increasing
# fractions toward the ring); right side mirrors in x
_ROWS = [
    ("Fpz", "AF7", [("AF3", 0.5)]),  # AF row interpolates toward a virtual AFz
    ("Fz", "F7", [("F1", 0.25), ("F3", 0.5), ("F5", 0.75)]),
    ("FCz", "FT7", [("FC1", 0.25), ("FC3", 0.5), ("FC5", 0.75)]),
    ("Cz", "T7", [("C1", 0.25), ("C3", 0.5), ("C5", 0.75)]),
    ("CPz", "TP7", [("CP1", 0.25), ("CP3", 0.5), ("CP5", 0.75)]),
    ("Pz", "P7", [("P1", 0.25), ("P3", 0.5), ("P5", 0.75)]),
    ("POz", "PO7", [("PO3", 1 / 3), ("PO5", 2 / 3)]),
]


def _build_positions() -> dict[str, tuple[float, float]]:
    pos: dict[str, tuple[float, float]] = {}
    for label, deg in _RING_DEG.items():
        rad = math.radians(deg)
        pos[label] = (math.sin(rad), math.cos(rad))
    for label, y in _MIDLINE_Y.items():
        pos[label] = (0.0, y)
    for mid, ring, inner in _ROWS:
        mx, my = pos[mid]
        if mid == "Fpz":  # AF row anchors between Fpz and Oz heights
            my = 0.75
            mx = 0.0
        rx, ry = pos[ring]
        for label, frac in inner:
            x = mx + frac * (rx - mx)
            y = my + frac * (ry - my)
            pos[label] = (x, y)
            mirror = label[:-1] + str(int(label[-1]) + 1)
            pos[mirror] = (-x, y)
    pos["CB1"] = (-0.42, -1.05)
    pos["CB2"] = (0.42, -1.05)
    return pos


POSITIONS: dict[str, tuple[float, float]] = _build_positions()
_BY_UPPER = {name.upper(): name for name in POSITIONS}

# front-to-back, left-to-right ordering used for default channel names
CANONICAL_64: tuple[str, ...] = (
    "Fp1", "Fpz", "Fp2",
    "AF7", "AF3", "AF4", "AF8",
    "F7", "F5", "F3", "F1", "Fz", "F2", "F4", "F6", "F8",
    "FT7", "FC5", "FC3", "FC1", "FCz", "FC2", "FC4", "FC6", "FT8",
    "T7", "C5", "C3", "C1", "Cz", "C2", "C4", "C6", "T8",
    "TP7", "CP5", "CP3", "CP1", "CPz", "CP2", "CP4", "CP6", "TP8",
    "P7", "P5", "P3", "P1", "Pz", "P2", "P4", "P6", "P8",
    "PO7", "PO5", "PO3", "POz", "PO4", "PO6", "PO8",
    "O1", "Oz", "O2",
    "CB1", "CB2",
)


def lookup(label: str) -> tuple[float, float]:
    """Return the (x, y) position for an electrode label (case-insensitive)."""
    canon = _BY_UPPER.get(label.upper())
    if canon is None:
        raise ConfigError(
            f"electrode label {label!r} is not in the built-in coordinate "
            f"table; pass explicit coordinates for it"
        )
    return POSITIONS[canon]


def default_channel_labels(n_channels: int) -> list[str]:
    """Channel names for generated data: 10-20 labels when they suffice."""
    if n_channels <= len(CANONICAL_64):
        return list(CANONICAL_64[:n_channels])
    return [f"CH{i + 1:02d}" for i in range(n_channels)]
