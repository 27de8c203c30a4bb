"""Bundled reference thickness profiles of five real sherds.

Five neighboring wall sherds of one intentionally broken vessel, measured
every 1 mm. These ship as regression fixtures: matching and assembly results
on them are pinned by tests. Values are exact as published (dot decimal).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .profile import ThicknessProfile, save_profile

# Display color per sherd id, used by the report plots.
FIXTURE_COLORS = {
    "A4": "fuchsia",
    "A5": "red",
    "B10": "blue",
    "C2": "purple",
    "C15": "green",
}

_DATA = {
    "A4": (
        5.44, 5.56, 5.41, 5.44, 5.28, 5.34, 5.34, 5.46, 5.56, 5.36,
        5.34, 6.33, 5.38, 5.44, 5.40, 5.40, 5.33, 5.26, 5.06, 4.99,
        5.12, 5.80, 6.07, 5.98, 5.91, 5.88, 5.80, 5.70, 5.56, 5.56,
        5.46, 5.37, 5.31, 5.37, 5.50, 5.57, 5.61, 5.36, 5.21, 5.14,
        5.16, 5.86, 6.04, 6.01, 6.13, 6.18, 6.16, 6.16, 6.18, 6.16,
        6.20, 6.26, 6.34, 6.74, 6.94, 7.08, 7.13, 7.23, 7.56, 7.58,
        7.62,
    ),
    "A5": (
        5.94, 5.94, 5.86, 5.80, 5.74, 5.73, 5.62, 5.46, 5.42, 5.38,
        5.32, 5.23, 5.13, 5.01, 4.97, 4.83, 4.77, 4.81, 4.88, 4.95,
        5.01, 5.12, 5.24, 5.22, 5.14, 5.10, 5.11, 5.18, 5.32, 5.30,
        5.28, 5.30, 5.32, 5.28, 5.34, 5.21, 5.24, 5.27, 5.25, 5.26,
        5.28, 5.20, 5.06, 5.01, 5.08, 5.52, 5.83, 6.07, 5.99, 5.96,
        5.86, 5.66, 5.54, 5.39, 5.33, 5.32, 5.32,
    ),
    "B10": (
        5.81, 5.74, 5.72, 5.68, 5.62, 5.63, 5.54, 5.53, 5.38, 5.30,
        5.24, 5.26, 5.24, 5.22, 5.21, 5.15, 5.10, 5.08, 4.86, 4.81,
        4.90, 4.94, 5.02, 5.08, 5.19, 5.28, 5.26, 5.16, 5.16, 5.16,
        5.28, 5.30, 5.33, 5.33, 5.36, 5.23,
    ),
    "C2": (
        4.94, 4.98, 4.96, 5.02, 5.07, 5.22, 5.23, 5.20, 5.13, 5.15,
        5.21, 5.32, 5.32, 5.34, 5.46, 5.39, 5.31,
    ),
    "C15": (
        5.26, 5.20, 5.22, 5.21, 5.10, 4.96, 4.90, 5.02, 5.60, 5.72,
        5.86, 5.86, 5.86, 5.72, 5.70,
    ),
}

FIXTURE_IDS = tuple(sorted(_DATA))


def fixture_profile(sherd_id: str) -> ThicknessProfile:
    """The bundled profile for one sherd id (A4, A5, B10, C2, C15)."""
    return ThicknessProfile(np.asarray(_DATA[sherd_id]), step=1.0, sherd_id=sherd_id)


def fixture_profiles() -> list[ThicknessProfile]:
    """All five bundled profiles, ordered by sherd id."""
    return [fixture_profile(sid) for sid in FIXTURE_IDS]


def write_fixture_files(directory) -> list[Path]:
    """Write the fixtures as <id>.tp.json files; returns the paths written."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for p in fixture_profiles():
        path = directory / f"{p.sherd_id}.tp.json"
        save_profile(p, path)
        paths.append(path)
    return paths
