"""Deterministic JSON file output: sorted keys, floats rounded to 4 places."""

from __future__ import annotations

import json
from pathlib import Path


def rounded(obj, ndigits: int = 4):
    """Copy of a JSON-ready structure with every float rounded."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return round(obj, ndigits)
    if isinstance(obj, dict):
        return {k: rounded(v, ndigits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v, ndigits) for v in obj]
    return obj


def write_json(path, obj, ndigits: int = 4) -> None:
    """Write obj as stable JSON: rounded floats, sorted keys, 2-space indent."""
    text = json.dumps(rounded(obj, ndigits), sort_keys=True, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")
