"""Thickness profile data model and its JSON / CSV file formats.

A profile is an ordered run of wall-thickness samples (mm) at a fixed
arc-length step, oriented base to rim. Files use either a JSON document
{sherd_id, step_mm, samples_mm, origin_height_mm?} or a bare CSV with one
value per line (dot decimal separator). Written floats are rounded to 4
decimal places so identical data always serializes byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError


@dataclass(frozen=True, eq=False)
class ThicknessProfile:
    """Wall-thickness samples along a meridian, base first.

    Parameters
    ----------
    samples : (n,) array_like of float
        Thickness in mm; all positive and finite, n >= 1.
    step : float
        Arc-length distance between consecutive samples, mm.
    sherd_id : str
        Identifier of the source sherd.
    origin_height : float or None
        Height of sample 0 above the vessel base, when known (synthetic
        data); None for real sherds.
    """

    samples: np.ndarray
    step: float = 1.0
    sherd_id: str = ""
    origin_height: float | None = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1 or len(s) < 1:
            raise ValidationError(f"samples must be a non-empty 1D sequence, got shape {s.shape}")
        if not np.isfinite(s).all():
            raise ValidationError("samples must be finite")
        if (s <= 0).any():
            raise ValidationError("samples must be positive thickness values")
        if not (self.step > 0):
            raise ValidationError(f"step must be positive, got {self.step}")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    def __len__(self) -> int:
        return len(self.samples)

    def with_id(self, sherd_id: str) -> "ThicknessProfile":
        return replace(self, sherd_id=sherd_id)

    def to_dict(self) -> dict:
        d = {
            "sherd_id": self.sherd_id,
            "step_mm": round(float(self.step), 4),
            "samples_mm": [round(float(x), 4) for x in self.samples],
        }
        if self.origin_height is not None:
            d["origin_height_mm"] = round(float(self.origin_height), 4)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ThicknessProfile":
        try:
            return cls(
                samples=np.asarray(d["samples_mm"], dtype=np.float64),
                step=float(d.get("step_mm", 1.0)),
                sherd_id=str(d.get("sherd_id", "")),
                origin_height=(
                    float(d["origin_height_mm"]) if "origin_height_mm" in d else None
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad profile document: {exc}") from None


def _profile_stem(path: Path) -> str:
    stem = path.stem
    if stem.endswith(".tp"):
        stem = stem[:-3]
    return stem


def save_profile(profile: ThicknessProfile, path) -> None:
    """Write a profile as JSON (.json) or CSV (.csv), chosen by extension."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        text = "".join(f"{x:.4f}\n" for x in profile.samples)
        path.write_text(text, encoding="ascii")
    elif path.suffix.lower() == ".json":
        path.write_text(
            json.dumps(profile.to_dict(), sort_keys=True, indent=2) + "\n",
            encoding="ascii",
        )
    else:
        raise ValueError(f"cannot infer profile format from {path.name!r}")


def load_profile(path) -> ThicknessProfile:
    """Read a profile written by :func:`save_profile`.

    CSV carries no metadata: the sherd id falls back to the file stem
    (minus a '.tp' tag) and the step to 1.0 mm.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        samples = []
        for lineno, line in enumerate(path.read_text(encoding="ascii").splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            try:
                samples.append(float(line))
            except ValueError:
                raise ParseError(f"{path.name}: line {lineno}: not a number: {line!r}") from None
        if not samples:
            raise ParseError(f"{path.name}: no samples")
        return ThicknessProfile(np.asarray(samples), sherd_id=_profile_stem(path))
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path.name}: line {exc.lineno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise ParseError(f"{path.name}: expected a JSON object")
        p = ThicknessProfile.from_dict(doc)
        if not p.sherd_id:
            p = p.with_id(_profile_stem(path))
        return p
    raise ValueError(f"cannot infer profile format from {path.name!r}")


def load_profile_dir(directory) -> list[ThicknessProfile]:
    """Load every *.json / *.csv profile in a directory, sorted by sherd id."""
    directory = Path(directory)
    profiles = [
        load_profile(p)
        for p in sorted(directory.iterdir())
        if p.suffix.lower() in (".json", ".csv")
    ]
    return sorted(profiles, key=lambda p: p.sherd_id)
