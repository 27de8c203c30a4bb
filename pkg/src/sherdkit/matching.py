"""Sliding alignment of thickness profiles by sum of absolute differences.

Profile B slides over profile A in whole-sample steps; every offset with
enough overlap is scored by mean absolute difference (SAD / overlap). The
scan is exhaustive, so results are exactly reproducible: the vectorized path
accumulates each diagonal in ascending index order, matching a plain
sequential loop bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NoFeasibleOffsetError,
    NoOverlapError,
    StepMismatchError,
    ValidationError,
)
from .profile import ThicknessProfile


@dataclass(frozen=True)
class MatchResult:
    """One candidate alignment of profile B against profile A.

    offset is the index of B's sample 0 on A's sample axis (may be
    negative); overlap counts compared sample pairs; sad is the sum of
    absolute differences over the overlap, score its mean. reversed_b marks
    that B was reversed before matching.
    """

    offset: int
    overlap: int
    sad: float
    score: float
    reversed_b: bool = False

    def __post_init__(self):
        if self.overlap < 1:
            raise ValidationError(f"overlap must be >= 1, got {self.overlap}")
        if self.sad < 0:
            raise ValidationError(f"sad must be >= 0, got {self.sad}")
        if abs(self.score - self.sad / self.overlap) > 1e-12:
            raise ValidationError("score must equal sad / overlap")

    def to_dict(self) -> dict:
        return {
            "offset": self.offset,
            "overlap": self.overlap,
            "sad": self.sad,
            "score": self.score,
            "reversed": self.reversed_b,
        }


@dataclass(frozen=True)
class MatchConfig:
    """Tunables for matching and acceptance.

    min_overlap: fewest compared pairs for an offset to count. Short
    overlaps carry too little thickness information to be meaningful.
    accept_threshold: largest acceptable mean absolute difference (mm),
    inclusive. allow_reversal additionally scans B reversed, for profiles of
    unknown orientation. top_k bounds the returned ranking.
    """

    min_overlap: int = 8
    accept_threshold: float = 0.15
    allow_reversal: bool = False
    top_k: int = 5

    def __post_init__(self):
        if self.min_overlap < 1:
            raise ValidationError(f"min_overlap must be >= 1, got {self.min_overlap}")
        if not (self.accept_threshold > 0):
            raise ValidationError(
                f"accept_threshold must be positive, got {self.accept_threshold}"
            )
        if self.top_k < 1:
            raise ValidationError(f"top_k must be >= 1, got {self.top_k}")

    def to_dict(self) -> dict:
        return {
            "min_overlap": self.min_overlap,
            "accept_threshold": self.accept_threshold,
            "allow_reversal": self.allow_reversal,
            "top_k": self.top_k,
        }


def _check_steps(a: ThicknessProfile, b: ThicknessProfile) -> None:
    if a.step != b.step:
        raise StepMismatchError(f"steps differ: {a.step} vs {b.step} mm")


def sad_at_offset(a: ThicknessProfile, b: ThicknessProfile, offset: int) -> MatchResult:
    """Score one alignment: B's sample 0 placed at A's index `offset`.

    Raises
    ------
    StepMismatchError
        If the profiles were sampled at different steps.
    NoOverlapError
        If the offset leaves no overlapping samples.
    """
    _check_steps(a, b)
    offset = int(offset)
    i0 = max(0, offset)
    i1 = min(len(a), offset + len(b))
    if i1 <= i0:
        raise NoOverlapError(
            f"offset {offset} gives no overlap for lengths {len(a)} and {len(b)}"
        )
    av = a.samples.tolist()
    bv = b.samples.tolist()
    sad = 0.0
    for i in range(i0, i1):
        sad += abs(av[i] - bv[i - offset])
    overlap = i1 - i0
    return MatchResult(offset=offset, overlap=overlap, sad=sad, score=sad / overlap)


# Diagonal-index arrays keyed by (len_a, len_b); these only depend on shape.
_DIAG_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _diag_index(n_a: int, n_b: int) -> np.ndarray:
    key = (n_a, n_b)
    idx = _DIAG_CACHE.get(key)
    if idx is None:
        # d = i - j + (n_b - 1) labels the diagonal of pair (i, j); row-major
        # flattening visits each diagonal in ascending i, the same order a
        # sequential per-offset loop uses.
        idx = np.add.outer(np.arange(n_a), np.arange(n_b - 1, -1, -1)).ravel()
        if len(_DIAG_CACHE) > 512:
            _DIAG_CACHE.clear()
        _DIAG_CACHE[key] = idx
    return idx


def _scan(a_arr: np.ndarray, b_arr: np.ndarray, min_overlap: int):
    """SAD and overlap for every offset with overlap >= min_overlap."""
    n_a, n_b = len(a_arr), len(b_arr)
    diffs = np.abs(np.subtract.outer(a_arr, b_arr)).ravel()
    sads = np.bincount(_diag_index(n_a, n_b), weights=diffs, minlength=n_a + n_b - 1)
    offsets = np.arange(-(n_b - 1), n_a)
    overlaps = np.minimum(n_a, offsets + n_b) - np.maximum(0, offsets)
    keep = overlaps >= min_overlap
    return offsets[keep], overlaps[keep], sads[keep]


def best_matches(
    a: ThicknessProfile, b: ThicknessProfile, cfg: MatchConfig = MatchConfig()
) -> list[MatchResult]:
    """Exhaustively scan all offsets and return the top_k ranked alignments.

    Ranking is ascending score, then larger overlap, then smaller |offset|,
    then non-reversed first; any remaining tie falls to the signed offset so
    the order is total.

    Raises
    ------
    StepMismatchError
        If the profiles were sampled at different steps.
    NoFeasibleOffsetError
        If either profile is shorter than cfg.min_overlap.
    """
    _check_steps(a, b)
    if len(a) < cfg.min_overlap or len(b) < cfg.min_overlap:
        raise NoFeasibleOffsetError(
            f"profiles of {len(a)} and {len(b)} samples cannot overlap by {cfg.min_overlap}"
        )
    a_arr = a.samples
    offsets, overlaps, sads = _scan(a_arr, b.samples, cfg.min_overlap)
    reversed_flags = np.zeros(len(offsets), dtype=bool)
    if cfg.allow_reversal:
        r_off, r_over, r_sad = _scan(a_arr, b.samples[::-1], cfg.min_overlap)
        offsets = np.concatenate([offsets, r_off])
        overlaps = np.concatenate([overlaps, r_over])
        sads = np.concatenate([sads, r_sad])
        reversed_flags = np.concatenate([reversed_flags, np.ones(len(r_off), dtype=bool)])

    scores = sads / overlaps
    order = np.lexsort((offsets, reversed_flags, np.abs(offsets), -overlaps, scores))
    top = order[: cfg.top_k]
    return [
        MatchResult(
            offset=int(offsets[i]),
            overlap=int(overlaps[i]),
            sad=float(sads[i]),
            score=float(scores[i]),
            reversed_b=bool(reversed_flags[i]),
        )
        for i in top
    ]


def is_acceptable(m: MatchResult, cfg: MatchConfig = MatchConfig()) -> bool:
    """True iff the match clears the (inclusive) score threshold and overlap floor."""
    return m.score <= cfg.accept_threshold and m.overlap >= cfg.min_overlap
