"""Greedy human-in-the-loop reassembly of thickness profiles.

The longest profile seeds a growing meta-sherd. Each stage proposes the
best-matching pooled sherd; a human (or the auto harness) decides whether it
sits LEFT or RIGHT of the already-placed material — the one question
thickness data cannot answer — and the sherd's samples are merged into the
meta profile by running arithmetic mean.

State is event-sourced: an AssemblyState is an immutable value, commits
append to a decision log, and undo is literally "replay all but the last
decision", which makes replay determinism testable bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    EmptyInputError,
    NotACandidateError,
    NothingToUndoError,
    StepMismatchError,
    UnknownSherdError,
    ValidationError,
)
from .jsonio import write_json
from .matching import MatchConfig, MatchResult, best_matches, is_acceptable
from .profile import ThicknessProfile


class Side(str, Enum):
    LEFT = "LEFT"
    RIGHT = "RIGHT"
    UNDECIDED = "UNDECIDED"


class DecidedBy(str, Enum):
    HUMAN = "HUMAN"
    AUTO_SINGLETON = "AUTO_SINGLETON"


@dataclass(frozen=True)
class Placement:
    """A committed sherd: where it sits on the meta profile and which side.

    offset is in samples relative to the meta profile's sample 0 (always
    re-normalized to 0 after merges). The master carries side UNDECIDED with
    decided_by AUTO_SINGLETON: alone on the wheel, it has no left or right.
    """

    sherd_id: str
    offset: int
    side: Side
    score: float
    decided_by: DecidedBy

    def to_dict(self) -> dict:
        return {
            "sherd_id": self.sherd_id,
            "offset": self.offset,
            "side": self.side.value,
            "score": self.score,
            "decided_by": self.decided_by.value,
        }


@dataclass(frozen=True, eq=False)
class MetaSherd:
    """The merged profile and its bookkeeping.

    provenance counts contributors per sample; sample_sums keeps the raw
    accumulated sums so that profile == sample_sums / provenance exactly,
    commit after commit, replay after replay.
    """

    profile: ThicknessProfile
    members: tuple[Placement, ...]
    provenance: np.ndarray
    sample_sums: np.ndarray


@dataclass(frozen=True)
class CommitEvent:
    sherd_id: str
    side: Side
    override: bool = False

    def to_dict(self) -> dict:
        return {
            "event": "commit",
            "sherd_id": self.sherd_id,
            "side": self.side.value,
            "override": self.override,
        }


@dataclass(frozen=True, eq=False)
class Candidate:
    """A pooled sherd with its best alignment against the meta profile.

    match is None when the sherd is too short to overlap by min_overlap at
    all; such a candidate is listed (flagged rejected) but can never be
    committed. accepted mirrors is_acceptable on the match.
    """

    sherd_id: str
    match: MatchResult | None
    accepted: bool

    def to_dict(self) -> dict:
        return {
            "sherd_id": self.sherd_id,
            "match": None if self.match is None else self.match.to_dict(),
            "accepted": self.accepted,
        }


@dataclass(frozen=True, eq=False)
class AssemblyState:
    """Immutable snapshot of a reassembly session.

    profiles holds every input profile (the replay base); pool the not yet
    committed ones; candidates the current ranked proposals. log replays to
    exactly this state from init_assembly(profiles, config).
    """

    profiles: tuple[ThicknessProfile, ...]
    config: MatchConfig
    log: tuple[CommitEvent, ...]
    meta: MetaSherd
    pool: tuple[ThicknessProfile, ...]
    candidates: tuple[Candidate, ...]

    @property
    def complete(self) -> bool:
        return not self.pool


def _rank_candidates(
    meta_profile: ThicknessProfile,
    pool: Sequence[ThicknessProfile],
    cfg: MatchConfig,
) -> tuple[Candidate, ...]:
    cands = []
    for p in pool:
        if len(p) < cfg.min_overlap or len(meta_profile) < cfg.min_overlap:
            cands.append(Candidate(p.sherd_id, None, False))
            continue
        m = best_matches(meta_profile, p, cfg)[0]
        cands.append(Candidate(p.sherd_id, m, is_acceptable(m, cfg)))
    # unmatched candidates sink to the bottom; score ties break by sherd id
    cands.sort(
        key=lambda c: (c.match is None, c.match.score if c.match else 0.0, c.sherd_id)
    )
    return tuple(cands)


def init_assembly(
    profiles: Sequence[ThicknessProfile], cfg: MatchConfig = MatchConfig()
) -> AssemblyState:
    """Start a session: the profile with the most samples becomes the master.

    Ties on length fall to the lexicographically smallest sherd id.

    Raises
    ------
    EmptyInputError
        No profiles given.
    StepMismatchError
        Profiles sampled at different steps.
    ValidationError
        Duplicate sherd ids.
    """
    profiles = tuple(profiles)
    if not profiles:
        raise EmptyInputError("need at least one profile")
    steps = {p.step for p in profiles}
    if len(steps) > 1:
        raise StepMismatchError(f"profiles mix steps {sorted(steps)}")
    ids = [p.sherd_id for p in profiles]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise ValidationError(f"duplicate sherd id(s): {', '.join(dup)}")

    master = min(profiles, key=lambda p: (-len(p), p.sherd_id))
    pool = tuple(sorted((p for p in profiles if p is not master), key=lambda p: p.sherd_id))
    meta = MetaSherd(
        profile=ThicknessProfile(
            master.samples,
            step=master.step,
            sherd_id="meta",
            origin_height=master.origin_height,
        ),
        members=(
            Placement(master.sherd_id, 0, Side.UNDECIDED, 0.0, DecidedBy.AUTO_SINGLETON),
        ),
        provenance=np.ones(len(master), dtype=np.int64),
        sample_sums=master.samples.copy(),
    )
    return AssemblyState(
        profiles=profiles,
        config=cfg,
        log=(),
        meta=meta,
        pool=pool,
        candidates=_rank_candidates(meta.profile, pool, cfg),
    )


def propose_next(state: AssemblyState) -> tuple[Candidate, ...]:
    """Current ranked proposals (empty when the pool is empty).

    Candidates are precomputed at every state transition, so this is a pure
    snapshot read.
    """
    return state.candidates


def _apply_commit(state: AssemblyState, event: CommitEvent) -> AssemblyState:
    """Merge a validated commit into the meta-sherd. No checks here: commit()
    validates, replay() trusts its log."""
    cand = next(c for c in state.candidates if c.sherd_id == event.sherd_id)
    sherd = next(p for p in state.pool if p.sherd_id == event.sherd_id)
    meta = state.meta
    k = cand.match.offset
    meta_n = len(meta.profile)
    shift = max(0, -k)
    n = max(meta_n, k + len(sherd)) + shift
    sums = np.zeros(n)
    counts = np.zeros(n, dtype=np.int64)
    sums[shift : shift + meta_n] = meta.sample_sums
    counts[shift : shift + meta_n] = meta.provenance
    pos = k + shift
    sums[pos : pos + len(sherd)] += sherd.samples
    counts[pos : pos + len(sherd)] += 1

    origin = meta.profile.origin_height
    if origin is not None:
        origin = origin - shift * meta.profile.step
    new_profile = ThicknessProfile(
        sums / counts, step=meta.profile.step, sherd_id="meta", origin_height=origin
    )
    members = tuple(
        Placement(m.sherd_id, m.offset + shift, m.side, m.score, m.decided_by)
        for m in meta.members
    ) + (Placement(event.sherd_id, pos, event.side, cand.match.score, DecidedBy.HUMAN),)
    new_meta = MetaSherd(new_profile, members, counts, sums)
    new_pool = tuple(p for p in state.pool if p.sherd_id != event.sherd_id)
    return AssemblyState(
        profiles=state.profiles,
        config=state.config,
        log=state.log + (event,),
        meta=new_meta,
        pool=new_pool,
        candidates=_rank_candidates(new_profile, new_pool, state.config),
    )


def commit(
    state: AssemblyState, sherd_id: str, side: Side | str, override: bool = False
) -> AssemblyState:
    """Place the proposed sherd LEFT or RIGHT and merge its profile.

    Without override, only the best-ranked acceptable candidate may be
    committed. With override any listed candidate that has a match may be —
    the flag is recorded in the log.

    Raises
    ------
    UnknownSherdError
        sherd_id is not in the pool.
    NotACandidateError
        sherd_id is not the top acceptable candidate and override is not
        set, or the sherd has no feasible alignment at all.
    ValidationError
        side is not LEFT or RIGHT.
    """
    side = Side(side)
    if side not in (Side.LEFT, Side.RIGHT):
        raise ValidationError("side must be LEFT or RIGHT")
    cand = next((c for c in state.candidates if c.sherd_id == sherd_id), None)
    if cand is None:
        raise UnknownSherdError(f"sherd {sherd_id!r} is not in the pool")
    if cand.match is None:
        raise NotACandidateError(
            f"sherd {sherd_id!r} is too short to overlap by {state.config.min_overlap}"
        )
    if not override:
        top = next((c for c in state.candidates if c.accepted), None)
        if top is None or top.sherd_id != sherd_id:
            raise NotACandidateError(
                f"sherd {sherd_id!r} is not the top acceptable candidate; "
                "set override to commit it anyway"
            )
    return _apply_commit(state, CommitEvent(sherd_id, side, override))


def replay(
    profiles: Sequence[ThicknessProfile],
    cfg: MatchConfig,
    events: Sequence[CommitEvent],
) -> AssemblyState:
    """Fold a decision log over init_assembly. Deterministic, bit for bit."""
    state = init_assembly(profiles, cfg)
    for event in events:
        state = _apply_commit(state, event)
    return state


def undo(state: AssemblyState) -> AssemblyState:
    """Drop the last decision by replaying the rest of the log.

    Raises
    ------
    NothingToUndoError
        The log is empty.
    """
    if not state.log:
        raise NothingToUndoError("no decisions to undo")
    return replay(state.profiles, state.config, state.log[:-1])


def strip_order(state: AssemblyState) -> list[str]:
    """Sherd ids left-to-right: master in the middle, LEFT commits extend
    leftward, RIGHT commits rightward, in decision order."""
    strip = [state.meta.members[0].sherd_id]
    for event in state.log:
        if event.side is Side.LEFT:
            strip.insert(0, event.sherd_id)
        else:
            strip.append(event.sherd_id)
    return strip


def layout_dict(state: AssemblyState) -> dict:
    """Layout document: committed placements in strip order plus the merged
    profile (the thickness scale)."""
    placements = {m.sherd_id: m for m in state.meta.members}
    step = state.meta.profile.step
    sherds = []
    for order, sid in enumerate(strip_order(state)):
        m = placements[sid]
        sherds.append(
            {
                "sherd_id": sid,
                "offset_mm": m.offset * step,
                "order": order,
                "side": m.side.value,
                "score": m.score,
            }
        )
    return {
        "sherds": sherds,
        "meta_profile": {
            "step_mm": step,
            "samples_mm": [float(x) for x in state.meta.profile.samples],
        },
    }


def export_layout(state: AssemblyState, path) -> None:
    """Write the layout JSON (sorted keys, 4-decimal floats).

    Raises OSError on file-system failure.
    """
    write_json(path, layout_dict(state))
