"""Pottery reconstruction from wall-thickness profiles.

Pipeline: mesh in (or synthetic vessel out of synth), axis estimation,
meridian-plane thickness extraction, sliding SAD matching, and a
human-in-the-loop greedy assembly with an HTTP session facade.
"""

from .assembly import (
    AssemblyState,
    Candidate,
    CommitEvent,
    DecidedBy,
    MetaSherd,
    Placement,
    Side,
    commit,
    export_layout,
    init_assembly,
    layout_dict,
    propose_next,
    replay,
    strip_order,
    undo,
)
from .axis import VesselAxis, estimate_axis, orient_axis
from .errors import (
    DegenerateGeometryError,
    EmptyInputError,
    GapError,
    NoFeasibleOffsetError,
    NoOverlapError,
    NotACandidateError,
    NothingToUndoError,
    ParseError,
    SherdKitError,
    SpecError,
    StepMismatchError,
    UnknownSherdError,
    ValidationError,
)
from .extraction import ProfilePlane, extract_profile, profile_from_mesh, select_profile_plane
from .fixtures import FIXTURE_COLORS, FIXTURE_IDS, fixture_profile, fixture_profiles
from .matching import MatchConfig, MatchResult, best_matches, is_acceptable, sad_at_offset
from .mesh import TriMesh, load_mesh, save_mesh
from .profile import ThicknessProfile, load_profile, load_profile_dir, save_profile
from .synth import FragmentSpec, GroundTruth, VesselSpec, fragment_vessel, synth_vessel

__version__ = "0.1.0"

__all__ = [
    "AssemblyState",
    "Candidate",
    "CommitEvent",
    "DecidedBy",
    "DegenerateGeometryError",
    "EmptyInputError",
    "FIXTURE_COLORS",
    "FIXTURE_IDS",
    "FragmentSpec",
    "GapError",
    "GroundTruth",
    "MatchConfig",
    "MatchResult",
    "MetaSherd",
    "NoFeasibleOffsetError",
    "NoOverlapError",
    "NotACandidateError",
    "NothingToUndoError",
    "ParseError",
    "Placement",
    "ProfilePlane",
    "SherdKitError",
    "Side",
    "SpecError",
    "StepMismatchError",
    "ThicknessProfile",
    "TriMesh",
    "UnknownSherdError",
    "ValidationError",
    "VesselAxis",
    "VesselSpec",
    "best_matches",
    "commit",
    "estimate_axis",
    "export_layout",
    "extract_profile",
    "fixture_profile",
    "fixture_profiles",
    "fragment_vessel",
    "init_assembly",
    "is_acceptable",
    "layout_dict",
    "load_mesh",
    "load_profile",
    "load_profile_dir",
    "orient_axis",
    "profile_from_mesh",
    "propose_next",
    "replay",
    "sad_at_offset",
    "save_mesh",
    "save_profile",
    "select_profile_plane",
    "strip_order",
    "synth_vessel",
    "undo",
]
