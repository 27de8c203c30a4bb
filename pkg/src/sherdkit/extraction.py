"""Profile-plane selection and wall-thickness sampling.

A candidate profile plane is a meridian half-plane: it contains the
estimated axis and points outward at some azimuth. The plane whose
intersection with the sherd's outer surface is the longest single curve
wins; along that curve, thickness is measured every `step` mm by casting a
ray from the outer curve along its inward normal to the inner curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .axis import VesselAxis, estimate_axis, orient_axis, _frame
from .errors import DegenerateGeometryError, GapError, ValidationError
from .mesh import TriMesh
from .profile import ThicknessProfile
from .section import assemble_polylines, section_mesh_plane

# Curves at least this far apart in mean radius separate into outer/inner.
_SEPARATION_MM = 0.5
# A usable profile plane must cut an outer curve longer than this.
_MIN_SPAN_MM = 2.0
# Rays may graze past an open inner curve's terminal endpoint by this much.
# End stations sit exactly on the boundary; axis noise tilts their rays by
# ~1e-7 rad, enough to slip past the endpoint without a little slack.
_END_GRAZE_MM = 1e-4


@dataclass(frozen=True)
class ProfilePlane:
    """A chosen meridian half-plane.

    azimuth is in degrees around the axis, measured in a deterministic
    in-plane frame derived from the axis direction. arc_span is the length
    of the longest connected outer-surface curve in this plane.
    """

    axis: VesselAxis
    azimuth: float
    arc_span: float

    def __post_init__(self):
        if not (self.arc_span > 0):
            raise ValidationError(f"arc_span must be positive, got {self.arc_span}")


def _half_plane_section(
    vertices: np.ndarray,
    triangles: np.ndarray,
    axis: VesselAxis,
    azimuth_deg: float,
) -> list[np.ndarray]:
    """Section with the meridian plane, keep the azimuth side, return 2D
    polylines in (radial, height) coordinates."""
    u0, v0 = _frame(axis.direction)
    rad = math.radians(azimuth_deg)
    u = math.cos(rad) * u0 + math.sin(rad) * v0
    normal = math.cos(rad) * v0 - math.sin(rad) * u0
    segments = section_mesh_plane(vertices, triangles, axis.point, normal)
    if len(segments) == 0:
        return []
    mid = segments.mean(axis=1)
    keep = (mid - axis.point) @ u > 0
    polylines = assemble_polylines(segments[keep])
    rel_axis = axis.direction
    out = []
    for line in polylines:
        rel = line - axis.point
        out.append(np.column_stack([rel @ u, rel @ rel_axis]))
    return out


def _polyline_length(line2d: np.ndarray) -> float:
    return float(np.hypot(*(np.diff(line2d, axis=0).T)).sum()) if len(line2d) > 1 else 0.0


def _split_outer_inner(polylines: list[np.ndarray]):
    """Partition section curves into outer and inner by mean radial distance.

    The two wall surfaces sit a wall thickness apart in radius; the largest
    gap in mean radius separates them. Returns (outer, inner) lists or None
    when no gap of at least 0.5 mm exists.
    """
    lines = [p for p in polylines if len(p) > 1]
    if len(lines) < 2:
        return None
    means = np.array([p[:, 0].mean() for p in lines])
    order = np.argsort(means)
    gaps = np.diff(means[order])
    cut = int(np.argmax(gaps))
    if gaps[cut] < _SEPARATION_MM:
        return None
    inner_idx = set(order[: cut + 1].tolist())
    outer = [lines[i] for i in range(len(lines)) if i not in inner_idx]
    inner = [lines[i] for i in range(len(lines)) if i in inner_idx]
    return outer, inner


def _azimuth_buckets(mesh: TriMesh, axis: VesselAxis, n_candidates: int):
    """For each candidate azimuth, the indices of triangles that may cross
    its meridian plane. Cheap prefilter: a triangle only matters to azimuths
    within its own azimuth interval (one bin of slack each side)."""
    u0, v0 = _frame(axis.direction)
    rel = mesh.vertices - axis.point
    phi = np.degrees(np.arctan2(rel @ v0, rel @ u0)) % 360.0
    tri_phi = phi[mesh.triangles]
    lo = tri_phi.min(axis=1)
    hi = tri_phi.max(axis=1)
    wraps = (hi - lo) > 180.0
    width = 360.0 / n_candidates
    buckets: list[list[int]] = [[] for _ in range(n_candidates)]
    lo_bin = np.floor(lo / width).astype(np.int64) - 1
    hi_bin = np.floor(hi / width).astype(np.int64) + 1
    for t in range(len(tri_phi)):
        if wraps[t]:
            # interval crosses 0/360: cover [hi, 360) and [0, lo]
            verts = tri_phi[t]
            above = verts[verts > 180.0].min()
            below = verts[verts <= 180.0].max()
            rng = list(range(int(above / width) - 1, n_candidates)) + list(
                range(0, int(below / width) + 2)
            )
        else:
            rng = range(lo_bin[t], hi_bin[t] + 1)  # modulo below wraps the seam
        for b in rng:
            buckets[b % n_candidates].append(t)
    return buckets


def select_profile_plane(
    mesh: TriMesh, axis: VesselAxis, n_candidates: int = 360
) -> ProfilePlane:
    """Pick the meridian plane with the longest connected outer curve.

    Scans n_candidates equally spaced azimuths; ties go to the smallest
    azimuth.

    Raises
    ------
    DegenerateGeometryError
        No candidate cuts an outer curve longer than 2 mm.
    """
    if n_candidates < 1:
        raise ValidationError(f"n_candidates must be >= 1, got {n_candidates}")
    buckets = _azimuth_buckets(mesh, axis, n_candidates)
    width = 360.0 / n_candidates
    best_span = 0.0
    best_azimuth = None
    for k in range(n_candidates):
        if not buckets[k]:
            continue
        tris = mesh.triangles[np.asarray(buckets[k], dtype=np.int64)]
        polylines = _half_plane_section(mesh.vertices, tris, axis, k * width)
        split = _split_outer_inner(polylines)
        if split is None:
            continue
        span = max(_polyline_length(p) for p in split[0])
        if span > best_span:
            best_span = span
            best_azimuth = k * width
    if best_azimuth is None or best_span <= _MIN_SPAN_MM:
        raise DegenerateGeometryError(
            f"no meridian plane cuts an outer curve longer than {_MIN_SPAN_MM} mm"
        )
    return ProfilePlane(axis=axis, azimuth=best_azimuth, arc_span=best_span)


def extract_profile(
    mesh: TriMesh, plane: ProfilePlane, step: float = 1.0
) -> ThicknessProfile:
    """Sample wall thickness along the plane's outer curve every `step` mm.

    Stations run base to rim in the axis direction. A station measures the
    distance from the outer curve, along its inward normal, to the first
    inner-curve crossing. Stations with no crossing are trimmed at the ends;
    in the interior they are an error, never interpolated.

    Raises
    ------
    DegenerateGeometryError
        Outer and inner curves cannot be separated, or nothing remains.
    GapError
        A station in the interior has no inner-surface hit; carries the
        station index.
    """
    if not (step > 0):
        raise ValidationError(f"step must be positive, got {step}")
    polylines = _half_plane_section(mesh.vertices, mesh.triangles, plane.axis, plane.azimuth)
    split = _split_outer_inner(polylines)
    if split is None:
        raise DegenerateGeometryError("cannot separate outer and inner section curves")
    outer_lines, inner_lines = split
    outer = max(outer_lines, key=_polyline_length)
    if len(outer) > 2 and np.array_equal(outer[0], outer[-1]):
        raise DegenerateGeometryError("outer section curve is closed")
    if outer[0, 1] > outer[-1, 1]:
        outer = outer[::-1]  # ascending along the axis direction

    seg_vec = np.diff(outer, axis=0)
    seg_len = np.hypot(seg_vec[:, 0], seg_vec[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    total = cum[-1]
    # 1e-6 absorbs float noise in the arc length; a station that lands a
    # hair past the end extrapolates along the last segment.
    n_stations = int(math.floor(total / step + 1e-6)) + 1
    t = np.arange(n_stations) * step
    seg_idx = np.clip(np.searchsorted(cum, t, side="right") - 1, 0, len(seg_len) - 1)
    local = (t - cum[seg_idx]) / seg_len[seg_idx]
    stations = outer[seg_idx] + local[:, None] * seg_vec[seg_idx]
    tangents = seg_vec[seg_idx] / seg_len[seg_idx, None]

    inner_pts = np.concatenate(inner_lines)
    inner_centroid = inner_pts.mean(axis=0)
    q1 = np.concatenate([p[:-1] for p in inner_lines])
    q2 = np.concatenate([p[1:] for p in inner_lines])
    sig_lo, sig_hi = _sigma_bounds(inner_lines)

    thickness = np.full(n_stations, np.nan)
    for m in range(n_stations):
        normal = np.array([-tangents[m, 1], tangents[m, 0]])
        toward = float(normal @ (inner_centroid - stations[m]))
        if toward < 0:
            normal = -normal
        elif toward == 0 and normal[0] > 0:
            normal = -normal  # fall back to pointing toward the axis
        hit = _first_ray_hit(stations[m], normal, q1, q2, sig_lo, sig_hi)
        if hit is not None:
            thickness[m] = hit

    missing = np.isnan(thickness)
    if missing.all():
        raise DegenerateGeometryError("no station has an inner-surface hit")
    first = int(np.argmax(~missing))
    last = n_stations - 1 - int(np.argmax(~missing[::-1]))
    interior_gap = np.flatnonzero(missing[first : last + 1])
    if interior_gap.size:
        raise GapError(first + int(interior_gap[0]))
    return ThicknessProfile(
        thickness[first : last + 1], step=step, sherd_id=mesh.name
    )


def _sigma_bounds(polylines: list[np.ndarray]):
    """Per-segment parameter bounds for the concatenated segment list.

    Interior segments accept sigma in [0, 1] with only float slop. The first
    and last segment of each open polyline stretch by _END_GRAZE_MM so end
    stations whose rays graze the curve's terminal endpoint still register.
    Closed loops have no ends and stay strict.
    """
    lo_parts, hi_parts = [], []
    for p in polylines:
        n = len(p) - 1
        lo = np.full(n, -1e-9)
        hi = np.full(n, 1.0 + 1e-9)
        if not np.array_equal(p[0], p[-1]):
            first_len = float(np.hypot(*(p[1] - p[0])))
            last_len = float(np.hypot(*(p[-1] - p[-2])))
            if first_len > 0:
                lo[0] = -max(1e-9, _END_GRAZE_MM / first_len)
            if last_len > 0:
                hi[-1] = 1.0 + max(1e-9, _END_GRAZE_MM / last_len)
        lo_parts.append(lo)
        hi_parts.append(hi)
    return np.concatenate(lo_parts), np.concatenate(hi_parts)


def _first_ray_hit(origin, direction, q1, q2, sig_lo=None, sig_hi=None):
    """Smallest positive ray parameter hitting any 2D segment, else None.

    Segment endpoints count as hits; sig_lo/sig_hi widen (or default) the
    accepted segment-parameter interval per segment.
    """
    d = q2 - q1
    denom = direction[0] * d[:, 1] - direction[1] * d[:, 0]
    ok = np.abs(denom) > 1e-15
    if not ok.any():
        return None
    if sig_lo is None:
        sig_lo = -1e-9
    if sig_hi is None:
        sig_hi = 1.0 + 1e-9
    rel = q1 - origin
    tau = (rel[:, 0] * d[:, 1] - rel[:, 1] * d[:, 0]) / np.where(ok, denom, 1.0)
    sigma = (rel[:, 0] * direction[1] - rel[:, 1] * direction[0]) / np.where(ok, denom, 1.0)
    valid = ok & (tau > 1e-9) & (sigma >= sig_lo) & (sigma <= sig_hi)
    if not valid.any():
        return None
    return float(tau[valid].min())


def profile_from_mesh(
    mesh: TriMesh,
    step: float = 1.0,
    n_candidates: int = 360,
    orient=None,
) -> tuple[VesselAxis, ProfilePlane, ThicknessProfile]:
    """Full extraction: estimate the axis, pick the plane, sample thickness.

    orient, when given, is a 3-vector the axis direction is aligned with
    (e.g. a known up direction); without it the sign convention of
    estimate_axis applies and the profile may come out rim-to-base.
    """
    axis = estimate_axis(mesh)
    if orient is not None:
        axis = orient_axis(axis, orient)
    plane = select_profile_plane(mesh, axis, n_candidates)
    return axis, plane, extract_profile(mesh, plane, step)
