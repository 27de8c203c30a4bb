"""Synthetic wheel-thrown vessels and their controlled fragmentation.

A vessel is a surface of revolution around the z-axis: an outer shell at
radius R(h), an inner shell at R(h) - t(h), and a closed base fan at z = 0.
R and t are piecewise-linear in height. Fragmentation cuts the wall into
angular x height rectangles and re-poses each piece by a seeded random rigid
transform, keeping the original placement as ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SpecError
from .mesh import TriMesh

Curve = tuple[tuple[float, float], ...]


def _as_curve(value, height: float, what: str) -> Curve:
    """Normalize a constant or (h, value) control-point sequence to a curve."""
    if isinstance(value, (int, float)):
        return ((0.0, float(value)), (float(height), float(value)))
    pts = tuple((float(h), float(v)) for h, v in value)
    if len(pts) < 2:
        raise SpecError(f"{what}: need at least 2 control points, got {len(pts)}")
    hs = [h for h, _ in pts]
    if any(b <= a for a, b in zip(hs, hs[1:])):
        raise SpecError(f"{what}: control points must be strictly increasing in h")
    return pts


def _curve_at(curve: Curve, h) :
    hs = np.array([p[0] for p in curve])
    vs = np.array([p[1] for p in curve])
    return np.interp(h, hs, vs)


@dataclass(frozen=True)
class VesselSpec:
    """Parameters of a synthetic vessel.

    Parameters
    ----------
    height : float
        Total wall height in mm.
    outer_radius, thickness : float or sequence of (h, mm) pairs
        Piecewise-linear curves over h in [0, height]; a bare number means a
        constant curve. Values are clamped outside the control range.
    angular_resolution : int
        Mesh segments per ring.
    vertical_resolution : float
        Rings per mm of height.
    """

    height: float
    outer_radius: Curve
    thickness: Curve
    angular_resolution: int = 360
    vertical_resolution: float = 1.0

    def __post_init__(self):
        if self.height <= 0:
            raise SpecError(f"height must be positive, got {self.height}")
        if self.angular_resolution < 3:
            raise SpecError("angular_resolution must be at least 3")
        if self.vertical_resolution <= 0:
            raise SpecError("vertical_resolution must be positive")
        object.__setattr__(
            self, "outer_radius", _as_curve(self.outer_radius, self.height, "outer_radius")
        )
        object.__setattr__(
            self, "thickness", _as_curve(self.thickness, self.height, "thickness")
        )
        # Piecewise-linear curves attain extrema at control points, so
        # checking the union of control heights covers all h.
        knots = sorted(
            {0.0, float(self.height)}
            | {min(max(h, 0.0), float(self.height)) for h, _ in self.outer_radius}
            | {min(max(h, 0.0), float(self.height)) for h, _ in self.thickness}
        )
        t = _curve_at(self.thickness, knots)
        r = _curve_at(self.outer_radius, knots) - t
        if (t <= 0).any():
            raise SpecError("thickness must be positive over the full height")
        if (r <= 0).any():
            raise SpecError("outer_radius must exceed thickness (inner radius positive)")

    def outer_radius_at(self, h):
        return _curve_at(self.outer_radius, h)

    def thickness_at(self, h):
        return _curve_at(self.thickness, h)

    def to_dict(self) -> dict:
        return {
            "height": self.height,
            "outer_radius": [list(p) for p in self.outer_radius],
            "thickness": [list(p) for p in self.thickness],
            "angular_resolution": self.angular_resolution,
            "vertical_resolution": self.vertical_resolution,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VesselSpec":
        try:
            return cls(
                height=d["height"],
                outer_radius=d["outer_radius"],
                thickness=d["thickness"],
                angular_resolution=d.get("angular_resolution", 360),
                vertical_resolution=d.get("vertical_resolution", 1.0),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"bad vessel spec: {exc}") from None


@dataclass(frozen=True)
class FragmentSpec:
    """Fracture plan: angular x height rectangles that tile the wall.

    cuts is a sequence of (theta0, theta1, h0, h1) with angles in degrees,
    heights in mm; intervals are half-open at the upper edge.
    """

    cuts: tuple[tuple[float, float, float, float], ...]

    def __post_init__(self):
        cuts = tuple(tuple(float(x) for x in c) for c in self.cuts)
        if not cuts:
            raise SpecError("at least one cut required")
        for k, (t0, t1, h0, h1) in enumerate(cuts):
            if len((t0, t1, h0, h1)) != 4:
                raise SpecError(f"cut {k}: expected (theta0, theta1, h0, h1)")
            if not (0.0 <= t0 < t1 <= 360.0):
                raise SpecError(f"cut {k}: angular interval [{t0}, {t1}) invalid")
            if not (0.0 <= h0 < h1):
                raise SpecError(f"cut {k}: height interval [{h0}, {h1}) invalid")
        object.__setattr__(self, "cuts", cuts)

    def to_dict(self) -> dict:
        return {"cuts": [list(c) for c in self.cuts]}

    @classmethod
    def from_dict(cls, d: dict) -> "FragmentSpec":
        try:
            return cls(cuts=tuple(tuple(c) for c in d["cuts"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"bad fragment spec: {exc}") from None


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Original placement of a fragment, for test oracles.

    rotation/translation give the applied re-posing: posed = R @ v + t.
    """

    height_interval: tuple[float, float]
    angular_interval: tuple[float, float]
    zone_label: str
    rotation: np.ndarray
    translation: np.ndarray

    def unpose(self, mesh: TriMesh) -> TriMesh:
        """Undo the recorded rigid transform."""
        r_inv = self.rotation.T
        return mesh.transformed(r_inv, -(r_inv @ self.translation), name=mesh.name)


def synth_vessel(spec: VesselSpec) -> TriMesh:
    """Generate the vessel mesh for a spec.

    Returns
    -------
    TriMesh
        Outer shell, inner shell (reversed winding), and a base fan at z=0.
        The rim is left open so meridian sections separate into distinct
        outer and inner curves. The rotation axis is the z-axis.
    """
    n_bands = max(1, math.ceil(spec.height * spec.vertical_resolution - 1e-9))
    heights = np.linspace(0.0, spec.height, n_bands + 1)
    n_rows = len(heights)
    A = spec.angular_resolution
    az = np.arange(A) * (2.0 * np.pi / A)
    ca, sa = np.cos(az), np.sin(az)

    R = spec.outer_radius_at(heights)
    r = R - spec.thickness_at(heights)
    outer = np.empty((n_rows, A, 3))
    inner = np.empty((n_rows, A, 3))
    outer[:, :, 0] = R[:, None] * ca
    outer[:, :, 1] = R[:, None] * sa
    outer[:, :, 2] = heights[:, None]
    inner[:, :, 0] = r[:, None] * ca
    inner[:, :, 1] = r[:, None] * sa
    inner[:, :, 2] = heights[:, None]
    center = np.zeros((1, 3))
    vertices = np.vstack([outer.reshape(-1, 3), inner.reshape(-1, 3), center])

    jj, ii = np.meshgrid(np.arange(n_bands), np.arange(A), indexing="ij")
    jj, ii = jj.ravel(), ii.ravel()
    nxt = (ii + 1) % A
    o00 = jj * A + ii
    o01 = jj * A + nxt
    o10 = (jj + 1) * A + ii
    o11 = (jj + 1) * A + nxt
    outer_tris = np.concatenate(
        [np.column_stack([o00, o01, o11]), np.column_stack([o00, o11, o10])]
    )
    off = n_rows * A
    inner_tris = np.concatenate(
        [np.column_stack([o00 + off, o11 + off, o01 + off]),
         np.column_stack([o00 + off, o10 + off, o11 + off])]
    )
    c = 2 * n_rows * A
    i0 = np.arange(A)
    base_tris = np.column_stack([np.full(A, c), (i0 + 1) % A, i0])  # normal -z
    triangles = np.vstack([outer_tris, inner_tris, base_tris])
    return TriMesh(vertices, triangles, name="vessel")


def _is_base_cap(mesh: TriMesh) -> np.ndarray:
    """Mask of triangles lying entirely in the z=0 plane (the base fan)."""
    z = mesh.vertices[:, 2][mesh.triangles]
    return (np.abs(z) < 1e-12).all(axis=1)


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    # Shoemake's uniform unit quaternion from three uniform deviates.
    u1, u2, u3 = rng.random(3)
    a, b = math.sqrt(1.0 - u1), math.sqrt(u1)
    x = a * math.sin(2.0 * math.pi * u2)
    y = a * math.cos(2.0 * math.pi * u2)
    z = b * math.sin(2.0 * math.pi * u3)
    w = b * math.cos(2.0 * math.pi * u3)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def _zone_label(t0: float, t1: float, h0: float) -> str:
    # Eight 45-degree zones A..H; ring index counts 5 mm contours from the base.
    letter = chr(ord("A") + int(((t0 + t1) / 2.0 % 360.0) // 45.0))
    return f"{letter}{int(h0 // 5.0)}"


def fragment_vessel(
    mesh: TriMesh, spec: FragmentSpec, rng_seed: int | None
) -> list[tuple[TriMesh, GroundTruth]]:
    """Break a synthetic vessel into re-posed wall sherds.

    Parameters
    ----------
    mesh : TriMesh
        Output of :func:`synth_vessel` (axis = z). The base fan is excluded
        from fragmentation.
    spec : FragmentSpec
        Cuts must tile [0, 360) x [0, height) exactly.
    rng_seed : int or None
        Seed for the per-sherd random rigid re-posing. None keeps every
        sherd in its original pose (identity ground truth).

    Returns
    -------
    list of (TriMesh, GroundTruth)
        One entry per cut, in cut order. Sherd names follow the zone
        labeling scheme (45-degree zone letter + 5 mm ring index), with a
        numeric suffix when two cuts map to the same label.

    Raises
    ------
    SpecError
        If the cuts overlap, do not cover the wall, or leave a cut empty.
    """
    height = float(mesh.vertices[:, 2].max())
    area = sum((t1 - t0) * (h1 - h0) for t0, t1, h0, h1 in spec.cuts)
    if not math.isclose(area, 360.0 * height, rel_tol=0, abs_tol=1e-6):
        raise SpecError(
            f"cuts cover {area:.6f} of {360.0 * height:.6f} deg*mm; not a tiling"
        )
    cuts = spec.cuts
    for i in range(len(cuts)):
        for j in range(i + 1, len(cuts)):
            a, b = cuts[i], cuts[j]
            if max(a[0], b[0]) < min(a[1], b[1]) and max(a[2], b[2]) < min(a[3], b[3]):
                raise SpecError(f"cuts {i} and {j} overlap")
    for _, _, h0, h1 in cuts:
        if h1 > height + 1e-9:
            raise SpecError(f"cut extends above vessel height {height}")

    wall = np.flatnonzero(~_is_base_cap(mesh))
    centroids = mesh.vertices[mesh.triangles[wall]].mean(axis=1)
    theta = np.degrees(np.arctan2(centroids[:, 1], centroids[:, 0])) % 360.0
    h = centroids[:, 2]

    rng = None if rng_seed is None else np.random.Generator(np.random.PCG64(rng_seed))
    seen: dict[str, int] = {}
    out: list[tuple[TriMesh, GroundTruth]] = []
    assigned = np.zeros(len(wall), dtype=bool)
    for t0, t1, h0, h1 in cuts:
        mask = (theta >= t0) & (theta < t1) & (h >= h0) & (h < h1)
        if not mask.any():
            raise SpecError(f"cut [{t0},{t1})x[{h0},{h1}) contains no triangles")
        assigned |= mask
        label = _zone_label(t0, t1, h0)
        seen[label] = seen.get(label, 0) + 1
        if seen[label] > 1:
            label = f"{label}-{seen[label]}"
        sub = _submesh(mesh, wall[np.flatnonzero(mask)], label)
        if rng is None:
            rot, tr = np.eye(3), np.zeros(3)
        else:
            rot = _random_rotation(rng)
            tr = rng.uniform(-500.0, 500.0, size=3)
        out.append(
            (
                sub.transformed(rot, tr),
                GroundTruth(
                    height_interval=(h0, h1),
                    angular_interval=(t0, t1),
                    zone_label=label,
                    rotation=rot,
                    translation=tr,
                ),
            )
        )
    if not assigned.all():
        raise SpecError(f"{int((~assigned).sum())} wall triangle(s) not covered by any cut")
    return out


def _submesh(mesh: TriMesh, tri_idx: np.ndarray, name: str) -> TriMesh:
    tris = mesh.triangles[tri_idx]
    used, inverse = np.unique(tris, return_inverse=True)
    return TriMesh(mesh.vertices[used], inverse.reshape(-1, 3), name=name)
