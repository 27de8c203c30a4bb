"""Rotation-axis estimation for wall sherds of wheel-thrown vessels.

The wheel leaves horizontal rings: every slice of the wall perpendicular to
the rotation axis is a circular arc, and all arc centers lie on the axis.
The estimator exploits exactly that. Face normals of the wall are nearly
radial, so their second-moment matrix is rank-deficient along the axis;
that seeds the direction, after which circle fits per slab and a line fit
through the fitted centers are alternated to convergence.

A sherd never tells which way the base lies, so the returned direction sign
is only a deterministic convention; see orient_axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, ValidationError
from .mesh import TriMesh

# Slabs thinner than this lack points; wider ones smear curvature changes.
_SLAB_MM = 2.0
# Circle fits with radius beyond this are straight lines in disguise.
_MAX_RADIUS_MM = 1e5
_RMS_LIMIT_MM = 1.0


@dataclass(frozen=True, eq=False)
class VesselAxis:
    """Estimated wheel axis: a point, a unit direction, and the fit residual.

    The direction sign is canonical (largest-magnitude component positive),
    not physical: base-to-rim orientation is unobservable from a lone wall
    fragment.
    """

    point: np.ndarray
    direction: np.ndarray
    fit_rms: float

    def __post_init__(self):
        p = np.asarray(self.point, dtype=np.float64).reshape(3)
        d = np.asarray(self.direction, dtype=np.float64).reshape(3)
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValidationError("direction must be a unit vector")
        if not (self.fit_rms >= 0):
            raise ValidationError(f"fit_rms must be >= 0, got {self.fit_rms}")
        p = p.copy()
        d = d.copy()
        p.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "direction", d)


def orient_axis(axis: VesselAxis, reference) -> VesselAxis:
    """Flip the axis direction, if needed, to point along `reference`."""
    ref = np.asarray(reference, dtype=np.float64)
    if float(axis.direction @ ref) < 0:
        return VesselAxis(axis.point, -axis.direction, axis.fit_rms)
    return axis


def _canonical_sign(d: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(d)))
    return -d if d[i] < 0 else d


def _frame(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal in-plane basis (u, v) for a unit d."""
    u = np.array([1.0, 0.0, 0.0]) - d[0] * d
    if np.linalg.norm(u) < 1e-6:
        u = np.array([0.0, 1.0, 0.0]) - d[1] * d
    u /= np.linalg.norm(u)
    return u, np.cross(d, u)


def _init_directions(mesh: TriMesh) -> list[np.ndarray]:
    # Second moment of area-weighted face normals. Wall normals are roughly
    # radial, so the moment is usually smallest along the axis; on a narrow
    # arc with a sloped profile the tangential moment can undercut it, so
    # all three eigenvectors are offered as starting points, best first.
    n = mesh.face_normals
    w = mesh.face_areas
    moment = (n * w[:, None]).T @ n
    _, vecs = np.linalg.eigh(moment)
    return [_canonical_sign(vecs[:, k]) for k in range(3)]


def _init_point(mesh: TriMesh, d: np.ndarray) -> np.ndarray:
    # Radial face-normal lines all pass near the axis; intersect them in the
    # plane perpendicular to d by least squares.
    u, v = _frame(d)
    centers = mesh.vertices[mesh.triangles].mean(axis=1)
    n2 = np.column_stack([mesh.face_normals @ u, mesh.face_normals @ v])
    c2 = np.column_stack([centers @ u, centers @ v])
    length = np.linalg.norm(n2, axis=1)
    keep = length > 0.3  # drop near-axial normals (shoulder, rim lips)
    if keep.sum() < 3:
        raise DegenerateGeometryError("too few radial face normals to locate the axis")
    n2 = n2[keep] / length[keep, None]
    w = mesh.face_areas[keep]
    proj = np.eye(2)[None] - n2[:, :, None] * n2[:, None, :]
    a = (proj * w[:, None, None]).sum(axis=0)
    b = (proj @ c2[keep][:, :, None] * w[:, None, None]).sum(axis=0)[:, 0]
    try:
        p2 = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        raise DegenerateGeometryError("face-normal lines do not intersect") from None
    return p2[0] * u + p2[1] * v


def _fit_circles(mesh: TriMesh, point: np.ndarray, d: np.ndarray):
    """Kasa circle fit on the outer-surface points of each slab along d.

    Returns (centers (k,3), residual arrays concatenated) or raises when
    fewer than 3 slabs support a circle.
    """
    u, v = _frame(d)
    rel = mesh.vertices - point
    h = rel @ d
    a2 = np.column_stack([rel @ u, rel @ v])
    lo, hi = float(h.min()), float(h.max())
    n_slabs = max(3, int(round((hi - lo) / _SLAB_MM)))
    edges = np.linspace(lo, hi, n_slabs + 1)
    which = np.clip(np.digitize(h, edges) - 1, 0, n_slabs - 1)

    centers = []
    residuals = []
    for s in range(n_slabs):
        idx = np.flatnonzero(which == s)
        if len(idx) < 6:
            continue
        pts = a2[idx]
        r = np.linalg.norm(pts, axis=1)
        outer = r > (r.min() + r.max()) / 2.0  # outer vs inner shell split
        idx = idx[outer]
        pts = pts[outer]
        if len(pts) < 6:
            continue
        # Tent weights over the slab height. A mesh row entering or leaving
        # the slab as the frame tilts would otherwise jump the fitted center
        # discontinuously, which can turn the iteration divergent on walls
        # whose radius varies with height.
        mid = (edges[s] + edges[s + 1]) / 2.0
        half = (edges[s + 1] - edges[s]) / 2.0
        w = np.maximum(1.0 - np.abs(h[idx] - mid) / max(half, 1e-12), 1e-3)
        sw = np.sqrt(w)[:, None]
        design = np.column_stack([2.0 * pts, np.ones(len(pts))]) * sw
        rhs = (pts**2).sum(axis=1) * sw[:, 0]
        sol, _, rank, sv = np.linalg.lstsq(design, rhs, rcond=None)
        if rank < 3 or sv[-1] < 1e-10 * sv[0]:
            continue  # collinear slab: no circle
        cx, cy, c = sol
        radius2 = c + cx * cx + cy * cy
        if radius2 <= 0 or np.sqrt(radius2) > _MAX_RADIUS_MM:
            continue
        radius = np.sqrt(radius2)
        center2 = np.array([cx, cy])
        zmid = float(h[idx].mean())
        centers.append(point + cx * u + cy * v + zmid * d)
        # Residuals measure circularity, so remove the linear radius trend
        # over the slab height (a frustum is a perfectly good wheel shape);
        # noise and non-revolved geometry survive the detrend.
        res = np.linalg.norm(pts - center2, axis=1) - radius
        ht = h[idx] - mid
        trend = np.column_stack([np.ones(len(ht)), ht])
        coef, _, _, _ = np.linalg.lstsq(trend * sw, res * sw[:, 0], rcond=None)
        residuals.append(res - trend @ coef)
    if len(centers) < 3:
        raise DegenerateGeometryError(
            f"only {len(centers)} slab(s) admit a circle fit; no ring structure"
        )
    return np.asarray(centers), np.concatenate(residuals)


def estimate_axis(mesh: TriMesh) -> VesselAxis:
    """Estimate the wheel axis of a wall sherd.

    Starting from each eigenvector of the face-normal moment, alternates
    per-slab circle fits with a line fit through the fitted centers until
    the line moves less than 1e-4 (mm / rad) or 50 iterations, then keeps
    the converged axis with the smallest residual. A spurious start (for
    example tangential to the wall) either fails outright or converges with
    a residual orders of magnitude above the true axis, so the smallest
    residual identifies the right basin reliably.

    Raises
    ------
    DegenerateGeometryError
        Near-flat sherd, too little arc, or fit residual above 1.0 mm.
    """
    best = None
    failure: DegenerateGeometryError | None = None
    for d0 in _init_directions(mesh):
        try:
            d, point, rms = _converge(mesh, d0)
        except DegenerateGeometryError as exc:
            failure = exc
            continue
        if best is None or rms < best[2]:
            best = (d, point, rms)
    if best is None:
        assert failure is not None
        raise failure
    d, point, rms = best
    if rms > _RMS_LIMIT_MM:
        raise DegenerateGeometryError(
            f"axis fit residual {rms:.3f} mm exceeds {_RMS_LIMIT_MM} mm"
        )
    d = _canonical_sign(d / np.linalg.norm(d))
    centroid = mesh.vertices.mean(axis=0)
    point = point + ((centroid - point) @ d) * d
    return VesselAxis(point=point, direction=d, fit_rms=rms)


def _converge(mesh: TriMesh, d: np.ndarray):
    point = _init_point(mesh, d)
    rms = np.inf
    for _ in range(50):
        centers, residuals = _fit_circles(mesh, point, d)
        centroid = centers.mean(axis=0)
        _, _, vt = np.linalg.svd(centers - centroid)
        new_d = vt[0]
        if new_d @ d < 0:
            new_d = -new_d
        new_point = centroid
        rms = float(np.sqrt((residuals**2).mean()))

        angle = float(np.arccos(np.clip(abs(new_d @ d), -1.0, 1.0)))
        shift = new_point - point
        lateral = float(np.linalg.norm(shift - (shift @ new_d) * new_d))
        d, point = new_d, new_point
        if max(angle, lateral) < 1e-4:
            break
    return d, point, rms
