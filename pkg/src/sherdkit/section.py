"""Mesh-plane cross sections that assemble into exact polylines.

Intersection points are computed canonically: an edge is always interpolated
from its lower-indexed vertex, so the two triangles sharing a crossing edge
produce bit-identical endpoints. That lets polyline assembly connect
segments by exact coordinate keys with no tolerance welding.
"""

from __future__ import annotations

import numpy as np

# Vertices closer to the plane than this (mm) count as lying on it.
PLANE_TOL_MM = 1e-8


def section_mesh_plane(
    vertices: np.ndarray,
    triangles: np.ndarray,
    plane_point,
    plane_normal,
    tol: float = PLANE_TOL_MM,
) -> np.ndarray:
    """Intersect triangles with a plane; returns line segments (k, 2, 3).

    Coplanar triangles contribute nothing. An edge lying in the plane is
    emitted once, by the triangle whose third vertex is on the positive
    side. Segments are unordered; see assemble_polylines.
    """
    plane_point = np.asarray(plane_point, dtype=np.float64)
    plane_normal = np.asarray(plane_normal, dtype=np.float64)
    signed = (vertices - plane_point) @ plane_normal
    code = np.sign(signed).astype(np.int8)
    code[np.abs(signed) < tol] = 0

    tri_code = code[triangles]  # (M, 3)
    n_zero = (tri_code == 0).sum(axis=1)
    n_pos = (tri_code > 0).sum(axis=1)
    n_neg = (tri_code < 0).sum(axis=1)

    out = []

    # two crossing edges, no vertex on the plane
    basic = (n_zero == 0) & (n_pos > 0) & (n_neg > 0)
    if basic.any():
        tris = triangles[basic]
        pts = np.full((len(tris), 2, 3), np.nan)
        slot = np.zeros(len(tris), dtype=np.int64)
        for e0, e1 in ((0, 1), (1, 2), (2, 0)):
            i, j = tris[:, e0], tris[:, e1]
            crossing = code[i] * code[j] == -1
            if not crossing.any():
                continue
            p = _interp_edge(vertices, signed, i[crossing], j[crossing])
            rows = np.flatnonzero(crossing)
            pts[rows, slot[rows]] = p
            slot[rows] += 1
        out.append(pts)

    # one vertex on the plane, the others on opposite sides
    pivot = (n_zero == 1) & (n_pos == 1) & (n_neg == 1)
    if pivot.any():
        tris = triangles[pivot]
        tc = tri_code[pivot]
        zero_slot = np.argmax(tc == 0, axis=1)
        a = tris[np.arange(len(tris)), (zero_slot + 1) % 3]
        b = tris[np.arange(len(tris)), (zero_slot + 2) % 3]
        on = vertices[tris[np.arange(len(tris)), zero_slot]]
        p = _interp_edge(vertices, signed, a, b)
        out.append(np.stack([on, p], axis=1))

    # full edge on the plane: emit from the positive side only
    edge_on = (n_zero == 2) & (n_pos == 1)
    if edge_on.any():
        tris = triangles[edge_on]
        tc = tri_code[edge_on]
        pos_slot = np.argmax(tc > 0, axis=1)
        a = tris[np.arange(len(tris)), (pos_slot + 1) % 3]
        b = tris[np.arange(len(tris)), (pos_slot + 2) % 3]
        out.append(np.stack([vertices[a], vertices[b]], axis=1))

    if not out:
        return np.empty((0, 2, 3))
    segments = np.concatenate(out)
    keep = (segments[:, 0] != segments[:, 1]).any(axis=1)
    return segments[keep]


def _interp_edge(vertices, signed, i, j):
    """Plane crossing on edges (i, j), interpolated from the lower index."""
    swap = i > j
    lo = np.where(swap, j, i)
    hi = np.where(swap, i, j)
    s_lo, s_hi = signed[lo], signed[hi]
    t = (s_lo / (s_lo - s_hi))[:, None]
    return vertices[lo] + t * (vertices[hi] - vertices[lo])


def assemble_polylines(segments: np.ndarray) -> list[np.ndarray]:
    """Chain shared-endpoint segments into polylines.

    Endpoints are matched by exact coordinates (the sectioner guarantees
    shared points are bit-identical). Open chains are walked first from
    their lowest endpoint key, then remaining loops; a closed polyline
    repeats its first point at the end. Output order is deterministic.
    """
    if len(segments) == 0:
        return []
    keys = [
        (seg[0].tobytes(), seg[1].tobytes()) for seg in segments
    ]
    coords: dict[bytes, np.ndarray] = {}
    adjacency: dict[bytes, list[tuple[int, bytes]]] = {}
    for idx, ((ka, kb), seg) in enumerate(zip(keys, segments)):
        coords.setdefault(ka, seg[0])
        coords.setdefault(kb, seg[1])
        adjacency.setdefault(ka, []).append((idx, kb))
        adjacency.setdefault(kb, []).append((idx, ka))

    used = np.zeros(len(segments), dtype=bool)
    polylines: list[np.ndarray] = []

    def walk(start: bytes) -> list[bytes]:
        chain = [start]
        node = start
        while True:
            step = next(((i, o) for i, o in adjacency[node] if not used[i]), None)
            if step is None:
                return chain
            used[step[0]] = True
            node = step[1]
            chain.append(node)

    odd_nodes = sorted(k for k, adj in adjacency.items() if len(adj) % 2 == 1)
    for node in odd_nodes:
        if any(not used[i] for i, _ in adjacency[node]):
            polylines.append(walk(node))
    for idx in range(len(segments)):  # leftovers are loops
        if not used[idx]:
            polylines.append(walk(keys[idx][0]))
    return [np.array([coords[k] for k in chain]) for chain in polylines]
