"""Triangle mesh data model and PLY/OBJ file ingestion.

Meshes are immutable: vertex and triangle arrays are frozen at construction
and validated once. All coordinates are millimeters. PLY is supported in
ASCII and binary-little-endian flavors; OBJ support covers v/f records only.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError

# Triangles with area at or below this (mm^2) are rejected as degenerate.
DEGENERATE_AREA_MM2 = 1e-9

_PLY_SCALAR_TYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2",
    "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4",
    "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4",
    "double": "f8", "float64": "f8",
}


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Indexed triangle mesh in millimeter units.

    Parameters
    ----------
    vertices : (N, 3) array_like of float
        Vertex coordinates in mm.
    triangles : (M, 3) array_like of int
        Vertex-index triples. Winding determines the face normal.
    name : str, optional
        Free-form label carried through processing.

    Raises
    ------
    ValidationError
        If coordinates are non-finite, indices are out of range, or any
        triangle is degenerate (area <= 1e-9 mm^2).
    """

    vertices: np.ndarray
    triangles: np.ndarray
    name: str = ""

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        t = np.asarray(self.triangles)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValidationError(f"vertices must be (N, 3), got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValidationError(f"triangles must be (M, 3), got {t.shape}")
        if not np.issubdtype(t.dtype, np.integer):
            raise ValidationError(f"triangle indices must be integers, got {t.dtype}")
        t = t.astype(np.int64, copy=True)
        if not np.isfinite(v).all():
            raise ValidationError("vertex coordinates must be finite")
        if t.size:
            if t.min() < 0 or t.max() >= len(v):
                raise ValidationError(
                    f"triangle index out of range [0, {len(v)})"
                )
            if ((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])).any():
                raise ValidationError("triangle with repeated vertex index")
            e1 = v[t[:, 1]] - v[t[:, 0]]
            e2 = v[t[:, 2]] - v[t[:, 0]]
            areas = 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)
            bad = np.flatnonzero(areas <= DEGENERATE_AREA_MM2)
            if bad.size:
                raise ValidationError(
                    f"{bad.size} degenerate triangle(s), first at index {bad[0]}"
                )
        v = v.copy()
        v.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    def __len__(self) -> int:
        return len(self.triangles)

    @cached_property
    def face_areas(self) -> np.ndarray:
        """(M,) triangle areas in mm^2."""
        v, t = self.vertices, self.triangles
        cr = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
        out = 0.5 * np.linalg.norm(cr, axis=1)
        out.flags.writeable = False
        return out

    @cached_property
    def face_normals(self) -> np.ndarray:
        """(M, 3) unit face normals by right-hand winding."""
        v, t = self.vertices, self.triangles
        cr = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
        out = cr / np.linalg.norm(cr, axis=1, keepdims=True)
        out.flags.writeable = False
        return out

    def transformed(self, rotation=None, translation=None, name=None) -> "TriMesh":
        """Return a rigidly transformed copy: v -> rotation @ v + translation."""
        v = self.vertices
        if rotation is not None:
            v = v @ np.asarray(rotation, dtype=np.float64).T
        if translation is not None:
            v = v + np.asarray(translation, dtype=np.float64)
        return TriMesh(v, self.triangles, self.name if name is None else name)

    def geometry_equal(self, other: "TriMesh", tol: float = 1e-6) -> bool:
        """True if both meshes have identical connectivity and vertices within tol mm."""
        return (
            self.vertices.shape == other.vertices.shape
            and np.array_equal(self.triangles, other.triangles)
            and bool(np.abs(self.vertices - other.vertices).max(initial=0.0) <= tol)
        )


def _infer_format(path: Path, format: str | None) -> str:
    if format is not None:
        fmt = format.lower()
        if fmt not in ("ply", "obj"):
            raise ValueError(f"unsupported mesh format {format!r} (expected 'ply' or 'obj')")
        return fmt
    suffix = path.suffix.lower()
    if suffix == ".ply":
        return "ply"
    if suffix == ".obj":
        return "obj"
    raise ValueError(f"cannot infer mesh format from {path.name!r}; pass format=")


def load_mesh(path, format: str | None = None) -> TriMesh:
    """Load a PLY (ASCII or binary-little-endian) or OBJ mesh.

    Parameters
    ----------
    path : str or Path
        File to read.
    format : {'ply', 'obj'}, optional
        Defaults to the file extension.

    Returns
    -------
    TriMesh
        Validated mesh named after the file stem. Non-geometric attributes
        (normals, colors, texture coordinates) are ignored.

    Raises
    ------
    ParseError
        Malformed file. Messages carry a 1-based line number for text
        formats and a byte offset for binary PLY.
    ValidationError
        Well-formed file describing invalid geometry.
    """
    path = Path(path)
    fmt = _infer_format(path, format)
    data = path.read_bytes()
    if fmt == "ply":
        vertices, faces = _parse_ply(data)
    else:
        vertices, faces = _parse_obj(data)
    return TriMesh(vertices, faces, name=path.stem)


def save_mesh(mesh: TriMesh, path, format: str | None = None, binary: bool = True) -> None:
    """Write a mesh readable back by :func:`load_mesh` with identical geometry.

    Parameters
    ----------
    mesh : TriMesh
    path : str or Path
    format : {'ply', 'obj'}, optional
        Defaults to the file extension.
    binary : bool, optional
        PLY flavor selector: binary little-endian (default) or ASCII.
        Ignored for OBJ. Coordinates are written in double precision either
        way, so round-trips are exact to well below 1e-6 mm.

    Raises
    ------
    ValidationError
        If the mesh has no triangles.
    OSError
        On any file-system failure.
    """
    path = Path(path)
    fmt = _infer_format(path, format)
    if len(mesh.triangles) == 0:
        raise ValidationError("refusing to write a mesh with no triangles")
    if fmt == "ply":
        data = _ply_binary_bytes(mesh) if binary else _ply_ascii_bytes(mesh)
        path.write_bytes(data)
    else:
        path.write_bytes(_obj_bytes(mesh))


# ---------------------------------------------------------------------------
# PLY

def _parse_ply_header(data: bytes):
    """Parse the header; returns (flavor, elements, body_offset, header_lines).

    elements is a list of (element_name, count, properties); each property is
    ("scalar", name, dtype_code) or ("list", name, count_code, item_code).
    """
    end = data.find(b"end_header")
    if end < 0:
        raise ParseError("PLY: missing end_header")
    nl = data.find(b"\n", end)
    if nl < 0:
        raise ParseError("PLY: no newline after end_header")
    body_offset = nl + 1
    try:
        header = data[:body_offset].decode("ascii")
    except UnicodeDecodeError as exc:
        raise ParseError(f"PLY: non-ASCII header byte at offset {exc.start}") from None
    lines = header.splitlines()
    if not lines or lines[0].strip() != "ply":
        raise ParseError("PLY: line 1: magic 'ply' not found")

    flavor = None
    elements = []
    for lineno, raw in enumerate(lines[1:], start=2):
        tokens = raw.split()
        if not tokens or tokens[0] == "comment" or tokens[0] == "obj_info":
            continue
        keyword = tokens[0]
        if keyword == "format":
            if len(tokens) != 3:
                raise ParseError(f"PLY: line {lineno}: malformed format line")
            if tokens[1] not in ("ascii", "binary_little_endian"):
                raise ParseError(
                    f"PLY: line {lineno}: unsupported format {tokens[1]!r}"
                )
            flavor = tokens[1]
        elif keyword == "element":
            if len(tokens) != 3:
                raise ParseError(f"PLY: line {lineno}: malformed element line")
            try:
                count = int(tokens[2])
            except ValueError:
                raise ParseError(f"PLY: line {lineno}: bad element count {tokens[2]!r}") from None
            if count < 0:
                raise ParseError(f"PLY: line {lineno}: negative element count")
            elements.append((tokens[1], count, []))
        elif keyword == "property":
            if not elements:
                raise ParseError(f"PLY: line {lineno}: property before any element")
            props = elements[-1][2]
            if len(tokens) >= 2 and tokens[1] == "list":
                if len(tokens) != 5:
                    raise ParseError(f"PLY: line {lineno}: malformed list property")
                count_t, item_t, name = tokens[2], tokens[3], tokens[4]
                if count_t not in _PLY_SCALAR_TYPES or item_t not in _PLY_SCALAR_TYPES:
                    raise ParseError(f"PLY: line {lineno}: unknown list property type")
                props.append(("list", name, _PLY_SCALAR_TYPES[count_t], _PLY_SCALAR_TYPES[item_t]))
            else:
                if len(tokens) != 3:
                    raise ParseError(f"PLY: line {lineno}: malformed property line")
                if tokens[1] not in _PLY_SCALAR_TYPES:
                    raise ParseError(
                        f"PLY: line {lineno}: unknown property type {tokens[1]!r}"
                    )
                props.append(("scalar", tokens[2], _PLY_SCALAR_TYPES[tokens[1]]))
        elif keyword == "end_header":
            break
        else:
            raise ParseError(f"PLY: line {lineno}: unknown keyword {keyword!r}")
    if flavor is None:
        raise ParseError("PLY: missing format line")
    return flavor, elements, body_offset, len(lines)


def _parse_ply(data: bytes):
    flavor, elements, body_offset, header_lines = _parse_ply_header(data)
    if flavor == "ascii":
        return _parse_ply_ascii_body(data, elements, body_offset, header_lines)
    return _parse_ply_binary_body(data, elements, body_offset)


def _vertex_xyz_columns(props, context: str):
    """Indices of the x/y/z scalar properties within a vertex element."""
    names = {}
    for i, prop in enumerate(props):
        if prop[0] == "list":
            raise ParseError(f"PLY: {context}: list property in vertex element")
        names[prop[1]] = i
    try:
        return names["x"], names["y"], names["z"]
    except KeyError as exc:
        raise ParseError(f"PLY: {context}: vertex element lacks property {exc}") from None


def _parse_ply_ascii_body(data: bytes, elements, body_offset: int, header_lines: int):
    try:
        text = data[body_offset:].decode("ascii")
    except UnicodeDecodeError as exc:
        raise ParseError(
            f"PLY: non-ASCII byte at offset {body_offset + exc.start}"
        ) from None
    lines = text.splitlines()
    cursor = 0
    lineno = header_lines  # 1-based line of the last consumed header line

    def next_line():
        nonlocal cursor, lineno
        while cursor < len(lines):
            line = lines[cursor]
            cursor += 1
            lineno += 1
            if line.strip():
                return line
        raise ParseError(f"PLY: line {lineno + 1}: unexpected end of file")

    vertices = None
    faces: list = []
    for name, count, props in elements:
        if name == "vertex":
            ix, iy, iz = _vertex_xyz_columns(props, "ascii body")
            rows = np.empty((count, 3), dtype=np.float64)
            for r in range(count):
                tokens = next_line().split()
                if len(tokens) < len(props):
                    raise ParseError(
                        f"PLY: line {lineno}: expected {len(props)} values, got {len(tokens)}"
                    )
                try:
                    rows[r, 0] = float(tokens[ix])
                    rows[r, 1] = float(tokens[iy])
                    rows[r, 2] = float(tokens[iz])
                except ValueError:
                    raise ParseError(f"PLY: line {lineno}: non-numeric vertex value") from None
            vertices = rows
        elif name == "face":
            if not props or props[0][0] != "list":
                raise ParseError("PLY: face element must start with a list property")
            for _ in range(count):
                tokens = next_line().split()
                try:
                    n = int(tokens[0])
                    idx = [int(tok) for tok in tokens[1 : 1 + n]]
                except (ValueError, IndexError):
                    raise ParseError(f"PLY: line {lineno}: malformed face record") from None
                if len(idx) != n:
                    raise ParseError(f"PLY: line {lineno}: face record shorter than its count")
                faces.extend(_fan(idx, f"PLY: line {lineno}"))
        else:
            # unknown element: skip its records
            for _ in range(count):
                next_line()
    if vertices is None:
        raise ParseError("PLY: no vertex element")
    return vertices, np.asarray(faces, dtype=np.int64).reshape(-1, 3)


def _parse_ply_binary_body(data: bytes, elements, body_offset: int):
    offset = body_offset
    vertices = None
    faces: list = []
    for name, count, props in elements:
        if name == "vertex":
            ix, iy, iz = _vertex_xyz_columns(props, f"byte offset {offset}")
            dtype = np.dtype([(f"p{i}", "<" + code) for i, (_, _, code) in enumerate(props)])
            need = dtype.itemsize * count
            if len(data) - offset < need:
                raise ParseError(
                    f"PLY: truncated vertex data at byte offset {len(data)} "
                    f"(need {need} bytes from offset {offset})"
                )
            rec = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
            vertices = np.column_stack(
                [rec[f"p{ix}"], rec[f"p{iy}"], rec[f"p{iz}"]]
            ).astype(np.float64)
            offset += need
        elif name == "face":
            if len(props) != 1 or props[0][0] != "list":
                raise ParseError("PLY: face element must be a single list property")
            _, _, count_code, item_code = props[0]
            faces, offset = _parse_binary_faces(data, offset, count, count_code, item_code)
        else:
            if any(p[0] == "list" for p in props):
                raise ParseError(
                    f"PLY: cannot skip element {name!r} with list properties"
                )
            size = sum(np.dtype(code).itemsize for _, _, code in props) * count
            if len(data) - offset < size:
                raise ParseError(f"PLY: truncated element {name!r} at byte offset {len(data)}")
            offset += size
    if vertices is None:
        raise ParseError("PLY: no vertex element")
    return vertices, np.asarray(faces, dtype=np.int64).reshape(-1, 3)


def _parse_binary_faces(data: bytes, offset: int, count: int, count_code: str, item_code: str):
    faces: list = []
    if count == 0:
        return faces, offset
    count_dt = np.dtype("<" + count_code)
    item_dt = np.dtype("<" + item_code)
    if len(data) - offset < count_dt.itemsize:
        raise ParseError(f"PLY: truncated face data at byte offset {offset}")

    # Fast path: all faces are triangles with the same record size.
    first_n = int(np.frombuffer(data, dtype=count_dt, count=1, offset=offset)[0])
    if first_n == 3:
        rec = np.dtype([("n", count_dt), ("idx", item_dt, (3,))])
        if (len(data) - offset) >= rec.itemsize * count:
            arr = np.frombuffer(data, dtype=rec, count=count, offset=offset)
            if (arr["n"] == 3).all():
                return list(arr["idx"].astype(np.int64)), offset + rec.itemsize * count

    fmt_count = "<" + {"u1": "B", "i1": "b", "u2": "H", "i2": "h", "u4": "I", "i4": "i"}[count_code]
    for _ in range(count):
        try:
            (n,) = struct.unpack_from(fmt_count, data, offset)
        except struct.error:
            raise ParseError(f"PLY: truncated face count at byte offset {offset}") from None
        offset += count_dt.itemsize
        need = item_dt.itemsize * n
        if len(data) - offset < need:
            raise ParseError(f"PLY: truncated face indices at byte offset {offset}")
        idx = np.frombuffer(data, dtype=item_dt, count=n, offset=offset).astype(np.int64)
        offset += need
        faces.extend(_fan(list(idx), f"PLY: byte offset {offset}"))
    return faces, offset


def _fan(idx: list, where: str):
    """Triangulate an n-gon record as a fan around its first vertex."""
    if len(idx) < 3:
        raise ParseError(f"{where}: face with {len(idx)} vertices")
    return [(idx[0], idx[k], idx[k + 1]) for k in range(1, len(idx) - 1)]


def _ply_ascii_bytes(mesh: TriMesh) -> bytes:
    out = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(mesh.vertices)}",
        "property double x",
        "property double y",
        "property double z",
        f"element face {len(mesh.triangles)}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    out.extend(f"{repr(x)} {repr(y)} {repr(z)}" for x, y, z in mesh.vertices.tolist())
    out.extend(f"3 {a} {b} {c}" for a, b, c in mesh.triangles.tolist())
    out.append("")
    return "\n".join(out).encode("ascii")


def _ply_binary_bytes(mesh: TriMesh) -> bytes:
    header = (
        "ply\n"
        "format binary_little_endian 1.0\n"
        f"element vertex {len(mesh.vertices)}\n"
        "property double x\n"
        "property double y\n"
        "property double z\n"
        f"element face {len(mesh.triangles)}\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
    ).encode("ascii")
    vbytes = np.ascontiguousarray(mesh.vertices, dtype="<f8").tobytes()
    rec = np.empty(len(mesh.triangles), dtype=np.dtype([("n", "u1"), ("idx", "<i4", (3,))]))
    rec["n"] = 3
    rec["idx"] = mesh.triangles
    return header + vbytes + rec.tobytes()


# ---------------------------------------------------------------------------
# OBJ

def _parse_obj(data: bytes):
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"OBJ: undecodable byte at offset {exc.start}") from None
    vertices: list = []
    faces: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "v":
            if len(tokens) < 4:
                raise ParseError(f"OBJ: line {lineno}: vertex needs 3 coordinates")
            try:
                vertices.append((float(tokens[1]), float(tokens[2]), float(tokens[3])))
            except ValueError:
                raise ParseError(f"OBJ: line {lineno}: non-numeric vertex value") from None
        elif tokens[0] == "f":
            idx = []
            for tok in tokens[1:]:
                head = tok.split("/", 1)[0]
                try:
                    i = int(head)
                except ValueError:
                    raise ParseError(f"OBJ: line {lineno}: bad face index {tok!r}") from None
                if i <= 0:
                    # OBJ indices are 1-based; relative (negative) refs unsupported
                    raise ParseError(f"OBJ: line {lineno}: non-positive face index {i}")
                idx.append(i - 1)
            faces.extend(_fan(idx, f"OBJ: line {lineno}"))
        # vn/vt/o/g/s/usemtl/mtllib and anything else: ignored
    return (
        np.asarray(vertices, dtype=np.float64).reshape(-1, 3),
        np.asarray(faces, dtype=np.int64).reshape(-1, 3),
    )


def _obj_bytes(mesh: TriMesh) -> bytes:
    out = []
    out.extend(f"v {repr(x)} {repr(y)} {repr(z)}" for x, y, z in mesh.vertices.tolist())
    out.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.triangles.tolist())
    out.append("")
    return "\n".join(out).encode("ascii")
