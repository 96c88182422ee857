"""Minimal PLY reader/writer for point clouds.

Supports ascii and binary_little_endian files whose vertex element
carries float or double x, y, z properties (extra scalar properties are
skipped).  Anything else raises UnsupportedFormat; malformed content
raises PlyParseError with line/offset context.
"""
from __future__ import annotations

import struct

import numpy as np

from ..errors import PlyParseError, UnsupportedFormat
from ..icp import MetricMap

_SCALAR_SIZES = {
    "char": 1, "int8": 1, "uchar": 1, "uint8": 1,
    "short": 2, "int16": 2, "ushort": 2, "uint16": 2,
    "int": 4, "int32": 4, "uint": 4, "uint32": 4,
    "float": 4, "float32": 4,
    "double": 8, "float64": 8,
}
_STRUCT_CODES = {
    "char": "b", "int8": "b", "uchar": "B", "uint8": "B",
    "short": "h", "int16": "h", "ushort": "H", "uint16": "H",
    "int": "i", "int32": "i", "uint": "I", "uint32": "I",
    "float": "f", "float32": "f",
    "double": "d", "float64": "d",
}


def load_ply(path):
    """Vertex positions of a PLY file as a MetricMap."""
    with open(path, "rb") as fh:
        data = fh.read()

    lines = []
    offset = 0
    while True:
        end = data.find(b"\n", offset)
        if end < 0:
            raise PlyParseError(f"{path}: header has no end_header line")
        line = data[offset:end].decode("ascii", errors="replace").strip()
        offset = end + 1
        lines.append(line)
        if line == "end_header":
            break
        if len(lines) > 200:
            raise PlyParseError(f"{path}: header longer than 200 lines")

    if not lines or lines[0] != "ply":
        raise PlyParseError(f"{path}: line 1: missing 'ply' magic")

    fmt = None
    elements = []  # (name, count, [(prop_name, prop_type), ...])
    for lineno, line in enumerate(lines[1:-1], start=2):
        parts = line.split()
        if not parts or parts[0] == "comment":
            continue
        if parts[0] == "format":
            if len(parts) < 2:
                raise PlyParseError(f"{path}: line {lineno}: bad format line")
            fmt = parts[1]
        elif parts[0] == "element":
            if len(parts) != 3:
                raise PlyParseError(f"{path}: line {lineno}: bad element line")
            try:
                count = int(parts[2])
            except ValueError as exc:
                raise PlyParseError(
                    f"{path}: line {lineno}: bad element count {parts[2]!r}"
                ) from exc
            elements.append((parts[1], count, []))
        elif parts[0] == "property":
            if not elements:
                raise PlyParseError(f"{path}: line {lineno}: property before element")
            if parts[1] == "list":
                elements[-1][2].append((parts[-1], "list"))
            else:
                elements[-1][2].append((parts[2], parts[1]))

    if fmt not in ("ascii", "binary_little_endian"):
        raise UnsupportedFormat(f"{path}: unsupported format {fmt!r}")
    vertex = next((e for e in elements if e[0] == "vertex"), None)
    if vertex is None:
        raise PlyParseError(f"{path}: no vertex element")
    if elements[0][0] != "vertex":
        raise UnsupportedFormat(f"{path}: vertex element must come first")
    _, count, props = vertex
    names = [p[0] for p in props]
    if any(t == "list" for _, t in props):
        raise UnsupportedFormat(f"{path}: list property inside vertex element")
    for needed in ("x", "y", "z"):
        if needed not in names:
            raise PlyParseError(f"{path}: vertex element lacks property {needed!r}")
    xyz_cols = [names.index(c) for c in ("x", "y", "z")]

    if fmt == "ascii":
        points = _read_ascii(path, data[offset:], count, len(props), xyz_cols,
                             header_lines=len(lines))
    else:
        points = _read_binary(path, data, offset, count, props, xyz_cols)
    return MetricMap(points)


def _read_ascii(path, body, count, n_props, xyz_cols, header_lines):
    text = body.decode("ascii", errors="replace").splitlines()
    rows = [ln for ln in text if ln.strip()]
    if len(rows) < count:
        raise PlyParseError(
            f"{path}: expected {count} vertex rows, found {len(rows)}"
        )
    points = np.empty((count, 3))
    for i in range(count):
        parts = rows[i].split()
        lineno = header_lines + i + 1
        if len(parts) < n_props:
            raise PlyParseError(
                f"{path}: line {lineno}: expected {n_props} values, got {len(parts)}"
            )
        try:
            for j, col in enumerate(xyz_cols):
                points[i, j] = float(parts[col])
        except ValueError as exc:
            raise PlyParseError(f"{path}: line {lineno}: non-numeric value") from exc
    return points


def _read_binary(path, data, offset, count, props, xyz_cols):
    fmt = "<" + "".join(_STRUCT_CODES[t] for _, t in props)
    row_size = struct.calcsize(fmt)
    needed = count * row_size
    if len(data) - offset < needed:
        raise PlyParseError(
            f"{path}: binary body truncated at byte {len(data)}, "
            f"need {offset + needed}"
        )
    points = np.empty((count, 3))
    unpack = struct.Struct(fmt).unpack_from
    for i in range(count):
        row = unpack(data, offset + i * row_size)
        for j, col in enumerate(xyz_cols):
            points[i, j] = row[col]
    return points


def save_ply(points, path, binary=False):
    """Write an (n, 3) point array as a PLY vertex cloud."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    encoding = "binary_little_endian" if binary else "ascii"
    header = (
        "ply\n"
        f"format {encoding} 1.0\n"
        f"element vertex {points.shape[0]}\n"
        "property double x\n"
        "property double y\n"
        "property double z\n"
        "end_header\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if binary:
            fh.write(points.astype("<f8").tobytes())
        else:
            for x, y, z in points:
                row = f"{float(x)!r} {float(y)!r} {float(z)!r}\n"
                fh.write(row.encode("ascii"))


def downsample(metric_map, n, seed=0):
    """Pick n points by a deterministic stride over a seeded shuffle."""
    total = metric_map.n_points
    perm = np.random.default_rng(seed).permutation(total)
    if n >= total:
        return MetricMap(metric_map.points[perm])
    step = total // n
    chosen = perm[::step][:n]
    return MetricMap(metric_map.points[chosen])
