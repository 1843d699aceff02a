"""Readers and writers for XYZ, CSV and ASCII PLY point cloud files.

Coordinates are written with 17 significant digits, so a save/load round
trip reproduces float64 values exactly (well past the 9 significant digits
the formats promise).
"""

from __future__ import annotations

import csv
import os
from typing import Optional

import numpy as np

from .cloud import PointCloud, ValidationError

CLOUD_FORMATS = ("xyz", "csv", "ply")


class CloudFormatError(Exception):
    """Malformed file content; message includes the offending line."""


def _format_for(path: str, format: Optional[str]) -> str:
    if format is None:
        format = os.path.splitext(path)[1].lstrip(".").lower()
    format = format.lower()
    if format not in CLOUD_FORMATS:
        raise ValidationError(
            f"unknown cloud format {format!r} (expected one of {CLOUD_FORMATS})"
        )
    return format


def load_cloud(path: str, format: Optional[str] = None) -> PointCloud:
    """Load a cloud, inferring the format from the extension unless given."""
    fmt = _format_for(path, format)
    if fmt == "xyz":
        cloud = _load_xyz(path)
    elif fmt == "csv":
        cloud = _load_csv(path)
    else:
        cloud = _load_ply(path)
    cloud.name = os.path.splitext(os.path.basename(path))[0]
    return cloud


def save_cloud(cloud: PointCloud, path: str, format: Optional[str] = None) -> None:
    """Write a cloud; labels are emitted when the cloud has them."""
    fmt = _format_for(path, format)
    if fmt == "xyz":
        _save_xyz(cloud, path)
    elif fmt == "csv":
        _save_csv(cloud, path)
    else:
        _save_ply(cloud, path)


def _fail(path: str, lineno: int, msg: str):
    raise CloudFormatError(f"{path}:{lineno}: {msg}")


def _parse_label(tok: str, path: str, lineno: int) -> int:
    try:
        val = float(tok)
    except ValueError:
        _fail(path, lineno, f"bad label {tok!r}")
    if val not in (0.0, 1.0):
        _fail(path, lineno, f"label must be 0 or 1, got {tok!r}")
    return int(val)


def _finish(path, pts, labs, has_labels):
    if not pts:
        raise CloudFormatError(f"{path}: no points found")
    points = np.array(pts, dtype=np.float64)
    labels = np.array(labs, dtype=np.uint8) if has_labels else None
    try:
        return PointCloud(points, labels)
    except ValidationError as exc:
        raise CloudFormatError(f"{path}: {exc}") from exc


def _load_xyz(path: str) -> PointCloud:
    pts, labs = [], []
    ncols = None
    with open(path, "r") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            if ncols is None:
                if len(toks) not in (3, 4):
                    _fail(path, lineno, f"expected 3 or 4 columns, got {len(toks)}")
                ncols = len(toks)
            elif len(toks) != ncols:
                _fail(path, lineno, f"expected {ncols} columns, got {len(toks)}")
            try:
                pts.append((float(toks[0]), float(toks[1]), float(toks[2])))
            except ValueError:
                _fail(path, lineno, f"bad coordinate in {line!r}")
            if ncols == 4:
                labs.append(_parse_label(toks[3], path, lineno))
    return _finish(path, pts, labs, ncols == 4)


def _save_xyz(cloud: PointCloud, path: str) -> None:
    with open(path, "w", newline="\n") as handle:
        if cloud.labels is None:
            for x, y, z in cloud.points:
                handle.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        else:
            for (x, y, z), lab in zip(cloud.points, cloud.labels):
                handle.write(f"{x:.17g} {y:.17g} {z:.17g} {lab:d}\n")


def _load_csv(path: str) -> PointCloud:
    with open(path, "r", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CloudFormatError(f"{path}: empty file") from None
        names = [h.strip().lower() for h in header]
        try:
            cols = [names.index(n) for n in ("x", "y", "z")]
        except ValueError:
            _fail(path, 1, f"header must contain x,y,z columns, got {header}")
        edge_col = names.index("edge") if "edge" in names else -1
        pts, labs = [], []
        for lineno, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(names):
                _fail(path, lineno, f"expected {len(names)} fields, got {len(row)}")
            try:
                pts.append(tuple(float(row[c]) for c in cols))
            except ValueError:
                _fail(path, lineno, f"bad coordinate in {row!r}")
            if edge_col >= 0:
                labs.append(_parse_label(row[edge_col], path, lineno))
    return _finish(path, pts, labs, edge_col >= 0)


def _save_csv(cloud: PointCloud, path: str) -> None:
    with open(path, "w", newline="\n") as handle:
        if cloud.labels is None:
            handle.write("x,y,z\n")
            for x, y, z in cloud.points:
                handle.write(f"{x:.17g},{y:.17g},{z:.17g}\n")
        else:
            handle.write("x,y,z,edge\n")
            for (x, y, z), lab in zip(cloud.points, cloud.labels):
                handle.write(f"{x:.17g},{y:.17g},{z:.17g},{lab:d}\n")


def _load_ply(path: str) -> PointCloud:
    with open(path, "r") as handle:
        lineno = 1
        if handle.readline().strip() != "ply":
            _fail(path, 1, "missing 'ply' magic")
        nvertex = -1
        props: list[str] = []
        in_vertex = False
        saw_format = False
        while True:
            lineno += 1
            raw = handle.readline()
            if not raw:
                _fail(path, lineno, "unexpected end of header")
            toks = raw.strip().split()
            if not toks or toks[0] == "comment":
                continue
            if toks[0] == "format":
                if toks[1:] != ["ascii", "1.0"]:
                    _fail(path, lineno, f"unsupported format {raw.strip()!r}")
                saw_format = True
            elif toks[0] == "element":
                in_vertex = len(toks) == 3 and toks[1] == "vertex"
                if in_vertex:
                    try:
                        nvertex = int(toks[2])
                    except ValueError:
                        _fail(path, lineno, f"bad vertex count {toks[2]!r}")
            elif toks[0] == "property" and in_vertex:
                if toks[1] == "list":
                    _fail(path, lineno, "list properties are not supported")
                if len(toks) != 3:
                    _fail(path, lineno, f"bad property line {raw.strip()!r}")
                props.append(toks[2])
            elif toks[0] == "end_header":
                break
        if not saw_format:
            _fail(path, lineno, "missing 'format ascii 1.0' line")
        if nvertex < 0:
            _fail(path, lineno, "missing 'element vertex' declaration")
        try:
            cols = [props.index(n) for n in ("x", "y", "z")]
        except ValueError:
            _fail(path, lineno, f"vertex element must have x,y,z, got {props}")
        edge_col = props.index("edge") if "edge" in props else -1
        pts, labs = [], []
        while len(pts) < nvertex:
            lineno += 1
            raw = handle.readline()
            if not raw:
                _fail(path, lineno, f"expected {nvertex} vertices, got {len(pts)}")
            toks = raw.split()
            if not toks:
                continue
            if len(toks) != len(props):
                _fail(path, lineno, f"expected {len(props)} values, got {len(toks)}")
            try:
                pts.append(tuple(float(toks[c]) for c in cols))
            except ValueError:
                _fail(path, lineno, f"bad coordinate in {raw.strip()!r}")
            if edge_col >= 0:
                labs.append(_parse_label(toks[edge_col], path, lineno))
    return _finish(path, pts, labs, edge_col >= 0)


def _save_ply(cloud: PointCloud, path: str) -> None:
    n = len(cloud)
    with open(path, "w", newline="\n") as handle:
        handle.write("ply\nformat ascii 1.0\n")
        handle.write(f"element vertex {n}\n")
        handle.write("property float x\nproperty float y\nproperty float z\n")
        if cloud.labels is not None:
            handle.write("property uchar edge\n")
        handle.write("end_header\n")
        if cloud.labels is None:
            for x, y, z in cloud.points:
                handle.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        else:
            for (x, y, z), lab in zip(cloud.points, cloud.labels):
                handle.write(f"{x:.17g} {y:.17g} {z:.17g} {lab:d}\n")


def save_scores(path: str, scores: np.ndarray) -> None:
    """Write per-point scores as a two-column CSV (index, score)."""
    with open(path, "w", newline="\n") as handle:
        handle.write("index,score\n")
        for i, s in enumerate(scores):
            handle.write(f"{i},{s:.17g}\n")
