"""Labeled synthetic clouds: surface-sampled unions of axis-aligned boxes.

Points are laid on a regular grid over every exterior face (interior face
regions, those buried inside another box, are removed; shared boundary
points are deduplicated). A point is labeled as edge when its distance to
the nearest exterior crease, a box edge or a perpendicular face junction
on the outside of the union, is at most ``edge_band``.

Limitations: creases flush with a coplanar neighbor face (two boxes
sharing part of a face plane) are still treated as edges even though the
union surface is smooth across them; none of the shipped defaults build
such configurations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .cloud import PointCloud, ValidationError

Vec3 = Tuple[float, float, float]

# Offset used to probe which side of a face is outside, and the coordinate
# quantum for deduplication; both relative to the sample spacing.
_PROBE_FRAC = 1e-6
_DEDUP_FRAC = 1e-6


@dataclass(frozen=True)
class CubeUnionSpec:
    """Union of axis-aligned boxes, each (min_corner, side_lengths)."""

    cubes: Tuple[Tuple[Vec3, Vec3], ...]
    spacing: float
    edge_band: Optional[float] = None
    jitter: float = 0.0
    seed: int = 0

    def __post_init__(self):
        cubes = tuple(
            (tuple(float(v) for v in mn), tuple(float(v) for v in sz))
            for mn, sz in self.cubes
        )
        object.__setattr__(self, "cubes", cubes)
        if not cubes:
            raise ValidationError("need at least one cube")
        if not (np.isfinite(self.spacing) and self.spacing > 0):
            raise ValidationError(f"spacing must be > 0, got {self.spacing}")
        for mn, sz in cubes:
            if len(mn) != 3 or len(sz) != 3:
                raise ValidationError("cube corners and sides must have 3 components")
            if not all(np.isfinite(v) for v in mn + sz):
                raise ValidationError("cube geometry must be finite")
            if min(sz) <= 0:
                raise ValidationError(f"cube sides must be > 0, got {sz}")
            if any(round(s / self.spacing) < 1 for s in sz):
                raise ValidationError(
                    f"spacing {self.spacing} too coarse for cube sides {sz}"
                )
        if self.edge_band is not None and not self.edge_band > 0:
            raise ValidationError(f"edge_band must be > 0, got {self.edge_band}")
        if not 0 <= self.jitter <= 0.5:
            raise ValidationError(f"jitter must be in [0, 0.5], got {self.jitter}")

    @property
    def band(self) -> float:
        return self.edge_band if self.edge_band is not None else 1.5 * self.spacing


def default_two_cube_spec(spacing: float = 0.02) -> CubeUnionSpec:
    """Unit cube with a lattice-aligned smaller cube centered on top."""
    return CubeUnionSpec(
        cubes=(
            ((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)),
            ((0.26, 0.26, 1.0), (0.48, 0.48, 0.48)),
        ),
        spacing=spacing,
    )


def _strictly_inside(q: np.ndarray, mn: np.ndarray, mx: np.ndarray) -> np.ndarray:
    return ((q > mn) & (q < mx)).all(axis=-1)


def _face_grids(spec: CubeUnionSpec, mins: np.ndarray, maxs: np.ndarray):
    """Yield (points, face_axis, face_sign, u_axis, v_axis, bounds) per face."""
    for ci in range(mins.shape[0]):
        axes = []
        for ax in range(3):
            n = int(round((maxs[ci, ax] - mins[ci, ax]) / spec.spacing)) + 1
            axes.append(np.linspace(mins[ci, ax], maxs[ci, ax], n))
        for ax in range(3):
            u, v = [o for o in range(3) if o != ax]
            uu, vv = np.meshgrid(axes[u], axes[v], indexing="ij")
            for sign, plane in ((-1, mins[ci, ax]), (1, maxs[ci, ax])):
                pts = np.empty((uu.size, 3), dtype=np.float64)
                pts[:, ax] = plane
                pts[:, u] = uu.ravel()
                pts[:, v] = vv.ravel()
                probe = pts.copy()
                probe[:, ax] += sign * _PROBE_FRAC * spec.spacing
                keep = np.ones(pts.shape[0], dtype=bool)
                for cj in range(mins.shape[0]):
                    if cj != ci:
                        keep &= ~_strictly_inside(probe, mins[cj], maxs[cj])
                if keep.any():
                    bounds = (axes[u][0], axes[u][-1], axes[v][0], axes[v][-1])
                    yield pts[keep], ax, sign, u, v, bounds


def _edge_segments(mins: np.ndarray, maxs: np.ndarray) -> np.ndarray:
    """Exterior crease segments of the union, shape (S, 2, 3)."""
    ncubes = mins.shape[0]
    raw = []  # (start, end, owner cubes)
    for ci in range(ncubes):
        for ax in range(3):
            u, v = [o for o in range(3) if o != ax]
            for fu in (mins[ci, u], maxs[ci, u]):
                for fv in (mins[ci, v], maxs[ci, v]):
                    a = np.zeros(3)
                    b = np.zeros(3)
                    a[ax], b[ax] = mins[ci, ax], maxs[ci, ax]
                    a[u] = b[u] = fu
                    a[v] = b[v] = fv
                    raw.append((a, b, {ci}))
    for ci in range(ncubes):
        for cj in range(ci + 1, ncubes):
            for ax_a in range(3):
                for ax_b in range(3):
                    if ax_a == ax_b:
                        continue
                    ax_c = 3 - ax_a - ax_b
                    lo = max(mins[ci, ax_c], mins[cj, ax_c])
                    hi = min(maxs[ci, ax_c], maxs[cj, ax_c])
                    if lo > hi:
                        continue
                    for pa in (mins[ci, ax_a], maxs[ci, ax_a]):
                        if not mins[cj, ax_a] <= pa <= maxs[cj, ax_a]:
                            continue
                        for pb in (mins[cj, ax_b], maxs[cj, ax_b]):
                            if not mins[ci, ax_b] <= pb <= maxs[ci, ax_b]:
                                continue
                            a = np.zeros(3)
                            b = np.zeros(3)
                            a[ax_a] = b[ax_a] = pa
                            a[ax_b] = b[ax_b] = pb
                            a[ax_c], b[ax_c] = lo, hi
                            raw.append((a, b, {ci, cj}))
    segments = []
    for a, b, owners in raw:
        w = int(np.argmax(np.abs(b - a))) if not np.allclose(a, b) else 0
        pieces = [(a[w], b[w])]
        fixed = [o for o in range(3) if o != w]
        for cj in range(ncubes):
            if cj in owners:
                continue
            if not all(mins[cj, f] < a[f] < maxs[cj, f] for f in fixed):
                continue
            clo, chi = mins[cj, w], maxs[cj, w]
            # subtract the open interval (clo, chi) from each closed piece
            nxt = []
            for lo, hi in pieces:
                if lo <= min(hi, clo):
                    nxt.append((lo, min(hi, clo)))
                if max(lo, chi) <= hi:
                    nxt.append((max(lo, chi), hi))
            pieces = nxt
        for lo, hi in pieces:
            s, e = a.copy(), b.copy()
            s[w], e[w] = lo, hi
            segments.append((s, e))
    return np.array(segments, dtype=np.float64)


def _segment_distances(points: np.ndarray, segments: np.ndarray) -> np.ndarray:
    """Min distance from each point to any segment, chunked over points."""
    a = segments[:, 0, :]
    ab = segments[:, 1, :] - a
    ab2 = (ab * ab).sum(axis=1)
    safe = np.where(ab2 > 0, ab2, 1.0)
    out = np.empty(points.shape[0], dtype=np.float64)
    chunk = max(1, int(2e7) // max(1, segments.shape[0]))
    for s in range(0, points.shape[0], chunk):
        p = points[s : s + chunk]
        t = ((p[:, None, :] - a[None, :, :]) * ab[None, :, :]).sum(axis=2) / safe
        t = np.clip(np.where(ab2 > 0, t, 0.0), 0.0, 1.0)
        closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
        diff = p[:, None, :] - closest
        out[s : s + chunk] = np.sqrt((diff * diff).sum(axis=2)).min(axis=1)
    return out


def generate_cube_union(spec: CubeUnionSpec) -> PointCloud:
    """Deterministic labeled surface sampling of the box union."""
    mins = np.array([mn for mn, _ in spec.cubes], dtype=np.float64)
    maxs = mins + np.array([sz for _, sz in spec.cubes], dtype=np.float64)

    parts, meta = [], []
    for pts, ax, sign, u, v, bounds in _face_grids(spec, mins, maxs):
        parts.append(pts)
        meta.append(
            np.broadcast_to(
                np.array([(ax, sign, u, v) + bounds], dtype=np.float64),
                (pts.shape[0], 8),
            )
        )
    points = np.concatenate(parts, axis=0)
    meta_arr = np.concatenate(meta, axis=0)

    quantum = _DEDUP_FRAC * spec.spacing
    keys = np.round(points / quantum).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    order = np.sort(first)
    points = np.ascontiguousarray(points[order])
    meta_arr = meta_arr[order]

    if spec.jitter > 0:
        rng = np.random.default_rng(spec.seed)
        offs = rng.uniform(-spec.jitter, spec.jitter, (points.shape[0], 2))
        offs *= spec.spacing
        jit = points.copy()
        rows = np.arange(points.shape[0])
        u_ax = meta_arr[:, 2].astype(np.int64)
        v_ax = meta_arr[:, 3].astype(np.int64)
        jit[rows, u_ax] = np.clip(
            jit[rows, u_ax] + offs[:, 0], meta_arr[:, 4], meta_arr[:, 5]
        )
        jit[rows, v_ax] = np.clip(
            jit[rows, v_ax] + offs[:, 1], meta_arr[:, 6], meta_arr[:, 7]
        )
        probe = jit.copy()
        ax = meta_arr[:, 0].astype(np.int64)
        probe[rows, ax] += meta_arr[:, 1] * _PROBE_FRAC * spec.spacing
        bad = np.zeros(points.shape[0], dtype=bool)
        for cj in range(mins.shape[0]):
            bad |= _strictly_inside(probe, mins[cj], maxs[cj])
        points = np.where(bad[:, None], points, jit)

    segments = _edge_segments(mins, maxs)
    dist = _segment_distances(points, segments)
    labels = (dist <= spec.band).astype(np.uint8)
    return PointCloud(points, labels, name="cube-union")
