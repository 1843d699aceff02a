"""Nearest-neighbor queries with a deterministic tie-break contract.

Neighbors are ordered by (distance, point index) ascending and the query
point itself is excluded, which matches a brute-force linear scan exactly.
scipy's cKDTree provides candidates; ties at the cutoff distance are
repaired here because the tree alone breaks them arbitrarily.
"""

from __future__ import annotations

from typing import Optional, Union

import numpy as np
from scipy.spatial import cKDTree

from .cloud import PointCloud, ValidationError

# Escalation bound for tie repair; beyond this the row is resolved by a
# direct linear scan instead of ever-larger tree queries.
_MAX_TREE_K = 1024


def _scipy_workers(workers: int) -> int:
    return -1 if workers <= 0 else workers


class SpatialIndex:
    """Immutable k-nearest-neighbor index over a fixed point array."""

    def __init__(self, cloud: Union[PointCloud, np.ndarray]):
        pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud)
        pts = np.ascontiguousarray(pts, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValidationError(f"points must be (N, 3), got {pts.shape}")
        self.points = pts
        self.tree = cKDTree(pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def k_nearest(self, i: int, m: int, workers: int = 1) -> np.ndarray:
        """Indices of the m nearest neighbors of point i (excluding i)."""
        n = len(self)
        if not 0 <= i < n:
            raise ValidationError(f"point index {i} out of range [0, {n})")
        return self._knn_rows(np.array([i], dtype=np.int64), m, workers)[0]

    def k_nearest_all(self, m: int, workers: int = 1) -> np.ndarray:
        """(N, m) neighbor indices for every point, same contract as k_nearest."""
        return self._knn_rows(np.arange(len(self), dtype=np.int64), m, workers)

    def nn_distances(self, workers: int = 1) -> np.ndarray:
        """Distance from each point to its nearest other point."""
        if len(self) < 2:
            raise ValidationError("need at least 2 points")
        d, _ = self.tree.query(self.points, k=2, workers=_scipy_workers(workers))
        return d[:, 1]

    # internal

    def _knn_rows(self, rows: np.ndarray, m: int, workers: int) -> np.ndarray:
        n = len(self)
        if not 1 <= m <= n - 1:
            raise ValidationError(f"m must be in [1, {n - 1}], got {m}")
        out = np.empty((rows.shape[0], m), dtype=np.int64)
        out_pos = np.arange(rows.shape[0])
        pending, pending_pos = rows, out_pos
        k_cur = min(n, m + 1)
        while pending.size:
            if k_cur > _MAX_TREE_K and k_cur < n:
                out[pending_pos] = self._brute_rows(pending, m)
                break
            d, ix = self.tree.query(
                self.points[pending], k=k_cur, workers=_scipy_workers(workers)
            )
            d = d.reshape(pending.size, -1)
            ix = ix.reshape(pending.size, -1)
            if k_cur >= n:
                ok = np.ones(pending.size, dtype=bool)
            else:
                # Complete once m non-self candidates sit strictly inside the
                # last returned distance: nothing unreturned can tie with them.
                inside = (ix != pending[:, None]) & (d < d[:, -1:])
                ok = inside.sum(axis=1) >= m
            if ok.any():
                out[pending_pos[ok]] = _cut_rows(d[ok], ix[ok], pending[ok], m)
            pending, pending_pos = pending[~ok], pending_pos[~ok]
            k_cur = min(n, max(k_cur + 1, k_cur * 2))
        return out

    def _brute_rows(self, rows: np.ndarray, m: int) -> np.ndarray:
        out = np.empty((rows.shape[0], m), dtype=np.int64)
        chunk = max(1, int(4e7) // max(1, len(self)))
        for s in range(0, rows.shape[0], chunk):
            sel = rows[s : s + chunk]
            diff = self.points[sel, None, :] - self.points[None, :, :]
            d = np.sqrt((diff * diff).sum(axis=2))
            ix = np.broadcast_to(np.arange(len(self)), d.shape)
            out[s : s + chunk] = _cut_rows(d, ix, sel, m)
        return out


def _cut_rows(d: np.ndarray, ix: np.ndarray, self_idx: np.ndarray, m: int) -> np.ndarray:
    """Per row: sort candidates by (distance, index), drop self, keep first m."""
    order = np.argsort(ix, axis=1, kind="stable")
    d = np.take_along_axis(d, order, axis=1)
    ix = np.take_along_axis(ix, order, axis=1)
    order = np.argsort(d, axis=1, kind="stable")
    d = np.take_along_axis(d, order, axis=1)
    ix = np.take_along_axis(ix, order, axis=1)
    keep = ix != self_idx[:, None]
    pos = np.cumsum(keep, axis=1) - 1
    take = keep & (pos < m)
    counts = take.sum(axis=1)
    if not (counts == m).all():
        raise AssertionError("internal error: fewer than m candidates after cut")
    rowi, coli = np.nonzero(take)
    out = np.empty((d.shape[0], m), dtype=np.int64)
    out[rowi, pos[rowi, coli]] = ix[rowi, coli]
    return out


def k_nearest(index: SpatialIndex, i: int, m: int) -> np.ndarray:
    """Functional wrapper around SpatialIndex.k_nearest."""
    return index.k_nearest(i, m)


def intrinsic_resolution(
    cloud: Union[PointCloud, np.ndarray],
    index: Optional[SpatialIndex] = None,
    workers: int = 1,
) -> float:
    """Mean nearest-neighbor distance of the cloud.

    This is the pitch scale used for voxel kernels and noise levels.
    Requires at least two points.
    """
    if index is None:
        index = SpatialIndex(cloud)
    return float(np.mean(index.nn_distances(workers=workers)))
