"""Evaluation metrics for edge-aware resampling.

Selection quality against labeled ground truth (precision / recall / F1
and mean distance to the nearest true edge point) plus a thresholded
symmetric cloud-to-cloud distance for comparing a recovered cloud with
its original.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.spatial import cKDTree

from .cloud import PointCloud, ValidationError
from .spatial import intrinsic_resolution


class CloudDistance(NamedTuple):
    """Thresholded nearest-neighbor distances between two clouds.

    ``d0`` averages, over points of the first cloud, the distance to the
    nearest point of the second cloud, counting only points whose nearest
    neighbor lies within ``d_theta``; ``n1`` is how many matched.
    ``d0_dual`` / ``n2`` mirror the roles. An unmatched side reports NaN.
    """

    d0: float
    d0_dual: float
    n1: int
    n2: int


def f1_from_pr(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    for name, v in (("precision", precision), ("recall", recall)):
        if not (np.isfinite(v) and 0.0 <= v <= 1.0):
            raise ValidationError(f"{name} must be in [0, 1], got {v}")
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _as_index_array(selected, n: int) -> np.ndarray:
    sel = np.asarray(selected)
    if sel.size == 0:
        raise ValidationError("selection is empty")
    if sel.ndim != 1 or not np.issubdtype(sel.dtype, np.integer):
        raise ValidationError("selection must be a 1-d integer index array")
    if sel.min() < 0 or sel.max() >= n:
        raise ValidationError(f"selection indices out of range [0, {n})")
    if np.unique(sel).size != sel.size:
        raise ValidationError("selection contains duplicate indices")
    return sel


def _labels_of(cloud: PointCloud) -> np.ndarray:
    if cloud.labels is None:
        raise ValidationError("cloud carries no edge labels")
    return cloud.labels


def edge_prf(selected, labels) -> tuple:
    """Precision, recall and F1 of an index selection against 0/1 labels."""
    lab = np.asarray(labels)
    if lab.ndim != 1:
        raise ValidationError("labels must be a 1-d array")
    lab = lab.astype(bool)
    n_edge = int(lab.sum())
    if n_edge == 0:
        raise ValidationError("no edge points in ground truth labels")
    sel = _as_index_array(selected, lab.shape[0])
    tp = int(lab[sel].sum())
    precision = tp / sel.size
    recall = tp / n_edge
    return precision, recall, f1_from_pr(precision, recall)


def _coords(arr, name: str) -> np.ndarray:
    if isinstance(arr, PointCloud):
        return arr.points
    pts = np.asarray(arr, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] == 0:
        raise ValidationError(f"{name} must be a nonempty (n, 3) array")
    if not np.isfinite(pts).all():
        raise ValidationError(f"{name} must be finite")
    return pts


def mean_edge_distance(selected_points, edge_points, workers: int = 1) -> float:
    """Mean distance from each selected point to its nearest edge point."""
    sel = _coords(selected_points, "selected_points")
    edges = _coords(edge_points, "edge_points")
    d, _ = cKDTree(edges).query(sel, k=1, workers=workers)
    return float(np.mean(d))


def cloud_distance(
    original: Union[PointCloud, np.ndarray],
    recovered: Union[PointCloud, np.ndarray],
    d_theta: Optional[float] = None,
    workers: int = 1,
) -> CloudDistance:
    """Symmetric thresholded distance between two clouds.

    ``d_theta`` defaults to three times the intrinsic resolution of
    ``original``. Swapping the arguments swaps (d0, n1) with (d0_dual, n2).
    """
    a = _coords(original, "original")
    b = _coords(recovered, "recovered")
    if d_theta is None:
        d_theta = 3.0 * intrinsic_resolution(PointCloud(a), workers=workers)
    if not (np.isfinite(d_theta) and d_theta > 0):
        raise ValidationError(f"d_theta must be > 0, got {d_theta}")

    tree_a = cKDTree(a)
    tree_b = cKDTree(b)
    d_ab, _ = tree_b.query(a, k=1, workers=workers)
    d_ba, _ = tree_a.query(b, k=1, workers=workers)

    def side(d: np.ndarray):
        matched = d <= d_theta
        n = int(matched.sum())
        return (float(np.mean(d[matched])) if n else float("nan")), n

    d0, n1 = side(d_ab)
    d0_dual, n2 = side(d_ba)
    return CloudDistance(d0, d0_dual, n1, n2)


@dataclass
class EvalReport:
    """Flat bundle of evaluation numbers; unset fields stay None."""

    precision: Optional[float] = None
    recall: Optional[float] = None
    f1: Optional[float] = None
    mean_edge_distance: Optional[float] = None
    d0: Optional[float] = None
    d0_dual: Optional[float] = None
    n1: Optional[int] = None
    n2: Optional[int] = None
    d_theta: Optional[float] = None

    @staticmethod
    def field_names() -> list:
        return [f.name for f in fields(EvalReport)]

    def _cell(self, value) -> str:
        if value is None:
            return ""
        if isinstance(value, int):
            return str(value)
        return format(float(value), ".12g")

    def as_text(self) -> str:
        """One key=value line per set field."""
        lines = [
            f"{name}={self._cell(getattr(self, name))}"
            for name in self.field_names()
            if getattr(self, name) is not None
        ]
        return "\n".join(lines)

    def csv_row(self) -> str:
        return ",".join(self._cell(getattr(self, name)) for name in self.field_names())

    @staticmethod
    def csv_header() -> str:
        return ",".join(EvalReport.field_names())


def evaluate_edges(
    cloud: PointCloud, selected, workers: int = 1
) -> EvalReport:
    """Score a selection on a labeled cloud: P/R/F1 + mean edge distance."""
    lab = _labels_of(cloud)
    precision, recall, f1 = edge_prf(selected, lab)
    sel = _as_index_array(selected, len(cloud))
    med = mean_edge_distance(
        cloud.points[sel], cloud.points[lab.astype(bool)], workers=workers
    )
    return EvalReport(
        precision=precision, recall=recall, f1=f1, mean_edge_distance=med
    )


def evaluate_distance(
    original: Union[PointCloud, np.ndarray],
    recovered: Union[PointCloud, np.ndarray],
    d_theta: Optional[float] = None,
    workers: int = 1,
) -> EvalReport:
    """Thresholded two-sided cloud distance as an EvalReport."""
    a = _coords(original, "original")
    if d_theta is None:
        d_theta = 3.0 * intrinsic_resolution(PointCloud(a), workers=workers)
    cd = cloud_distance(a, recovered, d_theta=d_theta, workers=workers)
    return EvalReport(
        d0=cd.d0, d0_dual=cd.d0_dual, n1=cd.n1, n2=cd.n2, d_theta=d_theta
    )
