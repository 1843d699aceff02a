"""Point cloud container and noise injection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition."""


@dataclass
class PointCloud:
    """A 3D point set with an optional per-point 0/1 edge label.

    points : (N, 3) float64 array, finite, N >= 1.
    labels : optional (N,) uint8 array of {0, 1} edge flags.
    name   : optional free-form identifier (file stem on load).
    """

    points: np.ndarray
    labels: Optional[np.ndarray] = None
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValidationError(f"points must be (N, 3), got {pts.shape}")
        if pts.shape[0] < 1:
            raise ValidationError("point cloud must contain at least one point")
        if not np.isfinite(pts).all():
            raise ValidationError("points contain non-finite coordinates")
        self.points = np.ascontiguousarray(pts)
        if self.labels is not None:
            lab = np.asarray(self.labels)
            if lab.shape != (pts.shape[0],):
                raise ValidationError(
                    f"labels must have shape ({pts.shape[0]},), got {lab.shape}"
                )
            if not np.isin(lab, (0, 1)).all():
                raise ValidationError("labels must be 0 or 1")
            self.labels = np.ascontiguousarray(lab, dtype=np.uint8)

    def __len__(self) -> int:
        return self.points.shape[0]

    def subset(self, indices: np.ndarray, name: Optional[str] = None) -> "PointCloud":
        """New cloud from a row index array; labels follow when present."""
        idx = np.asarray(indices)
        lab = self.labels[idx].copy() if self.labels is not None else None
        return PointCloud(self.points[idx].copy(), lab, name or self.name)

    def copy(self) -> "PointCloud":
        lab = None if self.labels is None else self.labels.copy()
        return PointCloud(self.points.copy(), lab, self.name)


def add_noise(
    cloud: PointCloud,
    level: float,
    seed: int = 0,
    sigma: Optional[float] = None,
) -> PointCloud:
    """Add i.i.d. Gaussian noise to every coordinate.

    The standard deviation is ``level`` times the cloud's intrinsic
    resolution, or ``sigma`` verbatim when given (the absolute override).
    ``level=0`` (or ``sigma=0``) returns an identical copy. Deterministic
    for a fixed seed.
    """
    if sigma is None:
        if level < 0:
            raise ValidationError("noise level must be >= 0")
        if level == 0:
            return cloud.copy()
        from .spatial import intrinsic_resolution

        sigma = level * intrinsic_resolution(cloud)
    else:
        if sigma < 0:
            raise ValidationError("noise sigma must be >= 0")
        if sigma == 0:
            return cloud.copy()
    rng = np.random.default_rng(seed)
    noisy = cloud.points + rng.normal(0.0, sigma, size=cloud.points.shape)
    labels = None if cloud.labels is None else cloud.labels.copy()
    return PointCloud(noisy, labels, cloud.name)
