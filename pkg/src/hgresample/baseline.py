"""PCA surface-variation baseline scorer."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .cloud import PointCloud, ValidationError
from .resample import SHARP_HIGH, ScoreVector
from .spatial import SpatialIndex


def pca_surface_variation(
    cloud: PointCloud,
    index: Optional[SpatialIndex] = None,
    m: int = 16,
    workers: int = 1,
) -> ScoreVector:
    """Surface variation mu1 / (mu1 + mu2 + mu3) of each point's local
    covariance, where mu1 <= mu2 <= mu3 are the eigenvalues over the m
    nearest neighbors (the point itself included).

    Scores lie in [0, 1/3]: 0 for coplanar neighborhoods, 1/3 for fully
    isotropic ones. Zero-trace (all-coincident) neighborhoods score 0.
    Larger means sharper (sharp_high).
    """
    n = len(cloud)
    if not 3 <= m <= n:
        raise ValidationError(f"m must be in [3, {n}], got {m}")
    if index is None:
        index = SpatialIndex(cloud)
    nbr = index.k_nearest_all(m - 1, workers=workers)
    group = np.concatenate(
        [cloud.points[:, None, :], cloud.points[nbr]], axis=1
    )
    centered = group - group.mean(axis=1, keepdims=True)
    cov = centered.transpose(0, 2, 1) @ centered
    mu = np.linalg.eigvalsh(cov)
    trace = mu.sum(axis=1)
    safe = np.where(trace > 0, trace, 1.0)
    scores = np.where(trace > 0, np.maximum(mu[:, 0], 0.0) / safe, 0.0)
    return ScoreVector(scores, SHARP_HIGH, "pca")
