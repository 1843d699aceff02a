"""Pure numpy fallbacks for the hot per-point kernels.

These mirror `_kernels_cy` exactly: identical floor arithmetic for voxel
binning (counts are byte-identical across backends) and the same canonical
basis construction for the per-point gamma scores.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .spectrum import (
    _canonicalize_clusters,
    _fix_signs,
    frequency_gap_threshold,
)


def bin_offsets(offsets: np.ndarray, d: float, k: int) -> np.ndarray:
    """Voxel cell coordinates (per axis, in [0, k) when inside the kernel)
    for relative offsets. Boundaries are half-open: [c - d/2, c + d/2)."""
    h = (k - 1) // 2
    return np.floor(offsets / d + 0.5).astype(np.int64) + h


def count_signals(
    points: np.ndarray, d: float, k: int, workers: int = 1
) -> np.ndarray:
    """(N, k^3) per-point voxel occupancy counts of the k*k*k kernel."""
    n = points.shape[0]
    nk = k ** 3
    h = (k - 1) // 2
    center = (h * k + h) * k + h
    # every point counts itself in the center voxel
    lin_parts = [np.arange(n, dtype=np.int64) * nk + center]
    if n >= 2:
        tree = cKDTree(points)
        radius = 0.5 * k * d * np.sqrt(3.0) * (1.0 + 1e-12)
        pairs = tree.query_pairs(radius, output_type="ndarray")
        if pairs.size:
            for a, b in ((pairs[:, 0], pairs[:, 1]), (pairs[:, 1], pairs[:, 0])):
                cell = bin_offsets(points[b] - points[a], d, k)
                ok = ((cell >= 0) & (cell < k)).all(axis=1)
                if ok.any():
                    cc = cell[ok]
                    flat = (cc[:, 0] * k + cc[:, 1]) * k + cc[:, 2]
                    lin_parts.append(a[ok] * nk + flat)
    lin = np.concatenate(lin_parts)
    counts = np.bincount(lin, minlength=n * nk)
    return counts.reshape(n, nk).astype(np.int64)


def lhf_gamma(points: np.ndarray, nbr_idx: np.ndarray, workers: int = 1) -> np.ndarray:
    """High-frequency coefficient fraction of each point's local offset
    signal at one scale; nbr_idx is (N, N_x - 1) nearest-neighbor indices."""
    n = points.shape[0]
    nx = nbr_idx.shape[1] + 1
    sig = np.zeros((n, nx, 3), dtype=np.float64)
    sig[:, 1:, :] = points[nbr_idx] - points[:, None, :]
    centered = sig - sig.mean(axis=1, keepdims=True)
    gram = centered @ centered.transpose(0, 2, 1)
    lam, vec = np.linalg.eigh(gram)
    gamma = np.empty(n, dtype=np.float64)
    for i in range(n):
        basis = _canonicalize_clusters(vec[i], lam[i])
        _fix_signs(basis)
        theta = frequency_gap_threshold(lam[i])
        coeff = np.abs(basis.T @ sig[i])
        total = coeff.sum()
        gamma[i] = coeff[:theta].sum() / total if total > 0 else 0.0
    return gamma
