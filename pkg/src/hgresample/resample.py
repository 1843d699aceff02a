"""Edge-aware point scoring and selection.

Three scorers, all built on coefficient magnitudes in the coordinate
covariance spectrum of a local signal:

* hkc_scores: ratio of highpass-filtered to complementary energy of the
  local voxel count signal. Flat neighborhoods have no mass on the three
  nonzero-eigenvalue directions, which makes the ratio LARGE, so smaller
  scores mean sharper points (direction sharp_low).
* hkf_scores: fraction of absolute coefficient mass below the spectral gap
  cutoff; again largest on flat patches (direction sharp_low).
* lhf_scores: two-scale fraction of high-frequency coefficient mass of the
  raw neighbor offset signal; large means sharp (direction sharp_high).

select_points honors each vector's direction and breaks ties by ascending
point index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .cloud import PointCloud, ValidationError
from .spatial import SpatialIndex
from .spectrum import (
    KernelConfig,
    SpectrumBasis,
    estimate_spectrum,
    kernel_voxel_centers,
)

SHARP_HIGH = "sharp_high"
SHARP_LOW = "sharp_low"

# beta sentinel for a vanishing lowpass component (pure high-frequency signal)
_BETA_SENTINEL = 1e12
_BETA_EPS = 1e-12


@dataclass
class ScoreVector:
    """Per-point scores plus the direction that means 'sharper'."""

    values: np.ndarray
    direction: str
    method: str

    def __post_init__(self):
        if self.direction not in (SHARP_HIGH, SHARP_LOW):
            raise ValidationError(f"bad direction {self.direction!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ValidationError("scores must be one-dimensional")
        self.values = vals

    def inverted(self) -> "ScoreVector":
        """Same values, opposite sharpness direction (smooth selection)."""
        flip = SHARP_LOW if self.direction == SHARP_HIGH else SHARP_HIGH
        return ScoreVector(self.values, flip, self.method)


@dataclass(frozen=True)
class LhfConfig:
    """Two-scale local spectrum config: neighborhood sizes and the
    resampling fraction used for the scale-weight estimate."""

    n_a: int = 4
    n_b: int = 8
    alpha: float = 0.2

    def __post_init__(self):
        if not 4 <= self.n_a < self.n_b:
            raise ValidationError(
                f"need 4 <= n_a < n_b, got n_a={self.n_a}, n_b={self.n_b}"
            )
        if not 0 < self.alpha <= 1:
            raise ValidationError(f"alpha must be in (0, 1], got {self.alpha}")


def _unit_kernel_basis(cfg: KernelConfig) -> SpectrumBasis:
    # The eigenvectors do not depend on the pitch, so estimate from the
    # unit-pitch kernel: its Gram matrix is exactly integer, which makes the
    # shared basis bit-identical for every d (and every rigid motion of the
    # cloud). Eigenvalues scale by d^2.
    basis = estimate_spectrum(kernel_voxel_centers(KernelConfig(cfg.k, 1.0)))
    basis.eigenvalues = basis.eigenvalues * (cfg.d * cfg.d)
    return basis


def _count_matrix(cloud, cfg, workers, impl) -> np.ndarray:
    counts = kernels.count_signals(cloud.points, cfg.d, cfg.k, workers, impl)
    return counts.astype(np.float64)


def local_count_signal(
    cloud: PointCloud, index: Optional[SpatialIndex], i: int, cfg: KernelConfig
) -> np.ndarray:
    """Occupancy counts of the kernel block centered at point i.

    Voxel n spans [center_n - d/2, center_n + d/2) per axis in the
    kernel_voxel_centers enumeration; the center point counts itself.
    """
    if index is None:
        index = SpatialIndex(cloud)
    n = len(cloud)
    if not 0 <= i < n:
        raise ValidationError(f"point index {i} out of range [0, {n})")
    p = cloud.points[i]
    radius = 0.5 * cfg.k * cfg.d * math.sqrt(3.0) * (1.0 + 1e-12)
    cand = index.tree.query_ball_point(p, radius)
    cell = np.floor((index.points[cand] - p) / cfg.d + 0.5).astype(np.int64)
    cell += (cfg.k - 1) // 2
    ok = ((cell >= 0) & (cell < cfg.k)).all(axis=1)
    cc = cell[ok]
    flat = (cc[:, 0] * cfg.k + cc[:, 1]) * cfg.k + cc[:, 2]
    return np.bincount(flat, minlength=cfg.n_voxels).astype(np.int64)


def hkc_beta(signals: np.ndarray, basis: SpectrumBasis) -> np.ndarray:
    """Highpass-to-residual energy ratio for each row of ``signals``.

    The filter gain is 1 - lambda/lambda_max per component. Rows whose
    residual norm falls below 1e-12 get the sentinel 1e12.
    """
    lam = basis.eigenvalues
    lmax = lam[-1]
    if lmax <= 0:
        raise ValidationError("kernel spectrum is degenerate (lambda_max = 0)")
    gain = 1.0 - lam / lmax
    coeff = signals @ basis.vectors
    out = (coeff * gain) @ basis.vectors.T
    num = np.linalg.norm(out, axis=1)
    resid = np.linalg.norm(signals - out, axis=1)
    small = resid < _BETA_EPS
    safe = np.where(small, 1.0, resid)
    return np.where(small, _BETA_SENTINEL, num / safe)


def hkf_sigma(signals: np.ndarray, basis: SpectrumBasis) -> np.ndarray:
    """Fraction of absolute coefficient mass in components 1..theta."""
    coeff = np.abs(signals @ basis.vectors)
    total = coeff.sum(axis=1)
    head = coeff[:, : basis.theta].sum(axis=1)
    safe = np.where(total > 0, total, 1.0)
    return np.where(total > 0, head / safe, 0.0)


def hkc_scores(
    cloud: PointCloud,
    index: Optional[SpatialIndex] = None,
    cfg: KernelConfig = KernelConfig(),
    workers: int = 1,
    impl: Optional[str] = None,
) -> ScoreVector:
    """Kernel-cube scores; smaller means sharper (sharp_low)."""
    signals = _count_matrix(cloud, cfg, workers, impl)
    beta = hkc_beta(signals, _unit_kernel_basis(cfg))
    return ScoreVector(beta, SHARP_LOW, "hkc")


def hkf_scores(
    cloud: PointCloud,
    index: Optional[SpatialIndex] = None,
    cfg: KernelConfig = KernelConfig(),
    workers: int = 1,
    impl: Optional[str] = None,
) -> ScoreVector:
    """Kernel-frequency scores; smaller means sharper (sharp_low)."""
    signals = _count_matrix(cloud, cfg, workers, impl)
    sigma = hkf_sigma(signals, _unit_kernel_basis(cfg))
    return ScoreVector(sigma, SHARP_LOW, "hkf")


def lhf_local_signal(
    cloud: PointCloud, index: Optional[SpatialIndex], i: int, n_x: int
) -> np.ndarray:
    """(N_x, 3) local offset signal of point i: a zero row followed by the
    n_x - 1 nearest neighbor offsets in (distance, index) order."""
    if index is None:
        index = SpatialIndex(cloud)
    if n_x < 2:
        raise ValidationError(f"local signal needs n_x >= 2, got {n_x}")
    nbr = index.k_nearest(i, n_x - 1)
    sig = np.zeros((n_x, 3), dtype=np.float64)
    sig[1:] = cloud.points[nbr] - cloud.points[i]
    return sig


def _top_fraction_mean(values: np.ndarray, alpha: float) -> float:
    q = max(1, math.ceil(alpha * values.size))
    top = np.partition(values, values.size - q)[values.size - q :]
    return float(np.mean(top))


def lhf_scores(
    cloud: PointCloud,
    index: Optional[SpatialIndex] = None,
    cfg: LhfConfig = LhfConfig(),
    workers: int = 1,
    impl: Optional[str] = None,
) -> ScoreVector:
    """Two-scale local spectrum scores; larger means sharper (sharp_high).

    The scale weight is eps = Gamma_b / (Gamma_a + Gamma_b) where Gamma_x
    is the mean of the top ceil(alpha*N) single-scale scores (0.5 when both
    vanish); the blend is eps*gamma_a + (1-eps)*gamma_b.
    """
    if index is None:
        index = SpatialIndex(cloud)
    n = len(cloud)
    if cfg.n_b >= n:
        raise ValidationError(f"n_b must be < N = {n}, got {cfg.n_b}")
    nbr_b = index.k_nearest_all(cfg.n_b - 1, workers=workers)
    gamma_a = kernels.lhf_gamma(cloud.points, nbr_b[:, : cfg.n_a - 1], workers, impl)
    gamma_b = kernels.lhf_gamma(cloud.points, nbr_b, workers, impl)
    big_a = _top_fraction_mean(gamma_a, cfg.alpha)
    big_b = _top_fraction_mean(gamma_b, cfg.alpha)
    eps = big_b / (big_a + big_b) if big_a + big_b > 0 else 0.5
    return ScoreVector(eps * gamma_a + (1.0 - eps) * gamma_b, SHARP_HIGH, "lhf")


def select_points(scores: ScoreVector, alpha: float) -> np.ndarray:
    """Indices of the round(alpha*N) sharpest points, sorted ascending.

    Ranking ties break by ascending point index; at least one point is
    always selected.
    """
    if not 0 < alpha <= 1:
        raise ValidationError(f"alpha must be in (0, 1], got {alpha}")
    vals = scores.values
    n = vals.size
    if n == 0:
        raise ValidationError("empty score vector")
    if not np.isfinite(vals).all():
        raise ValidationError("scores contain non-finite values")
    n_r = min(n, max(1, round(alpha * n)))
    key = -vals if scores.direction == SHARP_HIGH else vals
    order = np.argsort(key, kind="stable")
    return np.sort(order[:n_r])
