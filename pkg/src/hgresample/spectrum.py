"""Spectrum estimation from coordinate covariance, and the associated
forward/inverse transforms.

The basis comes from the eigendecomposition of R = P' P'^T where P' is the
zero-mean coordinate matrix. R has rank at most 3, so all but three
eigenvalues are zero; by this spectrum's convention the SMALL eigenvalues
are the high-frequency end. Repeated eigenvalues make the eigenvector
blocks mathematically arbitrary, so each near-equal cluster is replaced by
a canonical basis of its invariant subspace (Gram-Schmidt over the cluster
projector's columns in index order). That keeps the transform deterministic
and stable under fp-level input perturbations, which coefficient-magnitude
scores downstream rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import ValidationError

# Relative eigenvalue-gap tolerances: below _CLUSTER_RTOL of the largest
# eigenvalue two eigenvalues count as repeated; gaps within _TIE_RTOL of the
# largest gap count as tied for the threshold rule.
_CLUSTER_RTOL = 1e-9
_TIE_RTOL = 1e-9
_SIGN_RTOL = 1e-6


@dataclass(frozen=True)
class KernelConfig:
    """Cubic voxel kernel geometry: k voxels per axis (odd), pitch d."""

    k: int = 3
    d: float = 1.0

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ValidationError(f"kernel size k must be odd and >= 1, got {self.k}")
        if not (np.isfinite(self.d) and self.d > 0):
            raise ValidationError(f"voxel pitch d must be finite and > 0, got {self.d}")

    @property
    def n_voxels(self) -> int:
        return self.k ** 3


@dataclass
class SpectrumBasis:
    """Orthonormal basis V (columns) with ascending eigenvalues and the
    high-frequency cutoff theta (1-based: components 1..theta)."""

    vectors: np.ndarray
    eigenvalues: np.ndarray
    theta: int

    @property
    def size(self) -> int:
        return self.vectors.shape[0]


def kernel_voxel_centers(cfg: KernelConfig) -> np.ndarray:
    """Voxel center offsets of the kernel, shape (k^3, 3).

    Enumeration is row-major with z fastest, then y, then x. Offsets are
    symmetric around the origin, so every column sums to exactly zero.
    """
    offs = (np.arange(cfg.k, dtype=np.float64) - (cfg.k - 1) / 2.0) * cfg.d
    grid = np.meshgrid(offs, offs, offs, indexing="ij")
    return np.ascontiguousarray(np.stack(grid, axis=-1).reshape(-1, 3))


def estimate_spectrum(coords: np.ndarray) -> SpectrumBasis:
    """Eigendecomposition of the Gram matrix of zero-mean coordinates.

    coords is (M, 3) with M >= 2 and finite entries. Returns eigenvalues in
    ascending order, canonicalized eigenvectors (see module docstring) with
    the sign convention that each column's largest-magnitude entry is
    positive (ties broken by the lowest row index), and theta from
    frequency_gap_threshold.
    """
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValidationError(f"coords must be (M, 3), got {pts.shape}")
    if pts.shape[0] < 2:
        raise ValidationError("need at least 2 coordinate rows")
    if not np.isfinite(pts).all():
        raise ValidationError("coords contain non-finite values")
    centered = pts - pts.mean(axis=0)
    gram = centered @ centered.T
    lam, vec = np.linalg.eigh(gram)
    vec = _canonicalize_clusters(vec, lam)
    _fix_signs(vec)
    return SpectrumBasis(vec, lam, frequency_gap_threshold(lam))


def frequency_gap_threshold(eigenvalues: np.ndarray) -> int:
    """1-based index of the largest consecutive eigenvalue gap.

    Ties (gaps equal up to a relative tolerance) resolve to the smallest
    index. The result always satisfies 1 <= theta <= M - 1.
    """
    lam = np.asarray(eigenvalues, dtype=np.float64)
    if lam.ndim != 1 or lam.size < 2:
        raise ValidationError("need at least 2 eigenvalues")
    gaps = np.diff(lam)
    if gaps.min() < -1e-9 * max(1.0, float(np.abs(lam).max())):
        raise ValidationError("eigenvalues must be in ascending order")
    gmax = float(gaps.max())
    cut = gmax - _TIE_RTOL * abs(gmax)
    return int(np.nonzero(gaps >= cut)[0][0]) + 1


def hgft(basis: SpectrumBasis, signal: np.ndarray) -> np.ndarray:
    """Forward transform V^T s; signal is (M,) or (M, C)."""
    s = np.asarray(signal, dtype=np.float64)
    if s.shape[0] != basis.size or s.ndim not in (1, 2):
        raise ValidationError(
            f"signal must be ({basis.size},) or ({basis.size}, C), got {s.shape}"
        )
    return basis.vectors.T @ s


def ihgft(basis: SpectrumBasis, coeffs: np.ndarray) -> np.ndarray:
    """Inverse transform V s_hat; coeffs is (M,) or (M, C)."""
    c = np.asarray(coeffs, dtype=np.float64)
    if c.shape[0] != basis.size or c.ndim not in (1, 2):
        raise ValidationError(
            f"coeffs must be ({basis.size},) or ({basis.size}, C), got {c.shape}"
        )
    return basis.vectors @ c


def _cluster_bounds(lam: np.ndarray) -> list:
    """[start, end) ranges of near-equal eigenvalue runs."""
    tol = _CLUSTER_RTOL * float(np.abs(lam).max()) if lam.size else 0.0
    bounds = []
    start = 0
    for i in range(1, lam.size):
        if lam[i] - lam[i - 1] > tol:
            bounds.append((start, i))
            start = i
    bounds.append((start, lam.size))
    return bounds


def _canonicalize_clusters(vec: np.ndarray, lam: np.ndarray) -> np.ndarray:
    out = np.array(vec, dtype=np.float64, copy=True)
    for start, end in _cluster_bounds(lam):
        if end - start > 1:
            out[:, start:end] = _canonical_subspace_basis(out[:, start:end])
    return out


def _canonical_subspace_basis(block: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(block).

    Walks the columns of the subspace projector in index order, keeping
    those with a significant residual after (twice-applied) Gram-Schmidt
    against the already-kept ones. The projector is invariant to the
    arbitrary rotation the eigensolver picked, so the result depends only
    on the subspace itself.
    """
    m, c = block.shape
    kept: list = []
    for thresh in (0.1, 1e-6):
        for j in range(m):
            if len(kept) == c:
                break
            v = block @ block[j, :]
            for u in kept:
                v -= (u @ v) * u
            for u in kept:
                v -= (u @ v) * u
            norm = np.linalg.norm(v)
            if norm > thresh:
                kept.append(v / norm)
        if len(kept) == c:
            break
    if len(kept) < c:
        raise RuntimeError("failed to canonicalize a degenerate eigenvector block")
    return np.column_stack(kept)


def _fix_signs(vec: np.ndarray) -> None:
    """Flip columns so their leading entry is positive, in place.

    The leading entry is the first whose magnitude is within a small
    relative tolerance of the column maximum. The tolerance keeps the
    choice stable when two entries of equal magnitude (e.g. +a and -a in a
    symmetric lattice) trade places under fp-level input perturbations.
    """
    mags = np.abs(vec)
    peak = mags.max(axis=0)
    lead = np.argmax(mags >= (1.0 - _SIGN_RTOL) * peak, axis=0)
    signs = np.sign(vec[lead, np.arange(vec.shape[1])])
    signs[signs == 0] = 1.0
    vec *= signs
