"""Backend dispatch for the hot kernels.

The compiled extension is preferred when importable; setting the
environment variable ``HGRESAMPLE_PURE=1`` before import forces the pure
numpy fallback. Both backends implement identical arithmetic: voxel counts
are byte-identical, gamma scores agree to fp roundoff.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

from . import _kernels_py
from .cloud import ValidationError

_cy = None
if os.environ.get("HGRESAMPLE_PURE") != "1":
    try:
        from . import _kernels_cy as _cy  # type: ignore[no-redef]
    except ImportError:
        _cy = None

# Cell grids larger than this are degenerate (points spread over an
# astronomical multiple of the pitch); the tree-based fallback handles them.
_MAX_GRID_CELLS = 4e18


def active_backend() -> str:
    """Name of the kernel backend selected at import: compiled or python."""
    return "python" if _cy is None else "compiled"


def _resolve(impl: Optional[str]) -> str:
    if impl is None:
        return active_backend()
    if impl not in ("compiled", "python"):
        raise ValidationError(f"impl must be 'compiled' or 'python', got {impl!r}")
    if impl == "compiled" and _cy is None:
        raise ValidationError("compiled kernels are not available in this install")
    return impl


def count_signals(
    points: np.ndarray,
    d: float,
    k: int,
    workers: int = 1,
    impl: Optional[str] = None,
) -> np.ndarray:
    """(N, k^3) voxel occupancy counts for every point's kernel block."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if _resolve(impl) == "python":
        return _kernels_py.count_signals(pts, d, k, workers)
    cell = 0.5 * k * d
    ij = np.floor(pts / cell).astype(np.int64)
    mins = ij.min(axis=0)
    ij -= mins
    dims = ij.max(axis=0) + 1
    if float(dims[0]) * float(dims[1]) * float(dims[2]) > _MAX_GRID_CELLS:
        return _kernels_py.count_signals(pts, d, k, workers)
    code = (ij[:, 0] * dims[1] + ij[:, 1]) * dims[2] + ij[:, 2]
    order = np.argsort(code, kind="stable").astype(np.int64)
    sorted_codes = code[order]
    ucodes, first = np.unique(sorted_codes, return_index=True)
    starts = np.append(first, sorted_codes.size).astype(np.int64)
    return _cy.count_signals_grid(
        pts,
        order,
        np.ascontiguousarray(ucodes, dtype=np.int64),
        np.ascontiguousarray(starts),
        np.ascontiguousarray(mins, dtype=np.int64),
        np.ascontiguousarray(dims, dtype=np.int64),
        cell,
        float(d),
        int(k),
        int(workers),
    )


def lhf_gamma(
    points: np.ndarray,
    nbr_idx: np.ndarray,
    workers: int = 1,
    impl: Optional[str] = None,
) -> np.ndarray:
    """Per-point high-frequency coefficient fraction at one scale."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    nbr = np.ascontiguousarray(nbr_idx, dtype=np.int64)
    if _resolve(impl) == "python":
        return _kernels_py.lhf_gamma(pts, nbr, workers)
    if nbr.shape[1] + 1 > _cy.MAX_NX:
        # Signals wider than the compiled stack buffer go to the fallback.
        return _kernels_py.lhf_gamma(pts, nbr, workers)
    return _cy.lhf_gamma(pts, nbr, int(workers))
