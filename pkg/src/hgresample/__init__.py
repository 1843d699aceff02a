"""Edge-preserving 3D point cloud resampling.

Points are scored by how much of their local geometry lives in the
high-frequency part of a data-driven spectrum basis (kernel count
signals for HKC/HKF, nearest-neighbor offset signals for LHF), or by a
PCA surface-variation baseline; ``select_points`` then keeps the
requested fraction. Synthetic labeled clouds, Gaussian noise injection
and evaluation metrics round out the toolkit.
"""

from .baseline import pca_surface_variation
from .cloud import PointCloud, ValidationError, add_noise
from .io import CLOUD_FORMATS, CloudFormatError, load_cloud, save_cloud, save_scores
from .kernels import active_backend
from .metrics import (
    CloudDistance,
    EvalReport,
    cloud_distance,
    edge_prf,
    evaluate_distance,
    evaluate_edges,
    f1_from_pr,
    mean_edge_distance,
)
from .resample import (
    LhfConfig,
    ScoreVector,
    hkc_scores,
    hkf_scores,
    lhf_scores,
    select_points,
)
from .spatial import SpatialIndex, intrinsic_resolution
from .spectrum import (
    KernelConfig,
    SpectrumBasis,
    estimate_spectrum,
    frequency_gap_threshold,
    hgft,
    ihgft,
    kernel_voxel_centers,
)
from .synth import CubeUnionSpec, default_two_cube_spec, generate_cube_union

__version__ = "0.1.0"

__all__ = [
    "CLOUD_FORMATS",
    "CloudDistance",
    "CloudFormatError",
    "CubeUnionSpec",
    "EvalReport",
    "KernelConfig",
    "LhfConfig",
    "PointCloud",
    "ScoreVector",
    "SpatialIndex",
    "SpectrumBasis",
    "ValidationError",
    "__version__",
    "active_backend",
    "add_noise",
    "cloud_distance",
    "default_two_cube_spec",
    "edge_prf",
    "estimate_spectrum",
    "evaluate_distance",
    "evaluate_edges",
    "f1_from_pr",
    "frequency_gap_threshold",
    "generate_cube_union",
    "hgft",
    "hkc_scores",
    "hkf_scores",
    "ihgft",
    "intrinsic_resolution",
    "kernel_voxel_centers",
    "lhf_scores",
    "load_cloud",
    "mean_edge_distance",
    "pca_surface_variation",
    "save_cloud",
    "save_scores",
    "select_points",
]
