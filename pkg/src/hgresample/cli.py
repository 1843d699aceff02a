"""Command-line interface.

Subcommands: ``synth`` (labeled box-union clouds), ``noise`` (Gaussian
perturbation), ``resample`` (score + select a subcloud), ``eval-edges``
and ``eval-distance`` (quality reports), ``info`` (cloud summary).

Exit codes: 0 success, 2 validation / argument errors, 1 I/O errors.
All randomness is driven by an explicit ``--seed`` (default 0); fixed
flags give byte-identical output files.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .baseline import pca_surface_variation
from .cloud import PointCloud, ValidationError, add_noise
from .io import CLOUD_FORMATS, CloudFormatError, load_cloud, save_cloud, save_scores
from .kernels import active_backend
from .metrics import EvalReport, evaluate_distance, evaluate_edges
from .resample import LhfConfig, hkc_scores, hkf_scores, lhf_scores, select_points
from .spatial import SpatialIndex, intrinsic_resolution
from .spectrum import KernelConfig
from .synth import CubeUnionSpec, default_two_cube_spec, generate_cube_union


def _cube_arg(text: str):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad cube spec {text!r}")
    if len(vals) == 4:
        return (tuple(vals[:3]), (vals[3], vals[3], vals[3]))
    if len(vals) == 6:
        return (tuple(vals[:3]), tuple(vals[3:]))
    raise argparse.ArgumentTypeError(
        "cube spec needs 4 numbers (x,y,z,side) or 6 (x,y,z,sx,sy,sz)"
    )


def _add_output_args(p: argparse.ArgumentParser):
    p.add_argument("--out", required=True, help="output cloud path")
    p.add_argument(
        "--format",
        choices=sorted(CLOUD_FORMATS),
        default=None,
        help="output format (default: from file extension)",
    )


def _add_input_arg(p: argparse.ArgumentParser):
    p.add_argument("--in", dest="infile", required=True, help="input cloud path")


def cmd_synth(args) -> int:
    if args.cube:
        spec = CubeUnionSpec(
            cubes=tuple(args.cube),
            spacing=args.spacing,
            edge_band=args.edge_band,
            jitter=args.jitter,
            seed=args.seed,
        )
    else:
        spec = default_two_cube_spec(spacing=args.spacing)
        if args.edge_band is not None or args.jitter or args.seed:
            spec = CubeUnionSpec(
                cubes=spec.cubes,
                spacing=args.spacing,
                edge_band=args.edge_band,
                jitter=args.jitter,
                seed=args.seed,
            )
    cloud = generate_cube_union(spec)
    save_cloud(cloud, args.out, format=args.format)
    n_edge = int(cloud.labels.sum())
    print(
        f"synth: n={len(cloud)} edges={n_edge} spacing={spec.spacing:g} "
        f"band={spec.band:g} -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_noise(args) -> int:
    cloud = load_cloud(args.infile)
    noisy = add_noise(cloud, args.level, seed=args.seed, sigma=args.sigma)
    save_cloud(noisy, args.out, format=args.format)
    print(
        f"noise: n={len(noisy)} level={args.level:g} seed={args.seed} "
        f"-> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_resample(args) -> int:
    cloud = load_cloud(args.infile)
    t0 = time.perf_counter()
    index = SpatialIndex(cloud)
    params = f"method={args.method} alpha={args.alpha:g}"
    if args.method in ("hkc", "hkf"):
        d = args.kernel_d
        if d is None:
            d = intrinsic_resolution(cloud, index, workers=args.workers)
        cfg = KernelConfig(k=args.k, d=d)
        score_fn = hkc_scores if args.method == "hkc" else hkf_scores
        scores = score_fn(cloud, index, cfg=cfg, workers=args.workers)
        params += f" k={cfg.k} d={cfg.d:.6g}"
    elif args.method == "lhf":
        cfg = LhfConfig(n_a=args.na, n_b=args.nb, alpha=args.alpha)
        scores = lhf_scores(cloud, index, cfg=cfg, workers=args.workers)
        params += f" na={cfg.n_a} nb={cfg.n_b}"
    else:
        scores = pca_surface_variation(cloud, index, m=args.m, workers=args.workers)
        params += f" m={args.m}"
    if args.select == "smooth":
        scores = scores.inverted()
    selected = select_points(scores, args.alpha)
    sub = cloud.subset(selected)
    save_cloud(sub, args.out, format=args.format)
    if args.scores:
        save_scores(args.scores, scores.values)
    dt = time.perf_counter() - t0
    print(
        f"resample: {params} select={args.select} n={len(cloud)} "
        f"n_r={len(sub)} workers={args.workers} time={dt:.3f}s -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _match_indices(original: PointCloud, recovered: PointCloud) -> np.ndarray:
    """Map recovered points to original row indices by exact coordinates."""
    d, idx = cKDTree(original.points).query(recovered.points, k=1)
    if (d > 0).any():
        bad = int(np.argmax(d))
        raise ValidationError(
            f"recovered point {bad} does not coincide with any original point "
            "(eval-edges expects a subcloud written by resample)"
        )
    return idx.astype(np.int64)


def _eval_targets(args) -> list:
    if args.batch:
        paths = sorted(
            p
            for p in Path(args.batch).iterdir()
            if p.suffix.lower().lstrip(".") in CLOUD_FORMATS
        )
        if not paths:
            raise ValidationError(f"no cloud files found in {args.batch}")
        return paths
    return [Path(args.recovered)]


def _emit_reports(paths, reports):
    if len(paths) == 1:
        print(reports[0].as_text())
    else:
        print("file," + EvalReport.csv_header())
        for p, r in zip(paths, reports):
            print(f"{p.name},{r.csv_row()}")


def cmd_eval_edges(args) -> int:
    original = load_cloud(args.infile)
    paths = _eval_targets(args)
    reports = []
    for p in paths:
        recovered = load_cloud(str(p))
        sel = _match_indices(original, recovered)
        reports.append(evaluate_edges(original, sel, workers=args.workers))
    _emit_reports(paths, reports)
    return 0


def cmd_eval_distance(args) -> int:
    original = load_cloud(args.infile)
    d_theta = args.d_theta
    if d_theta is None:
        d_theta = 3.0 * intrinsic_resolution(original, workers=args.workers)
    paths = _eval_targets(args)
    reports = [
        evaluate_distance(
            original, load_cloud(str(p)), d_theta=d_theta, workers=args.workers
        )
        for p in paths
    ]
    _emit_reports(paths, reports)
    return 0


def cmd_info(args) -> int:
    cloud = load_cloud(args.infile)
    lines = [f"n={len(cloud)}"]
    if cloud.labels is not None:
        lines.append(f"edges={int(cloud.labels.sum())}")
    mins = cloud.points.min(axis=0)
    maxs = cloud.points.max(axis=0)
    lines.append("bbox_min=" + ",".join(format(v, ".6g") for v in mins))
    lines.append("bbox_max=" + ",".join(format(v, ".6g") for v in maxs))
    if len(cloud) >= 2:
        res = intrinsic_resolution(cloud, workers=args.workers)
        lines.append(f"intrinsic_resolution={res:.6g}")
    lines.append(f"backend={active_backend()}")
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hgresample",
        description="Edge-preserving point cloud resampling toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a labeled box-union cloud")
    p.add_argument(
        "--cube",
        action="append",
        type=_cube_arg,
        default=None,
        metavar="X,Y,Z,SIDE",
        help="axis-aligned cube (repeatable); default: built-in two-cube shape",
    )
    p.add_argument("--spacing", type=float, default=0.02)
    p.add_argument("--edge-band", type=float, default=None)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    _add_output_args(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("noise", help="add Gaussian coordinate noise")
    _add_input_arg(p)
    p.add_argument(
        "--level",
        type=float,
        required=True,
        help="sigma as a fraction of the intrinsic resolution",
    )
    p.add_argument("--sigma", type=float, default=None, help="absolute sigma override")
    p.add_argument("--seed", type=int, default=0)
    _add_output_args(p)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("resample", help="score points and keep a fraction")
    _add_input_arg(p)
    p.add_argument("--method", choices=("hkc", "hkf", "lhf", "pca"), required=True)
    p.add_argument("--alpha", type=float, default=0.2, help="fraction kept")
    p.add_argument("--k", type=int, default=3, help="kernel voxels per axis (odd)")
    p.add_argument(
        "--kernel-d",
        type=float,
        default=None,
        help="kernel voxel pitch (default: intrinsic resolution)",
    )
    p.add_argument("--Na", "--na", dest="na", type=int, default=4)
    p.add_argument("--Nb", "--nb", dest="nb", type=int, default=8)
    p.add_argument("--m", type=int, default=16, help="PCA neighborhood size")
    p.add_argument("--select", choices=("sharp", "smooth"), default="sharp")
    p.add_argument("--seed", type=int, default=0, help="reserved; scoring is exact")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--scores", default=None, help="also write per-point scores CSV")
    _add_output_args(p)
    p.set_defaults(func=cmd_resample)

    for name, fn in (("eval-edges", cmd_eval_edges), ("eval-distance", cmd_eval_distance)):
        p = sub.add_parser(name, help=f"{name.replace('-', ' ')} report")
        _add_input_arg(p)
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--recovered", help="resampled/recovered cloud path")
        g.add_argument("--batch", help="directory of clouds; emits one CSV row each")
        if name == "eval-distance":
            p.add_argument("--d-theta", type=float, default=None)
        p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=fn)

    p = sub.add_parser("info", help="print cloud summary")
    _add_input_arg(p)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CloudFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
