"""``inkvol`` command line: design, project, slice, simulate, info.

Exit codes: 0 success, 1 I/O failure, 2 validation failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .design import DesignInput, Volume, design_volume, load_layers, write_layers
from .imaging import ImageError, PointCloudFormatError, load_pattern, load_point_cloud, save_image
from .manifest import Manifest, ManifestError, load_manifest, parse_manifest
from .optics import FIG5_SWEEP, MAX_VIEW_ANGLE, render_stack_view, sandwich_sweep
from .projection import crosstalk_report, normalize_projection, project_like
from .slicer import slice_point_cloud
from .stack import stack_metrics
from .synth import rgb_circles

log = logging.getLogger("inkvol")

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2
PRINTER_DPI_CAP = (5760, 1440)


class ValidationError(ValueError):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _histogram(values: np.ndarray, bins: int = 16) -> dict:
    edges = np.linspace(0.0, 1.0, bins + 1)
    return {ch: np.histogram(values[..., c], bins=edges)[0].tolist()
            for c, ch in enumerate("RGB")}


def _resolve(args) -> tuple[Manifest, Path]:
    if args.manifest:
        m = load_manifest(args.manifest)
    else:
        m = parse_manifest({})
    if args.bit_depth is not None:
        m.bit_depth = args.bit_depth
        m.record["output"]["bit_depth"] = args.bit_depth
    if args.normalize is not None:
        m.normalization = args.normalize
        m.record["output"]["normalization"] = args.normalize
    out = Path(args.out) if args.out else m.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return m, out


def _design(m: Manifest, threads: int) -> tuple[Volume, list, float]:
    if not m.patterns:
        raise ValidationError("manifest lists no patterns")
    patterns = m.load_patterns()
    t0 = time.perf_counter()
    vol = design_volume(DesignInput(list(zip(patterns, [p.axis() for p in m.patterns])), m.grid),
                        threads=threads)
    return vol, patterns, time.perf_counter() - t0


def _base_report(m: Manifest) -> dict:
    met = stack_metrics(m.stack)
    return {
        "inkvol_version": __version__,
        "manifest": m.record,
        "manifest_sha256": m.sha256,
        "inputs_sha256": m.input_digests(),
        "stack_metrics": {"layer_pitch_mm": met.layer_pitch, "depth_dpi": met.depth_dpi,
                          "total_depth_mm": met.total_depth},
    }


def cmd_design(args) -> int:
    m, out = _resolve(args)
    vol, _, t_design = _design(m, args.threads)
    t0 = time.perf_counter()
    paths = write_layers(vol, out, m.bit_depth)
    t_write = time.perf_counter() - t0
    report = _base_report(m)
    report["layers"] = [p.name for p in paths]
    report["volume"] = {"shape": list(vol.values.shape), "mean": float(vol.values.mean()),
                        "max": float(vol.values.max()), "histogram": _histogram(vol.values)}
    _write_json(out / "design_report.json", report)
    _write_json(out / "timings.json", {"design_s": t_design, "write_s": t_write})
    print(f"wrote {len(paths)} layers to {out}")
    return EXIT_OK


def cmd_project(args) -> int:
    m, out = _resolve(args)
    labels = m.labels()
    views = args.views.split(",") if args.views else labels
    for v in views:
        if v not in labels:
            raise ValidationError(f"unknown view label {v!r}; manifest has {labels}")
    t0 = time.perf_counter()
    if args.layers:
        if not m.patterns:
            raise ValidationError("manifest lists no patterns")
        vol = load_layers(args.layers, m.grid)
        patterns = m.load_patterns()
    else:
        vol, patterns, _ = _design(m, args.threads)
    t_design = time.perf_counter() - t0
    by_label = dict(zip(labels, zip(patterns, m.patterns)))
    projected, originals = [], []
    t0 = time.perf_counter()
    for v in views:
        img, entry = by_label[v]
        p = project_like(vol, entry.axis(), img, threads=args.threads)
        save_image(normalize_projection(p, m.normalization), out / f"view_{v}.png", m.bit_depth)
        projected.append(p)
        originals.append(img)
    report = crosstalk_report(projected, originals, m.normalization, labels=views)
    t_project = time.perf_counter() - t0
    doc = _base_report(m)
    doc.update(report.to_dict())
    doc["views"] = {v: {"scale": p.normalization["scale"], "slab_axis": p.slab_axis,
                        "raw_max": float(p.raw.max())} for v, p in zip(views, projected)}
    _write_json(out / "crosstalk.json", doc)
    (out / "crosstalk.txt").write_text(report.to_text())
    _write_json(out / "timings.json", {"design_s": t_design, "project_s": t_project})
    print(report.to_text(), end="")
    return EXIT_OK


def cmd_slice(args) -> int:
    m, out = _resolve(args)
    cloud = load_point_cloud(args.cloud)
    res = slice_point_cloud(cloud, m.stack, m.grid.nx, m.grid.ny, combine=args.combine)
    paths = res.write(out, m.bit_depth)
    r = res.report
    print(f"sliced {r.total} points into {len(paths)} films: {r.assigned} printed, "
          f"{r.discarded_z} outside z, {r.discarded_xy} outside the film area")
    return EXIT_OK


def _layers_for_view(args, m: Manifest) -> np.ndarray:
    if args.layers:
        return load_layers(args.layers).values
    if args.cloud:
        return slice_point_cloud(load_point_cloud(args.cloud), m.stack, m.grid.nx, m.grid.ny).layers
    vol, _, _ = _design(m, args.threads)
    return vol.values


def cmd_simulate(args) -> int:
    if args.theta is None and not args.sandwich:
        raise ValidationError("give --theta and/or --sandwich")
    for th in args.theta or []:
        if not abs(th) < MAX_VIEW_ANGLE:
            raise ValidationError(f"theta {th} outside (-{MAX_VIEW_ANGLE}, {MAX_VIEW_ANGLE})")
    m, out = _resolve(args)
    if args.theta:
        layers = _layers_for_view(args, m)
        for th in args.theta:
            img = render_stack_view(layers, m.stack, m.optics, th)
            save_image(img, out / f"stack_view_{th:+05.1f}.png", m.bit_depth)
        print(f"rendered {len(args.theta)} stack views to {out}")
    if args.sandwich:
        if args.pattern:
            pattern = load_pattern(args.pattern, 1.0)
            pattern.pixel_pitch = m.stack.width / pattern.width
        else:
            pattern = rgb_circles(pixel_pitch=m.stack.width / 256)
        paths = ("uv", "vis") if args.sweep == "both" else (args.sweep,)
        table = []
        for path in paths:
            for rec in sandwich_sweep(pattern, m.optics, FIG5_SWEEP, path):
                name = f"sandwich_uv{rec['n_uv']:02d}_vis{rec['n_vis']:02d}.png"
                save_image(rec["image"], out / name, m.bit_depth)
                table.append({"path": path, "n_uv": rec["n_uv"], "n_vis": rec["n_vis"],
                              "mean_brightness": rec["mean_brightness"], "image": name})
        _write_json(out / "sandwich.json", {"optics": m.record["optics"], "sweep": table})
        for row in table:
            print(f"{row['path']:>3} n_uv={row['n_uv']:2d} n_vis={row['n_vis']:2d} "
                  f"mean={row['mean_brightness']:.5f}")
    return EXIT_OK


def cmd_info(args) -> int:
    m = load_manifest(args.manifest) if args.manifest else parse_manifest({})
    met = stack_metrics(m.stack)
    print(f"films            {m.stack.n_films} x {m.stack.film_thickness} mm, gap {m.stack.gap} mm")
    print(f"layer pitch      {met.layer_pitch:.4f} mm")
    print(f"depth resolution {met.depth_dpi:.2f} dpi")
    print(f"stack depth      {met.total_depth:.3f} mm")
    print(f"film area        {m.stack.width} x {m.stack.height} mm")
    print(f"printer cap      {PRINTER_DPI_CAP[0]} x {PRINTER_DPI_CAP[1]} dpi (in-plane)")
    print(f"grid             {m.grid.nx} x {m.grid.ny} x {m.grid.nz}")
    print(f"patterns         {', '.join(m.labels()) or '(none)'}")
    print("manifest sha256  " + m.sha256)
    print(json.dumps(m.record, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", type=Path, help="JSON run manifest (defaults: 20-film reference configuration)")
    common.add_argument("--out", type=Path, help="output directory (overrides the manifest)")
    common.add_argument("--threads", type=int, default=0, help="worker threads, 0 = all cores")
    common.add_argument("--bit-depth", type=int, choices=(8, 16), default=None)
    common.add_argument("--normalize", choices=("max", "auto"), default=None,
                        help="projection display scaling: slab count or observed peak")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="inkvol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"inkvol {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", parents=[common], help="compute the volume and write film layers")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("project", parents=[common], help="simulate projected views and crosstalk")
    p.add_argument("--views", help="comma-separated pattern labels (default: all)")
    p.add_argument("--layers", type=Path, help="reuse layer PNGs instead of redesigning")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("slice", parents=[common], help="slice an ASCII point cloud into film layers")
    p.add_argument("--cloud", type=Path, required=True)
    p.add_argument("--combine", choices=("max", "mean"), default="max")
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("simulate", parents=[common], help="render the lit stack or a film sandwich sweep")
    p.add_argument("--theta", type=_float_list, help="comma-separated view angles in degrees")
    p.add_argument("--layers", type=Path, help="layer PNG directory to render")
    p.add_argument("--cloud", type=Path, help="point cloud to slice and render")
    p.add_argument("--sandwich", action="store_true", help="run the clear-film sandwich sweep")
    p.add_argument("--pattern", type=Path, help="printed pattern for the sandwich (default: RGB discs)")
    p.add_argument("--sweep", choices=("uv", "vis", "both"), default="uv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("info", parents=[common], help="print stack metrics and the resolved manifest")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PointCloudFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ManifestError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ImageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
