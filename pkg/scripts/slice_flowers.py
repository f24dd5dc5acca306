"""Slice a synthetic flower point cloud into 20 film layers and render it.

Writes the cloud, the 300 x 300 layers, the slice report and stack views
at -30, 0 and +30 degrees under runs/flowers/.

    python3 scripts/slice_flowers.py [--points N]
"""
import argparse
from pathlib import Path

from inkvol.cli import main
from inkvol.imaging import save_point_cloud
from inkvol.synth import REFERENCE_CLOUD_POINTS, flower_cloud

ROOT = Path(__file__).resolve().parent.parent


def run() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=REFERENCE_CLOUD_POINTS)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = ROOT / "runs" / "flowers"
    out.mkdir(parents=True, exist_ok=True)
    cloud_path = save_point_cloud(flower_cloud(args.points, seed=args.seed), out / "flowers.xyz")
    manifest = str(ROOT / "manifests" / "point_cloud.json")
    code = main(["slice", "--manifest", manifest, "--cloud", str(cloud_path), "--out", str(out)])
    if code:
        return code
    code = main(["simulate", "--manifest", manifest, "--layers", str(out),
                 "--theta=-30,0,30", "--out", str(out / "views")])
    print((out / "slice_report.json").read_text())
    return code


if __name__ == "__main__":
    raise SystemExit(run())
