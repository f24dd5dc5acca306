"""Design and reproject the three- and four-pattern configurations.

Writes layers, views and crosstalk tables under runs/ and prints the
correlation matrices.

    python3 scripts/run_identification.py [--threads N]
"""
import argparse
from pathlib import Path

from inkvol.cli import main

ROOT = Path(__file__).resolve().parent.parent


def run() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--threads", default="0")
    args = ap.parse_args()
    for name in ("three_patterns", "four_patterns"):
        manifest = ROOT / "manifests" / f"{name}.json"
        out = ROOT / "runs" / name
        for cmd in ("design", "project"):
            code = main([cmd, "--manifest", str(manifest), "--out", str(out), "--threads", args.threads])
            if code:
                return code
        print(f"== {name}")
        print((out / "crosstalk.txt").read_text())
    return 0


if __name__ == "__main__":
    raise SystemExit(run())
