"""Brightness of a fluorescent pattern under a growing number of films.

Compares UV-path covering (films between the lamp and the pattern) with
visible-path covering (films between the pattern and the viewer) and
writes the simulated images to runs/sandwich/.

    python3 scripts/sandwich_sweep.py
"""
from pathlib import Path

from inkvol.imaging import save_image
from inkvol.optics import FIG5_SWEEP, OpticalModel, sandwich_sweep
from inkvol.synth import rgb_circles

OUT = Path(__file__).resolve().parent.parent / "runs" / "sandwich"


def run() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    pattern = rgb_circles(256)
    model = OpticalModel()
    sweeps = {path: sandwich_sweep(pattern, model, FIG5_SWEEP, path) for path in ("uv", "vis")}
    base = sweeps["uv"][0]["mean_brightness"]
    print(f"{'films':>5} {'uv path':>9} {'vis path':>9}")
    for uv, vis in zip(sweeps["uv"], sweeps["vis"]):
        n = uv["n_uv"]
        print(f"{n:5d} {uv['mean_brightness'] / base:9.4f} {vis['mean_brightness'] / base:9.4f}")
        save_image(uv["image"], OUT / f"uv_{n:02d}.png")
        save_image(vis["image"], OUT / f"vis_{n:02d}.png")


if __name__ == "__main__":
    run()
