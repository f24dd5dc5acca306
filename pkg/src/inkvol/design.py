"""Voxel design: each voxel colour is the product of every pattern sampled
at the voxel's perpendicular foot on that pattern's plane.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._parallel import run_indexed
from .geometry import ProjectionAxis
from .imaging import PatternImage, quantize, read_png, sample_bilinear, save_image

VOLUME_MM = 35.0
MAX_PATTERNS_BEFORE_WARNING = 6


@dataclass(frozen=True)
class GridSpec:
    """Voxel grid; voxel ``(i, j, k)`` is centred at
    ``((i + .5 - nx/2) px, (j + .5 - ny/2) py, (k + .5 - nz/2) layer_pitch)``.
    """

    nx: int = 512
    ny: int = 512
    nz: int = 20
    pitch_x: float = VOLUME_MM / 512
    pitch_y: float = VOLUME_MM / 512
    layer_pitch: float = 0.6

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if int(n) != n or n < 1:
                raise ValueError(f"{name} must be a positive integer, got {n}")
        for name in ("pitch_x", "pitch_y", "layer_pitch"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def x_centres(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5 - self.nx / 2) * self.pitch_x

    def y_centres(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5 - self.ny / 2) * self.pitch_y

    def z_centres(self) -> np.ndarray:
        return (np.arange(self.nz) + 0.5 - self.nz / 2) * self.layer_pitch


@dataclass
class Volume:
    values: np.ndarray  # (nz, ny, nx, 3) in [0, 1]
    grid: GridSpec

    def __post_init__(self):
        g = self.grid
        if self.values.shape != (g.nz, g.ny, g.nx, 3):
            raise ValueError(f"values shape {self.values.shape} does not match grid {g}")

    @property
    def nx(self) -> int:
        return self.grid.nx

    @property
    def ny(self) -> int:
        return self.grid.ny

    @property
    def nz(self) -> int:
        return self.grid.nz

    @classmethod
    def constant(cls, grid: GridSpec, value) -> "Volume":
        vals = np.empty((grid.nz, grid.ny, grid.nx, 3))
        vals[...] = value
        return cls(vals, grid)


@dataclass
class DesignInput:
    patterns: list[tuple[PatternImage, ProjectionAxis]]
    grid: GridSpec

    def validate(self) -> None:
        if not self.patterns:
            raise ValueError("design needs at least one pattern")
        if len(self.patterns) > MAX_PATTERNS_BEFORE_WARNING:
            warnings.warn(f"{len(self.patterns)} patterns: expect strongly reduced contrast",
                          stacklevel=3)
        axes = [ax for _, ax in self.patterns]
        for i in range(len(axes)):
            for j in range(i + 1, len(axes)):
                if axes[i].angle_to(axes[j]) < 1.0:
                    warnings.warn(f"projection axes {axes[i].label or i} and "
                                  f"{axes[j].label or j} are within 1 degree", stacklevel=3)


def _layer_product(inp: DesignInput, k: int) -> np.ndarray:
    g = inp.grid
    x, y = np.meshgrid(g.x_centres(), g.y_centres())
    z = g.z_centres()[k]
    samples = []
    for img, axis in inp.patterns:
        ub, vb = axis.u_basis, axis.v_basis
        u = x * ub[0] + y * ub[1] + z * ub[2]
        v = x * vb[0] + y * vb[1] + z * vb[2]
        samples.append(sample_bilinear(img.pixels, img.pixel_pitch, img.pixel_pitch, u, v))
    if len(samples) == 1:
        return samples[0]
    # multiply in ascending order so the float result ignores pattern order
    ordered = np.sort(np.stack(samples), axis=0)
    out = ordered[0]
    for s in ordered[1:]:
        out = out * s
    return out


def design_volume(inp: DesignInput, threads: int = 1) -> Volume:
    """Compute the RGB voxel volume whose line sums approximate every pattern."""
    inp.validate()
    g = inp.grid
    values = np.empty((g.nz, g.ny, g.nx, 3))

    def fill(k: int) -> None:
        values[k] = _layer_product(inp, k)

    run_indexed(fill, g.nz, threads)
    return Volume(values, g)


def layer_filename(k: int) -> str:
    return f"layer_{k:03d}.png"


def emit_layers(vol: Volume, bit_depth: int = 8) -> list[np.ndarray]:
    """Quantised ``(ny, nx, 3)`` film images, ordered by increasing z."""
    return [quantize(vol.values[k], bit_depth) for k in range(vol.nz)]


def write_layers(vol: Volume, directory, bit_depth: int = 8) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [save_image(vol.values[k], directory / layer_filename(k), bit_depth)
            for k in range(vol.nz)]


def load_layers(directory, grid: GridSpec | None = None) -> Volume:
    """Restack ``layer_000.png ...`` from ``directory`` into a Volume.

    Without ``grid`` the pitches default to the 35 mm, 0.6 mm-pitch stack.
    """
    directory = Path(directory)
    files = sorted(directory.glob("layer_*.png"))
    if not files:
        raise FileNotFoundError(f"no layer_*.png files in {directory}")
    expected = [layer_filename(k) for k in range(len(files))]
    if [f.name for f in files] != expected:
        raise FileNotFoundError(f"layer files in {directory} are not contiguous from layer_000.png")
    values = np.stack([read_png(f, allowed_depths=(8, 16)) for f in files])
    nz, ny, nx = values.shape[:3]
    if grid is None:
        grid = GridSpec(nx=nx, ny=ny, nz=nz, pitch_x=VOLUME_MM / nx,
                        pitch_y=VOLUME_MM / ny)
    return Volume(values, grid)
