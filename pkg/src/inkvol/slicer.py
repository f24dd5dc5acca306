"""Rasterise a coloured point cloud onto the films of a stack."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .design import layer_filename
from .imaging import PointCloud, save_image
from .stack import FilmStackSpec


def assign_films(z, spec: FilmStackSpec) -> np.ndarray:
    """0-based film index for each z, -1 below the first film or past the last slab.

    Film ``k`` owns the half-open slab ``[Z_k, Z_k + pitch)``; boundaries
    are the stored ``layer_z`` values, not a re-derived division.
    """
    zs = spec.layer_z
    z = np.asarray(z, dtype=float)
    k = np.searchsorted(zs, z, side="right") - 1
    top = zs[-1] + spec.pitch
    return np.where((k >= 0) & (z < top), k, -1)


def assign_film(o_z: float, spec: FilmStackSpec) -> int | None:
    """1-based film index for a height ``o_z``, or None outside the stack."""
    k = int(assign_films(np.array([o_z]), spec)[0])
    return k + 1 if k >= 0 else None


@dataclass
class SliceReport:
    per_film: list[int]
    discarded_z: int = 0
    discarded_xy: int = 0
    total: int = 0
    combine: str = "max"

    @property
    def assigned(self) -> int:
        return sum(self.per_film)

    def to_dict(self) -> dict:
        return {
            "total_points": self.total,
            "assigned": self.assigned,
            "assigned_per_film": self.per_film,
            "discarded_out_of_z": self.discarded_z,
            "discarded_out_of_xy": self.discarded_xy,
            "combine": self.combine,
        }


@dataclass
class SliceResult:
    layers: np.ndarray  # (n_films, res_y, res_x, 3)
    report: SliceReport
    spec: FilmStackSpec = field(repr=False)

    def write(self, directory, bit_depth: int = 8) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = [save_image(layer, directory / layer_filename(k), bit_depth)
                 for k, layer in enumerate(self.layers)]
        (directory / "slice_report.json").write_text(
            json.dumps(self.report.to_dict(), indent=2) + "\n")
        return paths


def pixel_of(coord: np.ndarray, extent: float, res: int) -> np.ndarray:
    """Column (or row) index of the cell holding ``coord`` on a centred extent; -1 if outside."""
    idx = np.floor((coord + extent / 2) / extent * res).astype(np.int64)
    return np.where((idx >= 0) & (idx < res), idx, -1)


def slice_point_cloud(cloud: PointCloud, spec: FilmStackSpec, res_x: int, res_y: int,
                      combine: str = "max") -> SliceResult:
    """Print each point at its ``(x, y)`` cell on the film below it.

    The film plane spans ``[-width/2, width/2) x [-height/2, height/2)``
    with row index growing with y.  Points outside the stack in z are
    counted as z discards first; the rest outside the film rectangle are xy
    discards.  Points sharing a cell combine per channel by ``max`` (or
    ``mean``).
    """
    if res_x < 1 or res_y < 1:
        raise ValueError("slice resolution must be at least 1x1")
    if combine not in ("max", "mean"):
        raise ValueError(f"unknown combine rule {combine!r}")
    n = spec.n_films
    layers = np.zeros((n, res_y, res_x, 3))
    report = SliceReport([0] * n, total=len(cloud), combine=combine)
    if len(cloud) == 0:
        return SliceResult(layers, report, spec)

    film = assign_films(cloud.xyz[:, 2], spec)
    col = pixel_of(cloud.xyz[:, 0], spec.width, res_x)
    row = pixel_of(cloud.xyz[:, 1], spec.height, res_y)
    in_z = film >= 0
    in_xy = (col >= 0) & (row >= 0)
    keep = in_z & in_xy
    report.discarded_z = int(np.count_nonzero(~in_z))
    report.discarded_xy = int(np.count_nonzero(in_z & ~in_xy))
    report.per_film = np.bincount(film[keep], minlength=n).astype(int).tolist()

    flat = (film[keep] * res_y + row[keep]) * res_x + col[keep]
    colours = cloud.rgb[keep]
    out = layers.reshape(-1, 3)
    if combine == "max":
        for c in range(3):
            np.maximum.at(out[:, c], flat, colours[:, c])
    else:
        counts = np.bincount(flat, minlength=out.shape[0]).astype(float)
        for c in range(3):
            sums = np.bincount(flat, weights=colours[:, c], minlength=out.shape[0])
            np.divide(sums, counts, out=out[:, c], where=counts > 0)
    return SliceResult(layers, report, spec)
