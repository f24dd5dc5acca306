"""Line-sum projection of a designed volume and crosstalk metrics."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._parallel import run_indexed
from .design import Volume
from .geometry import ProjectionAxis
from .imaging import PatternImage, raster_centres, sample_bilinear

GRAZING_LIMIT = 0.05
LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722])
_ROW_BLOCK = 64


class GrazingAxisError(ValueError):
    pass


@dataclass
class ProjectedPattern:
    """Unnormalised line sums seen along ``axis``.

    ``n_slabs`` is how many voxel slabs each ray crosses, so ``raw`` lies in
    ``[0, n_slabs]``.
    """

    raw: np.ndarray  # (h, w, 3)
    pixel_pitch: float
    n_slabs: int
    slab_axis: str
    label: str = ""
    normalization: dict = field(default_factory=dict)


def _slab_view(vol: Volume, slab_axis: str):
    """Voxel slabs as ``(n, rows, cols, 3)`` with the in-slab coordinate indices.

    Returns ``(slabs, slab_centres, slab_idx, col_idx, row_idx, col_pitch, row_pitch)``
    where the *_idx entries index x=0, y=1, z=2.
    """
    g = vol.grid
    if slab_axis == "z":
        return vol.values, g.z_centres(), 2, 0, 1, g.pitch_x, g.pitch_y
    if slab_axis == "x":
        # slab i: rows z, cols y
        return (np.transpose(vol.values, (2, 0, 1, 3)), g.x_centres(), 0, 1, 2,
                g.pitch_y, g.layer_pitch)
    if slab_axis == "y":
        # slab j: rows z, cols x
        return (np.transpose(vol.values, (1, 0, 2, 3)), g.y_centres(), 1, 0, 2,
                g.pitch_x, g.layer_pitch)
    raise ValueError(f"unknown slab axis {slab_axis!r}")


def choose_slab_axis(direction: np.ndarray) -> str:
    """Film planes (z) unless the axis grazes them; then the dominant grid axis."""
    if abs(direction[2]) > GRAZING_LIMIT:
        return "z"
    return "x" if abs(direction[0]) >= abs(direction[1]) else "y"


def project_volume(vol: Volume, axis: ProjectionAxis, out_w: int, out_h: int,
                   out_pitch_mm: float, slab_axis: str = "auto",
                   threads: int = 1) -> ProjectedPattern:
    """Sum voxel values along parallel rays in ``axis.direction``.

    Each output pixel ``(u, v)`` defines the ray ``u*u_basis + v*v_basis +
    t*direction``.  The ray is intersected with every slab plane in
    ascending order and the slab is bilinearly sampled there (zero outside
    the volume).  ``slab_axis="z"`` always slices along the films and rejects
    axes with ``|direction_z| <= 0.05``; ``"auto"`` falls back to x or y
    slabs for such axes.
    """
    d = axis.direction
    if slab_axis == "auto":
        slab_axis = choose_slab_axis(d)
    elif slab_axis == "z" and abs(d[2]) <= GRAZING_LIMIT:
        raise GrazingAxisError(
            f"axis {axis.label or d} grazes the film planes (|d_z|={abs(d[2]):.3g})")
    slabs, centres, si, ci, ri, pc, pr = _slab_view(vol, slab_axis)
    if abs(d[si]) < 1e-12:
        raise GrazingAxisError(f"axis {axis.label or d} is parallel to the {slab_axis} slabs")
    ub, vb = axis.u_basis, axis.v_basis
    uu, vv = raster_centres(out_w, out_h, out_pitch_mm)
    raw = np.zeros((out_h, out_w, 3))
    n_blocks = -(-out_h // _ROW_BLOCK)

    def block(b: int) -> None:
        rows = slice(b * _ROW_BLOCK, min((b + 1) * _ROW_BLOCK, out_h))
        u, v = uu[rows], vv[rows]
        foot_s = u * ub[si] + v * vb[si]
        foot_c = u * ub[ci] + v * vb[ci]
        foot_r = u * ub[ri] + v * vb[ri]
        acc = np.zeros(u.shape + (3,))
        for k in range(slabs.shape[0]):
            t = (centres[k] - foot_s) / d[si]
            acc += sample_bilinear(slabs[k], pc, pr, foot_c + t * d[ci], foot_r + t * d[ri])
        raw[rows] = acc

    run_indexed(block, n_blocks, threads)
    return ProjectedPattern(raw, out_pitch_mm, slabs.shape[0], slab_axis, axis.label)


def project_like(vol: Volume, axis: ProjectionAxis, pattern: PatternImage,
                 **kwargs) -> ProjectedPattern:
    """Project onto a raster matching ``pattern`` (size and pitch)."""
    return project_volume(vol, axis, pattern.width, pattern.height, pattern.pixel_pitch, **kwargs)


def normalize_projection(p: ProjectedPattern, mode: str = "auto") -> PatternImage:
    """Scale raw line sums into [0, 1].

    ``"max"`` divides by the slab count (the largest possible sum);
    ``"auto"`` divides all channels by the single brightest value.
    """
    if mode == "max":
        scale = float(p.n_slabs)
    elif mode == "auto":
        peak = float(p.raw.max())
        scale = peak if peak > 0 else 1.0
    else:
        raise ValueError(f"unknown normalisation mode {mode!r}; use 'max' or 'auto'")
    out = np.clip(p.raw / scale, 0.0, 1.0)
    meta = {"mode": mode, "scale": scale}
    p.normalization = meta
    return PatternImage(out, p.pixel_pitch, meta=dict(meta, label=p.label))


def luminance(pixels: np.ndarray) -> np.ndarray:
    return pixels @ LUMA_WEIGHTS


def ncc(a: np.ndarray, b: np.ndarray) -> float:
    """Zero-mean normalised cross-correlation; 0 if either input is constant."""
    if np.ptp(a) == 0.0 or np.ptp(b) == 0.0:
        return 0.0
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt(np.sum(a * a) * np.sum(b * b))
    if denom == 0.0:
        return 0.0
    return float(np.clip(np.sum(a * b) / denom, -1.0, 1.0))


@dataclass
class CrosstalkReport:
    """Rows are views, columns are originals."""

    labels: list[str]
    correlations: np.ndarray
    mse: np.ndarray
    verdicts: list[int]
    mode: str = "auto"

    def identified(self) -> bool:
        return all(v == i for i, v in enumerate(self.verdicts))

    def diagonal(self) -> np.ndarray:
        return np.diag(self.correlations)

    def to_dict(self) -> dict:
        return {
            "labels": self.labels,
            "normalization": self.mode,
            "correlations": self.correlations.tolist(),
            "mse": self.mse.tolist(),
            "verdicts": [self.labels[v] for v in self.verdicts],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        head = "view\\orig " + " ".join(f"{lab:>9}" for lab in self.labels) + "   verdict"
        lines = [f"normalised cross-correlation ({self.mode} normalisation)", head]
        for i, lab in enumerate(self.labels):
            cells = " ".join(f"{c:9.4f}" for c in self.correlations[i])
            lines.append(f"{lab:>9} {cells}   {self.labels[self.verdicts[i]]}")
        lines.append("")
        lines.append("mean squared error")
        lines.append(head.rsplit("   ", 1)[0])
        for i, lab in enumerate(self.labels):
            lines.append(f"{lab:>9} " + " ".join(f"{m:9.5f}" for m in self.mse[i]))
        return "\n".join(lines) + "\n"


def crosstalk_report(views, originals: list[PatternImage], mode: str = "auto",
                     labels: list[str] | None = None) -> CrosstalkReport:
    """Compare every projected view with every original pattern.

    ``views`` may hold :class:`ProjectedPattern` (normalised with ``mode``)
    or already-normalised :class:`PatternImage`.
    """
    if len(views) != len(originals):
        raise ValueError(f"{len(views)} views but {len(originals)} originals")
    imgs = [normalize_projection(v, mode) if isinstance(v, ProjectedPattern) else v for v in views]
    for img in imgs:
        for orig in originals:
            if img.pixels.shape != orig.pixels.shape:
                raise ValueError(f"view shape {img.pixels.shape} != original {orig.pixels.shape}")
    if labels is None:
        labels = [getattr(v, "label", "") or chr(ord("A") + i) for i, v in enumerate(views)]
    n = len(imgs)
    corr = np.zeros((n, n))
    mse = np.zeros((n, n))
    lum_o = [luminance(o.pixels) for o in originals]
    for i, img in enumerate(imgs):
        lum_v = luminance(img.pixels)
        for j, orig in enumerate(originals):
            corr[i, j] = ncc(lum_v, lum_o[j])
            mse[i, j] = float(np.mean((img.pixels - orig.pixels) ** 2))
    verdicts = [int(np.argmax(row)) for row in corr]
    return CrosstalkReport(list(labels), corr, mse, verdicts, mode)
