"""Pattern images, PNG interchange, bilinear sampling and point-cloud files.

Image arrays are ``(height, width, 3)`` float64.  Row ``j`` and column ``i``
of a raster with pitch ``p`` sit at
``((i + 0.5 - w/2) * p, (j + 0.5 - h/2) * p)`` in plane coordinates, so the
raster is centred on the origin and row index grows with ``v``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import png


class ImageError(Exception):
    """Base class for image decoding problems."""


class NotAnImageError(ImageError):
    pass


class UnsupportedBitDepthError(ImageError):
    pass


class PointCloudFormatError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class PatternImage:
    """An RGB image with channels in [0, 1] and a physical pixel pitch (mm)."""

    pixels: np.ndarray
    pixel_pitch: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 3 or px.shape[2] != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"pattern pixels must be (h, w, 3), got {px.shape}")
        if not np.all(np.isfinite(px)) or px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("pattern channels must be finite and within [0, 1]")
        if not self.pixel_pitch > 0:
            raise ValueError(f"pixel_pitch must be positive, got {self.pixel_pitch}")
        self.pixels = px

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def pixel_centres(self) -> tuple[np.ndarray, np.ndarray]:
        """``(u, v)`` grids of pixel-centre coordinates, each ``(h, w)``."""
        return raster_centres(self.width, self.height, self.pixel_pitch)


@dataclass
class PointCloud:
    xyz: np.ndarray  # (n, 3) mm
    rgb: np.ndarray  # (n, 3) in [0, 1]

    def __len__(self) -> int:
        return self.xyz.shape[0]

    @classmethod
    def empty(cls) -> "PointCloud":
        return cls(np.zeros((0, 3)), np.zeros((0, 3)))


def raster_centres(width: int, height: int, pitch_col: float,
                   pitch_row: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    if pitch_row is None:
        pitch_row = pitch_col
    cu = (np.arange(width) + 0.5 - width / 2) * pitch_col
    cv = (np.arange(height) + 0.5 - height / 2) * pitch_row
    return np.meshgrid(cu, cv)


def sample_bilinear(pixels: np.ndarray, pitch_col: float, pitch_row: float, u, v) -> np.ndarray:
    """Bilinearly sample an ``(h, w, C)`` raster at plane coordinates ``(u, v)``.

    Points outside the raster rectangle return 0.  Inside the rectangle but
    beyond the outermost pixel centres the edge pixels are held constant.
    Returns an array of shape ``u.shape + (C,)``.
    """
    h, w = pixels.shape[:2]
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    fx = u / pitch_col + (w / 2 - 0.5)
    fy = v / pitch_row + (h / 2 - 0.5)
    inside = (fx >= -0.5) & (fx <= w - 0.5) & (fy >= -0.5) & (fy <= h - 0.5)
    fx = np.clip(fx, 0.0, w - 1)
    fy = np.clip(fy, 0.0, h - 1)
    x0 = np.floor(fx).astype(np.intp)
    y0 = np.floor(fy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    tx = (fx - x0)[..., None]
    ty = (fy - y0)[..., None]
    p00 = pixels[y0, x0]
    p10 = pixels[y0, x1]
    p01 = pixels[y1, x0]
    p11 = pixels[y1, x1]
    # a + t*(b - a) keeps constants and pixel centres exact
    top = p00 + tx * (p10 - p00)
    bot = p01 + tx * (p11 - p01)
    out = top + ty * (bot - top)
    return np.where(inside[..., None], out, 0.0)


def bilinear_sample(img: PatternImage, u: float, v: float) -> np.ndarray:
    """RGB value of ``img`` at plane point ``(u, v)`` mm; zero outside the pattern."""
    return sample_bilinear(img.pixels, img.pixel_pitch, img.pixel_pitch, u, v)


# --- PNG --------------------------------------------------------------------

def read_png(path, allowed_depths=(8,)) -> np.ndarray:
    """Decode a PNG into an ``(h, w, 3)`` float array in [0, 1].

    Alpha is premultiplied and dropped; greyscale is broadcast to RGB.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    try:
        w, h, rows, info = png.Reader(filename=os.fspath(path)).asDirect()
        bitdepth = info["bitdepth"]
        if bitdepth not in allowed_depths:
            raise UnsupportedBitDepthError(
                f"{path}: {bitdepth}-bit PNG not supported (allowed: {allowed_depths})")
        planes = info["planes"]
        data = np.array([np.asarray(r, dtype=np.float64) for r in rows])
    except (png.FormatError, png.ChunkError) as exc:
        raise NotAnImageError(f"{path}: not a readable PNG ({exc})") from exc
    data = data.reshape(h, w, planes) / float(2 ** bitdepth - 1)
    if info.get("alpha"):
        data = data[..., :-1] * data[..., -1:]
    if data.shape[2] == 1:
        data = np.repeat(data, 3, axis=2)
    return data


def load_pattern(path, pixel_pitch_mm: float) -> PatternImage:
    """Load an 8-bit RGB(A) PNG as a :class:`PatternImage`."""
    return PatternImage(read_png(path, allowed_depths=(8,)), pixel_pitch_mm)


def quantize(values: np.ndarray, bit_depth: int = 8) -> np.ndarray:
    """Round-half-up quantisation of [0, 1] values to unsigned integers."""
    if bit_depth not in (8, 16):
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)) or values.min(initial=0.0) < 0.0 or values.max(initial=0.0) > 1.0:
        raise ValueError("image channels must lie in [0, 1] before saving")
    top = 2 ** bit_depth - 1
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    return np.floor(values * top + 0.5).astype(dtype)


def save_image(img, path, bit_depth: int = 8) -> Path:
    """Write a PatternImage or ``(h, w, 3)`` [0, 1] array as an RGB PNG."""
    pixels = img.pixels if isinstance(img, PatternImage) else np.asarray(img, dtype=float)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) pixels, got {pixels.shape}")
    q = quantize(pixels, bit_depth)
    h, w = q.shape[:2]
    path = Path(path)
    writer = png.Writer(width=w, height=h, greyscale=False, bitdepth=bit_depth)
    with open(path, "wb") as fh:
        writer.write(fh, q.reshape(h, w * 3))
    return path


# --- point clouds -------------------------------------------------------------

def load_point_cloud(path) -> PointCloud:
    """Read an ASCII ``x y z r g b`` cloud (mm, 0-255 colours, ``#`` comments)."""
    xyz: list[tuple[float, float, float]] = []
    rgb: list[tuple[int, int, int]] = []
    with open(path, "r", encoding="utf-8", newline=None) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            if len(toks) != 6:
                col = 7 if len(toks) > 6 else len(toks) + 1
                raise PointCloudFormatError(
                    f"expected 6 fields 'x y z r g b', found {len(toks)}", lineno, col)
            coords = []
            for col, tok in enumerate(toks[:3], start=1):
                try:
                    val = float(tok)
                except ValueError:
                    raise PointCloudFormatError(f"bad coordinate {tok!r}", lineno, col) from None
                if not np.isfinite(val):
                    raise PointCloudFormatError(f"non-finite coordinate {tok!r}", lineno, col)
                coords.append(val)
            colour = []
            for col, tok in enumerate(toks[3:], start=4):
                try:
                    val = int(tok)
                except ValueError:
                    raise PointCloudFormatError(f"bad colour {tok!r}", lineno, col) from None
                if not 0 <= val <= 255:
                    raise PointCloudFormatError(f"colour {val} outside 0-255", lineno, col)
                colour.append(val)
            xyz.append(tuple(coords))
            rgb.append(tuple(colour))
    if not xyz:
        return PointCloud.empty()
    return PointCloud(np.array(xyz, dtype=float), np.array(rgb, dtype=float) / 255.0)


def save_point_cloud(cloud: PointCloud, path) -> Path:
    path = Path(path)
    colours = np.floor(cloud.rgb * 255 + 0.5).astype(int)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# x y z r g b\n")
        for (x, y, z), (r, g, b) in zip(cloud.xyz, colours):
            fh.write(f"{x:.6f} {y:.6f} {z:.6f} {r} {g} {b}\n")
    return path
