"""Film-stack geometry and derived depth metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MM_PER_INCH = 25.4


@dataclass(frozen=True)
class FilmStackSpec:
    """Physical stack: ``n_films`` films of ``film_thickness`` separated by ``gap``.

    Defaults are the 20-film, 0.1 mm film / 0.5 mm spacer, 35 x 35 mm
    prototype.  Film ``k`` (1-indexed) sits at ``z_origin + (k - 1) * pitch``.
    """

    n_films: int = 20
    film_thickness: float = 0.1
    gap: float = 0.5
    width: float = 35.0
    height: float = 35.0
    z_origin: float = 0.0

    def __post_init__(self):
        if int(self.n_films) != self.n_films or self.n_films < 1:
            raise ValueError(f"n_films must be a positive integer, got {self.n_films}")
        if not self.film_thickness > 0 or not self.gap > 0:
            raise ValueError("film_thickness and gap must be positive")
        if not self.width > 0 or not self.height > 0:
            raise ValueError("stack width and height must be positive")

    @property
    def pitch(self) -> float:
        return self.film_thickness + self.gap

    @property
    def layer_z(self) -> np.ndarray:
        return self.z_origin + np.arange(self.n_films) * self.pitch


@dataclass(frozen=True)
class StackMetrics:
    layer_pitch: float
    depth_dpi: float
    total_depth: float


def stack_metrics(spec: FilmStackSpec) -> StackMetrics:
    """Layer pitch, depth resolution in dpi and film-to-film stack depth.

    The total depth counts every film and the gaps between them, but not a
    gap after the last film.
    """
    pitch = spec.pitch
    return StackMetrics(
        layer_pitch=pitch,
        depth_dpi=MM_PER_INCH / pitch,
        total_depth=spec.n_films * pitch - spec.gap,
    )
