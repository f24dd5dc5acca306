"""Optical model of a UV-excited fluorescent film stack.

Every clear film transmits a fixed fraction of the UV excitation and of the
visible emission, and each film on the emission path widens a Gaussian blur.
All brightness values are relative; there is no absolute radiometry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .imaging import PatternImage, sample_bilinear
from .stack import FilmStackSpec

MAX_VIEW_ANGLE = 60.0
FIG5_SWEEP = (0, 5, 10, 15, 20, 25)


@dataclass(frozen=True)
class OpticalModel:
    t_uv: float = 0.82
    t_vis: float = 0.90
    quantum_yield: tuple[float, float, float] = (0.43, 0.85, 0.89)
    blur_sigma_per_film: float = 0.05  # mm
    uv_sides: str = "two-sided"
    # scale film counts by 1/cos(theta) on oblique visible paths
    oblique_path: bool = False

    def __post_init__(self):
        for name in ("t_uv", "t_vis"):
            t = getattr(self, name)
            if not 0.0 < t <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {t}")
        if len(self.quantum_yield) != 3 or not all(0.0 < q <= 1.0 for q in self.quantum_yield):
            raise ValueError(f"quantum_yield must be three values in (0, 1], got {self.quantum_yield}")
        if not self.blur_sigma_per_film >= 0.0:
            raise ValueError("blur_sigma_per_film must be >= 0")
        if self.uv_sides not in ("one-sided", "two-sided"):
            raise ValueError(f"uv_sides must be 'one-sided' or 'two-sided', got {self.uv_sides!r}")

    @property
    def yields(self) -> np.ndarray:
        return np.asarray(self.quantum_yield, dtype=float)


UNIT_OPTICS = OpticalModel(t_uv=1.0, t_vis=1.0, quantum_yield=(1.0, 1.0, 1.0),
                           blur_sigma_per_film=0.0, uv_sides="one-sided")


def _check_count(n) -> None:
    if n < 0:
        raise ValueError(f"film count must be >= 0, got {n}")


def uv_excitation_factor(n_films_crossed, model: OpticalModel = OpticalModel()) -> float:
    """Fraction of the UV excitation left after ``n`` clear films."""
    _check_count(n_films_crossed)
    return model.t_uv ** n_films_crossed


def visible_attenuation_factor(n_films_crossed, model: OpticalModel = OpticalModel()) -> float:
    _check_count(n_films_crossed)
    return model.t_vis ** n_films_crossed


def layer_excitation_profile(spec: FilmStackSpec, model: OpticalModel = OpticalModel()) -> list[float]:
    """Excitation reaching each film, listed from the (first) UV source inward.

    One-sided illumination gives ``t^(k-1)`` for film ``k``; two-sided adds
    the mirror term ``t^(n-k)`` from the opposite source.
    """
    n = spec.n_films
    t = model.t_uv
    if model.uv_sides == "one-sided":
        return [t ** (k - 1) for k in range(1, n + 1)]
    return [t ** (k - 1) + t ** (n - k) for k in range(1, n + 1)]


def _blur(img: np.ndarray, sigma_px: float) -> np.ndarray:
    if sigma_px <= 0.0:
        return img
    return gaussian_filter(img, sigma=(sigma_px, sigma_px, 0.0), mode="constant", cval=0.0)


def render_stack_view(layers: np.ndarray, spec: FilmStackSpec,
                      model: OpticalModel = OpticalModel(), theta_deg: float = 0.0,
                      pixel_pitch: float | None = None, normalize: bool = True) -> np.ndarray:
    """Image of the lit stack seen from angle ``theta_deg`` about the Y axis.

    ``layers`` is ``(n_films, h, w, 3)`` ordered by increasing z; the viewer
    and the one-sided UV source both sit on the +z side, so the last layer
    is the front film.  A layer at height ``dz`` above the stack centre is
    displaced by ``dz * tan(theta)`` in x.  With ``normalize`` the sum is
    divided by its largest attainable value and clipped to [0, 1].
    """
    layers = np.asarray(layers, dtype=float)
    if layers.ndim != 4 or layers.shape[3] != 3:
        raise ValueError(f"layers must be (n, h, w, 3), got {layers.shape}")
    n, h, w = layers.shape[:3]
    if n != spec.n_films:
        raise ValueError(f"{n} layers but the stack has {spec.n_films} films")
    if not abs(theta_deg) < MAX_VIEW_ANGLE:
        raise ValueError(f"view angle {theta_deg} outside (-{MAX_VIEW_ANGLE}, {MAX_VIEW_ANGLE})")
    pitch = spec.width / w if pixel_pitch is None else pixel_pitch
    pitch_row = spec.height / h if pixel_pitch is None else pixel_pitch

    tan_t = math.tan(math.radians(theta_deg))
    path_scale = 1.0 / math.cos(math.radians(theta_deg)) if model.oblique_path else 1.0
    # profile runs from the front (+z) film inward
    excitation = np.asarray(layer_excitation_profile(spec, model))[::-1]
    yields = model.yields
    cu = (np.arange(w) + 0.5 - w / 2) * pitch
    cv = (np.arange(h) + 0.5 - h / 2) * pitch_row
    uu, vv = np.meshgrid(cu, cv)

    out = np.zeros((h, w, 3))
    weight_total = 0.0
    for k in range(n):
        films_in_front = (n - 1 - k) * path_scale
        weight = excitation[k] * model.t_vis ** films_in_front
        weight_total += weight
        dz = (k - (n - 1) / 2) * spec.pitch
        if tan_t == 0.0:
            img = layers[k]
        else:
            img = sample_bilinear(layers[k], pitch, pitch_row, uu + dz * tan_t, vv)
        img = _blur(img, model.blur_sigma_per_film * films_in_front / pitch)
        out += img * (yields * weight)
    if normalize:
        out = np.clip(out / (weight_total * yields.max()), 0.0, 1.0)
    return out


def simulate_sandwich(pattern: PatternImage, n_uv: int, n_vis: int,
                      model: OpticalModel = OpticalModel()) -> np.ndarray:
    """A printed film between ``n_uv`` clear films (UV side) and ``n_vis`` (camera side).

    Only the camera-side films blur the image.
    """
    _check_count(n_uv)
    _check_count(n_vis)
    scale = uv_excitation_factor(n_uv, model) * visible_attenuation_factor(n_vis, model)
    img = pattern.pixels * (model.yields * scale)
    return _blur(img, model.blur_sigma_per_film * n_vis / pattern.pixel_pitch)


def mean_brightness(img: np.ndarray) -> float:
    return float(np.mean(img))


def sandwich_sweep(pattern: PatternImage, model: OpticalModel = OpticalModel(),
                   counts=FIG5_SWEEP, path: str = "uv") -> list[dict]:
    """Vary the film count on one side with the other side empty.

    Returns one record per count: ``n_uv``, ``n_vis``, ``mean_brightness``
    and the rendered ``image``.
    """
    if path not in ("uv", "vis"):
        raise ValueError(f"sweep path must be 'uv' or 'vis', got {path!r}")
    records = []
    for n in counts:
        n_uv, n_vis = (n, 0) if path == "uv" else (0, n)
        img = simulate_sandwich(pattern, n_uv, n_vis, model)
        records.append({"n_uv": n_uv, "n_vis": n_vis,
                        "mean_brightness": mean_brightness(img), "image": img})
    return records
