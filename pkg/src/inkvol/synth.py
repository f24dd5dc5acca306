"""Deterministic synthetic inputs: colour test patterns and a point-cloud scene."""
from __future__ import annotations

import numpy as np

from .imaging import PatternImage, PointCloud
from .stack import FilmStackSpec

REFERENCE_CLOUD_POINTS = 51_767


def dead_leaves(size: int = 512, seed: int = 0, n_leaves: int = 4000,
                r_min: float = 3.0, r_max: float = 150.0) -> np.ndarray:
    """Occluding discs with radius density ~ r^-3, each a flat random colour.

    Discs are laid front to back; later discs only fill pixels still
    empty.  This reproduces the scale-invariant statistics of photographs
    well enough for crosstalk experiments.
    """
    rng = np.random.default_rng(seed)
    img = np.zeros((size, size, 3))
    filled = np.zeros((size, size), dtype=bool)
    u = rng.uniform(size=n_leaves)
    radii = (r_min ** -2 - u * (r_min ** -2 - r_max ** -2)) ** -0.5
    for r in radii:
        cx, cy = rng.uniform(-r_max, size + r_max, 2)
        colour = rng.uniform(0.0, 1.0, 3)
        x0, x1 = max(int(cx - r), 0), min(int(cx + r) + 1, size)
        y0, y1 = max(int(cy - r), 0), min(int(cy + r) + 1, size)
        if x0 >= x1 or y0 >= y1:
            continue
        yy, xx = np.mgrid[y0:y1, x0:x1]
        disc = ((xx - cx) ** 2 + (yy - cy) ** 2 < r * r) & ~filled[y0:y1, x0:x1]
        img[y0:y1, x0:x1][disc] = colour
        filled[y0:y1, x0:x1] |= disc
    return img


def sample_patterns(n: int, size: int = 512, pixel_pitch: float | None = None,
                    seed: int = 2016) -> list[PatternImage]:
    """``n`` mutually unrelated full-colour patterns spanning 35 mm by default."""
    pitch = 35.0 / size if pixel_pitch is None else pixel_pitch
    seeds = np.random.SeedSequence(seed).spawn(n)
    return [PatternImage(dead_leaves(size, int(s.generate_state(1)[0])), pitch) for s in seeds]


def rgb_circles(size: int = 256, pixel_pitch: float = 35.0 / 256) -> PatternImage:
    """Red, green and blue discs on black."""
    img = np.zeros((size, size, 3))
    yy, xx = np.mgrid[0:size, 0:size] / size
    r = 0.17
    for ch, (cx, cy) in enumerate([(0.5, 0.3), (0.3, 0.68), (0.7, 0.68)]):
        img[(xx - cx) ** 2 + (yy - cy) ** 2 < r * r, ch] = 1.0
    return PatternImage(img, pixel_pitch)


def flower_cloud(n_points: int = REFERENCE_CLOUD_POINTS, spec: FilmStackSpec = FilmStackSpec(),
                 seed: int = 0, outlier_fraction: float = 0.01) -> PointCloud:
    """Flowers (rose curves) and butterflies (wing curves) filling the stack.

    About ``outlier_fraction`` of the points land outside the stack, half
    beyond its z range and half beyond the film rectangle.
    """
    rng = np.random.default_rng(seed)
    n_out = int(round(n_points * outlier_fraction))
    n_in = n_points - n_out
    n_flower = n_in // 2
    n_fly = n_in - n_flower
    depth = spec.n_films * spec.pitch
    z0 = spec.z_origin

    # flowers: filled 5-petal rose, domed in z
    phi = rng.uniform(0, 2 * np.pi, n_flower)
    rho = np.abs(np.cos(2.5 * phi)) * np.sqrt(rng.uniform(0, 1, n_flower))
    centre = rng.integers(0, 3, n_flower)
    cx = np.array([-8.0, 7.0, 0.0])[centre]
    cy = np.array([-7.0, -6.0, 8.0])[centre]
    scale = np.array([7.0, 6.0, 7.5])[centre]
    fx = cx + scale * rho * np.cos(phi)
    fy = cy + scale * rho * np.sin(phi)
    fz = z0 + depth * (0.25 + 0.5 * (1 - rho ** 2) * rng.uniform(0.8, 1.0, n_flower))
    fcol = np.stack([0.9 - 0.5 * rho, 0.3 + 0.6 * rho, 0.2 + 0.2 * centre / 2], axis=1)

    # butterflies: filled polar wing curve, tilted through the depth
    phi = rng.uniform(0, 2 * np.pi, n_fly)
    wing = np.exp(np.sin(phi)) - 2 * np.cos(4 * phi) + np.sin((2 * phi - np.pi) / 24) ** 5
    rho = np.abs(wing) / 4.8 * np.sqrt(rng.uniform(0, 1, n_fly))
    which = rng.integers(0, 2, n_fly)
    bx = np.array([-6.0, 8.0])[which] + 4.0 * rho * np.cos(phi)
    by = np.array([6.0, 5.0])[which] + 4.0 * rho * np.sin(phi)
    bz = z0 + depth * (0.1 + 0.8 * (bx - bx.min()) / max(np.ptp(bx), 1e-9))
    bcol = np.stack([0.2 + 0.8 * rho, 0.1 + 0.3 * which, 1.0 - 0.7 * rho], axis=1)

    # outliers
    half = n_out // 2
    oz = np.where(rng.uniform(size=half) < 0.5, z0 - 1.0, z0 + depth + 1.0)
    oxy_z = z0 + rng.uniform(0, depth, n_out - half)
    ox = np.concatenate([rng.uniform(-10, 10, half), spec.width * rng.choice([-0.6, 0.6], n_out - half)])
    oy = rng.uniform(-10, 10, n_out)
    outlier_z = np.concatenate([oz, oxy_z])
    ocol = rng.uniform(0, 1, (n_out, 3))

    xyz = np.concatenate([np.stack([fx, fy, fz], 1), np.stack([bx, by, bz], 1),
                          np.stack([ox, oy, outlier_z], 1)])
    rgb = np.clip(np.concatenate([fcol, bcol, ocol]), 0.0, 1.0)
    order = rng.permutation(n_points)
    return PointCloud(xyz[order], rgb[order])
