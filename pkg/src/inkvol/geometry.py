"""Projection axes and perpendicular projection onto pattern planes.

Vectors are plain ``numpy`` arrays of shape ``(3,)`` (or ``(..., 3)`` for
batches).  Positions are in millimetres with the origin at the volume centre.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UP = np.array([0.0, 1.0, 0.0])
FALLBACK_UP = np.array([1.0, 0.0, 0.0])
_UP_DEGENERACY = 0.999


@dataclass(frozen=True)
class ProjectionAxis:
    """Viewing direction of one pattern plus an orthonormal basis of its plane.

    ``(u_basis, v_basis, direction)`` is right-handed: ``u x v = direction``.
    """

    direction: np.ndarray
    u_basis: np.ndarray
    v_basis: np.ndarray
    label: str = ""

    @classmethod
    def from_direction(cls, direction, label: str = "") -> "ProjectionAxis":
        d = _unit(direction)
        u, v = plane_basis(d)
        return cls(d, u, v, label)

    def angle_to(self, other: "ProjectionAxis") -> float:
        """Angle between the two directions in degrees."""
        c = float(np.clip(np.dot(self.direction, other.direction), -1.0, 1.0))
        return math.degrees(math.acos(c))


def _unit(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValueError(f"expected a finite 3-vector, got {vec!r}")
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("zero-length direction")
    return v / n


def rotation_x(deg: float) -> np.ndarray:
    a = math.radians(deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_y(deg: float) -> np.ndarray:
    a = math.radians(deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def axis_from_rotations(rot_x_deg: float, rot_y_deg: float, label: str = "",
                        order: str = "yx") -> ProjectionAxis:
    """Rotate +Z by ``rot_x_deg`` about X and ``rot_y_deg`` about Y.

    ``order="yx"`` applies the X rotation first (``R_y @ R_x @ z``);
    ``order="xy"`` applies the Y rotation first.  Both angles must lie in
    the open interval (-90, 90).
    """
    for name, ang in (("rot_x_deg", rot_x_deg), ("rot_y_deg", rot_y_deg)):
        if not math.isfinite(ang) or not -90.0 < ang < 90.0:
            raise ValueError(f"{name}={ang} outside (-90, 90) degrees")
    rx, ry = rotation_x(rot_x_deg), rotation_y(rot_y_deg)
    if order == "yx":
        rot = ry @ rx
    elif order == "xy":
        rot = rx @ ry
    else:
        raise ValueError(f"unknown rotation order {order!r}; use 'yx' or 'xy'")
    return ProjectionAxis.from_direction(rot @ np.array([0.0, 0.0, 1.0]), label)


def plane_basis(direction) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic ``(u, v)`` basis for the plane orthogonal to ``direction``.

    ``v`` is global +Y with its component along ``direction`` removed (+X
    when ``direction`` is within ~2.6 degrees of +/-Y); ``u = v x direction``.
    """
    d = _unit(direction)
    up = UP if abs(float(np.dot(UP, d))) <= _UP_DEGENERACY else FALLBACK_UP
    v = up - np.dot(up, d) * d
    v = v / np.linalg.norm(v)
    u = np.cross(v, d)
    u = u / np.linalg.norm(u)
    return u, v


def project_point_to_plane(p, axis: ProjectionAxis, origin=None) -> tuple:
    """Perpendicular ``(u, v)`` coordinates of ``p`` on the axis' pattern plane.

    Accepts a single point or an ``(..., 3)`` array; returns floats or arrays
    accordingly.
    """
    p = np.asarray(p, dtype=float)
    if origin is not None:
        p = p - np.asarray(origin, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    ub, vb = axis.u_basis, axis.v_basis
    # explicit sums keep the arithmetic identical for scalar and batched calls
    u = x * ub[0] + y * ub[1] + z * ub[2]
    v = x * vb[0] + y * vb[1] + z * vb[2]
    if p.ndim == 1:
        return float(u), float(v)
    return u, v
