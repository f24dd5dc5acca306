"""Multi-pattern volumetric display design on stacked printed films."""

__version__ = "0.1.0"

from .design import DesignInput, GridSpec, Volume, design_volume, emit_layers
from .geometry import ProjectionAxis, axis_from_rotations, plane_basis, project_point_to_plane
from .imaging import PatternImage, PointCloud, bilinear_sample, load_pattern, load_point_cloud, save_image
from .optics import OpticalModel, render_stack_view, simulate_sandwich
from .projection import crosstalk_report, normalize_projection, project_volume
from .slicer import assign_film, slice_point_cloud
from .stack import FilmStackSpec, stack_metrics

__all__ = [
    "DesignInput", "GridSpec", "Volume", "design_volume", "emit_layers",
    "ProjectionAxis", "axis_from_rotations", "plane_basis", "project_point_to_plane",
    "PatternImage", "PointCloud", "bilinear_sample", "load_pattern", "load_point_cloud", "save_image",
    "OpticalModel", "render_stack_view", "simulate_sandwich",
    "crosstalk_report", "normalize_projection", "project_volume",
    "assign_film", "slice_point_cloud",
    "FilmStackSpec", "stack_metrics",
]
