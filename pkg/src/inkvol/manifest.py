"""JSON run manifest: parsing, defaults and validation.

Every omitted field falls back to the 20-film, 35 mm prototype, so ``{}``
plus a list of patterns reproduces the published configuration.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .design import GridSpec
from .geometry import ProjectionAxis, axis_from_rotations
from .imaging import PatternImage, load_pattern
from .optics import OpticalModel
from .stack import FilmStackSpec
from .synth import dead_leaves


class ManifestError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


_SECTIONS = {
    "patterns": None,
    "grid": {"nx", "ny", "nz", "pitch_x", "pitch_y"},
    "stack": {"n_films", "film_thickness", "gap", "width", "height", "z_origin"},
    "optics": {"t_uv", "t_vis", "quantum_yield", "blur_sigma_per_film", "uv_sides", "oblique_path"},
    "output": {"directory", "bit_depth", "normalization"},
}
_PATTERN_KEYS = {"path", "synthetic", "label", "rotation_x_deg", "rotation_y_deg",
                 "rotation_order", "pixel_pitch_mm"}


@dataclass
class PatternEntry:
    label: str
    rotation_x_deg: float = 0.0
    rotation_y_deg: float = 0.0
    rotation_order: str = "yx"
    path: Path | None = None
    synthetic: dict | None = None
    pixel_pitch_mm: float | None = None

    def axis(self) -> ProjectionAxis:
        return axis_from_rotations(self.rotation_x_deg, self.rotation_y_deg, self.label,
                                   self.rotation_order)


@dataclass
class Manifest:
    patterns: list[PatternEntry] = field(default_factory=list)
    grid: GridSpec = field(default_factory=GridSpec)
    stack: FilmStackSpec = field(default_factory=FilmStackSpec)
    optics: OpticalModel = field(default_factory=OpticalModel)
    output_dir: Path = Path("out")
    bit_depth: int = 8
    normalization: str = "auto"
    source: Path | None = None
    record: dict = field(default_factory=dict)

    @property
    def sha256(self) -> str:
        blob = json.dumps(self.record, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    def labels(self) -> list[str]:
        return [p.label for p in self.patterns]

    def load_patterns(self) -> list[PatternImage]:
        """Read (or synthesise) every pattern; the pitch defaults to spanning the stack width."""
        out = []
        for p in self.patterns:
            if p.path is not None:
                img = load_pattern(p.path, 1.0)
            else:
                syn = p.synthetic
                img = PatternImage(dead_leaves(int(syn.get("size", 512)), int(syn.get("seed", 0))), 1.0)
            img.pixel_pitch = p.pixel_pitch_mm or self.stack.width / img.width
            out.append(img)
        return out

    def input_digests(self) -> dict:
        return {str(p.path): hashlib.sha256(Path(p.path).read_bytes()).hexdigest()
                for p in self.patterns if p.path is not None}


def _number(value, where: str, *, integer: bool = False, positive: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ManifestError(where, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ManifestError(where, f"expected an integer, got {value!r}")
    if positive and not value > 0:
        raise ManifestError(where, f"must be positive, got {value!r}")
    return int(value) if integer else float(value)


def _section(doc: dict, name: str) -> dict:
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ManifestError(name, "expected an object")
    unknown = set(sec) - _SECTIONS[name]
    if unknown:
        raise ManifestError(f"{name}.{sorted(unknown)[0]}", "unknown field")
    return sec


def _build(ctor, kwargs: dict, where: str):
    try:
        return ctor(**kwargs)
    except ValueError as exc:
        raise ManifestError(where, str(exc)) from None


def parse_manifest(doc: dict, base_dir: Path | None = None) -> Manifest:
    if not isinstance(doc, dict):
        raise ManifestError("", "manifest must be a JSON object")
    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ManifestError(sorted(unknown)[0], "unknown section")
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()

    st = _section(doc, "stack")
    stack_kw = {}
    for key in ("film_thickness", "gap", "width", "height", "z_origin"):
        if key in st:
            stack_kw[key] = _number(st[key], f"stack.{key}")
    if "n_films" in st:
        stack_kw["n_films"] = _number(st["n_films"], "stack.n_films", integer=True, positive=True)
    stack = _build(FilmStackSpec, stack_kw, "stack")

    gr = _section(doc, "grid")
    nx = _number(gr.get("nx", 512), "grid.nx", integer=True, positive=True)
    ny = _number(gr.get("ny", 512), "grid.ny", integer=True, positive=True)
    nz = _number(gr.get("nz", stack.n_films), "grid.nz", integer=True, positive=True)
    if nz != stack.n_films:
        raise ManifestError("grid.nz", f"{nz} layers but stack.n_films is {stack.n_films}")
    px = _number(gr.get("pitch_x", stack.width / nx), "grid.pitch_x", positive=True)
    py = _number(gr.get("pitch_y", stack.height / ny), "grid.pitch_y", positive=True)
    grid = _build(GridSpec, dict(nx=nx, ny=ny, nz=nz, pitch_x=px, pitch_y=py,
                                 layer_pitch=stack.pitch), "grid")

    op = _section(doc, "optics")
    optics_kw = {}
    for key in ("t_uv", "t_vis", "blur_sigma_per_film"):
        if key in op:
            optics_kw[key] = _number(op[key], f"optics.{key}")
    if "quantum_yield" in op:
        qy = op["quantum_yield"]
        if not isinstance(qy, list) or len(qy) != 3:
            raise ManifestError("optics.quantum_yield", "expected a list of three numbers")
        optics_kw["quantum_yield"] = tuple(_number(q, f"optics.quantum_yield[{i}]")
                                           for i, q in enumerate(qy))
    if "uv_sides" in op:
        optics_kw["uv_sides"] = op["uv_sides"]
    if "oblique_path" in op:
        if not isinstance(op["oblique_path"], bool):
            raise ManifestError("optics.oblique_path", "expected true or false")
        optics_kw["oblique_path"] = op["oblique_path"]
    optics = _build(OpticalModel, optics_kw, "optics")

    out = _section(doc, "output")
    bit_depth = out.get("bit_depth", 8)
    if bit_depth not in (8, 16):
        raise ManifestError("output.bit_depth", f"must be 8 or 16, got {bit_depth!r}")
    norm = out.get("normalization", "auto")
    if norm not in ("max", "auto"):
        raise ManifestError("output.normalization", f"must be 'max' or 'auto', got {norm!r}")
    out_dir = out.get("directory", "out")
    if not isinstance(out_dir, str):
        raise ManifestError("output.directory", "expected a string")

    pats = doc.get("patterns", [])
    if not isinstance(pats, list):
        raise ManifestError("patterns", "expected a list")
    entries: list[PatternEntry] = []
    recorded_patterns = []
    for i, p in enumerate(pats):
        where = f"patterns[{i}]"
        if not isinstance(p, dict):
            raise ManifestError(where, "expected an object")
        unknown = set(p) - _PATTERN_KEYS
        if unknown:
            raise ManifestError(f"{where}.{sorted(unknown)[0]}", "unknown field")
        if ("path" in p) == ("synthetic" in p):
            raise ManifestError(where, "give exactly one of 'path' or 'synthetic'")
        label = p.get("label", chr(ord("A") + i) if i < 26 else f"P{i}")
        if not isinstance(label, str) or not label:
            raise ManifestError(f"{where}.label", "expected a non-empty string")
        if label in {e.label for e in entries}:
            raise ManifestError(f"{where}.label", f"duplicate label {label!r}")
        entry = PatternEntry(
            label=label,
            rotation_x_deg=_number(p.get("rotation_x_deg", 0.0), f"{where}.rotation_x_deg"),
            rotation_y_deg=_number(p.get("rotation_y_deg", 0.0), f"{where}.rotation_y_deg"),
            rotation_order=p.get("rotation_order", "yx"),
        )
        if "pixel_pitch_mm" in p:
            entry.pixel_pitch_mm = _number(p["pixel_pitch_mm"], f"{where}.pixel_pitch_mm",
                                           positive=True)
        if "path" in p:
            if not isinstance(p["path"], str):
                raise ManifestError(f"{where}.path", "expected a string")
            entry.path = (base_dir / p["path"]).resolve()
        else:
            syn = p["synthetic"]
            if not isinstance(syn, dict) or set(syn) - {"seed", "size"}:
                raise ManifestError(f"{where}.synthetic", "expected {'seed': int, 'size': int}")
            _number(syn.get("seed", 0), f"{where}.synthetic.seed", integer=True)
            _number(syn.get("size", 512), f"{where}.synthetic.size", integer=True, positive=True)
            entry.synthetic = dict(syn)
        try:
            entry.axis()
        except ValueError as exc:
            raise ManifestError(where, str(exc)) from None
        entries.append(entry)
        rec = {k: v for k, v in p.items()}
        rec.update(label=label, rotation_x_deg=entry.rotation_x_deg,
                   rotation_y_deg=entry.rotation_y_deg, rotation_order=entry.rotation_order)
        recorded_patterns.append(rec)

    # the output directory is left out so reruns elsewhere hash identically
    record = {
        "patterns": recorded_patterns,
        "grid": {"nx": nx, "ny": ny, "nz": nz, "pitch_x": px, "pitch_y": py,
                 "layer_pitch": stack.pitch},
        "stack": {"n_films": stack.n_films, "film_thickness": stack.film_thickness,
                  "gap": stack.gap, "width": stack.width, "height": stack.height,
                  "z_origin": stack.z_origin},
        "optics": {"t_uv": optics.t_uv, "t_vis": optics.t_vis,
                   "quantum_yield": list(optics.quantum_yield),
                   "blur_sigma_per_film": optics.blur_sigma_per_film,
                   "uv_sides": optics.uv_sides, "oblique_path": optics.oblique_path},
        "output": {"bit_depth": bit_depth, "normalization": norm},
    }
    return Manifest(entries, grid, stack, optics, base_dir / out_dir, bit_depth, norm,
                    record=copy.deepcopy(record))


def load_manifest(path) -> Manifest:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    m = parse_manifest(doc, path.parent)
    m.source = path
    return m
