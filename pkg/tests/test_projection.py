import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from inkvol.design import DesignInput, GridSpec, Volume, design_volume
from inkvol.geometry import ProjectionAxis, axis_from_rotations
from inkvol.imaging import PatternImage
from inkvol.projection import (GrazingAxisError, ProjectedPattern, crosstalk_report, ncc,
                               normalize_projection, project_like, project_volume)

import oracles


def axis(d, label=""):
    return ProjectionAxis.from_direction(d, label)


def test_constant_volume_sums_to_layer_count():
    grid = GridSpec(10, 10, 20, 1.0, 1.0, 0.6)
    p = project_volume(Volume.constant(grid, 1.0), axis([0, 0, 1]), 10, 10, 1.0)
    assert_array_equal(p.raw, 20.0)
    assert p.n_slabs == 20 and p.slab_axis == "z"


def test_single_pattern_reprojects_scaled():
    rng = np.random.default_rng(0)
    img = PatternImage(rng.uniform(size=(16, 16, 3)), 1.0)
    ax = axis([0, 0, 1])
    vol = design_volume(DesignInput([(img, ax)], GridSpec(16, 16, 6, 1.0, 1.0, 1.0)))
    assert_allclose(project_like(vol, ax, img).raw, 6 * img.pixels, atol=1e-12)


@pytest.mark.parametrize("rot", [(0, 25), (-15, 20)])
def test_oblique_single_affine_pattern_reprojects_scaled(rot):
    # bilinear resampling is exact for affine images, so the double
    # interpolation (pattern -> voxels -> rays) reproduces them inside
    jj, ii = np.mgrid[0:32, 0:32]
    ramp = np.stack([0.1 + 0.02 * ii, 0.05 + 0.025 * jj, 0.9 - 0.01 * ii - 0.012 * jj], -1)
    img = PatternImage(ramp, 1.0)
    ax = axis_from_rotations(*rot)
    vol = design_volume(DesignInput([(img, ax)], GridSpec(60, 60, 6, 1.0, 1.0, 1.0)))
    raw = project_like(vol, ax, img).raw
    assert_allclose(raw[3:-3, 3:-3], 6 * ramp[3:-3, 3:-3], atol=1e-12)


def test_axis_aligned_factorisation():
    rng = np.random.default_rng(5)
    n, nz = 16, 6
    a, b, c = (rng.uniform(size=(n, n, 3)) for _ in range(3))
    axes = [axis([1, 0, 0], "A"), axis([0, 1, 0], "B"), axis([0, 0, 1], "C")]
    pats = [PatternImage(x, 1.0) for x in (a, b, c)]
    vol = design_volume(DesignInput(list(zip(pats, axes)), GridSpec(n, n, nz, 1.0, 1.0, 1.0)))
    want = oracles.factorised_views(a, b, c, nz)
    for img, ax, w in zip(pats, axes, want):
        p = project_like(vol, ax, img)
        assert np.abs(p.raw - w).max() < 1e-12


def test_grazing_axis_rejected_on_film_slabs():
    vol = Volume.constant(GridSpec(4, 4, 4, 1, 1, 1), 1.0)
    with pytest.raises(GrazingAxisError):
        project_volume(vol, axis([1, 0, 0.04]), 4, 4, 1.0, slab_axis="z")
    p = project_volume(vol, axis([1, 0, 0.04]), 4, 4, 1.0)
    assert p.slab_axis == "x"


def test_threads_do_not_change_bits():
    rng = np.random.default_rng(1)
    grid = GridSpec(70, 70, 8, 0.5, 0.5, 0.6)
    vol = Volume(rng.uniform(size=(8, 70, 70, 3)), grid)
    ax = axis_from_rotations(20, -20)
    a = project_volume(vol, ax, 150, 140, 0.25, threads=1)
    b = project_volume(vol, ax, 150, 140, 0.25, threads=6)
    assert_array_equal(a.raw, b.raw)


seeds = st.integers(0, 2**32 - 1)
oblique = st.tuples(st.floats(-40, 40), st.floats(-40, 40))


@given(seeds, st.floats(0, 3), oblique)
@settings(max_examples=20, deadline=None)
def test_projection_linearity(seed, alpha, rot):
    rng = np.random.default_rng(seed)
    grid = GridSpec(9, 7, 5, 1.0, 1.2, 0.6)
    v1 = rng.uniform(size=(5, 7, 9, 3))
    v2 = rng.uniform(size=(5, 7, 9, 3))
    ax = axis_from_rotations(*rot)
    proj = lambda v: project_volume(Volume(v, grid), ax, 12, 12, 0.9).raw
    assert np.abs(proj(alpha * v1 + v2) - (alpha * proj(v1) + proj(v2))).max() < 1e-9


@given(seeds, oblique)
@settings(max_examples=20, deadline=None)
def test_raw_bound(seed, rot):
    rng = np.random.default_rng(seed)
    grid = GridSpec(8, 8, 7, 1.0, 1.0, 0.6)
    vol = Volume(rng.uniform(size=(7, 8, 8, 3)), grid)
    raw = project_volume(vol, axis_from_rotations(*rot), 10, 10, 1.0).raw
    assert raw.min() >= 0.0 and raw.max() <= 7.0


# --- normalisation --------------------------------------------------------------

def pp(raw, n=20):
    return ProjectedPattern(np.asarray(raw, dtype=float), 1.0, n, "z")


def test_theoretical_max_normalisation():
    img = normalize_projection(pp(np.full((2, 2, 3), 20.0)), "max")
    assert_array_equal(img.pixels, 1.0)
    assert img.meta["scale"] == 20.0


def test_auto_normalisation_peak_is_one():
    raw = np.random.default_rng(0).uniform(0, 5, (4, 4, 3))
    raw[1, 2, 0] = 5.0
    p = pp(raw)
    img = normalize_projection(p, "auto")
    assert img.pixels.max() == 1.0
    assert p.normalization == {"mode": "auto", "scale": 5.0}


def test_auto_normalisation_keeps_hue():
    img = normalize_projection(pp([[[2.0, 1.0, 0.0]]]), "auto")
    assert_array_equal(img.pixels[0, 0], [1.0, 0.5, 0.0])


def test_auto_normalisation_all_zero():
    img = normalize_projection(pp(np.zeros((2, 2, 3))), "auto")
    assert_array_equal(img.pixels, 0.0)
    assert img.meta["scale"] == 1.0


def test_unknown_mode():
    with pytest.raises(ValueError):
        normalize_projection(pp(np.zeros((1, 1, 3))), "median")


# --- crosstalk --------------------------------------------------------------------

def test_identical_views_have_unit_diagonal():
    rng = np.random.default_rng(2)
    origs = [PatternImage(rng.uniform(size=(12, 12, 3)), 1.0) for _ in range(3)]
    rep = crosstalk_report(origs, origs)
    assert_allclose(np.diag(rep.correlations), 1.0)
    assert rep.verdicts == [0, 1, 2] and rep.identified()
    assert_array_equal(np.diag(rep.mse), 0.0)
    assert np.all(np.abs(rep.correlations) <= 1.0)


def test_constant_view_has_zero_correlation():
    rng = np.random.default_rng(3)
    orig = PatternImage(rng.uniform(size=(8, 8, 3)), 1.0)
    flat = PatternImage(np.full((8, 8, 3), 0.4), 1.0)
    rep = crosstalk_report([flat], [orig])
    assert rep.correlations[0, 0] == 0.0
    assert ncc(np.ones(5), np.arange(5.0)) == 0.0


def test_dimension_mismatch():
    a = PatternImage(np.zeros((4, 4, 3)), 1.0)
    b = PatternImage(np.zeros((4, 5, 3)), 1.0)
    with pytest.raises(ValueError):
        crosstalk_report([a], [b])
    with pytest.raises(ValueError):
        crosstalk_report([a, a], [a])


def test_report_serialisation():
    rng = np.random.default_rng(4)
    origs = [PatternImage(rng.uniform(size=(6, 6, 3)), 1.0) for _ in range(2)]
    rep = crosstalk_report(origs, origs, labels=["A", "B"])
    doc = json.loads(rep.to_json())
    assert set(doc) >= {"correlations", "mse", "verdicts"}
    assert doc["verdicts"] == ["A", "B"]
    text = rep.to_text()
    assert "verdict" in text and "mean squared error" in text
