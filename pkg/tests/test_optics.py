import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from inkvol.design import GridSpec, Volume
from inkvol.geometry import axis_from_rotations
from inkvol.imaging import PatternImage
from inkvol.optics import (FIG5_SWEEP, UNIT_OPTICS, OpticalModel, layer_excitation_profile,
                           render_stack_view, sandwich_sweep, simulate_sandwich,
                           uv_excitation_factor, visible_attenuation_factor)
from inkvol.projection import project_volume
from inkvol.stack import FilmStackSpec
from inkvol.synth import rgb_circles

DEFAULT_MODEL = OpticalModel()


def test_model_defaults():
    assert (DEFAULT_MODEL.t_uv, DEFAULT_MODEL.t_vis) == (0.82, 0.90)
    assert DEFAULT_MODEL.quantum_yield == (0.43, 0.85, 0.89)
    assert DEFAULT_MODEL.uv_sides == "two-sided"


def repeated_product(t, n):
    out = 1.0
    for _ in range(n):
        out *= t
    return out


@pytest.mark.parametrize("n", [0, 1, 5, 20, 25])
def test_uv_factor_matches_repeated_product(n):
    assert uv_excitation_factor(n, DEFAULT_MODEL) == pytest.approx(repeated_product(0.82, n), rel=1e-13)


def test_uv_factor_reference_points():
    assert uv_excitation_factor(0) == 1.0
    assert round(uv_excitation_factor(20), 4) == 0.0189
    assert round(uv_excitation_factor(25), 4) == 0.0070


def test_visible_factor():
    assert visible_attenuation_factor(0) == 1.0
    assert visible_attenuation_factor(10) == pytest.approx(repeated_product(0.9, 10), rel=1e-13)
    assert round(visible_attenuation_factor(10), 4) == 0.3487


@given(st.integers(0, 40), st.integers(0, 40))
def test_factors_multiplicative_and_decreasing(a, b):
    for f in (uv_excitation_factor, visible_attenuation_factor):
        assert abs(f(a + b) - f(a) * f(b)) < 1e-12
        assert f(a + 1) < f(a)


def test_negative_count_rejected():
    with pytest.raises(ValueError):
        uv_excitation_factor(-1)


def test_excitation_profiles():
    spec = FilmStackSpec(n_films=3)
    one = OpticalModel(t_uv=0.5, uv_sides="one-sided")
    two = OpticalModel(t_uv=0.5, uv_sides="two-sided")
    assert layer_excitation_profile(spec, one) == [1.0, 0.5, 0.25]
    assert layer_excitation_profile(spec, two) == [1.25, 1.0, 1.25]


@given(st.integers(1, 40), st.floats(0.05, 1.0))
def test_two_sided_profile_symmetric(n, t):
    prof = layer_excitation_profile(FilmStackSpec(n_films=n), OpticalModel(t_uv=t))
    assert prof == prof[::-1]


# --- stack rendering -------------------------------------------------------------

def test_single_layer_identity():
    rng = np.random.default_rng(0)
    layer = rng.uniform(size=(1, 12, 10, 3))
    spec = FilmStackSpec(n_films=1, width=10.0, height=12.0)
    assert_allclose(render_stack_view(layer, spec, UNIT_OPTICS, 0.0), layer[0], atol=1e-15)


def test_unit_optics_reduce_to_layer_sum():
    rng = np.random.default_rng(1)
    layers = rng.uniform(size=(5, 9, 9, 3))
    spec = FilmStackSpec(n_films=5, width=9.0, height=9.0)
    out = render_stack_view(layers, spec, UNIT_OPTICS, 0.0, normalize=False)
    assert np.abs(out - layers.sum(axis=0)).max() < 1e-9


def test_theta_zero_matches_projection_with_excitation_weights():
    rng = np.random.default_rng(2)
    n = 6
    layers = rng.uniform(size=(n, 8, 8, 3))
    spec = FilmStackSpec(n_films=n, width=8.0, height=8.0)
    model = OpticalModel(t_uv=0.7, t_vis=1.0, quantum_yield=(1.0, 1.0, 1.0),
                         blur_sigma_per_film=0.0, uv_sides="one-sided")
    rendered = render_stack_view(layers, spec, model, 0.0, normalize=False)
    # weight the volume by the excitation each film receives, then line-sum it
    excitation = np.array(layer_excitation_profile(spec, model))[::-1]
    weighted = Volume(layers * excitation[:, None, None, None],
                      GridSpec(8, 8, n, 1.0, 1.0, spec.pitch))
    proj = project_volume(weighted, axis_from_rotations(0, 0), 8, 8, 1.0).raw
    assert np.abs(rendered - proj).max() < 1e-9


def test_front_layer_brighter_under_front_uv():
    layers = np.ones((4, 6, 6, 3))
    spec = FilmStackSpec(n_films=4, width=6.0, height=6.0)
    model = OpticalModel(uv_sides="one-sided", blur_sigma_per_film=0.0)
    front = layers * np.array([0, 0, 0, 1.0])[:, None, None, None]
    back = layers * np.array([1.0, 0, 0, 0])[:, None, None, None]
    f = render_stack_view(front, spec, model, 0.0, normalize=False).mean()
    b = render_stack_view(back, spec, model, 0.0, normalize=False).mean()
    assert f > b


def test_oblique_view_shifts_layers_by_depth():
    n = 3
    layers = np.zeros((n, 1, 40, 3))
    layers[:, 0, 20] = 1.0
    spec = FilmStackSpec(n_films=n, film_thickness=0.5, gap=0.5, width=40.0, height=1.0)
    out = render_stack_view(layers, spec, UNIT_OPTICS, 45.0, normalize=False)
    # layers at dz = -1, 0, +1 mm land one 1 mm pixel apart at 45 degrees
    lit = np.flatnonzero(out[0, :, 0] > 0.5).tolist()
    assert lit == [19, 20, 21]


def test_oblique_path_option_attenuates_more():
    layers = np.ones((5, 4, 4, 3))
    spec = FilmStackSpec(n_films=5, width=4.0, height=4.0)
    plain = render_stack_view(layers, spec, OpticalModel(blur_sigma_per_film=0), 40.0, normalize=False)
    slant = render_stack_view(layers, spec, OpticalModel(blur_sigma_per_film=0, oblique_path=True),
                              40.0, normalize=False)
    assert slant[2, 2, 0] < plain[2, 2, 0]


def test_view_angle_limit():
    spec = FilmStackSpec(n_films=1)
    with pytest.raises(ValueError):
        render_stack_view(np.zeros((1, 2, 2, 3)), spec, DEFAULT_MODEL, 80.0)
    with pytest.raises(ValueError):
        render_stack_view(np.zeros((2, 2, 2, 3)), spec, DEFAULT_MODEL, 0.0)


def test_normalised_render_in_unit_range():
    rng = np.random.default_rng(3)
    layers = rng.uniform(size=(20, 16, 16, 3))
    out = render_stack_view(layers, FilmStackSpec(), DEFAULT_MODEL, 30.0)
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_blur_preserves_interior_energy():
    img = np.zeros((80, 80, 3))
    img[35:45, 35:45] = 1.0
    pattern = PatternImage(img, 0.1)
    sharp = simulate_sandwich(pattern, 0, 0, UNIT_OPTICS)
    blurred = simulate_sandwich(pattern, 0, 10, OpticalModel(t_vis=1.0, quantum_yield=(1, 1, 1),
                                                            blur_sigma_per_film=0.05))
    assert not np.allclose(sharp, blurred)
    assert abs(blurred.sum() - sharp.sum()) < 1e-6 * sharp.sum()


# --- sandwich --------------------------------------------------------------------

def test_sandwich_without_films_scales_by_yield():
    pat = rgb_circles(64)
    assert_allclose(simulate_sandwich(pat, 0, 0, DEFAULT_MODEL), pat.pixels * [0.43, 0.85, 0.89])


def test_sandwich_twenty_uv_films():
    pat = rgb_circles(64)
    ratio = simulate_sandwich(pat, 20, 0).mean() / simulate_sandwich(pat, 0, 0).mean()
    assert ratio == pytest.approx(0.82 ** 20, rel=1e-12)


def test_uv_sweep_strictly_decreasing():
    recs = sandwich_sweep(rgb_circles(64), DEFAULT_MODEL, FIG5_SWEEP, "uv")
    assert [r["n_uv"] for r in recs] == [0, 5, 10, 15, 20, 25]
    means = [r["mean_brightness"] for r in recs]
    assert all(a > b for a, b in zip(means, means[1:]))


def test_sweep_path_validation():
    with pytest.raises(ValueError):
        sandwich_sweep(rgb_circles(8), DEFAULT_MODEL, (0,), "ir")


@pytest.mark.parametrize("kw", [{"t_uv": 0.0}, {"t_vis": 1.2}, {"quantum_yield": (0.5, 0.5)},
                                {"blur_sigma_per_film": -1.0}, {"uv_sides": "three"}])
def test_model_validation(kw):
    with pytest.raises(ValueError):
        OpticalModel(**kw)
