"""Geometry tests: placement, exact pair lengths, wavefront models."""

import math

import numpy as np
import pytest

from mmwlink import geometry
from mmwlink.channel import CONCRETE_GROUND
from mmwlink.geometry import (ConfigError, RegimeWarning, ScenarioConfig,
                              build_two_path_geometry,
                              optimal_subarray_spacing, relative_phase_exact,
                              relative_phase_planar,
                              relative_phase_second_order)

WAVELENGTH = 0.005
DISTANCE = 100.0


def make_config(**overrides):
    base = dict(
        carrier_wavelength=WAVELENGTH,
        link_distance=DISTANCE,
        height=20.0,
        n_subarrays=2,
        subarray_spacing=0.5,
        subarray_side=8,
        element_spacing=WAVELENGTH / 2.0,
        ground=CONCRETE_GROUND,
        tx_power_dbm=20.0,
        bandwidth=2.16e9,
        noise_figure=5.0,
        temperature=300.0,
    )
    base.update(overrides)
    return ScenarioConfig(**base)


# ---------------------------------------------------------------------------
# spacing and config validation
# ---------------------------------------------------------------------------


def test_optimal_spacing_value():
    assert optimal_subarray_spacing(WAVELENGTH, DISTANCE, 2) == pytest.approx(
        0.5, rel=1e-15)
    assert optimal_subarray_spacing(WAVELENGTH, DISTANCE, 1) == pytest.approx(
        math.sqrt(0.5), rel=1e-15)


def test_optimal_spacing_rejects_bad_inputs():
    with pytest.raises(ConfigError):
        optimal_subarray_spacing(0.0, DISTANCE, 2)
    with pytest.raises(ConfigError):
        optimal_subarray_spacing(WAVELENGTH, -1.0, 2)
    with pytest.raises(ConfigError):
        optimal_subarray_spacing(WAVELENGTH, DISTANCE, 0)


def test_config_validation_errors():
    for bad in (
        dict(carrier_wavelength=0.0),
        dict(link_distance=-5.0),
        dict(height=0.0),
        dict(n_subarrays=0),
        dict(subarray_spacing=0.0),  # N=2 needs positive spacing
        dict(subarray_side=0),
        dict(element_spacing=0.0),
        dict(bandwidth=0.0),
        dict(temperature=-1.0),
        dict(subcarriers=0),
    ):
        with pytest.raises(ConfigError):
            make_config(**bad).validate()


def test_regime_warning_is_soft():
    import warnings
    with pytest.warns(RegimeWarning):
        make_config(height=1.0).validate()  # spacing not << height
    with pytest.warns(RegimeWarning):
        make_config(height=200.0).validate()  # height above distance
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        make_config().validate()  # nominal scenario stays silent


# ---------------------------------------------------------------------------
# two-path geometry
# ---------------------------------------------------------------------------


def test_los_pair_lengths_exact():
    cfg = make_config()
    los, _ = build_two_path_geometry(cfg)
    d = cfg.subarray_spacing
    expected = np.array([
        [DISTANCE, math.hypot(d, DISTANCE)],
        [math.hypot(d, DISTANCE), DISTANCE],
    ])
    assert np.allclose(los.pair_lengths, expected, rtol=0.0, atol=1e-12)
    assert los.center_length == DISTANCE
    assert los.departure_elevation == 0.0 and los.arrival_elevation == 0.0
    assert los.is_los


def test_reflected_pair_lengths_exact():
    cfg = make_config(height=10.0)
    _, refl = build_two_path_geometry(cfg)
    d = cfg.subarray_spacing
    h = cfg.height
    expected = np.array([
        [math.hypot(2 * h, DISTANCE), math.hypot(2 * h + d, DISTANCE)],
        [math.hypot(2 * h + d, DISTANCE), math.hypot(2 * h + 2 * d, DISTANCE)],
    ])
    assert np.allclose(refl.pair_lengths, expected, rtol=0.0, atol=1e-12)
    assert refl.center_length == pytest.approx(math.hypot(2 * h, DISTANCE))
    assert refl.incidence_angle == pytest.approx(math.atan2(DISTANCE, 2 * h))
    assert not refl.is_los


def test_reflected_matches_centered_two_by_two_form():
    # A centered construction with subarrays at h +- d/2 and the upper one
    # listed first gives the classic matrix
    #   [[sqrt((2h+d)^2+D^2), sqrt((2h)^2+D^2)],
    #    [sqrt((2h)^2+D^2),   sqrt((2h-d)^2+D^2)]].
    # Our convention (lowest at h, ascending) built at height h - d/2 must
    # reproduce it exactly after reversing both indices.
    h, d = 12.0, 0.5
    cfg = make_config(height=h - d / 2.0)
    _, refl = build_two_path_geometry(cfg)
    flipped = refl.pair_lengths[::-1, ::-1]
    classic = np.array([
        [math.hypot(2 * h + d, DISTANCE), math.hypot(2 * h, DISTANCE)],
        [math.hypot(2 * h, DISTANCE), math.hypot(2 * h - d, DISTANCE)],
    ])
    assert np.array_equal(flipped, classic) or np.allclose(
        flipped, classic, rtol=0.0, atol=1e-12)


def test_reflected_elevation_at_aligned_height():
    h_aligned = (DISTANCE / 2.0) * math.tan(math.radians(14.48))
    cfg = make_config(height=h_aligned)
    _, refl = build_two_path_geometry(cfg)
    assert math.degrees(-refl.departure_elevation) == pytest.approx(14.48,
                                                                    abs=1e-9)
    assert refl.departure_elevation < 0.0  # below the horizon


def test_zero_spacing_single_subarray_collapses():
    cfg = make_config(n_subarrays=1, subarray_spacing=0.0)
    los, refl = build_two_path_geometry(cfg)
    assert los.pair_lengths.shape == (1, 1)
    assert los.pair_lengths[0, 0] == DISTANCE
    assert refl.pair_lengths[0, 0] == pytest.approx(
        math.hypot(2 * cfg.height, DISTANCE))


def test_pair_length_invariants_over_heights():
    # symmetry, positivity, and the triangle bound L <= direct + aperture
    for h in (5.0, 12.9, 27.3):
        cfg = make_config(height=h, n_subarrays=4)
        for path in build_two_path_geometry(cfg):
            lengths = path.pair_lengths
            assert np.allclose(lengths, lengths.T, atol=0.0)
            assert np.all(lengths >= DISTANCE)
            aperture = 2 * (h + 3 * cfg.subarray_spacing)
            assert np.all(lengths <= DISTANCE + aperture + 2 * h)


# ---------------------------------------------------------------------------
# wavefront models
# ---------------------------------------------------------------------------


def test_phase_models_at_half_wavelength_offset():
    d_i = WAVELENGTH / 2.0
    exact = relative_phase_exact(d_i, 10.0, DISTANCE, WAVELENGTH)
    planar = relative_phase_planar(d_i, math.atan2(10.0, DISTANCE), WAVELENGTH)
    second = relative_phase_second_order(d_i, 10.0, DISTANCE, WAVELENGTH)
    assert exact == pytest.approx(-0.31263884073404796, rel=1e-12)
    assert abs(exact - planar) == pytest.approx(3.868805281476151e-05,
                                                rel=1e-6)
    assert abs(exact - planar) <= 1e-2
    assert abs(exact - second) <= 1e-9


def test_phase_models_diverge_across_subarray_offsets():
    # At a subarray-scale offset the planar model is useless while the
    # quadratic correction still tracks the exact phase.
    d_i = 0.5
    exact = relative_phase_exact(d_i, 10.0, DISTANCE, WAVELENGTH)
    planar = relative_phase_planar(d_i, math.atan2(10.0, DISTANCE), WAVELENGTH)
    second = relative_phase_second_order(d_i, 10.0, DISTANCE, WAVELENGTH)
    assert abs(exact - planar) == pytest.approx(1.5467503183875593, rel=1e-9)
    assert abs(exact - planar) >= 0.5
    assert abs(exact - second) <= 1e-3


def test_phase_zero_offset_and_wrap():
    assert relative_phase_exact(0.0, 10.0, DISTANCE, WAVELENGTH) == 0.0
    assert relative_phase_planar(0.0, 0.3, WAVELENGTH) == 0.0
    wrapped = relative_phase_exact(0.5, 10.0, DISTANCE, WAVELENGTH, wrap=True)
    assert -math.pi < wrapped <= math.pi
    unwrapped = relative_phase_exact(0.5, 10.0, DISTANCE, WAVELENGTH)
    assert math.remainder(unwrapped - wrapped, 2 * math.pi) == pytest.approx(
        0.0, abs=1e-9)


def test_planar_error_bound_tightness():
    # |exact - planar| <= 2 pi a_i^2 with a_i the normalized aperture ratio;
    # over elevations up to 60 degrees the bound holds and is achieved
    # within a factor of two at shallow elevation.
    ratios = []
    for deg in range(-60, 61, 5):
        h_bar = DISTANCE * math.tan(math.radians(deg))
        r0 = math.hypot(h_bar, DISTANCE)
        for d_i in (0.05, 0.1, 0.2, 0.5, 1.0):
            a_sq = d_i * d_i / (WAVELENGTH * r0)
            gap = abs(
                relative_phase_exact(d_i, h_bar, DISTANCE, WAVELENGTH)
                - relative_phase_planar(d_i, math.atan2(h_bar, DISTANCE),
                                        WAVELENGTH))
            ratios.append(gap / (2.0 * math.pi * a_sq))
    assert max(ratios) <= 1.0
    assert max(ratios) >= 0.45


def test_public_surface():
    for name in geometry.__all__:
        assert getattr(geometry, name) is not None
