"""Scene construction: subarray placement, path angles, exact pair lengths.

The link is a vertical arrangement of N transmit and N receive subarrays at
horizontal separation D, with the lowest subarray on each side at height h.
Two propagation paths are modeled: the direct line of sight and a single
ground bounce. The bounce is handled by an image source, so the two-segment
reflected path from transmit subarray k to receive subarray l has exactly
the length of the straight line to the mirrored receiver, no small-angle
step anywhere. Per-pair lengths are kept exact because the capacity results
live entirely in the sub-wavelength differences between them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # type only; the class lives with the wave physics
    from .channel import GroundMaterial

__all__ = [
    "ConfigError",
    "PathGeometry",
    "RegimeWarning",
    "ScenarioConfig",
    "build_two_path_geometry",
    "optimal_subarray_spacing",
    "relative_phase_exact",
    "relative_phase_planar",
    "relative_phase_second_order",
]


class ConfigError(ValueError):
    """A scenario parameter is outside its valid domain."""


class RegimeWarning(UserWarning):
    """The scale ordering wavelength << spacing << height < distance fails."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one link scenario.

    Lengths in meters, power in dBm, bandwidth in Hz, temperature in kelvin,
    noise figure in dB. `subarray_spacing` is the center-to-center vertical
    distance between adjacent subarrays, `subarray_side` the per-subarray
    element count along one axis (square layout), `element_spacing` the
    intra-subarray element pitch.
    """

    carrier_wavelength: float
    link_distance: float
    height: float
    n_subarrays: int
    subarray_spacing: float
    subarray_side: int
    element_spacing: float
    ground: "GroundMaterial"
    tx_power_dbm: float
    bandwidth: float
    noise_figure: float
    temperature: float
    subcarriers: int = 1

    def validate(self) -> None:
        """Raise ConfigError on hard violations, warn on soft regime breaks."""
        if self.carrier_wavelength <= 0.0:
            raise ConfigError("carrier_wavelength must be positive")
        if self.link_distance <= 0.0:
            raise ConfigError("link_distance must be positive")
        if self.height <= 0.0:
            raise ConfigError("height must be positive")
        if self.n_subarrays < 1:
            raise ConfigError("n_subarrays must be at least 1")
        if self.subarray_spacing < 0.0:
            raise ConfigError("subarray_spacing must be nonnegative")
        if self.n_subarrays > 1 and self.subarray_spacing == 0.0:
            raise ConfigError("subarray_spacing must be positive for N > 1")
        if self.subarray_side < 1:
            raise ConfigError("subarray_side must be at least 1")
        if self.element_spacing <= 0.0:
            raise ConfigError("element_spacing must be positive")
        if self.bandwidth <= 0.0:
            raise ConfigError("bandwidth must be positive")
        if self.temperature <= 0.0:
            raise ConfigError("temperature must be positive")
        if self.subcarriers < 1:
            raise ConfigError("subcarriers must be at least 1")
        if self.ground.relative_permittivity < 1.0:
            raise ConfigError("ground relative_permittivity must be >= 1")
        if self.ground.loss_tangent < 0.0:
            raise ConfigError("ground loss_tangent must be nonnegative")
        self._check_regime()

    def _check_regime(self) -> None:
        lam, d_sub, h, dist = (self.carrier_wavelength, self.subarray_spacing,
                               self.height, self.link_distance)
        ok = h < dist
        if self.n_subarrays > 1:
            ok = ok and (10.0 * lam <= d_sub) and (10.0 * d_sub <= h)
        if not ok:
            warnings.warn(
                "scale ordering wavelength << subarray spacing << height < "
                "distance does not hold; results may leave the model's regime",
                RegimeWarning,
                stacklevel=3,
            )


@dataclass(frozen=True)
class PathGeometry:
    """One propagation path, resolved to per-subarray-pair lengths.

    `pair_lengths[l, k]` is the full path length from transmit subarray k to
    receive subarray l. Elevations are signed, positive above the horizon.
    `incidence_angle` is measured from the vertical at the bounce point and
    is None for the direct path.
    """

    index: int
    is_los: bool
    departure_elevation: float
    departure_azimuth: float
    arrival_elevation: float
    arrival_azimuth: float
    center_length: float
    pair_lengths: np.ndarray = field(repr=False)
    incidence_angle: float | None = None


def optimal_subarray_spacing(wavelength: float, distance: float,
                             n_subarrays: int) -> float:
    """Spacing sqrt(wavelength * distance / N) that makes the direct-path
    coupling matrix unitary (up to scale) in the parabolic regime."""
    if wavelength <= 0.0 or distance <= 0.0 or n_subarrays < 1:
        raise ConfigError("spacing needs positive wavelength/distance and N >= 1")
    return math.sqrt(wavelength * distance / n_subarrays)


def build_two_path_geometry(cfg: ScenarioConfig) -> list[PathGeometry]:
    """Resolve the direct and ground-bounce paths for a scenario.

    Subarray centers sit at heights h + l * d_sub, l = 0..N-1, on both ends.
    Returns [direct, reflected].
    """
    cfg.validate()
    n = cfg.n_subarrays
    d = cfg.link_distance
    offsets = np.arange(n) * cfg.subarray_spacing

    los_lengths = np.sqrt((offsets[:, None] - offsets[None, :]) ** 2 + d * d)
    los = PathGeometry(
        index=1,
        is_los=True,
        departure_elevation=0.0,
        departure_azimuth=0.0,
        arrival_elevation=0.0,
        arrival_azimuth=0.0,
        center_length=d,
        pair_lengths=los_lengths,
    )

    # Image construction: receiver heights mirrored to -(h + offset), so the
    # pair length is sqrt((sum of both endpoint heights)^2 + D^2).
    total_height = 2.0 * cfg.height + offsets[:, None] + offsets[None, :]
    refl_lengths = np.sqrt(total_height**2 + d * d)
    elevation = -math.atan2(2.0 * cfg.height, d)
    reflected = PathGeometry(
        index=2,
        is_los=False,
        departure_elevation=elevation,
        departure_azimuth=0.0,
        arrival_elevation=elevation,
        arrival_azimuth=0.0,
        center_length=math.hypot(2.0 * cfg.height, d),
        pair_lengths=refl_lengths,
        incidence_angle=math.atan2(d, 2.0 * cfg.height),
    )
    return [los, reflected]


# ---------------------------------------------------------------------------
# Wavefront models across a single array aperture
# ---------------------------------------------------------------------------
# A point source at height h_bar and horizontal distance D illuminates an
# aperture position d_i above the reference element. The three models below
# give the phase of that element relative to the reference one: exact
# spherical, first-order planar, and planar plus the quadratic curvature
# term. All phases in radians, negative for a longer path.


def relative_phase_exact(d_i: float, h_bar: float, distance: float,
                         wavelength: float, wrap: bool = False) -> float:
    """Exact spherical-wave relative phase at aperture offset d_i."""
    r0 = math.hypot(h_bar, distance)
    ri = math.hypot(h_bar + d_i, distance)
    phase = -2.0 * math.pi * (ri - r0) / wavelength
    if wrap:
        phase = math.remainder(phase, 2.0 * math.pi)
        if phase <= -math.pi:  # keep the interval (-pi, pi]
            phase = math.pi
    return phase


def relative_phase_planar(d_i: float, elevation: float,
                          wavelength: float) -> float:
    """Plane-wave approximation: linear in the aperture offset."""
    return -2.0 * math.pi * d_i * math.sin(elevation) / wavelength


def relative_phase_second_order(d_i: float, h_bar: float, distance: float,
                                wavelength: float) -> float:
    """Planar term plus quadratic wavefront curvature.

    Written in terms of the normalized aperture ratio
    a_i = d_i / sqrt(wavelength * r0), which controls the error of the
    planar model: the residual against the exact phase is bounded by
    2 * pi * a_i^2.
    """
    r0 = math.hypot(h_bar, distance)
    sin_el = h_bar / r0
    a_i = d_i / math.sqrt(wavelength * r0)
    return -2.0 * math.pi * (sin_el * d_i / wavelength
                             + 0.5 * (1.0 - sin_el * sin_el) * a_i * a_i)
