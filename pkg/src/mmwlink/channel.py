"""Per-path wave physics and channel assembly.

Each propagation path contributes a rank-structured block to the channel:
a scalar gain (free-space spread plus reflection coefficient), an N x N
spherical-wave coupling matrix between subarrays built from exact pair
lengths, and element-space steering vectors at the departure and arrival
angles. The full element-space channel is the gain-weighted sum of
Kronecker products of these pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .geometry import ConfigError, PathGeometry, ScenarioConfig

__all__ = [
    "CONCRETE_GROUND",
    "GroundMaterial",
    "PathCoupling",
    "array_response",
    "assemble_channel",
    "coupling_matrix",
    "fresnel_te_reflection",
    "los_coupling_fraunhofer",
    "path_coupling",
    "path_gain",
    "ura_coupling_factorized",
]


@dataclass(frozen=True)
class GroundMaterial:
    """Homogeneous ground half-space: real permittivity and loss tangent."""

    relative_permittivity: float
    loss_tangent: float


# Measured concrete around 60 GHz.
CONCRETE_GROUND = GroundMaterial(relative_permittivity=3.6478,
                                 loss_tangent=0.2053)


@dataclass(frozen=True)
class PathCoupling:
    """Everything one path contributes to the element-space channel."""

    geometry: PathGeometry
    gain: complex
    reflection: complex
    coupling: np.ndarray = field(repr=False)
    tx_response: np.ndarray = field(repr=False)
    rx_response: np.ndarray = field(repr=False)


def array_response(elevation: float, azimuth: float, side: int,
                   element_spacing: float, wavelength: float) -> np.ndarray:
    """Steering vector of a square side x side array of isotropic elements.

    Entry m_x * side + m_y (the y index runs fastest) is
    exp(j * 2 pi d_e / lambda * (m_x sin(el) cos(az) + m_y sin(el) sin(az))).
    Separable, so the vector is the Kronecker product of the two axis
    responses.
    """
    if side < 1:
        raise ConfigError("array side must be at least 1")
    kappa = 2.0 * math.pi * element_spacing / wavelength * math.sin(elevation)
    m = np.arange(side)
    ax = np.exp(1j * kappa * math.cos(azimuth) * m)
    ay = np.exp(1j * kappa * math.sin(azimuth) * m)
    return np.kron(ax, ay)


def fresnel_te_reflection(incidence_angle: float,
                          material: GroundMaterial) -> complex:
    """Fresnel reflection coefficient, E-field perpendicular to the plane of
    incidence, angle measured from the vertical at the bounce point.

    The lossy ground enters through the complex permittivity
    eps_c = eps_r * (1 - j tan_delta); the principal square root (nonnegative
    real part) selects the wave decaying into the ground.
    """
    if not 0.0 <= incidence_angle < 0.5 * math.pi:
        raise ConfigError("incidence angle must lie in [0, pi/2)")
    eps_c = material.relative_permittivity * (1.0 - 1j * material.loss_tangent)
    cos_i = math.cos(incidence_angle)
    sin_i = math.sin(incidence_angle)
    s = np.sqrt(complex(eps_c - sin_i * sin_i))
    return complex((cos_i - s) / (cos_i + s))


def path_gain(reflection: complex, path_length: float,
              wavelength: float) -> complex:
    """Scalar amplitude gain of one path: reflection times free-space spread
    wavelength / (4 pi L) at the path's center length."""
    if path_length <= 0.0:
        raise ConfigError("path length must be positive")
    return reflection * wavelength / (4.0 * math.pi * path_length)


def coupling_matrix(path: PathGeometry, wavelength: float) -> np.ndarray:
    """N x N spherical-wave coupling: entry (l, k) is the carrier phasor
    exp(-j 2 pi L_lk / lambda) of the exact pair length, unit modulus."""
    return np.exp(-2j * math.pi * path.pair_lengths / wavelength)


def los_coupling_fraunhofer(n_subarrays: int) -> np.ndarray:
    """Direct-path coupling in the parabolic limit at critical spacing,
    with the common distance phasor stripped: entry exp(-j pi (l-k)^2 / N).

    Satisfies H^H H = N * I exactly for every N.
    """
    if n_subarrays < 1:
        raise ConfigError("n_subarrays must be at least 1")
    idx = np.arange(n_subarrays)
    diff = idx[:, None] - idx[None, :]
    return np.exp(-1j * math.pi * diff.astype(float) ** 2 / n_subarrays)


def ura_coupling_factorized(h_x: np.ndarray, h_y: np.ndarray) -> np.ndarray:
    """Coupling of a planar grid of subarrays from its two axis couplings.

    Separable geometry means the 2D coupling is the Kronecker product of the
    per-axis coupling matrices.
    """
    return numkit.kron(h_x, h_y)


def path_coupling(path: PathGeometry, cfg: ScenarioConfig) -> PathCoupling:
    """Resolve one geometric path into its channel contribution."""
    if path.is_los:
        gamma = 1.0 + 0.0j
    else:
        if path.incidence_angle is None:
            raise ConfigError("reflected path carries no incidence angle")
        gamma = fresnel_te_reflection(path.incidence_angle, cfg.ground)
    return PathCoupling(
        geometry=path,
        gain=path_gain(gamma, path.center_length, cfg.carrier_wavelength),
        reflection=gamma,
        coupling=coupling_matrix(path, cfg.carrier_wavelength),
        tx_response=array_response(path.departure_elevation,
                                   path.departure_azimuth, cfg.subarray_side,
                                   cfg.element_spacing, cfg.carrier_wavelength),
        rx_response=array_response(path.arrival_elevation,
                                   path.arrival_azimuth, cfg.subarray_side,
                                   cfg.element_spacing, cfg.carrier_wavelength),
    )


def assemble_channel(paths: list[PathCoupling], n_subarrays: int,
                     subarray_side: int) -> np.ndarray:
    """Element-space channel: sum over paths of
    gain * (a_rx a_tx^T) kron coupling, shape (N M^2) x (N M^2).

    The outer product is unconjugated: phases add along the physical path.
    """
    m2 = subarray_side * subarray_side
    dim = n_subarrays * m2
    h = np.zeros((dim, dim), dtype=complex)
    for path in paths:
        if path.coupling.shape != (n_subarrays, n_subarrays):
            raise ConfigError(
                f"coupling shape {path.coupling.shape} does not match "
                f"n_subarrays {n_subarrays}")
        if path.tx_response.size != m2 or path.rx_response.size != m2:
            raise ConfigError("array response size does not match subarray_side")
        rank_one = np.outer(path.rx_response, path.tx_response)
        h += path.gain * numkit.kron(rank_one, path.coupling)
    return h
