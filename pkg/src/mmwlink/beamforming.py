"""Analog beamforming layer: progressive-phase patterns, codebooks, and the
beam-space reduction of the element-space channel.

Each subarray drives all of its elements through one phase-shifter bank per
beam, so the analog stage is a tall matrix of unit-modulus columns shared by
all subarrays. Beam gains are the unconjugated products a^T f between the
array response and the pattern weights; with progressive phasing these
collapse to a separable Dirichlet kernel, which is what the production path
evaluates. With this convention a pattern with increments (beta_x, beta_y)
has its mainlobe at sin(elevation) = -beta_x * wavelength / (2 pi d_e) in
the azimuth-zero plane.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import numkit
from .channel import PathCoupling
from .geometry import ConfigError, PathGeometry

__all__ = [
    "BeamPattern",
    "Codebook",
    "RFConfig",
    "apply_link",
    "beam_gain",
    "effective_channel",
    "effective_noise_covariance",
    "gain_vector",
]

# Below this, sin(psi/2) is treated as a removable singularity of the
# Dirichlet kernel and the geometric sum is evaluated directly.
_SING_TOL = 1e-12


@dataclass(frozen=True)
class BeamPattern:
    """One analog beam: progressive phase increments along the two axes of a
    square subarray. The weight vector follows the array-response ordering
    (y index fastest) and has unit-modulus entries."""

    beta_x: float
    beta_y: float
    side: int

    @property
    def vector(self) -> np.ndarray:
        m = np.arange(self.side)
        wx = np.exp(1j * self.beta_x * m)
        wy = np.exp(1j * self.beta_y * m)
        return np.kron(wx, wy)

    def steering_elevation(self, element_spacing: float,
                           wavelength: float) -> float:
        """Mainlobe elevation in the azimuth-zero plane."""
        s = -self.beta_x * wavelength / (2.0 * math.pi * element_spacing)
        if not -1.0 <= s <= 1.0:
            raise ConfigError("pattern steers outside visible space")
        return math.asin(s)


@dataclass(frozen=True)
class Codebook:
    """Finite set of selectable analog patterns."""

    patterns: tuple[BeamPattern, ...]

    @classmethod
    def elevation_grid(cls, side: int, steps: int = 16) -> "Codebook":
        """Progressive-phase elevation codebook: beta_x = n pi / (steps/2)
        for n in {-(steps/2 - 1), ..., steps/2}, beta_y = 0. The default 16
        entries step the increment by pi/8 across the full phase circle."""
        half = steps // 2
        if steps < 2 or steps != 2 * half:
            raise ConfigError("codebook size must be a positive even number")
        return cls(patterns=tuple(
            BeamPattern(beta_x=n * math.pi / half, beta_y=0.0, side=side)
            for n in range(-(half - 1), half + 1)))

    def __len__(self) -> int:
        return len(self.patterns)


def _dirichlet(psi: float, side: int) -> complex:
    half = 0.5 * psi
    if abs(math.sin(half)) < _SING_TOL:
        # direct geometric sum; exact at the singularity
        return sum(cmath.exp(1j * psi * m) for m in range(side))
    return cmath.exp(1j * (side - 1) * half) * (math.sin(side * half)
                                                / math.sin(half))


def beam_gain(elevation: float, azimuth: float, pattern: BeamPattern,
              element_spacing: float, wavelength: float) -> complex:
    """Gain a^T f of one pattern toward one direction.

    Separable product of two Dirichlet kernels with arguments
    psi_axis = 2 pi d_e / lambda * direction_cosine + beta_axis.
    """
    kappa = 2.0 * math.pi * element_spacing / wavelength * math.sin(elevation)
    psi_x = kappa * math.cos(azimuth) + pattern.beta_x
    psi_y = kappa * math.sin(azimuth) + pattern.beta_y
    return _dirichlet(psi_x, pattern.side) * _dirichlet(psi_y, pattern.side)


@dataclass(frozen=True)
class RFConfig:
    """Analog stage of the link: the selected beam set on each end plus the
    array bookkeeping needed to expand it across subarrays."""

    tx_beams: tuple[BeamPattern, ...]
    rx_beams: tuple[BeamPattern, ...]
    n_subarrays: int
    element_spacing: float
    carrier_wavelength: float

    @classmethod
    def symmetric(cls, betas: "list[float] | tuple[float, ...]", side: int,
                  n_subarrays: int, element_spacing: float,
                  carrier_wavelength: float) -> "RFConfig":
        """Same elevation-steered beam set on both ends of the link."""
        beams = tuple(BeamPattern(beta_x=b, beta_y=0.0, side=side)
                      for b in betas)
        return cls(tx_beams=beams, rx_beams=beams, n_subarrays=n_subarrays,
                   element_spacing=element_spacing,
                   carrier_wavelength=carrier_wavelength)

    def __post_init__(self) -> None:
        if not self.tx_beams or not self.rx_beams:
            raise ConfigError("RFConfig needs at least one beam per side")
        if len(self.tx_beams) != len(self.rx_beams):
            raise ConfigError("tx and rx beam counts must match")
        sides = {p.side for p in self.tx_beams + self.rx_beams}
        if len(sides) != 1:
            raise ConfigError("all patterns must share one subarray side")
        if self.n_subarrays < 1:
            raise ConfigError("n_subarrays must be at least 1")

    @property
    def n_beams(self) -> int:
        return len(self.tx_beams)

    @property
    def side(self) -> int:
        return self.tx_beams[0].side

    @cached_property
    def tx_matrix(self) -> np.ndarray:
        """Per-subarray analog precoder, M^2 x B."""
        return np.stack([p.vector for p in self.tx_beams], axis=1)

    @cached_property
    def rx_matrix(self) -> np.ndarray:
        """Per-subarray analog combiner, M^2 x B."""
        return np.stack([p.vector for p in self.rx_beams], axis=1)

    @cached_property
    def tx_expanded(self) -> np.ndarray:
        """Block analog precoder across subarrays, (N M^2) x (N B)."""
        return numkit.kron(self.tx_matrix, np.eye(self.n_subarrays))

    @cached_property
    def rx_expanded(self) -> np.ndarray:
        """Block analog combiner across subarrays, (N M^2) x (N B)."""
        return numkit.kron(self.rx_matrix, np.eye(self.n_subarrays))


def gain_vector(path: PathGeometry, rf: RFConfig, side: str) -> np.ndarray:
    """Per-beam complex gains of one path endpoint, length B.

    `side` is "t" for departure (transmit patterns) or "r" for arrival
    (receive patterns).
    """
    if side == "t":
        elevation, azimuth = path.departure_elevation, path.departure_azimuth
        beams = rf.tx_beams
    elif side == "r":
        elevation, azimuth = path.arrival_elevation, path.arrival_azimuth
        beams = rf.rx_beams
    else:
        raise ConfigError("side must be 't' or 'r'")
    return np.array([
        beam_gain(elevation, azimuth, p, rf.element_spacing,
                  rf.carrier_wavelength) for p in beams
    ])


def effective_channel(paths: list[PathCoupling], rf: RFConfig) -> np.ndarray:
    """Beam-space channel seen between baseband ports, (N B) x (N B):
    sum over paths of gain * outer(g_rx, g_tx) kron coupling.

    Identical (to rounding) to sandwiching the element-space channel between
    the expanded analog matrices, W^T H F, but built directly from the
    closed-form beam gains.
    """
    nb = rf.n_subarrays * rf.n_beams
    h_eff = np.zeros((nb, nb), dtype=complex)
    for path in paths:
        g_t = gain_vector(path.geometry, rf, "t")
        g_r = gain_vector(path.geometry, rf, "r")
        h_eff += path.gain * numkit.kron(np.outer(g_r, g_t), path.coupling)
    return h_eff


def effective_noise_covariance(rf: RFConfig,
                               noise_power: float) -> np.ndarray:
    """Covariance of element noise after the analog combiner,
    sigma_n^2 * (W^T W*) kron I_N. Not scaled identity unless the receive
    patterns are mutually orthogonal."""
    if noise_power < 0.0:
        raise ConfigError("noise power must be nonnegative")
    w = rf.rx_matrix
    return noise_power * numkit.kron(w.T @ w.conj(),
                                     np.eye(rf.n_subarrays))


def apply_link(symbols: np.ndarray, f_bb: np.ndarray, rf: RFConfig,
               h: np.ndarray, w_bb_t: np.ndarray,
               element_noise: np.ndarray) -> np.ndarray:
    """End-to-end transport of one symbol vector through the element-space
    channel: y = W_BB^T W_RF,N^T (H F_RF,N F_BB s + noise)."""
    tx = rf.tx_expanded @ (f_bb @ symbols)
    rx = h @ tx + element_noise
    return w_bb_t @ (rf.rx_expanded.T @ rx)
