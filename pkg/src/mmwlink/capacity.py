"""Capacity of the hybrid link: whitened extended channel, exact
waterfilling, baseband stages, and the discrete beam-pair search.

The analog stages are fixed unit-modulus matrices, so the transmit power
actually radiated and the noise actually combined are both shaped by the
beam Gram matrices. Folding the inverse square roots of those Grams into
the channel gives an extended channel whose SVD yields parallel streams
with unit-power columns and white noise; waterfilling on its singular
values is then exact, and the baseband precoder built from the same roots
meets the radiated-power budget with equality when all power is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numkit
from .beamforming import RFConfig, effective_channel
from .channel import PathCoupling
from .geometry import ConfigError
from .numkit import NumericalError, SvdResult

__all__ = [
    "OuterSearchResult",
    "PrecoderSet",
    "WaterfillingResult",
    "baseband_precoders",
    "extended_channel",
    "inner_capacity",
    "outer_search",
    "spectral_efficiency",
    "waterfill",
]

# Allocations below this fraction of the budget count as unused streams.
_STREAM_RTOL = 1e-12


def _gram_roots(rf: RFConfig) -> tuple[np.ndarray, np.ndarray]:
    """Inverse square roots of the expanded analog Grams, transmit first.

    The transmit Gram is F^H F, the receive Gram W^T (W^T)^H = W^T W*.
    Both expand across subarrays as kron(gram, I_N). A singular Gram means
    the selected beams are linearly dependent and the analog stage cannot
    be power-normalized; that is reported per side.
    """
    eye = np.eye(rf.n_subarrays)
    f = rf.tx_matrix
    w = rf.rx_matrix
    try:
        tx_root = numkit.inv_sqrt_psd(f.conj().T @ f)
    except NumericalError as err:
        raise NumericalError(f"transmit beam set is degenerate: {err}") from err
    try:
        rx_root = numkit.inv_sqrt_psd(w.T @ w.conj())
    except NumericalError as err:
        raise NumericalError(f"receive beam set is degenerate: {err}") from err
    return numkit.kron(tx_root, eye), numkit.kron(rx_root, eye)


def extended_channel(h_eff: np.ndarray, rf: RFConfig) -> np.ndarray:
    """Whitened beam-space channel
    G = [W^T (W^T)^H]^(-1/2) H_eff [F^H F]^(-1/2), shape (N B) x (N B).

    Its singular vectors feed the baseband stages directly: left ones see
    white noise, right ones cost exactly their norm in radiated power.
    """
    nb = rf.n_subarrays * rf.n_beams
    if h_eff.shape != (nb, nb):
        raise ConfigError(
            f"effective channel shape {h_eff.shape} does not match rf ({nb})")
    tx_root, rx_root = _gram_roots(rf)
    return rx_root @ h_eff @ tx_root


@dataclass(frozen=True)
class WaterfillingResult:
    """Exact power allocation over parallel streams."""

    singular_values: np.ndarray
    powers: np.ndarray
    water_level: float
    snrs: np.ndarray
    capacity: float
    n_streams: int


def waterfill(singular_values: np.ndarray, noise_power: float,
              power_budget: float) -> WaterfillingResult:
    """Exact waterfilling over parallel channels with gains sigma_q.

    Solves max sum log2(1 + sigma_q^2 P_q / noise_power) subject to
    sum P_q <= power_budget, P_q >= 0, by the closed-form active set: the
    largest m for which the water level
    kappa_m = (budget + sum_{q<=m} noise/sigma_q^2) / m exceeds the inverse
    gain noise/sigma_m^2 of the weakest included stream.
    """
    sigma = np.asarray(singular_values, dtype=float)
    if sigma.ndim != 1 or sigma.size == 0:
        raise ConfigError("waterfill needs a nonempty 1-D gain vector")
    if np.any(sigma < 0.0):
        raise ConfigError("singular values must be nonnegative")
    if np.any(np.diff(sigma) > 0.0):
        raise ConfigError("singular values must be sorted descending")
    if noise_power <= 0.0 or power_budget <= 0.0:
        raise ConfigError("noise power and power budget must be positive")

    powers = np.zeros_like(sigma)
    if sigma[0] == 0.0:
        return WaterfillingResult(
            singular_values=sigma, powers=powers, water_level=math.nan,
            snrs=np.zeros_like(sigma), capacity=0.0, n_streams=0)

    positive = sigma > 0.0
    inverse_gain = np.full_like(sigma, math.inf)
    inverse_gain[positive] = noise_power / sigma[positive] ** 2

    level = math.nan
    active = 0
    cumulative = 0.0
    for m in range(1, sigma.size + 1):
        if not positive[m - 1]:
            break
        cumulative += inverse_gain[m - 1]
        candidate = (power_budget + cumulative) / m
        if candidate > inverse_gain[m - 1]:
            level = candidate
            active = m
        else:
            break
    powers[:active] = level - inverse_gain[:active]
    snrs = sigma**2 * powers / noise_power
    capacity = float(np.sum(np.log2(1.0 + snrs)))
    n_streams = int(np.sum(powers > _STREAM_RTOL * power_budget))
    return WaterfillingResult(
        singular_values=sigma, powers=powers, water_level=level, snrs=snrs,
        capacity=capacity, n_streams=n_streams)


@dataclass(frozen=True)
class PrecoderSet:
    """Baseband stages matched to one analog configuration."""

    f_bb: np.ndarray
    w_bb_t: np.ndarray
    stream_amplitudes: np.ndarray


def baseband_precoders(decomposition: SvdResult, allocation: WaterfillingResult,
                       rf: RFConfig) -> PrecoderSet:
    """Baseband precoder and combiner from the extended-channel SVD.

    F_BB = [F^H F]^(-1/2) V Psi with Psi = diag(sqrt(P_q)), and
    W_BB^T = U^H [W^T (W^T)^H]^(-1/2). The radiated power
    ||F_RF,N F_BB||_F^2 then equals sum P_q exactly.
    """
    tx_root, rx_root = _gram_roots(rf)
    amplitudes = np.sqrt(allocation.powers)
    f_bb = tx_root @ decomposition.v @ np.diag(amplitudes)
    w_bb_t = decomposition.u.conj().T @ rx_root
    return PrecoderSet(f_bb=f_bb, w_bb_t=w_bb_t, stream_amplitudes=amplitudes)


def spectral_efficiency(h: np.ndarray, rf: RFConfig, f_bb: np.ndarray,
                        w_bb_t: np.ndarray, noise_power: float,
                        symbol_covariance: np.ndarray | None = None) -> float:
    """Mutual information in b/s/Hz of the full element-space link with the
    given stages, evaluated from first principles (no SVD shortcuts):
    log2 det(I + R_n^{-1} T R_s T^H) with T the end-to-end symbol map and
    R_n the combined-noise covariance.
    """
    if noise_power <= 0.0:
        raise ConfigError("noise power must be positive")
    rx_chain = w_bb_t @ rf.rx_expanded.T
    transfer = rx_chain @ h @ rf.tx_expanded @ f_bb
    n_streams = transfer.shape[1]
    r_s = (np.eye(n_streams, dtype=complex) if symbol_covariance is None
           else np.asarray(symbol_covariance, dtype=complex))
    r_n = noise_power * (rx_chain @ rx_chain.conj().T)
    white = numkit.inv_sqrt_psd(r_n)
    core = white @ transfer @ r_s @ transfer.conj().T @ white
    w, _ = numkit.herm_eig(0.5 * (core + core.conj().T))
    return float(np.sum(np.log2(1.0 + np.maximum(w.real, 0.0))))


def inner_capacity(paths: list[PathCoupling], rf: RFConfig,
                   noise_power: float, power_budget: float
                   ) -> tuple[WaterfillingResult, PrecoderSet]:
    """Capacity of one analog configuration: whiten, decompose, waterfill."""
    h_eff = effective_channel(paths, rf)
    g = extended_channel(h_eff, rf)
    decomposition = numkit.svd(g)
    allocation = waterfill(decomposition.sigma, noise_power, power_budget)
    precoders = baseband_precoders(decomposition, allocation, rf)
    return allocation, precoders


@dataclass(frozen=True)
class OuterSearchResult:
    """Winner of the discrete second-beam search."""

    beta_2: float
    allocation: WaterfillingResult
    precoders: PrecoderSet


def outer_search(paths: list[PathCoupling], candidates,
                 rf_factory, noise_power: float,
                 power_budget: float) -> OuterSearchResult:
    """Pick the second analog beam that maximizes waterfilled capacity.

    `candidates` is an iterable of beta_2 phase increments (duplicates not
    allowed); `rf_factory(beta_2)` must return the full RFConfig for the
    pair. Ties resolve to the smaller beta_2 so the search is deterministic.
    """
    best: OuterSearchResult | None = None
    seen: set[float] = set()
    for beta_2 in candidates:
        if beta_2 in seen:
            raise ConfigError(f"duplicate candidate beta_2 {beta_2!r}")
        seen.add(beta_2)
        allocation, precoders = inner_capacity(
            paths, rf_factory(beta_2), noise_power, power_budget)
        better = best is None or allocation.capacity > best.allocation.capacity
        tie = (best is not None
               and allocation.capacity == best.allocation.capacity
               and beta_2 < best.beta_2)
        if better or tie:
            best = OuterSearchResult(beta_2=beta_2, allocation=allocation,
                                     precoders=precoders)
    if best is None:
        raise ConfigError("outer_search needs at least one candidate")
    return best
