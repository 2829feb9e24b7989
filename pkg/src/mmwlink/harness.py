"""Scenario harness: power bookkeeping, parameter sweeps, CSV emission,
link-budget survey, and JSON config handling.

Sweeps are plain deterministic loops over height or transmit power. Each
evaluated point solves the full capacity chain for one system tag {n, p}:
n subarrays driven over the first p propagation paths with p analog beams,
the first beam fixed at broadside. Rows normalize against a configurable
reference system so ratio plots can be produced straight from the CSV.

All floats are written with 17 significant digits, which round-trips
IEEE doubles exactly; two runs of the same sweep produce byte-identical
files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .beamforming import RFConfig
from .capacity import WaterfillingResult, inner_capacity
from .channel import CONCRETE_GROUND, GroundMaterial, PathCoupling, \
    fresnel_te_reflection, path_coupling
from .geometry import (ConfigError, ScenarioConfig, build_two_path_geometry,
                       optimal_subarray_spacing)

__all__ = [
    "BOLTZMANN",
    "SweepRow",
    "SweepSpec",
    "aligned_height",
    "build_scene",
    "default_config",
    "dominant_spatial_frequency",
    "config_to_dict",
    "link_budget_report",
    "load_config",
    "noise_power_watts",
    "oscillation_frequency_estimate",
    "read_sweep_csv",
    "rf_for",
    "run_height_sweep",
    "run_power_sweep",
    "subcarrier_power_watts",
    "write_sweep_csv",
]

BOLTZMANN = 1.380649e-23

# Elevation (degrees) of the steepest codebook beam that the nominal link
# aligns with; the matching height puts the ground bounce exactly on it.
_ALIGNED_ELEVATION_DEG = 14.48

# Regulatory EIRP cap for the band, dBm.
_EIRP_CAP_DBM = 43.0


def aligned_height(link_distance: float) -> float:
    """Height at which the ground-bounce elevation reaches the quarter-turn
    codebook beam's steering direction of 14.48 degrees."""
    return 0.5 * link_distance * math.tan(math.radians(_ALIGNED_ELEVATION_DEG))


def noise_power_watts(cfg: ScenarioConfig) -> float:
    """Thermal noise power per subcarrier: k T F W / K."""
    figure = 10.0 ** (cfg.noise_figure / 10.0)
    return BOLTZMANN * cfg.temperature * figure * cfg.bandwidth / cfg.subcarriers


def subcarrier_power_watts(cfg: ScenarioConfig) -> float:
    """Transmit power budget per subcarrier."""
    return 10.0 ** ((cfg.tx_power_dbm - 30.0) / 10.0) / cfg.subcarriers


def default_config() -> ScenarioConfig:
    """Nominal street-level backhaul hop: 100 m link at 60 GHz, two critically
    spaced 8x8 subarrays per end, concrete ground, 2.16 GHz of bandwidth."""
    distance = 100.0
    return ScenarioConfig(
        carrier_wavelength=0.005,
        link_distance=distance,
        height=aligned_height(distance),
        n_subarrays=2,
        subarray_spacing=optimal_subarray_spacing(0.005, distance, 2),
        subarray_side=8,
        element_spacing=0.0025,
        ground=CONCRETE_GROUND,
        tx_power_dbm=20.0,
        bandwidth=2.16e9,
        noise_figure=5.0,
        temperature=300.0,
        subcarriers=1,
    )


def build_scene(cfg: ScenarioConfig, n_paths: int = 2) -> list[PathCoupling]:
    """Resolve the first n_paths propagation paths of the scenario."""
    if not 1 <= n_paths <= 2:
        raise ConfigError("n_paths must be 1 (direct) or 2 (direct + ground)")
    paths = build_two_path_geometry(cfg)[:n_paths]
    return [path_coupling(p, cfg) for p in paths]


def rf_for(cfg: ScenarioConfig, betas) -> RFConfig:
    """Symmetric analog stage steering the given phase increments."""
    return RFConfig.symmetric(
        betas, side=cfg.subarray_side, n_subarrays=cfg.n_subarrays,
        element_spacing=cfg.element_spacing,
        carrier_wavelength=cfg.carrier_wavelength)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: which variable moves, over what grid, which second beams
    compete, and which reference system normalizes the output."""

    variable: str  # "height" or "tx_power"
    start: float
    stop: float
    step: float
    beam_candidates: tuple[float, ...]
    normalization: tuple[int, int] | None = None
    normalize_sigma: bool = False
    output_path: str | Path | None = None

    def validate(self) -> None:
        if self.variable not in ("height", "tx_power"):
            raise ConfigError("sweep variable must be 'height' or 'tx_power'")
        if self.step <= 0.0:
            raise ConfigError("sweep step must be positive")
        if not self.beam_candidates:
            raise ConfigError("sweep needs at least one beam candidate")
        if self.normalization is not None:
            n_ref, p_ref = self.normalization
            if n_ref < 1 or p_ref not in (1, 2):
                raise ConfigError("normalization must be (n >= 1, p in {1,2})")

    def grid(self) -> np.ndarray:
        if self.start > self.stop:
            return np.array([])
        return np.arange(self.start, self.stop + 0.5 * self.step, self.step)


@dataclass(frozen=True)
class SweepRow:
    """One evaluated point. Vector fields hold n_subarrays * n_beams entries;
    the CSV writer pads them to the file-wide maximum."""

    h_m: float
    pt_dbm: float
    system: str
    beta2_rad: float
    capacity_bps_hz: float
    normalized_capacity: float
    sigma: tuple[float, ...]
    p_watts: tuple[float, ...]
    snr_db: tuple[float, ...]
    n_streams: int


def _system_config(cfg: ScenarioConfig, n_subarrays: int, height: float,
                   pt_dbm: float) -> ScenarioConfig:
    spacing = cfg.subarray_spacing
    if n_subarrays != cfg.n_subarrays:
        spacing = (optimal_subarray_spacing(
            cfg.carrier_wavelength, cfg.link_distance, n_subarrays)
            if n_subarrays > 1 else 0.0)
    return replace(cfg, n_subarrays=n_subarrays, subarray_spacing=spacing,
                   height=height, tx_power_dbm=pt_dbm)


def _solve_system(cfg: ScenarioConfig, n_subarrays: int, n_paths: int,
                  betas, height: float,
                  pt_dbm: float) -> WaterfillingResult:
    sub = _system_config(cfg, n_subarrays, height, pt_dbm)
    allocation, _ = inner_capacity(
        build_scene(sub, n_paths), rf_for(sub, betas),
        noise_power_watts(sub), subcarrier_power_watts(sub))
    return allocation


def _snr_db(snrs: np.ndarray) -> tuple[float, ...]:
    return tuple(10.0 * math.log10(s) if s > 0.0 else -math.inf for s in snrs)


class _ReferenceCache:
    """Memoizes reference-system solves within one sweep run."""

    def __init__(self, cfg: ScenarioConfig, tag: tuple[int, int]):
        self.cfg = cfg
        self.n_ref, self.p_ref = tag
        self._store: dict[tuple, WaterfillingResult] = {}

    def lookup(self, height: float, pt_dbm: float,
               beta2: float) -> WaterfillingResult:
        if self.p_ref == 1:
            betas: tuple[float, ...] = (0.0,)
        else:
            ref_beta = beta2 if math.isfinite(beta2) else math.pi / 4.0
            betas = (0.0, ref_beta)
        key = (height, pt_dbm, betas)
        if key not in self._store:
            self._store[key] = _solve_system(
                self.cfg, self.n_ref, self.p_ref, betas, height, pt_dbm)
        return self._store[key]


def _make_row(cfg: ScenarioConfig, n_subarrays: int, n_paths: int,
              betas, height: float, pt_dbm: float, beta2: float,
              reference: _ReferenceCache,
              normalize_sigma: bool) -> SweepRow:
    allocation = _solve_system(cfg, n_subarrays, n_paths, betas, height,
                               pt_dbm)
    ref = reference.lookup(height, pt_dbm, beta2)
    sigma = allocation.singular_values
    if normalize_sigma:
        sigma = sigma / ref.singular_values[0]
    return SweepRow(
        h_m=height, pt_dbm=pt_dbm, system=f"{n_subarrays}x{n_paths}",
        beta2_rad=beta2,
        capacity_bps_hz=allocation.capacity,
        normalized_capacity=allocation.capacity / ref.capacity,
        sigma=tuple(float(s) for s in sigma),
        p_watts=tuple(float(p) for p in allocation.powers),
        snr_db=_snr_db(allocation.snrs),
        n_streams=allocation.n_streams)


def run_height_sweep(cfg: ScenarioConfig,
                     spec: SweepSpec) -> list[SweepRow]:
    """Trace the full system {N, 2} over heights, one row per (h, beta_2),
    normalized against the single-beam reference (default {N, 1})."""
    spec.validate()
    if spec.variable != "height":
        raise ConfigError("run_height_sweep needs variable='height'")
    tag = spec.normalization or (cfg.n_subarrays, 1)
    reference = _ReferenceCache(cfg, tag)
    rows = []
    for height in spec.grid():
        for beta2 in spec.beam_candidates:
            rows.append(_make_row(
                cfg, cfg.n_subarrays, 2, (0.0, beta2), float(height),
                cfg.tx_power_dbm, beta2, reference, spec.normalize_sigma))
    if spec.output_path is not None:
        write_sweep_csv(rows, spec.output_path)
    return rows


def run_power_sweep(cfg: ScenarioConfig, spec: SweepSpec) -> list[SweepRow]:
    """Trace the four system tags {1,1}, {1,2}, {N,1}, {N,2} over transmit
    power at the configured height, normalized by default against {1,1}.
    Two-path systems emit one row per beam candidate."""
    spec.validate()
    if spec.variable != "tx_power":
        raise ConfigError("run_power_sweep needs variable='tx_power'")
    tag = spec.normalization or (1, 1)
    reference = _ReferenceCache(cfg, tag)
    systems = []
    for n_sub in (1, cfg.n_subarrays):
        for n_paths in (1, 2):
            if (n_sub, n_paths) not in systems:
                systems.append((n_sub, n_paths))
    rows = []
    for pt in spec.grid():
        for n_sub, n_paths in systems:
            if n_paths == 1:
                rows.append(_make_row(
                    cfg, n_sub, 1, (0.0,), cfg.height, float(pt), math.nan,
                    reference, spec.normalize_sigma))
            else:
                for beta2 in spec.beam_candidates:
                    rows.append(_make_row(
                        cfg, n_sub, 2, (0.0, beta2), cfg.height, float(pt),
                        beta2, reference, spec.normalize_sigma))
    if spec.output_path is not None:
        write_sweep_csv(rows, spec.output_path)
    return rows


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _vector_width(rows: list[SweepRow]) -> int:
    return max((len(r.sigma) for r in rows), default=1)


def sweep_header(width: int) -> list[str]:
    cols = ["h_m", "pt_dbm", "system", "beta2_rad", "capacity_bps_hz",
            "normalized_capacity"]
    cols += [f"sigma_{q}" for q in range(1, width + 1)]
    cols += [f"p_{q}" for q in range(1, width + 1)]
    cols += [f"snr_db_{q}" for q in range(1, width + 1)]
    cols.append("n_streams")
    return cols


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    """Emit rows with zero-padded vector columns (SNR pads with -inf).
    Deterministic byte-for-byte: fixed header, fixed float formatting,
    newline-only line endings."""
    width = _vector_width(rows)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(sweep_header(width))
        for row in rows:
            pad = width - len(row.sigma)
            record = [_fmt(row.h_m), _fmt(row.pt_dbm), row.system,
                      _fmt(row.beta2_rad), _fmt(row.capacity_bps_hz),
                      _fmt(row.normalized_capacity)]
            record += [_fmt(s) for s in row.sigma] + ["0"] * pad
            record += [_fmt(p) for p in row.p_watts] + ["0"] * pad
            record += [_fmt(s) for s in row.snr_db] + ["-inf"] * pad
            record.append(str(row.n_streams))
            writer.writerow(record)


def read_sweep_csv(path) -> tuple[list[str], list[dict]]:
    """Read a sweep CSV back; every column except `system` parses as float
    (n_streams as int). Lossless against write_sweep_csv."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = []
        for record in reader:
            parsed: dict = {}
            for key, token in zip(header, record):
                if key == "system":
                    parsed[key] = token
                elif key == "n_streams":
                    parsed[key] = int(token)
                else:
                    parsed[key] = float(token)
            rows.append(parsed)
    return header, rows


# ---------------------------------------------------------------------------
# link budget and oscillation helpers
# ---------------------------------------------------------------------------


def oscillation_frequency_estimate(cfg: ScenarioConfig,
                                   height: float | None = None) -> float:
    """Predicted spatial frequency (cycles per meter of height) of the
    capacity ripple: the derivative of the direct/ground path-length
    difference, 2 h / (lambda sqrt(h^2 + (D/2)^2))."""
    h = cfg.height if height is None else height
    if h <= 0.0:
        raise ConfigError("height must be positive")
    half = 0.5 * cfg.link_distance
    return (2.0 / cfg.carrier_wavelength) * h / math.hypot(h, half)


def dominant_spatial_frequency(positions: np.ndarray, values: np.ndarray,
                               min_frequency: float = 10.0) -> float:
    """Peak frequency of a sampled oscillation, in cycles per unit position.

    Removes a least-squares linear trend, applies a Hann window, and takes
    the strongest rFFT bin at or above min_frequency. The floor keeps slow
    envelope drift from masquerading as the ripple.
    """
    positions = np.asarray(positions, dtype=float)
    values = np.asarray(values, dtype=float)
    if positions.ndim != 1 or positions.shape != values.shape:
        raise ConfigError("positions and values must be matching 1-D arrays")
    if positions.size < 16:
        raise ConfigError("need at least 16 samples to locate the ripple")
    step = positions[1] - positions[0]
    if step <= 0.0 or not np.allclose(np.diff(positions), step, rtol=1e-6):
        raise ConfigError("positions must be uniformly increasing")
    x = positions - positions[0]
    detrended = values - np.polyval(np.polyfit(x, values, 1), x)
    spectrum = np.abs(np.fft.rfft(detrended * np.hanning(values.size)))
    freqs = np.fft.rfftfreq(values.size, step)
    mask = freqs >= min_frequency
    if not mask.any():
        raise ConfigError("grid too coarse for the requested frequency floor")
    return float(freqs[mask][np.argmax(spectrum[mask])])


def link_budget_report(cfg: ScenarioConfig, h_band=(5.0, 35.0)) -> str:
    """Plain-text survey of the link's power budget: EIRP against the
    43 dBm cap, noise floor, free-space loss, single-subarray direct-path
    SNR and rate, and the ground-path loss mechanisms over a height band."""
    cfg.validate()
    aperture_gain_db = 10.0 * math.log10(cfg.subarray_side**2)
    eirp = cfg.tx_power_dbm + aperture_gain_db
    noise_dbm = 10.0 * math.log10(noise_power_watts(cfg) * 1000.0)
    fspl_db = -20.0 * math.log10(
        cfg.carrier_wavelength / (4.0 * math.pi * cfg.link_distance))

    single = _solve_system(cfg, 1, 1, (0.0,), cfg.height, cfg.tx_power_dbm)
    snr_db = 10.0 * math.log10(single.snrs[0])

    lo, hi = h_band
    heights = np.linspace(lo, hi, 601)
    refl_loss = np.array([
        -20.0 * math.log10(abs(fresnel_te_reflection(
            math.atan2(cfg.link_distance, 2.0 * h), cfg.ground)))
        for h in heights])
    extra_spread_db = 20.0 * math.log10(
        math.hypot(2.0 * hi, cfg.link_distance) / cfg.link_distance)

    osc = oscillation_frequency_estimate(cfg)
    lines = [
        "link budget summary",
        f"  carrier wavelength {cfg.carrier_wavelength * 1000.0:.3f} mm, "
        f"link distance {cfg.link_distance:.1f} m, "
        f"height {cfg.height:.3f} m",
        f"  tx power {cfg.tx_power_dbm:.2f} dBm, aperture gain "
        f"{aperture_gain_db:.2f} dBi, eirp {eirp:.2f} dBm "
        f"(cap {_EIRP_CAP_DBM:.2f} dBm, margin {_EIRP_CAP_DBM - eirp:+.2f} dB)",
        f"  noise floor over {cfg.bandwidth / 1e9:.2f} GHz at noise figure "
        f"{cfg.noise_figure:.1f} dB: {noise_dbm:.3f} dBm",
        f"  free-space path loss: {fspl_db:.3f} dB",
        f"  direct-path snr, single subarray: {snr_db:.3f} dB, "
        f"spectral efficiency {single.capacity:.3f} b/s/Hz",
        f"  ground reflection loss for h in [{lo:.1f}, {hi:.1f}] m: "
        f"{refl_loss.min():.3f} to {refl_loss.max():.3f} dB",
        f"  reflected-path extra spread loss at h = {hi:.1f} m: "
        f"{extra_spread_db:.3f} dB",
        f"  height ripple rate at h = {cfg.height:.3f} m: "
        f"{osc:.1f} cycles/m",
    ]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# config I/O
# ---------------------------------------------------------------------------

_GROUND_KEYS = ("relative_permittivity", "loss_tangent")
_FLOAT_KEYS = ("carrier_wavelength", "link_distance", "height",
               "subarray_spacing", "element_spacing", "tx_power_dbm",
               "bandwidth", "noise_figure", "temperature")
_INT_KEYS = ("n_subarrays", "subarray_side")
_OPTIONAL_INT_KEYS = ("subcarriers",)


def _require_number(data: dict, key: str, integer: bool):
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key '{key}' must be a number")
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"config key '{key}' must be an integer")
        return int(value)
    return float(value)


def config_from_dict(data: dict) -> ScenarioConfig:
    """Build and validate a scenario from a JSON-shaped dict. Unknown keys
    are rejected rather than ignored so typos cannot silently fall back to
    defaults."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = set(_FLOAT_KEYS) | set(_INT_KEYS) | set(_OPTIONAL_INT_KEYS) \
        | {"ground"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted((set(_FLOAT_KEYS) | set(_INT_KEYS) | {"ground"})
                     - set(data))
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    ground_data = data["ground"]
    if not isinstance(ground_data, dict):
        raise ConfigError("config key 'ground' must be an object")
    unknown_ground = sorted(set(ground_data) - set(_GROUND_KEYS))
    if unknown_ground:
        raise ConfigError(
            f"unknown ground keys: {', '.join(unknown_ground)}")
    missing_ground = sorted(set(_GROUND_KEYS) - set(ground_data))
    if missing_ground:
        raise ConfigError(
            f"missing ground keys: {', '.join(missing_ground)}")

    kwargs: dict = {}
    for key in _FLOAT_KEYS:
        kwargs[key] = _require_number(data, key, integer=False)
    for key in _INT_KEYS:
        kwargs[key] = _require_number(data, key, integer=True)
    for key in _OPTIONAL_INT_KEYS:
        if key in data:
            kwargs[key] = _require_number(data, key, integer=True)
    kwargs["ground"] = GroundMaterial(
        relative_permittivity=_require_number(ground_data,
                                              "relative_permittivity",
                                              integer=False),
        loss_tangent=_require_number(ground_data, "loss_tangent",
                                     integer=False))
    cfg = ScenarioConfig(**kwargs)
    cfg.validate()
    return cfg


def load_config(path) -> ScenarioConfig:
    """Load a scenario from a JSON file; schema errors raise ConfigError."""
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as err:
        raise ConfigError(f"cannot read config file: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config file is not valid JSON: {err}") from err
    return config_from_dict(data)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Inverse of config_from_dict, for documentation and round-trips."""
    out: dict = {}
    for key in _FLOAT_KEYS:
        out[key] = getattr(cfg, key)
    for key in _INT_KEYS + _OPTIONAL_INT_KEYS:
        out[key] = getattr(cfg, key)
    out["ground"] = {
        "relative_permittivity": cfg.ground.relative_permittivity,
        "loss_tangent": cfg.ground.loss_tangent,
    }
    return out
