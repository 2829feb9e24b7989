"""The five figure kinds.

Sweep kinds draw one series per second-beam choice or per system tag,
following the sweep CSV contract (h_m, pt_dbm, system, beta2_rad, the
sigma_q/p_q/snr_db_q vector columns, n_streams). The pattern kind draws
one normalized lobe per codebook entry from a pattern-dump CSV
(beta_x_rad, theta_rad, gain_db). Padded vector entries (zero gain,
-inf SNR) are recognized and skipped.
"""

import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .data import (SchemaError, floats, group_rows, read_table,
                   require_columns, series_columns)

KINDS = ("capacity_vs_h", "singular_vs_h", "capacity_vs_pt", "snr_vs_pt",
         "array_pattern")


@dataclass(frozen=True)
class FigureSpec:
    """One render request: source table, figure kind, output image path."""

    input_csv: str
    figure_kind: str
    output_path: str
    title: str | None = None


def _beta_label(token):
    value = float(token)
    if math.isnan(value):
        return "single beam"
    return f"beta2 = {value / math.pi:.3g} pi"


def _system_label(row):
    beta = float(row["beta2_rad"])
    if math.isnan(beta):
        return row["system"]
    return f"{row['system']}, {_beta_label(row['beta2_rad'])}"


def _capacity_vs_h(header, rows, ax):
    require_columns(header, ["h_m", "beta2_rad", "normalized_capacity"])
    for token, group in group_rows(rows, lambda r: r["beta2_rad"]).items():
        ax.plot(floats(group, "h_m"), floats(group, "normalized_capacity"),
                label=_beta_label(token))
    ax.set_xlabel("height (m)")
    ax.set_ylabel("normalized capacity")


def _singular_vs_h(header, rows, ax):
    require_columns(header, ["h_m", "beta2_rad", "sigma_1"])
    columns = series_columns(header, "sigma_")
    for token, group in group_rows(rows, lambda r: r["beta2_rad"]).items():
        heights = floats(group, "h_m")
        for q, name in enumerate(columns, start=1):
            values = floats(group, name)
            if all(v == 0.0 for v in values):
                continue  # padding for narrower rows
            ax.plot(heights, values, label=f"{_beta_label(token)}, s{q}")
    ax.set_xlabel("height (m)")
    ax.set_ylabel("subchannel gain")


def _capacity_vs_pt(header, rows, ax):
    require_columns(header, ["pt_dbm", "system", "beta2_rad",
                             "capacity_bps_hz"])
    for _, group in group_rows(
            rows, lambda r: (r["system"], r["beta2_rad"])).items():
        ax.plot(floats(group, "pt_dbm"), floats(group, "capacity_bps_hz"),
                label=_system_label(group[0]))
    ax.set_xlabel("transmit power (dBm)")
    ax.set_ylabel("capacity (b/s/Hz)")


def _snr_vs_pt(header, rows, ax):
    require_columns(header, ["pt_dbm", "system", "beta2_rad", "snr_db_1"])
    columns = series_columns(header, "snr_db_")
    for _, group in group_rows(
            rows, lambda r: (r["system"], r["beta2_rad"])).items():
        powers = floats(group, "pt_dbm")
        for q, name in enumerate(columns, start=1):
            values = floats(group, name)
            if all(v == -math.inf for v in values):
                continue  # padding, or a stream that never activates
            ax.plot(powers, values, label=f"{_system_label(group[0])}, s{q}")
    ax.set_xlabel("transmit power (dBm)")
    ax.set_ylabel("subchannel SNR (dB)")


def _array_pattern(header, rows, ax):
    require_columns(header, ["beta_x_rad", "theta_rad", "gain_db"])
    for token, group in group_rows(rows, lambda r: r["beta_x_rad"]).items():
        degrees = [math.degrees(t) for t in floats(group, "theta_rad")]
        ax.plot(degrees, floats(group, "gain_db"),
                label=f"beta = {float(token) / math.pi:.3g} pi", linewidth=0.8)
    ax.set_xlabel("elevation (deg)")
    ax.set_ylabel("normalized gain (dB)")
    if rows:
        ax.set_ylim(-40.0, 2.0)


_RENDERERS = {
    "capacity_vs_h": _capacity_vs_h,
    "singular_vs_h": _singular_vs_h,
    "capacity_vs_pt": _capacity_vs_pt,
    "snr_vs_pt": _snr_vs_pt,
    "array_pattern": _array_pattern,
}


def render(spec: FigureSpec) -> None:
    """Draw one figure kind from the CSV and write the image file.

    A table with a valid header and no data rows renders labeled empty
    axes. Missing columns raise SchemaError naming them.
    """
    if spec.figure_kind not in _RENDERERS:
        raise SchemaError(f"unknown figure kind '{spec.figure_kind}'")
    header, rows = read_table(spec.input_csv)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    try:
        _RENDERERS[spec.figure_kind](header, rows, ax)
        if spec.title:
            ax.set_title(spec.title)
        ax.grid(True, alpha=0.3)
        handles, _ = ax.get_legend_handles_labels()
        if handles:
            ax.legend(fontsize="x-small",
                      ncol=4 if len(handles) > 8 else 1)
        fig.tight_layout()
        fig.savefig(spec.output_path)
    finally:
        plt.close(fig)
