"""Command line entry points.

Four subcommands: `simulate` evaluates the configured operating point,
`sweep-height` and `sweep-power` trace CSV curves, `link-budget` prints the
power-budget survey. Exit codes: 0 on success, 2 for configuration or
argument problems, 3 when the numerics reject the scenario (for example a
degenerate beam pair that cannot be power-normalized).
"""

from __future__ import annotations

import argparse
import math
import re
import sys

from .geometry import ConfigError
from .harness import (SweepSpec, default_config, link_budget_report,
                      load_config, run_height_sweep, run_power_sweep)
from .numkit import NumericalError

_DEFAULT_BETA2 = "pi/8,2pi/8,3pi/8,4pi/8"

_PI_TOKEN = re.compile(
    r"^(?P<coef>\d+(?:\.\d+)?)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d+)?))?$")


def parse_angle(token: str) -> float:
    """Parse one angle in radians; plain floats and pi fractions such as
    'pi/8', '2pi/8' or '3*pi/4' are accepted."""
    token = token.strip().lower()
    match = _PI_TOKEN.match(token)
    if match:
        coef = float(match.group("coef") or 1.0)
        den = float(match.group("den") or 1.0)
        return coef * math.pi / den
    try:
        return float(token)
    except ValueError as err:
        raise ConfigError(f"cannot parse angle '{token}'") from err


def parse_angle_list(text: str) -> tuple[float, ...]:
    tokens = [t for t in text.split(",") if t.strip()]
    if not tokens:
        raise ConfigError("empty angle list")
    angles = []
    for token in tokens:
        angle = parse_angle(token)
        if angle not in angles:  # keep first occurrence, drop repeats
            angles.append(angle)
    return tuple(angles)


def parse_normalization(text: str) -> tuple[int, int]:
    parts = re.split(r"[x,]", text.strip().lower())
    if len(parts) != 2:
        raise ConfigError("normalization must look like '2,1' or '2x1'")
    try:
        n_ref, p_ref = int(parts[0]), int(parts[1])
    except ValueError as err:
        raise ConfigError("normalization parts must be integers") from err
    return n_ref, p_ref


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwlink",
        description="Link-level simulator for multi-subarray mmWave hops "
                    "over a direct plus ground-reflected channel.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--config", metavar="JSON",
                       help="scenario file; omitted = built-in nominal hop")
        p.add_argument("--beta2", default=_DEFAULT_BETA2, metavar="LIST",
                       help="comma-separated second-beam phase increments "
                            f"(default '{_DEFAULT_BETA2}')")
        p.add_argument("--normalize", metavar="NxP",
                       help="reference system tag, e.g. 2,1; also switches "
                            "the sigma columns to normalized values")
        if needs_out:
            p.add_argument("--out", required=True, metavar="CSV",
                           help="output CSV path")

    p_sim = sub.add_parser("simulate",
                           help="evaluate the configured operating point")
    common(p_sim)

    p_h = sub.add_parser("sweep-height", help="capacity versus height")
    common(p_h)
    p_h.add_argument("--start", type=float, default=5.0)
    p_h.add_argument("--stop", type=float, default=35.0)
    p_h.add_argument("--step", type=float, default=0.25)
    p_h.add_argument("--fine-grid", action="store_true",
                     help="0.5 mm steps for ripple studies (overrides --step)")

    p_p = sub.add_parser("sweep-power", help="capacity versus transmit power")
    common(p_p)
    p_p.add_argument("--start", type=float, default=5.0)
    p_p.add_argument("--stop", type=float, default=25.0)
    p_p.add_argument("--step", type=float, default=1.0)

    p_b = sub.add_parser("link-budget", help="print the power-budget survey")
    p_b.add_argument("--config", metavar="JSON")
    p_b.add_argument("--out", metavar="TXT",
                     help="also write the report to a file")
    return parser


def _spec_kwargs(args) -> dict:
    kwargs = dict(beam_candidates=parse_angle_list(args.beta2))
    if args.normalize is not None:
        kwargs["normalization"] = parse_normalization(args.normalize)
        kwargs["normalize_sigma"] = True
    return kwargs


def run(args) -> int:
    cfg = load_config(args.config) if args.config else default_config()
    if args.command == "simulate":
        spec = SweepSpec(variable="height", start=cfg.height, stop=cfg.height,
                         step=1.0, output_path=args.out, **_spec_kwargs(args))
        run_height_sweep(cfg, spec)
    elif args.command == "sweep-height":
        step = 0.0005 if args.fine_grid else args.step
        spec = SweepSpec(variable="height", start=args.start, stop=args.stop,
                         step=step, output_path=args.out, **_spec_kwargs(args))
        run_height_sweep(cfg, spec)
    elif args.command == "sweep-power":
        spec = SweepSpec(variable="tx_power", start=args.start,
                         stop=args.stop, step=args.step, output_path=args.out,
                         **_spec_kwargs(args))
        run_power_sweep(cfg, spec)
    elif args.command == "link-budget":
        report = link_budget_report(cfg)
        print(report)
        if args.out:
            with open(args.out, "w") as handle:
                handle.write(report + "\n")
    else:  # pragma: no cover - argparse enforces the choices
        raise ConfigError(f"unknown command {args.command!r}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
