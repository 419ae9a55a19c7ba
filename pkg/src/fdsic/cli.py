"""Batch command-line front door.

Subcommands
-----------
tone-test   one-tone spectrum plus harmonic verification report
sweep       canceller comparison across transmit powers (CSV)
budget      front-end suppression budget table
spectrum    averaged spectrum of a recorded IQ file

Every run echoes its fully resolved configuration into
``manifest.json`` next to the outputs, and identical manifests with the
same seed produce byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .analysis import BudgetInput, suppression_budget, verify_harmonics, write_harmonics_csv
from .cancellers import CancellerMethod, CancellerSpec, run_comparison
from .impairments import ImpairmentConfig, config_to_dict, load_config, simulate_received
from .presets import (
    OFDM_DRIVE_RMS,
    PRESET_NAMES,
    SAMPLE_RATE,
    TONE_AMPLITUDE,
    TONE_FREQ,
    load_preset,
)
from .signals import OfdmFrameSpec, gen_ofdm_frames, gen_tone, read_iq, write_iq
from .spectral import spectrum, write_spectrum_csv


def _parse_powers(text: str) -> list[float]:
    """Parse a power grid 'a:b:step' (inclusive) or a single value."""
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"powers must be 'a:b:step' or a single value, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError("powers step must be positive")
    grid = []
    value = start
    while value <= stop + 1e-9:
        grid.append(round(value, 9))
        value += step
    if not grid:
        raise ValueError(f"power grid {text!r} is empty")
    return grid


def _resolve_config(args) -> tuple[ImpairmentConfig, dict]:
    if getattr(args, "preset", None):
        cfg = load_preset(args.preset)
        source = {"preset": args.preset}
    elif getattr(args, "config", None):
        cfg = load_config(args.config)
        source = {"config_path": str(args.config)}
    else:
        raise ValueError("one of --preset or --config is required")
    return cfg, source


def _canceller_specs(args) -> list[CancellerSpec]:
    specs = []
    for name in args.methods.split(","):
        name = name.strip()
        if not name:
            continue
        method = CancellerMethod.parse(name)
        if method is CancellerMethod.NONLINEAR:
            specs.append(
                CancellerSpec(
                    method,
                    channel_len=args.channel_len,
                    n_max=args.n_max,
                    nonlinear_basis_variant=args.nonlinear_variant,
                )
            )
        elif method is CancellerMethod.JOINT_DAC_IQ:
            specs.append(CancellerSpec(method, channel_len=args.channel_len, m_max=args.m_max))
        else:
            specs.append(CancellerSpec(method, channel_len=args.channel_len))
    if not specs:
        raise ValueError("method list is empty")
    return specs


def _write_manifest(out_dir: Path, command: str, args_echo: dict, cfg: ImpairmentConfig | None):
    manifest = {"command": command, "args": args_echo}
    if cfg is not None:
        manifest["resolved_config"] = config_to_dict(cfg)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def cmd_tone_test(args) -> int:
    cfg, source = _resolve_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_fft = args.n_fft
    tone = gen_tone(args.freq, TONE_AMPLITUDE, n_fft * args.segments, SAMPLE_RATE)
    received, stages = simulate_received(tone, cfg, args.seed)
    spec = spectrum(received, n_fft=n_fft)
    write_spectrum_csv(spec, out_dir / "spectrum.csv")
    checks = verify_harmonics(spec, args.freq, m_max=args.m_max, margin_db=args.margin)
    write_harmonics_csv(checks, out_dir / "harmonics.csv")
    write_iq(received, out_dir / "capture.iq")
    _write_manifest(
        out_dir,
        "tone-test",
        {**source, "freq_hz": args.freq, "seed": args.seed, "n_fft": n_fft,
         "segments": args.segments, "m_max": args.m_max, "margin_db": args.margin,
         "clipped_samples": stages["clipped_samples"]},
        cfg,
    )
    print(f"tone-test: {len(checks)} orders checked, all_pass={all(c.passed for c in checks)}")
    return 0 if all(c.passed for c in checks) or not args.strict else 3


def cmd_sweep(args) -> int:
    cfg, source = _resolve_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    powers = _parse_powers(args.powers)
    specs = _canceller_specs(args)

    frames = OfdmFrameSpec(n_frames=args.frames, seed=args.seed)
    x = gen_ofdm_frames(frames, SAMPLE_RATE)
    x = x.with_samples(x.samples * OFDM_DRIVE_RMS)

    rows = []
    for power in powers:
        reports = run_comparison(
            x, cfg.with_tx_power(power), specs, seed=args.seed, n_frames=args.frames
        )
        for rep in reports:
            rows.append(rep)

    csv_path = out_dir / "suppression.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "tx_power_dbm",
                "method",
                "mean_residual_above_noise_db",
                "std_db",
                "apparent_floor_dbfs",
            ]
        )
        for rep in rows:
            writer.writerow(
                [
                    f"{rep.tx_power_dbm:.3f}",
                    rep.method,
                    f"{rep.residual_above_noise_db:.6f}",
                    f"{rep.residual_above_noise_std_db:.6f}",
                    f"{rep.apparent_noise_floor_dbfs:.6f}",
                ]
            )
    _write_manifest(
        out_dir,
        "sweep",
        {**source, "powers": powers, "methods": args.methods, "seed": args.seed,
         "frames": args.frames, "channel_len": args.channel_len, "n_max": args.n_max,
         "m_max": args.m_max, "nonlinear_variant": args.nonlinear_variant},
        cfg,
    )
    print(f"sweep: {len(powers)} powers x {len(specs)} methods -> {csv_path}")
    return 0


def cmd_budget(args) -> int:
    report = suppression_budget(
        BudgetInput(
            tx_power_dbm=args.tx_power,
            noise_floor_dbm=args.noise_floor,
            papr_headroom_db=args.papr,
            adc_dynamic_range_db=args.adc_dynamic_range,
        )
    )
    width = max(len(label) for label, _ in report.breakdown)
    for label, value in report.breakdown:
        print(f"{label:<{width}} : {value:8.2f}")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        with (out_dir / "budget.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["quantity", "value"])
            for label, value in report.breakdown:
                writer.writerow([label, f"{value:.6f}"])
        _write_manifest(
            out_dir,
            "budget",
            {
                "tx_power_dbm": args.tx_power,
                "noise_floor_dbm": args.noise_floor,
                "papr_headroom_db": args.papr,
                "adc_dynamic_range_db": args.adc_dynamic_range,
            },
            None,
        )
    return 0


def cmd_spectrum(args) -> int:
    sig = read_iq(args.input)
    spec = spectrum(sig, n_fft=args.n_fft, averaging=args.averaging)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_spectrum_csv(spec, out_dir / "spectrum.csv")
    _write_manifest(
        out_dir,
        "spectrum",
        {"input": str(args.input), "n_fft": args.n_fft, "averaging": args.averaging},
        None,
    )
    print(f"spectrum: {len(spec.power_db)} bins -> {out_dir / 'spectrum.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdsic",
        description="Full-duplex impairment simulation and digital self-interference cancellation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        p.add_argument("--preset", choices=PRESET_NAMES, help="shipped scenario name")
        p.add_argument("--config", type=Path, help="impairment configuration JSON")
        p.add_argument("--seed", type=int, default=0, help="manifest seed (default 0)")
        p.add_argument("--out", type=Path, required=True, help="output directory")

    p_tone = sub.add_parser("tone-test", help="one-tone impairment signature")
    add_config_args(p_tone)
    p_tone.add_argument("--freq", type=float, default=TONE_FREQ, help="tone frequency in Hz")
    p_tone.add_argument("--n-fft", type=int, default=4096)
    p_tone.add_argument("--segments", type=int, default=16, help="capture length in FFT frames")
    p_tone.add_argument("--m-max", type=int, default=3, help="highest harmonic order to verify")
    p_tone.add_argument("--margin", type=float, default=20.0, help="pass margin in dB")
    p_tone.add_argument("--strict", action="store_true", help="nonzero exit if any order fails")
    p_tone.set_defaults(func=cmd_tone_test)

    p_sweep = sub.add_parser("sweep", help="canceller comparison over transmit powers")
    add_config_args(p_sweep)
    p_sweep.add_argument("--powers", default="-10:22:4", help="grid a:b:step in dBm")
    p_sweep.add_argument(
        "--methods",
        default="linear,nonlinear,widely-linear,joint-dac-iq",
        help="comma-separated canceller list",
    )
    p_sweep.add_argument("--frames", type=int, default=100)
    p_sweep.add_argument("--channel-len", type=int, default=32)
    p_sweep.add_argument("--n-max", type=int, default=5)
    p_sweep.add_argument("--m-max", type=int, default=3)
    p_sweep.add_argument(
        "--nonlinear-variant", choices=("power", "envelope"), default="envelope"
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_budget = sub.add_parser("budget", help="front-end suppression budget")
    p_budget.add_argument("--tx-power", type=float, default=20.0)
    p_budget.add_argument("--noise-floor", type=float, default=-90.0)
    p_budget.add_argument("--papr", type=float, default=10.0)
    p_budget.add_argument("--adc-dynamic-range", type=float, default=70.0)
    p_budget.add_argument("--out", type=Path, help="optional output directory for budget.csv")
    p_budget.set_defaults(func=cmd_budget)

    p_spec = sub.add_parser("spectrum", help="spectrum of a recorded IQ file")
    p_spec.add_argument("--input", type=Path, required=True, help="IQ file (with .hdr sidecar)")
    p_spec.add_argument("--n-fft", type=int, default=4096)
    p_spec.add_argument("--averaging", type=int, default=None)
    p_spec.add_argument("--out", type=Path, required=True)
    p_spec.set_defaults(func=cmd_spectrum)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
