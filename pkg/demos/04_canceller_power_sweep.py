#!/usr/bin/env python3
"""Digital cancellation shoot-out across transmit powers.

Four least-squares cancellers fit the known transmit frames against the
received self-interference and subtract their reconstruction:

* linear         - one FIR channel on x
* nonlinear      - odd envelope terms x|x|^(n-1), amplifier-style
* widely-linear  - x and conj(x), mixer-image-aware
* joint-dac-iq   - per-rail powers Re{x}^m, Im{x}^m, which absorb
                   converter distortion and IQ imbalance in one model

Residual power is reported as distance from the thermal noise floor on
held-out frames (smaller is better). A short grid keeps this demo quick;
the CLI `fdsic sweep` runs the full one.
"""

from fdsic import CancellerMethod, CancellerSpec, gen_ofdm_frames, run_comparison
from fdsic.presets import OFDM_DRIVE_RMS, SAMPLE_RATE, build_preset
from fdsic.signals import OfdmFrameSpec

print(__doc__)

specs = [
    CancellerSpec(CancellerMethod.LINEAR),
    CancellerSpec(CancellerMethod.NONLINEAR, n_max=5, nonlinear_basis_variant="envelope"),
    CancellerSpec(CancellerMethod.WIDELY_LINEAR),
    CancellerSpec(CancellerMethod.JOINT_DAC_IQ, m_max=3),
]

frames = OfdmFrameSpec(n_frames=40, seed=0)
x = gen_ofdm_frames(frames, SAMPLE_RATE)
x = x.with_samples(x.samples * OFDM_DRIVE_RMS)

for preset in ("sweep_40db", "sweep_55db"):
    cfg = build_preset(preset)
    print(f"--- {preset} (residual above thermal floor, dB) ---")
    header = " ".join(f"{s.label():>28s}" for s in specs)
    print(f"{'P(dBm)':>7s} {header}")
    for power in (-10, 2, 14, 22):
        reports = run_comparison(
            x, cfg.with_tx_power(power), specs, seed=0, n_frames=frames.n_frames
        )
        cells = " ".join(
            f"{rep.residual_above_noise_db:22.2f}+-{rep.residual_above_noise_std_db:4.2f}"
            for rep in reports
        )
        print(f"{power:7.0f} {cells}")
    print()

print(
    "The joint per-rail model tracks the floor until the amplifier "
    "enters compression at the top of the power range, where every "
    "purely-baseband model runs out of physics."
)
