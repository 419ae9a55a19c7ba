"""Shipped impairment presets.

The hardware the measurements behind these scenarios came from was never
characterized down to coefficient values, so every number here is a
calibration knob: the set was tuned (see scripts/calibrate.py) so the
shipped scenarios reproduce the qualitative one-tone signatures and the
relative canceller performance the simulator is meant to demonstrate.
They are presets, not ground truth.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .impairments import (
    ChannelAndReceiver,
    DacNonlinearity,
    ImpairmentConfig,
    IqImbalance,
    PaNonlinearity,
    PhaseNoiseSpec,
    config_from_dict,
    config_to_dict,
)

# Digital drive conventions shared by the harness and the calibration:
# multi-tone frames are scaled to this RMS at the DAC input, one-tone
# tests use this fixed tone amplitude.
OFDM_DRIVE_RMS = 0.2
TONE_AMPLITUDE = 0.5

# Default simulation rate: 8x oversampling of the 10 MHz band keeps 3rd
# and 5th order products of in-band content alias-free.
SAMPLE_RATE = 80e6
OFDM_BANDWIDTH = 10e6

# Default one-tone test frequency (bandwidth / 8), coherent on a 4096-bin
# grid at the default sample rate.
TONE_FREQ = OFDM_BANDWIDTH / 8

# Matched-rail DAC polynomial [a1, a2, a3].
DAC_COEFFS = [1.0, 0.038, 0.38]

# Mixer IQ imbalance taps. The leading transmit-side delta tap is kept on
# the imaginary axis so the two mechanisms that land on +3f in a one-tone
# test (the transmit image of the 3rd-order rail product, and amplifier
# mixing of the tone with its own image) add constructively.
TX_IQ_GAMMA = [1.0 + 0.0j, 0.012 - 0.006j]
TX_IQ_DELTA = [0.0 + 0.0165j, -0.0009 + 0.0025j]
RX_IQ_GAMMA = [1.0 + 0.0j]
RX_IQ_DELTA = [0.0021 - 0.0019j]

# Oscillator linewidth calibrated so a one-tone test with independent
# oscillators shows a -46 dBc skirt peak under the default spectral
# analysis settings; the shared-oscillator path reuse leaves only the
# one-sample-delay residual.
PHASE_NOISE_LINEWIDTH_HZ = 18.8
PHASE_NOISE_DELAY_SAMPLES = 1

# Amplifier odd-order Taylor coefficients (beta_1, beta_3, beta_5). The
# 5th-order term carries the distortion so it switches on steeply
# (4 dB per dB of drive) near the top of the power range; the 3rd-order
# term is kept small because in complex baseband it rides the same
# x|x|^2 direction as the converter rail distortion and a strong
# compressive cubic would partially cancel it at high drive.
PA_COEFFS = [1.0, -1.0e-3, -0.6e-3]

THERMAL_NOISE_DBFS = -90.0
ADC_BITS = 14
ADC_FULL_SCALE = 1.0

PRESET_NAMES = (
    "fig5_m10dbm",
    "fig7_20dbm",
    "fig4_m10dbm_indosc",
    "sweep_40db",
    "sweep_55db",
)


# Self-interference channel: a dominant direct path with a weak, mildly
# dispersive tail (antennas sit next to each other). Keeping the tail
# small and nearly real keeps the channel magnitude response close to
# symmetric, so mirror-frequency line pairs are not skewed by the channel.
H_SI_TAPS = [1.0 + 0.0j, 0.12 + 0.015j, 0.025 - 0.008j, 0.006 + 0.002j]


def _h_si() -> np.ndarray:
    """Unit-norm preset SI channel."""
    taps = np.asarray(H_SI_TAPS, dtype=np.complex128)
    return taps / np.linalg.norm(taps)


def _base_config(
    tx_power_dbm: float, suppression_db: float, shared_oscillator: bool = True
) -> ImpairmentConfig:
    return ImpairmentConfig(
        dac=DacNonlinearity(DAC_COEFFS, DAC_COEFFS),
        tx_iq=IqImbalance(TX_IQ_GAMMA, TX_IQ_DELTA),
        rx_iq=IqImbalance(RX_IQ_GAMMA, RX_IQ_DELTA),
        pn=PhaseNoiseSpec(
            linewidth=PHASE_NOISE_LINEWIDTH_HZ,
            shared_oscillator=shared_oscillator,
            delay_samples=PHASE_NOISE_DELAY_SAMPLES,
        ),
        pa=PaNonlinearity(PA_COEFFS),
        chan=ChannelAndReceiver(
            h_si=_h_si(),
            analog_suppression_db=suppression_db,
            thermal_noise_dbfs=THERMAL_NOISE_DBFS,
            adc_bits=ADC_BITS,
            adc_full_scale=ADC_FULL_SCALE,
        ),
        tx_power_dbm=tx_power_dbm,
    )


def build_preset(name: str) -> ImpairmentConfig:
    """Construct a named preset configuration programmatically."""
    if name == "fig5_m10dbm":
        return _base_config(tx_power_dbm=-10.0, suppression_db=40.0)
    if name == "fig7_20dbm":
        return _base_config(tx_power_dbm=20.0, suppression_db=40.0)
    if name == "fig4_m10dbm_indosc":
        return _base_config(
            tx_power_dbm=-10.0, suppression_db=40.0, shared_oscillator=False
        )
    if name == "sweep_40db":
        return _base_config(tx_power_dbm=-10.0, suppression_db=40.0)
    if name == "sweep_55db":
        return _base_config(tx_power_dbm=-10.0, suppression_db=55.0)
    raise ValueError(f"unknown preset {name!r}; valid: {', '.join(PRESET_NAMES)}")


def load_preset(name: str) -> ImpairmentConfig:
    """Load a shipped preset configuration file by name."""
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; valid: {', '.join(PRESET_NAMES)}")
    data = resources.files("fdsic").joinpath(f"presets/{name}.json").read_text()
    return config_from_dict(json.loads(data))


def write_preset_files(directory) -> list[Path]:
    """Regenerate the shipped preset JSON files (maintenance helper)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in PRESET_NAMES:
        path = directory / f"{name}.json"
        path.write_text(
            json.dumps(config_to_dict(build_preset(name)), indent=2, sort_keys=True)
            + "\n"
        )
        written.append(path)
    return written
