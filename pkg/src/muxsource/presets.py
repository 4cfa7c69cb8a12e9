"""The comparison systems of the waiting-time study, all held at a common SNR."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .detectors import DetectorModel
from .multiplex import MULTIPLEXED_REP_RATE, SINGLE_REP_RATE, MultiplexConfig, multiplexed_metrics, waiting_time
from .solver import CalibrationResult, calibrate_nbar

__all__ = ["WaitPreset", "WAIT_PRESETS", "preset_operating_point", "waiting_table"]

# Waiting-time presets are calibrated on the heralded-state SNR; see README.
PRESET_SNR_BASIS = "heralded"


@dataclass(frozen=True)
class WaitPreset:
    name: str
    system: Optional[MultiplexConfig]  # None: ideal deterministic reference
    rep_rate: float


WAIT_PRESETS: tuple[WaitPreset, ...] = (
    WaitPreset("single-binary", MultiplexConfig(DetectorModel.binary(0.7), 1, 0.8, 0.99), SINGLE_REP_RATE),
    WaitPreset("mux8-binary", MultiplexConfig(DetectorModel.binary(0.7), 8, 0.8, 0.99), MULTIPLEXED_REP_RATE),
    WaitPreset(
        "mux4-pseudo-pnr8", MultiplexConfig(DetectorModel.pseudo_pnr(0.7, 8), 4, 0.8, 0.99), MULTIPLEXED_REP_RATE
    ),
    WaitPreset("mux16-pnr", MultiplexConfig(DetectorModel.pnr(0.7), 16, 0.8, 0.99), MULTIPLEXED_REP_RATE),
    WaitPreset("mux16-pnr-hp", MultiplexConfig(DetectorModel.pnr(0.98), 16, 0.95, 0.99), MULTIPLEXED_REP_RATE),
    WaitPreset("deterministic", None, MULTIPLEXED_REP_RATE),
)


def preset_operating_point(
    preset: WaitPreset, target_snr: float = 100.0, basis: str = PRESET_SNR_BASIS
) -> tuple[Optional[CalibrationResult], float]:
    """Calibrated ``nbar`` (``None`` for the deterministic reference) and per-pulse success probability."""
    if preset.system is None:
        return None, 1.0
    cal = calibrate_nbar(target_snr, preset.system, basis=basis)
    return cal, multiplexed_metrics(preset.system.with_nbar(cal.nbar_star)).p_success


def waiting_table(
    presets=WAIT_PRESETS, photons=range(1, 11), target_snr: float = 100.0, basis: str = PRESET_SNR_BASIS
) -> list[dict]:
    rows = []
    for preset in presets:
        cal, p_success = preset_operating_point(preset, target_snr, basis)
        nbar = float("nan") if cal is None else cal.nbar_star
        for n_p in photons:
            rows.append(
                {
                    "system": preset.name,
                    "n_photons": n_p,
                    "nbar": nbar,
                    "p_success": p_success,
                    "rep_rate": preset.rep_rate,
                    "t_wait": waiting_time(p_success, preset.rep_rate, n_p),
                }
            )
    return rows
