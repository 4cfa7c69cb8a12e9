"""A single heralded pair source: heralding ensemble and single-source metrics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .detectors import DetectorKind, DetectorModel, PovmTable
from .errors import StructuralError
from .fock import CUTOFF_CAP, DEFAULT_TAIL_TOL, PhotonNumberDistribution, choose_cutoff, thermal_distribution

__all__ = [
    "DegenerateStateWarning",
    "HeraldedEnsemble",
    "SystemMetrics",
    "fidelity_of",
    "herald_ensemble",
    "single_source_metrics",
    "snr_of",
    "success_outcome",
]

# below this a heralding probability is treated as exactly zero
_UNDEFINED_BELOW = 1e-300


class DegenerateStateWarning(UserWarning):
    """SNR was requested for a state with no single-photon or multi-photon weight."""


@dataclass(frozen=True)
class HeraldedEnsemble:
    """Heralding probability per detector outcome and the idler state each outcome leaves.

    ``conditionals[m]`` is ``None`` when outcome ``m`` cannot occur.
    """

    outcome_probs: np.ndarray
    conditionals: tuple[Optional[PhotonNumberDistribution], ...]

    def __len__(self) -> int:
        return self.outcome_probs.size

    def joint(self) -> np.ndarray:
        """``joint[m, n]``: probability of outcome ``m`` together with ``n`` idler photons."""
        n_max = max(c.n_max for c in self.conditionals if c is not None)
        out = np.zeros((len(self), n_max + 1))
        for m, cond in enumerate(self.conditionals):
            if cond is not None:
                out[m, : cond.probs.size] = self.outcome_probs[m] * cond.probs
        return out


@dataclass(frozen=True)
class SystemMetrics:
    nbar: float
    p_heralding: float
    fidelity: float
    snr: float
    p_success: float
    heralded_snr: float = math.nan

    def snr_on(self, basis: str) -> float:
        """SNR of the ``"delivered"`` (after routing loss) or ``"heralded"`` (before it) state."""
        if basis == "delivered":
            return self.snr
        if basis == "heralded":
            return self.heralded_snr
        raise ValueError(f"unknown SNR basis {basis!r}")

    def as_dict(self) -> dict:
        return {
            "nbar": self.nbar,
            "p_heralding": self.p_heralding,
            "fidelity": self.fidelity,
            "snr": self.snr,
            "p_success": self.p_success,
        }


def herald_ensemble(pair_dist: PhotonNumberDistribution, povm: PovmTable) -> HeraldedEnsemble:
    """Condition the idler arm on each outcome of the signal-arm detector.

    Signal and idler carry the same photon number, so the detector column for
    ``N`` signal photons weights the ``N``-photon idler term directly.
    """
    if povm.n_max < pair_dist.n_max:
        raise StructuralError(
            f"POVM covers N <= {povm.n_max} but the pair distribution runs to {pair_dist.n_max}"
        )
    table = povm.entries[:, : pair_dist.probs.size]
    joint = table * pair_dist.probs[None, :]
    p_h = joint.sum(axis=1)
    conditionals = tuple(
        PhotonNumberDistribution(row / p) if p > _UNDEFINED_BELOW else None
        for row, p in zip(joint, p_h)
    )
    return HeraldedEnsemble(p_h, conditionals)


def success_outcome(detector: DetectorModel) -> int:
    """Outcome index that counts as a successful herald.

    Exactly one photon (PNR), exactly one lit bin (pseudo-PNR), or a click (binary);
    all three sit at index 1.
    """
    DetectorKind(detector.kind)
    return 1


def snr_of(delivered: PhotonNumberDistribution) -> float:
    """Single-photon weight over total multi-photon weight; ``inf`` with no multi-photon weight."""
    noise = float(delivered.probs[2:].sum())
    single = float(delivered.probs[1]) if delivered.probs.size > 1 else 0.0
    if noise <= _UNDEFINED_BELOW:
        if single == 0.0:
            warnings.warn("state carries neither one- nor multi-photon weight", DegenerateStateWarning, stacklevel=2)
        return math.inf
    return single / noise


def fidelity_of(delivered: PhotonNumberDistribution) -> float:
    """Overlap with the one-photon Fock state; ``delivered`` must be normalized."""
    return float(delivered.probs[1]) if delivered.probs.size > 1 else 0.0


def _quiet_snr(dist: PhotonNumberDistribution) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateStateWarning)
        return snr_of(dist)


def metrics_from_delivered(
    nbar: float,
    p_heralding: float,
    delivered: PhotonNumberDistribution,
    heralded: Optional[PhotonNumberDistribution] = None,
) -> SystemMetrics:
    fidelity = fidelity_of(delivered)
    return SystemMetrics(
        nbar=nbar,
        p_heralding=p_heralding,
        fidelity=fidelity,
        snr=_quiet_snr(delivered),
        p_success=p_heralding * fidelity,
        heralded_snr=_quiet_snr(delivered if heralded is None else heralded),
    )


def metric_cutoff(nbar: float, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Cutoff for metric evaluation.

    Two terms beyond :func:`choose_cutoff` make the dropped tail small relative
    to the two-pair weight, not just in absolute terms; otherwise the SNR at
    very low ``nbar`` would see no multi-photon weight at all.
    """
    return min(choose_cutoff(nbar, tail_tol) + 2, CUTOFF_CAP)


def source_ensemble(nbar: float, detector: DetectorModel, tail_tol: float = DEFAULT_TAIL_TOL) -> HeraldedEnsemble:
    n_max = metric_cutoff(nbar, tail_tol)
    return herald_ensemble(thermal_distribution(nbar, n_max), detector.povm(n_max))


def heralded_state(ensemble: HeraldedEnsemble, outcome: int) -> PhotonNumberDistribution:
    """Idler state for ``outcome``; vacuum when the outcome never happens (the switch stays closed)."""
    cond = ensemble.conditionals[outcome] if outcome < len(ensemble) else None
    if cond is None:
        return PhotonNumberDistribution.vacuum(1)
    return cond


def single_source_metrics(nbar: float, detector: DetectorModel, tail_tol: float = DEFAULT_TAIL_TOL) -> SystemMetrics:
    ensemble = source_ensemble(nbar, detector, tail_tol)
    m = success_outcome(detector)
    p_h = float(ensemble.outcome_probs[m]) if m < len(ensemble) else 0.0
    return metrics_from_delivered(float(nbar), p_h, heralded_state(ensemble, m))
