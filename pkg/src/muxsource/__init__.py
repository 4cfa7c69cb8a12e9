"""Exact and Monte-Carlo models of spatially multiplexed heralded single-photon sources."""

from .channel import LossBudget, apply_loss, network_efficiency
from .detectors import DetectorKind, DetectorModel, PovmTable, binary_povm, pnr_povm, pseudo_pnr_povm
from .errors import ConsistencyError, DomainError, NonMonotone, NotBracketed, StructuralError
from .fock import PhotonNumberDistribution, choose_cutoff, mean_photon_number, thermal_distribution
from .multiplex import MultiplexConfig, combine_two, multiplexed_metrics, waiting_time
from .source import (
    HeraldedEnsemble,
    SystemMetrics,
    fidelity_of,
    herald_ensemble,
    single_source_metrics,
    snr_of,
    success_outcome,
)

__all__ = [
    "ConsistencyError",
    "DetectorKind",
    "DetectorModel",
    "DomainError",
    "HeraldedEnsemble",
    "LossBudget",
    "MultiplexConfig",
    "NonMonotone",
    "NotBracketed",
    "PhotonNumberDistribution",
    "PovmTable",
    "StructuralError",
    "SystemMetrics",
    "apply_loss",
    "binary_povm",
    "choose_cutoff",
    "combine_two",
    "fidelity_of",
    "herald_ensemble",
    "mean_photon_number",
    "multiplexed_metrics",
    "network_efficiency",
    "pnr_povm",
    "pseudo_pnr_povm",
    "single_source_metrics",
    "snr_of",
    "success_outcome",
    "thermal_distribution",
    "waiting_time",
]

__version__ = "0.1.0"
