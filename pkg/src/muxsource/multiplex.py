"""N identical sources behind a binary switch tree."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .channel import LossBudget, apply_loss, network_efficiency
from .detectors import DetectorModel, _check_efficiency
from .errors import DomainError, StructuralError
from .fock import DEFAULT_TAIL_TOL
from .source import (
    SystemMetrics,
    heralded_state,
    metrics_from_delivered,
    source_ensemble,
    success_outcome,
)

__all__ = [
    "MULTIPLEXED_REP_RATE",
    "SINGLE_REP_RATE",
    "CombinedHerald",
    "MultiplexConfig",
    "combine_two",
    "cascade_heralding",
    "multiplexed_metrics",
    "waiting_time",
]

MULTIPLEXED_REP_RATE = 1e6
SINGLE_REP_RATE = 80e6


@dataclass(frozen=True)
class MultiplexConfig:
    """One multiplexed system. ``rep_rate=None`` picks 80 MHz for a lone source, else 1 MHz."""

    detector: DetectorModel
    n_sources: int = 1
    eta_s: float = 0.8
    eta_tau: float = 0.99
    nbar: float = 0.0
    rep_rate: Optional[float] = None

    def __post_init__(self):
        if int(self.n_sources) != self.n_sources or self.n_sources < 1:
            raise DomainError(f"n_sources must be an integer >= 1, got {self.n_sources}")
        object.__setattr__(self, "n_sources", int(self.n_sources))
        object.__setattr__(self, "eta_s", _check_efficiency(self.eta_s, "eta_s"))
        object.__setattr__(self, "eta_tau", _check_efficiency(self.eta_tau, "eta_tau"))
        nbar = float(self.nbar)
        if not math.isfinite(nbar) or nbar < 0:
            raise DomainError(f"nbar must be finite and >= 0, got {self.nbar}")
        object.__setattr__(self, "nbar", nbar)
        if self.rep_rate is None:
            rate = SINGLE_REP_RATE if self.n_sources == 1 else MULTIPLEXED_REP_RATE
            object.__setattr__(self, "rep_rate", rate)
        elif not self.rep_rate > 0 or not math.isfinite(self.rep_rate):
            raise DomainError(f"rep_rate must be a positive finite frequency, got {self.rep_rate}")

    @property
    def network(self) -> LossBudget:
        return network_efficiency(self.n_sources, self.eta_s, self.eta_tau)

    def with_nbar(self, nbar: float) -> "MultiplexConfig":
        return replace(self, nbar=nbar)


class CombinedHerald(NamedTuple):
    p_success_any: float
    p_none: float
    joint: np.ndarray


def _check_vector(p, name):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise StructuralError(f"{name} must be a non-empty vector")
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-10:
        raise StructuralError(f"{name} must be a probability vector (sum={p.sum():.16g})")
    return p


def combine_two(p_h_a: Sequence[float], p_h_b: Sequence[float], success_index: int) -> CombinedHerald:
    """Joint outcome table of two independent sources and the chance that at least one succeeds.

    ``joint[i, j]`` is outcome ``i`` on the first source and ``j`` on the second.
    Success means row ``success_index`` or column ``success_index``.
    """
    a = _check_vector(p_h_a, "p_h_a")
    b = _check_vector(p_h_b, "p_h_b")
    if not (0 <= success_index < a.size and success_index < b.size):
        raise StructuralError(f"success_index {success_index} out of range")
    joint = np.kron(a, b).reshape(a.size, b.size)
    hit = np.zeros(joint.shape, dtype=bool)
    hit[success_index, :] = True
    hit[:, success_index] = True
    p_any = float(joint[hit].sum())
    return CombinedHerald(p_any, float(joint[~hit].sum()), joint)


def cascade_heralding(p_h: Sequence[float], n_sources: int, success_index: int) -> float:
    """Success probability of ``n_sources`` copies, merged pairwise through :func:`combine_two`.

    Each merged pair is reduced to a two-outcome vector ``[fail, success]`` before
    the next level. An unpaired block at any level is carried up unchanged.
    """
    if n_sources < 1:
        raise DomainError(f"n_sources must be >= 1, got {n_sources}")
    p = _check_vector(p_h, "p_h")
    blocks = [(p, success_index)] * n_sources
    while len(blocks) > 1:
        merged = []
        for i in range(0, len(blocks) - 1, 2):
            (va, ia), (vb, ib) = blocks[i], blocks[i + 1]
            # align both blocks on a common success index by reducing to [fail, success]
            va, vb = _reduce(va, ia), _reduce(vb, ib)
            c = combine_two(va, vb, 1)
            merged.append((np.array([c.p_none, c.p_success_any]), 1))
        if len(blocks) % 2:
            merged.append(blocks[-1])
        blocks = merged
    vec, idx = blocks[0]
    return float(vec[idx])


def _reduce(p: np.ndarray, idx: int) -> np.ndarray:
    return np.array([p.sum() - p[idx], p[idx]])


def multiplexed_metrics(config: MultiplexConfig, tail_tol: float = DEFAULT_TAIL_TOL) -> SystemMetrics:
    """Heralding, delivered-state fidelity, SNR and success probability of a multiplexed system.

    Any one heralding source is routed to the output; the others are ignored.
    ``snr`` is taken on the delivered (post-network) state and ``heralded_snr``
    on the selected heralded state before routing loss.
    """
    ensemble = source_ensemble(config.nbar, config.detector, tail_tol)
    m = success_outcome(config.detector)
    p_one = float(ensemble.outcome_probs[m]) if m < len(ensemble) else 0.0
    if config.n_sources == 1 or p_one >= 1.0:
        p_heralding = p_one
    else:
        p_heralding = -math.expm1(config.n_sources * math.log1p(-p_one))
    heralded = heralded_state(ensemble, m)
    delivered = apply_loss(heralded, config.network.total)
    return metrics_from_delivered(config.nbar, p_heralding, delivered, heralded)


def waiting_time(p_success: float, rep_rate: float, n_photons: int) -> float:
    """Mean time in seconds until ``n_photons`` independent systems succeed on the same pulse.

    Returns ``inf`` when ``p_success`` is zero.
    """
    if not 0.0 <= p_success <= 1.0:
        raise DomainError(f"p_success must lie in [0, 1], got {p_success}")
    if not rep_rate > 0:
        raise DomainError(f"rep_rate must be positive, got {rep_rate}")
    if int(n_photons) != n_photons or n_photons < 1:
        raise DomainError(f"n_photons must be an integer >= 1, got {n_photons}")
    if p_success == 0.0:
        return math.inf
    log_t = -math.log(rep_rate) - n_photons * math.log(p_success)
    return math.exp(log_t) if log_t < 709 else math.inf
