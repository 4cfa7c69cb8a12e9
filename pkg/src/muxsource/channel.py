"""Photon loss: binomial thinning and the switch-tree transmission budget."""

from __future__ import annotations

from dataclasses import dataclass

from .detectors import _check_efficiency
from .errors import DomainError
from .fock import PhotonNumberDistribution, binomial_kernel

__all__ = ["LossBudget", "apply_loss", "network_efficiency", "switch_stages"]


@dataclass(frozen=True)
class LossBudget:
    delay_efficiency: float
    switch_efficiency: float
    switch_stages: int

    @property
    def total(self) -> float:
        return self.delay_efficiency * self.switch_efficiency ** self.switch_stages


def apply_loss(dist: PhotonNumberDistribution, eta: float) -> PhotonNumberDistribution:
    """Send ``dist`` through a beam splitter of transmission ``eta`` and trace out the reflected port."""
    eta = _check_efficiency(eta, "eta")
    if eta == 1.0:
        return dist
    out = binomial_kernel(eta, dist.n_max) @ dist.probs
    return PhotonNumberDistribution(out)


def switch_stages(n_sources: int) -> int:
    """Depth of a balanced tree of 2-to-1 switches feeding ``n_sources`` inputs to one output."""
    if int(n_sources) != n_sources or n_sources < 1:
        raise DomainError(f"n_sources must be an integer >= 1, got {n_sources}")
    return (int(n_sources) - 1).bit_length()


def network_efficiency(n_sources: int, eta_s: float, eta_tau: float) -> LossBudget:
    """Transmission from any source to the common output.

    A lone source is unswitched and undelayed, so it is charged no loss at all.
    Otherwise the delay line is charged once and each switch stage once.
    """
    stages = switch_stages(n_sources)
    eta_s = _check_efficiency(eta_s, "eta_s")
    eta_tau = _check_efficiency(eta_tau, "eta_tau")
    if stages == 0:
        return LossBudget(1.0, eta_s, 0)
    return LossBudget(eta_tau, eta_s, stages)
