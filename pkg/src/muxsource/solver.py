"""Find the mean photon number that gives a target SNR."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NonMonotone, NotBracketed
from .multiplex import MultiplexConfig, multiplexed_metrics

__all__ = ["DEFAULT_BRACKET", "SNR_BASES", "CalibrationResult", "calibrate_nbar"]

DEFAULT_BRACKET = (1e-6, 2.0)
SNR_BASES = ("delivered", "heralded")


@dataclass(frozen=True)
class CalibrationResult:
    nbar_star: float
    achieved_snr: float
    iterations: int
    bracket: tuple[float, float]
    target_snr: float
    basis: str = "delivered"

    def as_dict(self) -> dict:
        return {
            "target_snr": self.target_snr,
            "basis": self.basis,
            "nbar_star": self.nbar_star,
            "achieved_snr": self.achieved_snr,
            "iterations": self.iterations,
            "bracket_lo": self.bracket[0],
            "bracket_hi": self.bracket[1],
        }


def calibrate_nbar(
    target_snr: float,
    system: MultiplexConfig,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    snr_tol: float = 0.1,
    width_tol: float = 1e-12,
    max_iter: int = 200,
    basis: str = "delivered",
) -> CalibrationResult:
    """Bisect on ``nbar`` until the delivered SNR is within ``snr_tol`` of ``target_snr``.

    ``system.nbar`` is ignored. SNR must fall with ``nbar`` across the bracket.
    ``basis`` selects the state the SNR is read from: ``"delivered"`` (after the
    switch network) or ``"heralded"`` (before it).

    Raises:
        NotBracketed: the SNR at the bracket ends does not straddle the target.
        NonMonotone: an interior SNR lies outside the values at the current ends.
    """
    if basis not in SNR_BASES:
        raise DomainError(f"basis must be one of {SNR_BASES}, got {basis!r}")
    if not (target_snr > 0 and math.isfinite(target_snr)):
        raise DomainError(f"target SNR must be positive and finite, got {target_snr}")
    lo, hi = map(float, bracket)
    if not 0 <= lo < hi:
        raise DomainError(f"bad bracket {bracket}")

    def snr(nbar: float) -> float:
        return multiplexed_metrics(system.with_nbar(nbar)).snr_on(basis)

    snr_lo, snr_hi = snr(lo), snr(hi)
    if not math.isfinite(snr_lo) or snr_lo < target_snr or snr_hi > target_snr:
        raise NotBracketed(
            f"SNR {snr_lo:g} at nbar={lo:g} and {snr_hi:g} at nbar={hi:g} do not straddle {target_snr:g}"
        )

    a, b = lo, hi
    snr_a, snr_b = snr_lo, snr_hi
    mid, snr_mid = a, snr_a
    for it in range(1, max_iter + 1):
        mid = 0.5 * (a + b)
        snr_mid = snr(mid)
        if not (snr_b <= snr_mid <= snr_a):
            raise NonMonotone(f"SNR {snr_mid:g} at nbar={mid:g} outside [{snr_b:g}, {snr_a:g}]")
        if abs(snr_mid - target_snr) <= snr_tol or (b - a) <= width_tol:
            break
        if snr_mid > target_snr:
            a, snr_a = mid, snr_mid
        else:
            b, snr_b = mid, snr_mid
    return CalibrationResult(mid, snr_mid, it, (lo, hi), float(target_snr), basis)
