"""Conditional-detection tables for binary, PNR and pseudo-PNR heralding detectors.

A table holds ``p_det(outcome | N)`` with outcomes along rows and the number
of incident photons ``N = 0..n_max`` along columns. Every column sums to one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConsistencyError, DomainError, StructuralError
from .fock import binomial_kernel

__all__ = [
    "DetectorKind",
    "DetectorModel",
    "PovmTable",
    "binary_povm",
    "pnr_povm",
    "pseudo_pnr_closed_form",
    "pseudo_pnr_povm",
]


class DetectorKind(str, enum.Enum):
    BINARY = "binary"
    PNR = "pnr"
    PSEUDO_PNR = "pseudo-pnr"


def _check_efficiency(eta: float, name: str = "efficiency") -> float:
    eta = float(eta)
    if not (0.0 <= eta <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {eta}")
    return eta


def _check_n_max(n_max: int) -> int:
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"n_max must be a non-negative integer, got {n_max}")
    return int(n_max)


@dataclass(frozen=True)
class DetectorModel:
    """Heralding detector: kind, lumped efficiency, and bin count for pseudo-PNR."""

    kind: DetectorKind
    efficiency: float
    modes: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", DetectorKind(self.kind))
        object.__setattr__(self, "efficiency", _check_efficiency(self.efficiency))
        if self.kind is DetectorKind.PSEUDO_PNR:
            if self.modes is None or int(self.modes) != self.modes or self.modes < 1:
                raise DomainError(f"pseudo-PNR detector needs modes >= 1, got {self.modes}")
            object.__setattr__(self, "modes", int(self.modes))
        elif self.modes is not None:
            raise DomainError(f"modes only applies to pseudo-PNR detectors, not {self.kind.value}")

    @classmethod
    def binary(cls, efficiency: float) -> "DetectorModel":
        return cls(DetectorKind.BINARY, efficiency)

    @classmethod
    def pnr(cls, efficiency: float) -> "DetectorModel":
        return cls(DetectorKind.PNR, efficiency)

    @classmethod
    def pseudo_pnr(cls, efficiency: float, modes: int) -> "DetectorModel":
        return cls(DetectorKind.PSEUDO_PNR, efficiency, modes)

    @classmethod
    def parse(cls, text: str, efficiency: float) -> "DetectorModel":
        """Build from a descriptor such as ``binary``, ``pnr`` or ``pseudo-pnr:8``."""
        name, _, arg = text.strip().lower().partition(":")
        name = name.replace("_", "-")
        if name in ("pseudo-pnr", "pseudopnr", "ppnr"):
            if not arg:
                raise DomainError("pseudo-PNR descriptor needs a bin count, e.g. pseudo-pnr:8")
            try:
                modes = int(arg)
            except ValueError:
                raise DomainError(f"bad pseudo-PNR bin count {arg!r}") from None
            return cls.pseudo_pnr(efficiency, modes)
        if arg:
            raise DomainError(f"detector {name!r} takes no argument")
        if name == "binary":
            return cls.binary(efficiency)
        if name == "pnr":
            return cls.pnr(efficiency)
        raise DomainError(f"unknown detector {text!r}")

    @property
    def label(self) -> str:
        if self.kind is DetectorKind.PSEUDO_PNR:
            return f"pseudo-pnr:{self.modes}"
        return self.kind.value

    def povm(self, n_max: int) -> "PovmTable":
        if self.kind is DetectorKind.BINARY:
            return binary_povm(self.efficiency, n_max)
        if self.kind is DetectorKind.PNR:
            return pnr_povm(self.efficiency, n_max)
        return pseudo_pnr_povm(self.efficiency, self.modes, n_max)


@dataclass(frozen=True)
class PovmTable:
    entries: np.ndarray
    kind: DetectorKind

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2:
            raise StructuralError("POVM entries must be a matrix")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n_max(self) -> int:
        return self.entries.shape[1] - 1

    @property
    def n_outcomes(self) -> int:
        return self.entries.shape[0]

    @property
    def outcome_labels(self) -> list[str]:
        if self.kind is DetectorKind.BINARY:
            return ["no-click", "click"]
        if self.kind is DetectorKind.PNR:
            return [f"{k} photons" for k in range(self.n_outcomes)]
        return [f"{k} bins" for k in range(self.n_outcomes)]

    def __getitem__(self, idx):
        return self.entries[idx]


def binary_povm(eta_d: float, n_max: int) -> PovmTable:
    eta_d = _check_efficiency(eta_d, "eta_d")
    n_max = _check_n_max(n_max)
    no_click = np.power(1.0 - eta_d, np.arange(n_max + 1, dtype=float))
    return PovmTable(np.vstack([no_click, 1.0 - no_click]), DetectorKind.BINARY)


def pnr_povm(eta_d: float, n_max: int) -> PovmTable:
    eta_d = _check_efficiency(eta_d, "eta_d")
    n_max = _check_n_max(n_max)
    return PovmTable(binomial_kernel(eta_d, n_max), DetectorKind.PNR)


def pseudo_pnr_povm(eta_d: float, modes: int, n_max: int) -> PovmTable:
    """Occupied-bin statistics of ``modes`` equally weighted binary detectors.

    Photons are added one at a time: each is lost with probability ``1 - eta_d``,
    otherwise it lands in one of the ``modes`` bins uniformly, turning a new bin
    on when that bin was still dark. The resulting column for ``N`` photons is
    the inclusion-exclusion sum over bins, but built from non-negative terms
    only, so it stays accurate for large ``modes`` and ``N``.
    """
    eta_d = _check_efficiency(eta_d, "eta_d")
    n_max = _check_n_max(n_max)
    if int(modes) != modes or modes < 1:
        raise DomainError(f"modes must be an integer >= 1, got {modes}")
    modes = int(modes)
    top = min(modes, n_max)
    k = np.arange(top + 1, dtype=float)
    stay = (1.0 - eta_d) + eta_d * k / modes
    step = eta_d * (modes - k) / modes

    entries = np.zeros((top + 1, n_max + 1))
    state = np.zeros(top + 1)
    state[0] = 1.0
    entries[:, 0] = state
    for n in range(1, n_max + 1):
        nxt = state * stay
        nxt[1:] += state[:-1] * step[:-1]
        state = nxt
        entries[:, n] = state
    return PovmTable(entries, DetectorKind.PSEUDO_PNR)


def pseudo_pnr_closed_form(eta_d: float, modes: int, n_max: int, residual_tol: float = 1e-9) -> np.ndarray:
    """Direct alternating-sum evaluation of the pseudo-PNR click law.

    Only well conditioned for small ``modes`` and ``n_max``; raises
    :class:`ConsistencyError` if an entry comes out negative beyond ``residual_tol``.
    """
    eta_d = _check_efficiency(eta_d, "eta_d")
    n_max = _check_n_max(n_max)
    top = min(modes, n_max)
    out = np.zeros((top + 1, n_max + 1))
    N = np.arange(n_max + 1, dtype=float)
    for n in range(top + 1):
        acc = np.zeros(n_max + 1)
        for j in range(n + 1):
            base = (1.0 - eta_d) + eta_d * (n - j) / modes
            acc += (-1) ** j * math.comb(n, j) * np.power(base, N)
        out[n] = math.comb(modes, n) * acc
    if out.min() < -residual_tol:
        raise ConsistencyError(f"alternating sum went negative ({out.min():.3g})")
    return np.clip(out, 0.0, 1.0)
