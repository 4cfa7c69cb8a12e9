"""Truncated photon-number distributions and thermal pair statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, StructuralError

__all__ = [
    "CUTOFF_CAP",
    "DEFAULT_TAIL_TOL",
    "Cutoff",
    "PhotonNumberDistribution",
    "binomial_kernel",
    "binomial_table",
    "choose_cutoff",
    "mean_photon_number",
    "thermal_distribution",
]

DEFAULT_TAIL_TOL = 1e-12
CUTOFF_CAP = 200


@lru_cache(maxsize=None)
def _pascal(size: int) -> np.ndarray:
    # exact integer rows, rounded once to float
    table = np.zeros((size + 1, size + 1))
    row = [1]
    for n in range(size + 1):
        table[n, : n + 1] = [float(c) for c in row]
        row = [1] + [a + b for a, b in zip(row, row[1:])] + [1]
    table.setflags(write=False)
    return table


def binomial_table(n_max: int) -> np.ndarray:
    """Return ``C[n, k]`` for ``0 <= k, n <= n_max`` as floats (zero for ``k > n``)."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    return _pascal(max(n_max, CUTOFF_CAP))[: n_max + 1, : n_max + 1]


def binomial_kernel(p: float, n_max: int) -> np.ndarray:
    """Thinning matrix ``K[k, n] = C(n, k) p^k (1 - p)^(n - k)``, zero above the diagonal."""
    n = np.arange(n_max + 1)
    k = n[:, None]
    diff = n[None, :] - k
    kernel = binomial_table(n_max).T * np.power(p, k) * np.power(1.0 - p, np.maximum(diff, 0))
    kernel[diff < 0] = 0.0
    return kernel


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """Diagonal of a single-mode state in the Fock basis, truncated at ``n_max``."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise StructuralError("probs must be a non-empty 1-D vector")
        if not np.all(np.isfinite(probs)):
            raise DomainError("probs must be finite")
        if probs.min() < -1e-12 or probs.max() > 1 + 1e-12:
            raise DomainError("every probability must lie in [0, 1]")
        if probs.sum() > 1 + 1e-12:
            raise DomainError(f"probabilities sum to {probs.sum():.16g} > 1")
        probs = np.clip(probs, 0.0, 1.0)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, n):
        return self.probs[n]

    def total(self) -> float:
        return float(self.probs.sum())

    def normalized(self) -> "PhotonNumberDistribution":
        total = self.total()
        if total <= 0:
            raise DomainError("cannot normalize an all-zero distribution")
        return PhotonNumberDistribution(self.probs / total)

    def padded(self, n_max: int) -> "PhotonNumberDistribution":
        """Zero-extend (never truncate) to a larger cutoff."""
        if n_max < self.n_max:
            raise StructuralError(f"cannot pad cutoff {self.n_max} down to {n_max}")
        out = np.zeros(n_max + 1)
        out[: self.probs.size] = self.probs
        return PhotonNumberDistribution(out)

    @classmethod
    def fock(cls, n: int, n_max: int | None = None) -> "PhotonNumberDistribution":
        """Point mass at photon number ``n``."""
        n_max = n if n_max is None else n_max
        if not 0 <= n <= n_max:
            raise DomainError(f"need 0 <= n <= n_max, got n={n}, n_max={n_max}")
        out = np.zeros(n_max + 1)
        out[n] = 1.0
        return cls(out)

    @classmethod
    def vacuum(cls, n_max: int = 0) -> "PhotonNumberDistribution":
        return cls.fock(0, n_max)


def _check_nbar(nbar: float) -> float:
    nbar = float(nbar)
    if not math.isfinite(nbar) or nbar < 0:
        raise DomainError(f"mean photon number must be finite and >= 0, got {nbar}")
    return nbar


def thermal_distribution(nbar: float, n_max: int) -> PhotonNumberDistribution:
    """Geometric pair-number law ``p(n) = nbar^n / (nbar + 1)^(n + 1)`` up to ``n_max``."""
    nbar = _check_nbar(nbar)
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    ratio = nbar / (nbar + 1.0)
    probs = np.power(ratio, np.arange(n_max + 1, dtype=float)) / (nbar + 1.0)
    return PhotonNumberDistribution(probs)


class Cutoff(int):
    """An ``int`` cutoff that also records whether the cap was hit."""

    saturated: bool

    def __new__(cls, value: int, saturated: bool = False):
        obj = super().__new__(cls, value)
        obj.saturated = saturated
        return obj

    def __repr__(self):
        return f"Cutoff({int(self)}, saturated={self.saturated})"


def choose_cutoff(nbar: float, tail_tol: float = DEFAULT_TAIL_TOL) -> Cutoff:
    """Smallest ``n_max`` whose thermal tail ``(nbar/(nbar+1))^(n_max+1)`` is <= ``tail_tol``.

    The result saturates at ``CUTOFF_CAP``; ``result.saturated`` tells you when.
    """
    nbar = _check_nbar(nbar)
    if not 0 < tail_tol < 1:
        raise DomainError(f"tail_tol must lie in (0, 1), got {tail_tol}")
    if nbar == 0:
        return Cutoff(0)
    ratio = nbar / (nbar + 1.0)
    # log estimate, then correct against the direct power to absorb rounding
    n = max(0, math.ceil(math.log(tail_tol) / math.log(ratio)) - 1)
    while n > 0 and ratio ** n <= tail_tol:
        n -= 1
    while ratio ** (n + 1) > tail_tol:
        n += 1
        if n >= CUTOFF_CAP:
            return Cutoff(CUTOFF_CAP, saturated=True)
    if n > CUTOFF_CAP:
        return Cutoff(CUTOFF_CAP, saturated=True)
    return Cutoff(n)


def mean_photon_number(dist: PhotonNumberDistribution) -> float:
    return float(np.dot(np.arange(dist.probs.size), dist.probs))
