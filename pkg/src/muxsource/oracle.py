"""Seeded Monte-Carlo simulation of pair generation, heralding, switching and loss.

This path shares no code with the analytic model beyond the configuration
objects: it draws photons and detector clicks one pulse at a time and only
counts what comes out.

Trials are split into fixed-size blocks. Block ``b`` draws from its own
generator seeded by ``(seed, b)``, so the result does not depend on how
blocks are spread over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .detectors import DetectorKind
from .errors import DomainError
from .fock import choose_cutoff
from .multiplex import MultiplexConfig
from .source import SystemMetrics

__all__ = [
    "BLOCK_SIZE",
    "MetricCheck",
    "SimulationResult",
    "TrialOutcome",
    "compare_metrics",
    "iter_trials",
    "simulate_system",
]

BLOCK_SIZE = 1 << 16
CLAMP_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class TrialOutcome:
    heralded: bool
    selected_source: Optional[int]
    delivered_photons: int
    detector_outcomes: tuple[int, ...]


@dataclass
class _Block:
    heralded: np.ndarray
    selected: np.ndarray
    delivered: np.ndarray
    outcomes: np.ndarray
    clamped: int


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _occupied_bins(rng: np.random.Generator, survivors: np.ndarray, modes: int) -> np.ndarray:
    """Drop every surviving photon into a uniformly chosen bin and count the lit bins."""
    flat = survivors.ravel()
    out = np.zeros_like(flat)
    hit = np.flatnonzero(flat)
    if hit.size == 0:
        return out.reshape(survivors.shape)
    counts = flat[hit]
    width = int(counts.max())
    bins = rng.integers(0, modes, size=(hit.size, width))
    bins[np.arange(width)[None, :] >= counts[:, None]] = -1
    bins.sort(axis=1)
    fresh = (bins[:, 1:] != bins[:, :-1]) & (bins[:, 1:] >= 0)
    out[hit] = (bins[:, 0] >= 0) + fresh.sum(axis=1)
    return out.reshape(survivors.shape)


def _simulate_block(config: MultiplexConfig, n: int, seed: int, block: int) -> _Block:
    rng = _block_rng(seed, block)
    det = config.detector
    shape = (n, config.n_sources)

    # pair number by inverse CDF of the geometric law: P(N >= k) = q^k
    u = rng.random(shape)
    q = config.nbar / (config.nbar + 1.0)
    if q == 0.0:
        pairs = np.zeros(shape, dtype=np.int64)
    else:
        pairs = np.floor(np.log1p(-u) / math.log(q)).astype(np.int64)
    cap = choose_cutoff(config.nbar, CLAMP_TAIL_TOL)
    over = pairs > cap
    clamped = int(over.sum())
    pairs[over] = cap

    survivors = rng.binomial(pairs, det.efficiency)
    if det.kind is DetectorKind.BINARY:
        outcomes = (survivors > 0).astype(np.int64)
    elif det.kind is DetectorKind.PNR:
        outcomes = survivors
    else:
        outcomes = _occupied_bins(rng, survivors, det.modes)

    success = outcomes == 1
    heralded = success.any(axis=1)
    selected = np.where(heralded, success.argmax(axis=1), -1)
    idler = np.where(heralded, pairs[np.arange(n), np.maximum(selected, 0)], 0)
    delivered = rng.binomial(idler, config.network.total)
    return _Block(heralded, selected, delivered, outcomes, clamped)


def _blocks(trials: int) -> list[tuple[int, int]]:
    full, rest = divmod(trials, BLOCK_SIZE)
    sizes = [BLOCK_SIZE] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def _check(trials: int):
    if int(trials) != trials or trials < 1:
        raise DomainError(f"trials must be an integer >= 1, got {trials}")


def iter_trials(config: MultiplexConfig, trials: int, seed: int) -> Iterator[TrialOutcome]:
    """Per-trial outcomes, in order. Meant for inspection of small runs."""
    _check(trials)
    for block, size in _blocks(trials):
        b = _simulate_block(config, size, seed, block)
        for i in range(size):
            h = bool(b.heralded[i])
            yield TrialOutcome(
                heralded=h,
                selected_source=int(b.selected[i]) if h else None,
                delivered_photons=int(b.delivered[i]),
                detector_outcomes=tuple(int(x) for x in b.outcomes[i]),
            )


def _binomial_se(p: float, n: int) -> float:
    if n == 0 or not math.isfinite(p):
        return math.nan
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


@dataclass(frozen=True)
class SimulationResult:
    trials: int
    heralds: int
    singles: int  # heralded trials delivering exactly one photon
    multis: int  # heralded trials delivering two or more
    clamped: int
    seed: int

    @property
    def p_heralding(self) -> float:
        return self.heralds / self.trials

    @property
    def fidelity(self) -> float:
        return self.singles / self.heralds if self.heralds else 0.0

    @property
    def p_success(self) -> float:
        return self.singles / self.trials

    @property
    def snr(self) -> float:
        return self.singles / self.multis if self.multis else math.inf

    def metrics(self, nbar: float) -> SystemMetrics:
        return SystemMetrics(nbar, self.p_heralding, self.fidelity, self.snr, self.p_success)

    def stderr(self) -> dict[str, float]:
        return {
            "p_heralding": _binomial_se(self.p_heralding, self.trials),
            "fidelity": _binomial_se(self.fidelity, self.heralds),
            "p_success": _binomial_se(self.p_success, self.trials),
        }


def simulate_system(config: MultiplexConfig, trials: int, seed: int, workers: int = 1) -> SimulationResult:
    _check(trials)
    blocks = _blocks(trials)

    def run(item):
        block, size = item
        b = _simulate_block(config, size, seed, block)
        h = b.heralded
        return (
            int(h.sum()),
            int(np.count_nonzero(h & (b.delivered == 1))),
            int(np.count_nonzero(h & (b.delivered >= 2))),
            b.clamped,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(item) for item in blocks]
    heralds, singles, multis, clamped = (sum(col) for col in zip(*parts))
    return SimulationResult(trials, heralds, singles, multis, clamped, seed)


@dataclass(frozen=True)
class MetricCheck:
    metric: str
    analytic: float
    empirical: float
    stderr: float
    passed: bool


def compare_metrics(analytic: SystemMetrics, sim: SimulationResult, sigmas: float = 3.0) -> list[MetricCheck]:
    """Check each sampled metric against its analytic value.

    The standard error is the binomial one under the analytic value, so an
    exact zero or one must be matched exactly.
    """
    rows = []
    counts = {"p_heralding": sim.trials, "fidelity": sim.heralds, "p_success": sim.trials}
    for name in ("p_heralding", "fidelity", "p_success"):
        expect = getattr(analytic, name)
        got = getattr(sim, name)
        n = counts[name]
        if n == 0:
            # nothing heralded: only consistent if heralding was impossible
            se = 0.0
            ok = analytic.p_heralding == 0.0
        else:
            se = _binomial_se(expect, n)
            ok = abs(got - expect) <= sigmas * se + 1e-15
        rows.append(MetricCheck(name, expect, got, se, bool(ok)))
    return rows
