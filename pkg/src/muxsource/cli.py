"""Command-line front end.

Subcommands::

    muxsource scan       metrics over a parameter grid
    muxsource calibrate  nbar giving a target SNR
    muxsource wait       waiting-time table for the comparison presets
    muxsource validate   analytic values against a seeded Monte-Carlo run

Exit codes: 0 success, 2 usage error, 3 calibration target not bracketed,
4 internal consistency failure (including a failed Monte-Carlo check).
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .detectors import DetectorModel
from .errors import ConsistencyError, DomainError, MuxSourceError, NonMonotone, NotBracketed
from .multiplex import MultiplexConfig, multiplexed_metrics
from .oracle import compare_metrics, simulate_system
from .presets import PRESET_SNR_BASIS, WAIT_PRESETS, waiting_table
from .solver import SNR_BASES, calibrate_nbar

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_BRACKETED = 3
EXIT_INTERNAL = 4

OUTPUT_DIR_ENV = "MUXSOURCE_OUTPUT_DIR"

DEFAULTS = {
    "detector": "pnr",
    "eta_d": 0.7,
    "eta_s": 0.8,
    "eta_tau": 0.99,
    "sources": 1,
    "nbar": 0.01,
    "rep_rate": None,
}

SCAN_COLUMNS = [
    "nbar", "n_sources", "detector", "eta_d", "eta_s", "eta_tau",
    "p_heralding", "fidelity", "snr", "p_success",
]


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- formatting

def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.12g}"
    return "" if value is None else str(value)


def _json_value(value):
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    text = format_value(value)
    return float(text) if text not in ("nan", "inf", "-inf") else text


def render(rows: Sequence[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        records = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([format_value(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(text: str, output: Optional[str]) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    path = Path(output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ---------------------------------------------------------------- arguments

def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in _split(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in _split(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def photon_range(text: str) -> list[int]:
    """``"1:10"`` (inclusive) or ``"1,2,8"``."""
    if ":" in text:
        lo, _, hi = text.partition(":")
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad photon range {text!r}") from None
    return int_list(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with default values for the flags below")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", help=f"output file (relative paths resolve under ${OUTPUT_DIR_ENV} if set)")


def _add_system(p: argparse.ArgumentParser) -> None:
    p.add_argument("--detector", help="binary, pnr or pseudo-pnr:M (default pnr)")
    p.add_argument("--eta-d", type=float, help="lumped detector efficiency (default 0.7)")
    p.add_argument("--eta-s", type=float, help="switch efficiency per stage (default 0.8)")
    p.add_argument("--eta-tau", type=float, help="delay-line efficiency (default 0.99)")
    p.add_argument("--sources", type=int, help="number of multiplexed sources (default 1)")
    p.add_argument("--rep-rate", type=float, help="pump repetition rate in Hz")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="muxsource", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scan", help="metrics over a parameter grid")
    _add_common(s)
    s.add_argument("--detector", type=_split, help="comma-separated detector descriptors")
    s.add_argument("--eta-d", type=float_list)
    s.add_argument("--eta-s", type=float_list)
    s.add_argument("--eta-tau", type=float_list)
    s.add_argument("--sources", type=int_list)
    s.add_argument("--nbar", type=float_list, help="explicit nbar values; overrides the range flags")
    s.add_argument("--nbar-min", type=float, default=1e-3)
    s.add_argument("--nbar-max", type=float, default=2.0)
    s.add_argument("--nbar-steps", type=int, default=50)
    s.add_argument("--nbar-scale", choices=("lin", "log"), default="log")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")

    c = sub.add_parser("calibrate", help="nbar that gives a target SNR")
    _add_common(c)
    _add_system(c)
    c.add_argument("--snr", type=float, default=100.0)
    c.add_argument("--basis", choices=SNR_BASES, default="delivered")

    w = sub.add_parser("wait", help="waiting times of the comparison presets")
    _add_common(w)
    w.add_argument("--snr", type=float, default=100.0)
    w.add_argument("--photons", type=photon_range, default=list(range(1, 11)), help="e.g. 1:10 or 1,4,8")
    w.add_argument("--systems", type=_split, help="subset of preset names")
    w.add_argument("--basis", choices=SNR_BASES, default=PRESET_SNR_BASIS)

    v = sub.add_parser("validate", help="analytic vs Monte-Carlo comparison")
    _add_common(v)
    _add_system(v)
    v.add_argument("--nbar", type=float)
    v.add_argument("--trials", type=int, default=10**6)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--sigmas", type=float, default=3.0)
    v.add_argument("--workers", type=int, default=1)
    return parser


def resolve(args: argparse.Namespace, keys: Iterable[str]) -> dict:
    """Flags override the config file, which overrides the built-in defaults."""
    merged = {k: DEFAULTS.get(k) for k in keys}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS) - {"snr", "trials", "seed", "basis"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        merged.update({k: v for k, v in loaded.items() if k in merged})
    for k in keys:
        value = getattr(args, k, None)
        if value is not None:
            merged[k] = value
    return merged


def _system(opts: dict) -> MultiplexConfig:
    detector = DetectorModel.parse(str(opts["detector"]), opts["eta_d"])
    return MultiplexConfig(
        detector=detector,
        n_sources=opts["sources"],
        eta_s=opts["eta_s"],
        eta_tau=opts["eta_tau"],
        nbar=opts.get("nbar") or 0.0,
        rep_rate=opts.get("rep_rate"),
    )


# ---------------------------------------------------------------- commands

@dataclass(frozen=True)
class SweepSpec:
    nbar: tuple[float, ...]
    detectors: tuple[str, ...]
    eta_d: tuple[float, ...]
    eta_s: tuple[float, ...]
    eta_tau: tuple[float, ...]
    n_sources: tuple[int, ...]

    def __post_init__(self):
        for name in ("nbar", "detectors", "eta_d", "eta_s", "eta_tau", "n_sources"):
            if not getattr(self, name):
                raise UsageError(f"empty grid for {name}")

    def points(self):
        """Grid points in row order: detector, eta_d, eta_s, eta_tau, n_sources, nbar."""
        return itertools.product(self.detectors, self.eta_d, self.eta_s, self.eta_tau, self.n_sources, self.nbar)


def _listify(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    return _split(value) if isinstance(value, str) else [value]


def sweep_spec(args: argparse.Namespace) -> SweepSpec:
    opts = resolve(args, ("detector", "eta_d", "eta_s", "eta_tau", "sources"))
    if args.nbar is not None:
        nbar = list(args.nbar)
    else:
        lo, hi, steps = args.nbar_min, args.nbar_max, args.nbar_steps
        if steps < 1 or not lo <= hi or lo < 0:
            raise UsageError(f"bad nbar range [{lo}, {hi}] with {steps} steps")
        if args.nbar_scale == "log":
            if lo <= 0:
                raise UsageError("log-spaced nbar range needs nbar-min > 0")
            nbar = np.geomspace(lo, hi, steps).tolist()
        else:
            nbar = np.linspace(lo, hi, steps).tolist()
    return SweepSpec(
        nbar=tuple(nbar),
        detectors=tuple(str(d) for d in _listify(opts["detector"])),
        eta_d=tuple(float(x) for x in _listify(opts["eta_d"])),
        eta_s=tuple(float(x) for x in _listify(opts["eta_s"])),
        eta_tau=tuple(float(x) for x in _listify(opts["eta_tau"])),
        n_sources=tuple(int(x) for x in _listify(opts["sources"])),
    )


def scan_point(point) -> dict:
    det, eta_d, eta_s, eta_tau, n_sources, nbar = point
    detector = DetectorModel.parse(det, eta_d)
    m = multiplexed_metrics(MultiplexConfig(detector, n_sources, eta_s, eta_tau, nbar))
    return {
        "nbar": nbar, "n_sources": n_sources, "detector": detector.label,
        "eta_d": eta_d, "eta_s": eta_s, "eta_tau": eta_tau,
        "p_heralding": m.p_heralding, "fidelity": m.fidelity, "snr": m.snr, "p_success": m.p_success,
    }


def cmd_scan(args) -> int:
    spec = sweep_spec(args)
    points = list(spec.points())
    # fail on bad parameters before spawning workers
    for det, eta_d, eta_s, eta_tau, n_sources, nbar in {p[:5] + (0.0,) for p in points}:
        MultiplexConfig(DetectorModel.parse(det, eta_d), n_sources, eta_s, eta_tau, nbar)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(scan_point, points, chunksize=max(1, len(points) // (4 * args.jobs))))
    else:
        rows = [scan_point(p) for p in points]
    emit(render(rows, SCAN_COLUMNS, args.format), args.output)
    return EXIT_OK


CALIBRATE_COLUMNS = [
    "detector", "n_sources", "eta_d", "eta_s", "eta_tau", "target_snr", "basis",
    "nbar_star", "achieved_snr", "iterations", "bracket_lo", "bracket_hi",
]


def _error_record(kind: str, message: str, fmt: str) -> str:
    return render([{"error": kind, "message": message}], ["error", "message"], fmt)


def cmd_calibrate(args) -> int:
    if not (args.snr > 0 and math.isfinite(args.snr)):
        raise UsageError(f"--snr must be positive, got {args.snr}")
    opts = resolve(args, ("detector", "eta_d", "eta_s", "eta_tau", "sources", "rep_rate"))
    system = _system(opts)
    try:
        cal = calibrate_nbar(args.snr, system, basis=args.basis)
    except NotBracketed as exc:
        emit(_error_record("not-bracketed", str(exc), args.format), args.output)
        return EXIT_NOT_BRACKETED
    except NonMonotone as exc:
        emit(_error_record("non-monotone", str(exc), args.format), args.output)
        return EXIT_INTERNAL
    row = {
        "detector": system.detector.label, "n_sources": system.n_sources,
        "eta_d": system.detector.efficiency, "eta_s": system.eta_s, "eta_tau": system.eta_tau,
        **cal.as_dict(),
    }
    emit(render([row], CALIBRATE_COLUMNS, args.format), args.output)
    return EXIT_OK


WAIT_COLUMNS = ["system", "n_photons", "nbar", "p_success", "rep_rate", "t_wait"]


def cmd_wait(args) -> int:
    if not (args.snr > 0 and math.isfinite(args.snr)):
        raise UsageError(f"--snr must be positive, got {args.snr}")
    if not args.photons or min(args.photons) < 1:
        raise UsageError("--photons must list integers >= 1")
    presets = WAIT_PRESETS
    if args.systems is not None:
        known = {p.name: p for p in WAIT_PRESETS}
        missing = [s for s in args.systems if s not in known]
        if missing or not args.systems:
            raise UsageError(f"unknown systems {missing}; choose from {sorted(known)}")
        presets = tuple(known[s] for s in args.systems)
    try:
        rows = waiting_table(presets, args.photons, args.snr, args.basis)
    except NotBracketed as exc:
        emit(_error_record("not-bracketed", str(exc), args.format), args.output)
        return EXIT_NOT_BRACKETED
    emit(render(rows, WAIT_COLUMNS, args.format), args.output)
    return EXIT_OK


VALIDATE_COLUMNS = ["metric", "analytic", "empirical", "stderr", "passed"]


def cmd_validate(args) -> int:
    if args.trials < 1000:
        raise UsageError(f"--trials must be at least 1000, got {args.trials}")
    opts = resolve(args, ("detector", "eta_d", "eta_s", "eta_tau", "sources", "rep_rate", "nbar"))
    system = _system(opts)
    sim = simulate_system(system, args.trials, args.seed, workers=max(1, args.workers))
    if sim.clamped:
        emit(_error_record("clamped-draws", f"{sim.clamped} pair draws exceeded the cutoff", args.format), args.output)
        return EXIT_INTERNAL
    checks = compare_metrics(multiplexed_metrics(system), sim, args.sigmas)
    rows = [c.__dict__ for c in checks]
    emit(render(rows, VALIDATE_COLUMNS, args.format), args.output)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_INTERNAL


COMMANDS = {"scan": cmd_scan, "calibrate": cmd_calibrate, "wait": cmd_wait, "validate": cmd_validate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        parser.error(str(exc))  # exits with status 2
    except ConsistencyError as exc:
        print(f"muxsource: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except MuxSourceError as exc:
        print(f"muxsource: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
