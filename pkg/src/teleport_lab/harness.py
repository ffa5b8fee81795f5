"""Experiment orchestration: sweeps over paths, modes and mitigation flags.

Reproduces the full workflow end to end: pick the best m paths per hop
count under each weighting protocol, run every transport mode for several
trials, mitigate, reconstruct the pair state and emit CSV rows.
"""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from math import sqrt
from typing import Sequence

import numpy as np

from . import channels, mitigation, pathfinder, protocols, tomography
from .channels import NoiseModel, confusion_matrix
from .metrics import fidelity, negativity
from .pathfinder import DeviceModel
from .protocols import PathSpec, TransportResult

log = logging.getLogger("teleport_lab")

DEFAULT_ONE_QUBIT_DEPOL = 2e-4
CSV_HEADER_COMMENT = "# teleport-lab results v1"
CSV_COLUMNS = ("mode", "protocol", "hops", "path", "trial", "qrem", "configuration",
               "negativity", "fidelity", "shots", "seed")


@dataclass
class ExperimentSpec:
    """Declarative sweep configuration."""

    hops: tuple[int, ...] = tuple(range(1, 20))
    protocols: tuple[str, ...] = ("neg", "neg_qrem", "gate_fid")
    modes: tuple[str, ...] = ("dynamic", "postselect", "swap")
    paths_per_hop: int = 4
    trials: int = 4
    shots: int = 4096
    qrem: str = "both"  # on | off | both
    qrem_calibration_shots: int = 8192
    noise_overrides: dict = field(default_factory=dict)
    simplified_correction: bool = False
    seed: int = 0

    def __post_init__(self):
        self.hops = tuple(int(h) for h in self.hops)
        if any(h < 1 for h in self.hops):
            raise ValueError("hop counts must be >= 1")
        if self.shots <= 0:
            raise ValueError("shots must be positive")
        if self.qrem not in ("on", "off", "both"):
            raise ValueError("qrem must be on, off or both")
        for p in self.protocols:
            if p not in pathfinder.PROTOCOLS:
                raise ValueError(f"unknown weighting protocol {p}")
        for mode in self.modes:
            if mode not in protocols.MODES:
                raise ValueError(f"unknown mode {mode}")

    @property
    def qrem_flags(self) -> tuple[bool, ...]:
        return {"on": (True,), "off": (False,), "both": (False, True)}[self.qrem]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        payload = json.loads(text)
        return cls(**payload)


@dataclass
class ResultRow:
    mode: str
    protocol: str
    hops: int
    path: str
    trial: int
    qrem: str
    configuration: str  # "" except for postselect categories ("zx" bits)
    negativity: float | None
    fidelity: float | None
    shots: int
    seed: int

    def __post_init__(self):
        if self.negativity is not None and not -1e-9 <= self.negativity <= 0.5 + 1e-9:
            raise ValueError(f"negativity {self.negativity} outside [0, 0.5]")
        if self.fidelity is not None and not -1e-9 <= self.fidelity <= 1 + 1e-9:
            raise ValueError(f"fidelity {self.fidelity} outside [0, 1]")


def path_noise_model(device: DeviceModel, path: PathSpec,
                     overrides: dict | None = None) -> NoiseModel:
    """Path-local noise model; position i carries the calibration of label i."""
    by_id = {q.id: q for q in device.qubits}
    cals = [by_id[label] for label in path.qubit_labels]
    params = dict(
        one_qubit_depol=DEFAULT_ONE_QUBIT_DEPOL,
        readout=[confusion_matrix(c.readout_err_0to1, c.readout_err_1to0) for c in cals],
        two_qubit_depol_per_edge=[device.edge(a, b).gate_error
                                  for a, b in zip(path.qubit_labels, path.qubit_labels[1:])],
        t1_per_qubit_us=[c.t1_us for c in cals],
        t2_per_qubit_us=[c.t2_us for c in cals],
    )
    params.update(overrides or {})
    return NoiseModel(**params)


def _parity_of_masked(idx: np.ndarray, mask: int) -> np.ndarray:
    x = idx & mask
    for shift in (32, 16, 8, 4, 2, 1):
        x = x ^ (x >> shift)
    return x & 1


def _dense_joint(result: TransportResult, pair: tuple[str, str]) -> np.ndarray:
    total = result.shots_per_basis
    dense = np.zeros(1 << result.n)
    for outcome, count in result.counts_by_basis[pair].items():
        dense[outcome] = count / total
    return dense


def mitigated_pair_distributions(result: TransportResult, qrem: bool,
                                 calibration: Sequence[np.ndarray]) -> dict:
    """Pair outcome distributions per basis for dynamic / swap results.

    Intermediate bits are marginalized out first (exactly commutes with the
    per-qubit correction), then the pair readout is inverted and projected.
    """
    tset = result.pair_tomography()
    pair_calib = [calibration[0], calibration[-1]]
    out = {}
    for pair, vec in tset.frequencies().items():
        if qrem:
            vec = mitigation.qrem_correct(vec, pair_calib)
        out[pair] = mitigation.michelot_project(vec)
    return out


def mitigated_category_distributions(result: TransportResult, qrem: bool,
                                     calibration: Sequence[np.ndarray]) -> dict:
    """Post-selected per-configuration distributions after full-path mitigation.

    Pipeline per basis: joint frequencies over all measured qubits, QREM
    over every qubit axis, categorisation by the parity discriminator, then
    the simplex projection of each configuration's two-qubit outcome
    vector. Projecting the conditional vectors (the objects fed to the
    reconstruction) rather than the sparse 2^n joint keeps the projection
    from clipping away shot-starved bins at long path lengths.
    Returns {config: {"weight", "probs_by_basis"}}.
    """
    n = result.n
    intermediates = list(result.intermediate_positions())
    odd_mask = sum(1 << pos for pos in intermediates if pos % 2 == 1)
    even_mask = sum(1 << pos for pos in intermediates if pos % 2 == 0)
    idx = np.arange(1 << n, dtype=np.int64)
    z = _parity_of_masked(idx, odd_mask)
    x = _parity_of_masked(idx, even_mask)
    t = (idx & 1) | (((idx >> (n - 1)) & 1) << 1)
    bins = (z | (x << 1) | (t << 2)).astype(np.int64)

    configs = protocols.reachable_configurations(result.path.hops)
    acc = {c: {} for c in configs}
    weights = {c: [] for c in configs}
    for pair in tomography.BASIS_PAIRS:
        dense = _dense_joint(result, pair)
        if qrem:
            dense = mitigation.qrem_correct(dense, calibration)
        grouped = np.bincount(bins, weights=dense, minlength=16)
        for zc, xc in configs:
            vec = grouped[np.array([zc | (xc << 1) | (tt << 2) for tt in range(4)])]
            weight = float(vec.sum())
            weights[(zc, xc)].append(weight)
            if weight > 1e-12:
                acc[(zc, xc)][pair] = mitigation.michelot_project(vec / weight)
            else:
                acc[(zc, xc)][pair] = np.full(4, 0.25)
    out = {}
    for config in configs:
        out[config] = {"weight": max(float(np.mean(weights[config])), 0.0),
                       "probs_by_basis": acc[config]}
    return out


# ---------------------------------------------------------------------------
# Sweep cells


@dataclass(frozen=True)
class _Cell:
    protocol: str
    hops: int
    path_index: int
    path_labels: tuple[int, ...]
    trial: int
    mode: str
    seed: int


def _cell_rows(device: DeviceModel, spec: ExperimentSpec, cell: _Cell) -> list[ResultRow]:
    path = PathSpec(cell.path_labels)
    noise = path_noise_model(device, path, spec.noise_overrides)
    rng = np.random.default_rng(np.random.SeedSequence(cell.seed))
    if cell.mode == "swap":
        result = protocols.run_swap_transport(path, noise, spec.shots, rng)
    else:
        result = protocols.run_teleportation(path, cell.mode, noise, spec.shots, rng,
                                             simplified_correction=spec.simplified_correction)
    calibration = mitigation.estimate_confusion_matrices(
        [noise.qubit_confusion(i) for i in range(path.n)],
        spec.qrem_calibration_shots, rng)

    rows: list[ResultRow] = []
    ideal_pair = protocols.phi_p2_projector()
    for qrem in spec.qrem_flags:
        flag = "on" if qrem else "off"
        if cell.mode == "postselect":
            categories = mitigated_category_distributions(result, qrem, calibration)
            for config, payload in sorted(categories.items()):
                config_label = f"{config[0]}{config[1]}"
                eff_shots = int(round(payload["weight"] * spec.shots))
                if eff_shots < 1:
                    rows.append(ResultRow(cell.mode, cell.protocol, cell.hops,
                                          _path_str(path), cell.trial, flag, config_label,
                                          None, None, 0, cell.seed))
                    continue
                rho = tomography.reconstruct(payload["probs_by_basis"])
                ideal = protocols.canonical_state(config, path.n)
                rows.append(ResultRow(
                    cell.mode, cell.protocol, cell.hops, _path_str(path), cell.trial,
                    flag, config_label, negativity(rho),
                    fidelity(rho, np.outer(ideal.amplitudes, ideal.amplitudes.conj())),
                    eff_shots, cell.seed))
        else:
            probs = mitigated_pair_distributions(result, qrem, calibration)
            rho = tomography.reconstruct(probs)
            rows.append(ResultRow(cell.mode, cell.protocol, cell.hops, _path_str(path),
                                  cell.trial, flag, "", negativity(rho),
                                  fidelity(rho, ideal_pair), spec.shots, cell.seed))
    return rows


def _path_str(path: PathSpec) -> str:
    return "-".join(str(q) for q in path.qubit_labels)


def _cell_worker(args) -> list[ResultRow]:
    device, spec, cell = args
    return _cell_rows(device, spec, cell)


def _worker_count() -> int:
    raw = os.environ.get("TELEPORT_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def plan_cells(device: DeviceModel, spec: ExperimentSpec) -> list[_Cell]:
    """Deterministic cell grid with per-cell seeds derived from the master seed."""
    root = np.random.SeedSequence(spec.seed)
    cells: list[_Cell] = []
    searches: dict[tuple[str, int], list] = {}
    for protocol in spec.protocols:
        graph = pathfinder.edge_weights(device, protocol)
        for hops in spec.hops:
            found = pathfinder.find_best_paths(graph, hops + 2, spec.paths_per_hop, protocol)
            if not found.complete:
                log.warning("protocol %s, hops %d: only %d path(s) available",
                            protocol, hops, len(found.paths))
            searches[(protocol, hops)] = found.paths
    counter = 0
    for protocol in spec.protocols:
        for hops in spec.hops:
            for path_index, wpath in enumerate(searches[(protocol, hops)]):
                for trial in range(spec.trials):
                    for mode in spec.modes:
                        child = np.random.SeedSequence(entropy=spec.seed,
                                                       spawn_key=(counter,))
                        seed = int(child.generate_state(1, np.uint64)[0])
                        cells.append(_Cell(protocol, hops, path_index, wpath.qubits,
                                           trial, mode, seed))
                        counter += 1
    return cells


def run_experiment(device: DeviceModel, spec: ExperimentSpec) -> list[ResultRow]:
    """Execute the sweep; per-cell failures are logged and skipped."""
    cells = plan_cells(device, spec)
    workers = _worker_count()
    rows: list[ResultRow] = []
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for cell, result in zip(cells, pool.map(_cell_worker,
                                                    ((device, spec, c) for c in cells))):
                rows.extend(result)
    else:
        for cell in cells:
            try:
                rows.extend(_cell_rows(device, spec, cell))
            except Exception:  # noqa: BLE001 - a failed cell must not kill the sweep
                log.exception("cell %s failed; skipping", cell)
    return rows


# ---------------------------------------------------------------------------
# Idle-decay experiment


def exact_decay_negativity(delay_us: float, noise: NoiseModel, qrem: bool = True) -> float:
    """Infinite-shot negativity of an idling two-qubit graph state."""
    rho = protocols.noisy_pair_density(noise.edge_depol(0), noise.one_qubit_depol)
    for q in (0, 1):
        t1, t2 = noise.qubit_t1t2(q)
        rho = channels.idle_decay_channel(rho, (q,), delay_us, t1, t2)
    confusion = [noise.qubit_confusion(0), noise.qubit_confusion(1)]
    dists = protocols.exact_pair_distributions(rho, confusion, noise.one_qubit_depol)
    probs = {}
    for pair, vec in dists.items():
        if qrem:
            vec = mitigation.qrem_correct(vec, confusion)
        probs[pair] = mitigation.michelot_project(vec)
    return negativity(tomography.reconstruct(probs))


def sampled_decay_negativity(delay_us: float, noise: NoiseModel, shots: int,
                             rng: np.random.Generator, qrem: bool = True,
                             calibration_shots: int = 8192) -> float:
    result = protocols.run_idle_pair(delay_us, noise, shots, rng)
    calibration = mitigation.estimate_confusion_matrices(
        [noise.qubit_confusion(0), noise.qubit_confusion(1)], calibration_shots, rng)
    probs = mitigated_pair_distributions(result, qrem, calibration)
    return negativity(tomography.reconstruct(probs))


def crossing_time(delays: Sequence[float], values: Sequence[float], level: float) -> float | None:
    """First delay at which the (piecewise-linear) curve crosses the level downward."""
    for (t0, v0), (t1, v1) in zip(zip(delays, values), zip(delays[1:], values[1:])):
        if v0 >= level >= v1:
            if v0 == v1:
                return float(t0)
            return float(t0 + (v0 - level) * (t1 - t0) / (v0 - v1))
    return None


@dataclass
class DecayResult:
    delays_us: list
    negativities: list
    crossing_start: float | None  # first crossing of DECAY_LEVEL_START
    crossing_end: float | None  # first crossing of DECAY_LEVEL_END

    @property
    def crossing_window_us(self) -> float | None:
        if self.crossing_start is None or self.crossing_end is None:
            return None
        return self.crossing_end - self.crossing_start


DECAY_LEVEL_START = 0.474
DECAY_LEVEL_END = 0.376


def run_decay_experiment(delays_us: Sequence[float], noise: NoiseModel, shots: int = 0,
                         seed: int = 0, qrem: bool = True) -> DecayResult:
    """Negativity of an idling pair versus delay; shots=0 runs the exact channel."""
    values = []
    for i, delay in enumerate(delays_us):
        if shots <= 0:
            values.append(exact_decay_negativity(delay, noise, qrem))
        else:
            child = np.random.SeedSequence(entropy=seed, spawn_key=(i,))
            rng = np.random.default_rng(child)
            values.append(sampled_decay_negativity(delay, noise, shots, rng, qrem))
    return DecayResult(list(delays_us), values,
                       crossing_time(delays_us, values, DECAY_LEVEL_START),
                       crossing_time(delays_us, values, DECAY_LEVEL_END))


# ---------------------------------------------------------------------------
# CSV


def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    lines = [CSV_HEADER_COMMENT, ",".join(CSV_COLUMNS)]
    for row in rows:
        values = [getattr(row, col) for col in CSV_COLUMNS]
        lines.append(",".join(_format_value(v) for v in values))
    return "\n".join(lines) + "\n"


def write_csv(rows: Sequence[ResultRow], path: str):
    with open(path, "w") as fh:
        fh.write(rows_to_csv(rows))


def read_csv_rows(path: str) -> list[ResultRow]:
    rows = []
    with open(path) as fh:
        header_seen = False
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                if line.split(",") != list(CSV_COLUMNS):
                    raise ValueError(f"{path}:{line_no}: unexpected CSV columns")
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != len(CSV_COLUMNS):
                log.warning("%s:%d: malformed row skipped", path, line_no)
                continue
            try:
                rows.append(ResultRow(
                    mode=parts[0], protocol=parts[1], hops=int(parts[2]), path=parts[3],
                    trial=int(parts[4]), qrem=parts[5], configuration=parts[6],
                    negativity=float(parts[7]) if parts[7] else None,
                    fidelity=float(parts[8]) if parts[8] else None,
                    shots=int(parts[9]), seed=int(parts[10])))
            except ValueError:
                log.warning("%s:%d: malformed row skipped", path, line_no)
    return rows


# ---------------------------------------------------------------------------
# Aggregation (shared by plot rendering and its tests)


@dataclass(frozen=True)
class AggregatePoint:
    hops: int
    mean: float
    stderr: float
    low: float
    high: float
    count: int


def aggregate_by_hops(rows: Sequence[ResultRow], metric: str = "negativity") -> list[AggregatePoint]:
    """Per-hop mean / standard error / range of one metric, rows pre-filtered."""
    by_hops: dict[int, list[float]] = {}
    for row in rows:
        value = getattr(row, metric)
        if value is None:
            continue
        by_hops.setdefault(row.hops, []).append(value)
    out = []
    for hops in sorted(by_hops):
        vals = np.array(by_hops[hops])
        stderr = float(vals.std(ddof=1) / sqrt(len(vals))) if len(vals) > 1 else 0.0
        out.append(AggregatePoint(hops, float(vals.mean()), stderr,
                                  float(vals.min()), float(vals.max()), len(vals)))
    return out
