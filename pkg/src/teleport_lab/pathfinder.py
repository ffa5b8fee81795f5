"""Device calibration ingestion and top-m weighted path search.

A device is a simple undirected graph of qubits with per-edge gate errors
and optional pre-measured pair negativities. Paths are scored by the
product of edge weights under one of three protocols and searched exactly
with a pruned depth-first enumeration.
"""
from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, asdict

import numpy as np

from . import channels, mitigation, tomography
from .metrics import negativity
from .protocols import exact_pair_distributions, noisy_pair_density

PROTOCOLS = ("neg", "neg_qrem", "gate_fid")

#: Calibrated gate errors above this value carry no information (undefined
#: calibrations are stored as 1) and their edges are excluded from search.
GATE_ERROR_CUTOFF = 0.5


class DeviceSchemaError(ValueError):
    """Calibration file violates the device schema."""


@dataclass
class QubitCal:
    id: int
    readout_err_0to1: float = 0.0
    readout_err_1to0: float = 0.0
    t1_us: float = channels.FITTED_T1_US
    t2_us: float = channels.FITTED_T2_US


@dataclass
class EdgeCal:
    a: int
    b: int
    gate_error: float
    neg: float | None = None
    neg_qrem: float | None = None


@dataclass
class DeviceModel:
    qubits: list
    edges: list
    name: str = "device"

    def __post_init__(self):
        ids = [q.id for q in self.qubits]
        if len(set(ids)) != len(ids):
            raise DeviceSchemaError("duplicate qubit ids")
        known = set(ids)
        seen = {}
        for e in self.edges:
            if e.a == e.b:
                raise DeviceSchemaError(f"self-loop on qubit {e.a}")
            if e.a not in known or e.b not in known:
                raise DeviceSchemaError(f"edge ({e.a}, {e.b}) references unknown qubits")
            key = (min(e.a, e.b), max(e.a, e.b))
            if key in seen:
                raise DeviceSchemaError(f"edge ({e.a}, {e.b}) appears twice")
            seen[key] = e

    def qubit(self, qubit_id: int) -> QubitCal:
        for q in self.qubits:
            if q.id == qubit_id:
                return q
        raise KeyError(f"unknown qubit {qubit_id}")

    def edge(self, a: int, b: int) -> EdgeCal:
        for e in self.edges:
            if {e.a, e.b} == {a, b}:
                return e
        raise KeyError(f"no edge ({a}, {b})")

    def adjacency(self) -> dict:
        adj: dict[int, set] = {q.id: set() for q in self.qubits}
        for e in self.edges:
            adj[e.a].add(e.b)
            adj[e.b].add(e.a)
        return adj


def _require(record: dict, field_name: str, context: str, optional: bool = False):
    if field_name not in record or record[field_name] is None:
        if optional:
            return None
        raise DeviceSchemaError(f"{context}.{field_name}: missing value")
    value = record[field_name]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise DeviceSchemaError(f"{context}.{field_name}: expected a number, got {value!r}")
    return value


def device_from_dict(payload: dict, name: str = "device") -> DeviceModel:
    if not isinstance(payload, dict):
        raise DeviceSchemaError("top level must be an object")
    for key in ("qubits", "edges"):
        if key not in payload or not isinstance(payload[key], list):
            raise DeviceSchemaError(f"top-level key '{key}' must be a list")
    qubits = []
    for i, rec in enumerate(payload["qubits"]):
        ctx = f"qubits[{i}]"
        if not isinstance(rec, dict):
            raise DeviceSchemaError(f"{ctx}: expected an object")
        qid = _require(rec, "id", ctx)
        if qid != int(qid):
            raise DeviceSchemaError(f"{ctx}.id: must be an integer")
        q = QubitCal(
            id=int(qid),
            readout_err_0to1=float(_require(rec, "readout_err_0to1", ctx)),
            readout_err_1to0=float(_require(rec, "readout_err_1to0", ctx)),
            t1_us=float(_require(rec, "t1_us", ctx)),
            t2_us=float(_require(rec, "t2_us", ctx)),
        )
        for p_name in ("readout_err_0to1", "readout_err_1to0"):
            p = getattr(q, p_name)
            if not 0.0 <= p <= 1.0:
                raise DeviceSchemaError(f"{ctx}.{p_name}: {p} outside [0, 1]")
        if q.t2_us > 2 * q.t1_us + 1e-12:
            raise DeviceSchemaError(f"{ctx}: t2_us exceeds 2*t1_us")
        qubits.append(q)

    merged: dict[tuple[int, int], EdgeCal] = {}
    for i, rec in enumerate(payload["edges"]):
        ctx = f"edges[{i}]"
        if not isinstance(rec, dict):
            raise DeviceSchemaError(f"{ctx}: expected an object")
        a = _require(rec, "a", ctx)
        b = _require(rec, "b", ctx)
        edge = EdgeCal(
            a=int(a), b=int(b),
            gate_error=float(_require(rec, "gate_error", ctx)),
            neg=_require(rec, "neg", ctx, optional=True),
            neg_qrem=_require(rec, "neg_qrem", ctx, optional=True),
        )
        if not 0.0 <= edge.gate_error <= 1.0:
            raise DeviceSchemaError(f"{ctx}.gate_error: {edge.gate_error} outside [0, 1]")
        for field_name in ("neg", "neg_qrem"):
            v = getattr(edge, field_name)
            if v is not None and not 0.0 <= v <= 0.5 + 1e-9:
                raise DeviceSchemaError(f"{ctx}.{field_name}: {v} outside [0, 0.5]")
        key = (min(edge.a, edge.b), max(edge.a, edge.b))
        if key in merged:
            prev = merged[key]
            same = abs(prev.gate_error - edge.gate_error) <= 1e-9
            for field_name in ("neg", "neg_qrem"):
                pv, ev = getattr(prev, field_name), getattr(edge, field_name)
                same &= (pv is None) == (ev is None) and (pv is None or abs(pv - ev) <= 1e-9)
            if not same:
                raise DeviceSchemaError(f"{ctx}: reverse duplicate of ({prev.a}, {prev.b}) disagrees")
            continue
        merged[key] = edge
    return DeviceModel(qubits=qubits, edges=list(merged.values()), name=name)


def ingest_device(path: str) -> DeviceModel:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DeviceSchemaError(f"{path}: not valid JSON ({exc})") from exc
    return device_from_dict(payload, name=str(path))


def save_device(device: DeviceModel, path: str):
    payload = {
        "qubits": [asdict(q) for q in device.qubits],
        "edges": [asdict(e) for e in device.edges],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Edge weighting and path search


@dataclass(frozen=True)
class WeightedPath:
    qubits: tuple[int, ...]
    weight_product: float
    protocol: str


@dataclass
class PathSearchResult:
    paths: list
    complete: bool  # False when fewer than the requested m paths exist


def edge_weights(device: DeviceModel, protocol: str) -> dict:
    """Adjacency map {qubit: {neighbour: weight}} under a weighting protocol."""
    if protocol not in PROTOCOLS:
        raise ValueError(f"protocol must be one of {PROTOCOLS}, got {protocol}")
    graph: dict[int, dict[int, float]] = {q.id: {} for q in device.qubits}
    for e in device.edges:
        if protocol == "gate_fid":
            if e.gate_error >= GATE_ERROR_CUTOFF:
                continue
            w = 1.0 - 2.0 * e.gate_error
        else:
            value = e.neg if protocol == "neg" else e.neg_qrem
            if value is None:
                raise ValueError(f"edge ({e.a}, {e.b}) lacks {protocol} calibration data")
            w = 2.0 * float(value)
        graph[e.a][e.b] = w
        graph[e.b][e.a] = w
    return graph


def find_best_paths(graph: dict, n: int, m: int, protocol: str = "") -> PathSearchResult:
    """The m simple paths of exactly n vertices with the largest weight product.

    Exact search: depth-first enumeration over simple paths with an upper
    bound prune (current product times the best possible remaining edge
    weights against the m-th best product found so far). Paths are
    undirected; the canonical orientation starts at the smaller endpoint.
    Ties are broken by lexicographic qubit sequence.
    """
    if n < 2:
        raise ValueError("paths need at least 2 qubits")
    if m < 1:
        raise ValueError("m must be at least 1")
    vertices = sorted(graph)
    max_w = 0.0
    for v in vertices:
        for w in graph[v].values():
            max_w = max(max_w, w)
    # best holds (-product, qubits) sorted ascending, so best[0] is the leader
    best: list[tuple[float, tuple[int, ...]]] = []

    def consider(product: float, path: tuple[int, ...]):
        if path[0] > path[-1]:
            return  # the reversed orientation is enumerated separately
        entry = (-product, path)
        pos = bisect.bisect_left(best, entry)
        if pos < m:
            best.insert(pos, entry)
            if len(best) > m:
                best.pop()

    def threshold() -> float:
        return -best[m - 1][0] if len(best) == m else -1.0

    path: list[int] = []
    on_path: set[int] = set()

    def extend(vertex: int, product: float):
        path.append(vertex)
        on_path.add(vertex)
        if len(path) == n:
            consider(product, tuple(path))
        else:
            remaining = n - len(path)
            for nbr in sorted(graph[vertex]):
                if nbr in on_path:
                    continue
                p = product * graph[vertex][nbr]
                if p * max_w ** (remaining - 1) < threshold():
                    continue
                extend(nbr, p)
        path.pop()
        on_path.remove(vertex)

    for start in vertices:
        extend(start, 1.0)
    paths = [WeightedPath(qubits=q, weight_product=-negp, protocol=protocol)
             for negp, q in best]
    return PathSearchResult(paths=paths, complete=len(paths) >= m)


# ---------------------------------------------------------------------------
# Synthetic devices


def heavy_hex_127_edges() -> list[tuple[int, int]]:
    """Coupling edges of a 127-qubit heavy-hex lattice (144 edges)."""
    row_starts = [0, 18, 37, 56, 75, 94, 113]
    row_lengths = [14, 15, 15, 15, 15, 15, 14]
    edges = []
    for start, length in zip(row_starts, row_lengths):
        edges.extend((q, q + 1) for q in range(start, start + length - 1))
    for r in range(6):
        first_connector = row_starts[r] + row_lengths[r]
        top_offsets = (0, 4, 8, 12) if r % 2 == 0 else (2, 6, 10, 14)
        bottom_offsets = (1, 5, 9, 13) if r == 5 else top_offsets
        for j in range(4):
            connector = first_connector + j
            edges.append((row_starts[r] + top_offsets[j], connector))
            edges.append((connector, row_starts[r + 1] + bottom_offsets[j]))
    return edges


def line_edges(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def ring_edges(n: int) -> list[tuple[int, int]]:
    return line_edges(n) + [(n - 1, 0)]


TOPOLOGIES = {"heavy-hex-127": heavy_hex_127_edges}


def _topology_edges(topology: str) -> list[tuple[int, int]]:
    if topology in TOPOLOGIES:
        return TOPOLOGIES[topology]()
    kind, _, arg = topology.partition(":")
    if kind == "line" and arg.isdigit():
        return line_edges(int(arg))
    if kind == "ring" and arg.isdigit():
        return ring_edges(int(arg))
    raise ValueError(f"unknown topology {topology!r}")


def pair_negativities(gate_error: float, confusion_a: np.ndarray, confusion_b: np.ndarray,
                      one_qubit_depol: float = 0.0) -> tuple[float, float]:
    """Exact (neg, neg_qrem) of a noisy two-qubit graph state on one edge.

    Mirrors the measurement pipeline: prepare the pair state through the
    exact depolarizing channels, push the tomography distributions through
    the readout confusion, then reconstruct with and without correction.
    """
    rho = noisy_pair_density(gate_error, one_qubit_depol)
    confusion = [confusion_a, confusion_b]
    noisy = exact_pair_distributions(rho, confusion, one_qubit_depol)
    raw_probs = {pair: mitigation.michelot_project(vec) for pair, vec in noisy.items()}
    corrected_probs = {pair: mitigation.michelot_project(mitigation.qrem_correct(vec, confusion))
                       for pair, vec in noisy.items()}
    neg = negativity(tomography.reconstruct(raw_probs))
    neg_qrem = negativity(tomography.reconstruct(corrected_probs))
    return neg, neg_qrem


def synthesize_device(topology: str = "heavy-hex-127", seed: int = 0,
                      gate_error_mean: float = 0.0075, gate_error_sd: float = 0.003,
                      readout_mean: float = 0.013, readout_sd: float = 0.005,
                      t1_us: float = channels.FITTED_T1_US,
                      t2_us: float = channels.FITTED_T2_US,
                      one_qubit_depol: float = 2e-4,
                      undefined_edges: int = 0,
                      name: str | None = None) -> DeviceModel:
    """Generate a calibration with drawn noise statistics and simulated negativities."""
    edges_list = _topology_edges(topology)
    qubit_ids = sorted({q for e in edges_list for q in e})
    rng = np.random.default_rng(seed)
    qubits = []
    for qid in qubit_ids:
        e01 = float(np.clip(rng.normal(readout_mean, readout_sd), 5e-4, 0.4))
        e10 = float(np.clip(rng.normal(readout_mean * 1.4, readout_sd), 5e-4, 0.4))
        qubits.append(QubitCal(id=qid, readout_err_0to1=e01, readout_err_1to0=e10,
                               t1_us=t1_us, t2_us=t2_us))
    by_id = {q.id: q for q in qubits}
    undefined = set()
    if undefined_edges:
        chosen = rng.choice(len(edges_list), size=min(undefined_edges, len(edges_list)),
                            replace=False)
        undefined = {int(i) for i in chosen}
    edges = []
    for i, (a, b) in enumerate(edges_list):
        if i in undefined:
            edges.append(EdgeCal(a=a, b=b, gate_error=1.0, neg=0.0, neg_qrem=0.0))
            continue
        eps = float(np.clip(rng.normal(gate_error_mean, gate_error_sd), 1e-4, 0.45))
        qa, qb = by_id[a], by_id[b]
        neg, neg_qrem = pair_negativities(
            eps,
            channels.confusion_matrix(qa.readout_err_0to1, qa.readout_err_1to0),
            channels.confusion_matrix(qb.readout_err_0to1, qb.readout_err_1to0),
            one_qubit_depol)
        edges.append(EdgeCal(a=a, b=b, gate_error=eps, neg=neg, neg_qrem=neg_qrem))
    return DeviceModel(qubits=qubits, edges=edges, name=name or topology)
