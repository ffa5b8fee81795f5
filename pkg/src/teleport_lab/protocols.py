"""Transport of one qubit of an entangled pair along a qubit path.

Three modes are implemented:

* ``dynamic``      - intermediate qubits are measured in the X basis as the
  state moves, then the accumulated byproduct operators are undone on the
  receiving qubit with outcome-conditioned gates (idling cost charged per
  correction layer).
* ``postselect``   - all measurements are deferred; shots are categorised by
  the parity discriminator into four local-transformation configurations.
* ``swap``         - the pair qubit is physically moved with SWAP chains,
  three CNOTs per hop.

Sampled runs use a sliding-window trajectory engine (`ShotBatch`) that keeps
at most a handful of live qubits per shot regardless of path length: a path
qubit enters the window when first entangled and leaves right after its
measurement collapses it. Measuring a qubit early is exactly equivalent to
the deferred hardware schedule because nothing acts on it afterwards.
The dense simulator provides the independent analytic route.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import sqrt
from typing import Iterable, Sequence

import numpy as np

from .channels import NoiseModel, decay_probabilities, depolarizing_channel, readout_channel
from .simulator import (GATE_MATRICES, Gate, GateOp, MAX_QUBITS, PureState, apply_gate,
                        apply_gates, born_probabilities, postselect, remove_qubit)
from .tomography import BASIS_PAIRS, TomographySet, rotation_gates, tomography_rotations

MODES = ("dynamic", "postselect", "swap")


@dataclass(frozen=True)
class PathSpec:
    """Ordered device qubit labels of a transport path."""

    qubit_labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(q) for q in self.qubit_labels)
        object.__setattr__(self, "qubit_labels", labels)
        if len(labels) < 2:
            raise ValueError("a path needs at least 2 qubits")
        if len(set(labels)) != len(labels):
            raise ValueError(f"path qubits must be distinct, got {labels}")

    @classmethod
    def line(cls, n: int) -> "PathSpec":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.qubit_labels)

    @property
    def hops(self) -> int:
        return len(self.qubit_labels) - 2

    def validate_on(self, adjacency: dict) -> None:
        """Check that consecutive labels are coupled on the device."""
        for a, b in zip(self.qubit_labels, self.qubit_labels[1:]):
            if b not in adjacency.get(a, ()):
                raise ValueError(f"({a}, {b}) is not an edge of the device graph")


def _as_path(path) -> PathSpec:
    if isinstance(path, PathSpec):
        return path
    if isinstance(path, int):
        return PathSpec.line(path)
    return PathSpec(tuple(path))


def discriminator(outcomes: Sequence[int]) -> tuple[int, int]:
    """Parity pair (odd-indexed XOR, even-indexed XOR) classifying the byproduct.

    Outcome i of the sequence is the X measurement of the i-th intermediate
    qubit (1-based in the parity convention).
    """
    bits = [int(b) & 1 for b in outcomes]
    z = reduce(lambda a, b: a ^ b, bits[0::2], 0)
    x = reduce(lambda a, b: a ^ b, bits[1::2], 0)
    return z, x


def reachable_configurations(hops: int) -> tuple[tuple[int, int], ...]:
    """With a single hop only the X-free configurations occur."""
    if hops < 1:
        raise ValueError("hops must be >= 1")
    if hops == 1:
        return ((0, 0), (1, 0))
    return ((0, 0), (0, 1), (1, 0), (1, 1))


def representative_outcomes(config: tuple[int, int], hops: int) -> tuple[int, ...]:
    """Smallest outcome vector mapping to the given configuration."""
    z, x = config
    if (z, x) not in reachable_configurations(hops):
        raise ValueError(f"configuration {config} is unreachable with {hops} hop(s)")
    s = [0] * hops
    if z:
        s[0] = 1
    if x:
        s[1] = 1
    return tuple(s)


def byproduct_sequence(outcomes: Sequence[int], target: int = 1) -> list[GateOp]:
    """Gates acquired by the receiving qubit, in temporal order of the hops."""
    ops = []
    for s in outcomes:
        ops.append(GateOp(Gate.H, (target,)))
        if int(s):
            ops.append(GateOp(Gate.X, (target,)))
    return ops


def correction_sequence(outcomes: Sequence[int], target: int = 1,
                        simplified: bool = False) -> list[GateOp]:
    """Gate list undoing the acquired byproduct, in application order.

    The default form mirrors the sequential hardware correction (one
    conditional X and one H per hop, reversed); the simplified form is the
    constant-depth equivalent derived from the discriminator.
    """
    if simplified:
        z, x = discriminator(outcomes)
        n = len(outcomes) + 2
        ops = []
        if n % 2:
            ops.append(GateOp(Gate.H, (target,)))
        if z:
            ops.append(GateOp(Gate.Z, (target,)))
        if x:
            ops.append(GateOp(Gate.X, (target,)))
        return ops
    return list(reversed(byproduct_sequence(outcomes, target)))


def configuration_unitary(config: tuple[int, int], n: int) -> np.ndarray:
    """Single-qubit unitary H^n Z^z X^x of a configuration for an n-qubit path."""
    z, x = config
    u = np.eye(2, dtype=complex)
    if x:
        u = GATE_MATRICES[Gate.X] @ u
    if z:
        u = GATE_MATRICES[Gate.Z] @ u
    if n % 2:
        u = GATE_MATRICES[Gate.H] @ u
    return u


def sequence_unitary(ops: Iterable[GateOp]) -> np.ndarray:
    """2x2 unitary of single-qubit gates applied in temporal order."""
    u = np.eye(2, dtype=complex)
    for o in ops:
        u = GATE_MATRICES[o.kind] @ u
    return u


def prepare_path_graph_state(path) -> PureState:
    """|+...+> entangled with CZ along consecutive path positions."""
    path = _as_path(path)
    if path.n > MAX_QUBITS:
        raise ValueError(f"path of {path.n} qubits exceeds the {MAX_QUBITS}-qubit cap")
    state = PureState.plus(path.n)
    for i in range(path.n - 1):
        state = apply_gate(state, GateOp(Gate.CZ, (i, i + 1)))
    return state


def phi_p2() -> PureState:
    return prepare_path_graph_state(2)


def phi_p2_projector() -> np.ndarray:
    v = phi_p2().amplitudes
    return np.outer(v, v.conj())


def canonical_state(config: tuple[int, int], n: int) -> PureState:
    """Two-qubit state of a configuration: (I x U_config) |phi(P2)>."""
    u = configuration_unitary(config, n)
    full = np.kron(u, np.eye(2, dtype=complex))  # second qubit is the high bit
    return PureState(2, full @ phi_p2().amplitudes)


def teleport_pure(path, outcomes: Sequence[int]) -> PureState:
    """Exact teleported pair state for forced intermediate outcomes.

    Dense-statevector evaluation: prepares the path graph state, projects
    every intermediate qubit onto its X outcome, and returns the remaining
    (first, last) pair as a 2-qubit state, byproduct still attached.
    """
    path = _as_path(path)
    n = path.n
    if len(outcomes) != n - 2:
        raise ValueError(f"expected {n - 2} outcomes, got {len(outcomes)}")
    state = prepare_path_graph_state(path)
    for i in range(1, n - 1):
        state, _ = postselect(state, i, "X", int(outcomes[i - 1]))
    for i in range(n - 2, 0, -1):
        state = remove_qubit(state, i)
    return state


# ---------------------------------------------------------------------------
# Sampled trajectories


class ShotBatch:
    """Vectorized pure-state trajectories over a sliding window of qubits.

    Row s of ``amps`` is the window statevector of shot s; ``axis_of`` maps a
    path position to its bit in the window index (bit 0 is least significant).
    """

    def __init__(self, shots: int):
        if shots <= 0:
            raise ValueError("shot budget must be positive")
        self.shots = shots
        self.amps = np.ones((shots, 1), dtype=complex)
        self.axis_of: dict[int, int] = {}

    @property
    def dim(self) -> int:
        return self.amps.shape[1]

    def _axis(self, pos: int) -> int:
        return self.axis_of[pos]

    def add_qubit(self, pos: int):
        """Attach one |0> qubit at the given path position."""
        if pos in self.axis_of:
            raise ValueError(f"position {pos} already live")
        self.axis_of[pos] = len(self.axis_of)
        grown = np.zeros((self.shots, self.dim * 2), dtype=complex)
        grown[:, :self.dim] = self.amps
        self.amps = grown

    def apply_matrix(self, pos: int, matrix: np.ndarray, mask: np.ndarray | None = None):
        lo = 1 << self._axis(pos)
        if mask is None:
            view = self.amps.reshape(self.shots, -1, 2, lo)
            self.amps = np.einsum("ij,sajb->saib", matrix, view).reshape(self.shots, -1)
            return
        if not mask.any():
            return
        k = int(mask.sum())
        sub = self.amps[mask].reshape(k, -1, 2, lo)
        self.amps[mask] = np.einsum("ij,sajb->saib", matrix, sub).reshape(k, -1)

    def apply_gate(self, pos: int, gate: Gate, mask: np.ndarray | None = None):
        self.apply_matrix(pos, GATE_MATRICES[gate], mask)

    def apply_cz(self, pos1: int, pos2: int):
        b1, b2 = self._axis(pos1), self._axis(pos2)
        idx = np.arange(self.dim)
        mask = (((idx >> b1) & (idx >> b2)) & 1).astype(bool)
        self.amps[:, mask] *= -1.0

    def apply_cnot(self, control: int, target: int):
        bc, bt = self._axis(control), self._axis(target)
        idx = np.arange(self.dim)
        perm = np.where(((idx >> bc) & 1) == 1, idx ^ (1 << bt), idx)
        self.amps = self.amps[:, perm]

    def apply_pauli_indexed(self, pos: int, which: np.ndarray):
        """Per-shot Pauli: which[s] in {0: none, 1: X, 2: Y, 3: Z}."""
        b = self._axis(pos)
        idx = np.arange(self.dim)
        bit = (idx >> b) & 1
        flip = idx ^ (1 << b)
        for k in (1, 2, 3):
            mask = which == k
            if not mask.any():
                continue
            if k == 1:
                self.amps[mask] = self.amps[mask][:, flip]
            elif k == 2:
                phase = np.where(bit == 1, 1j, -1j)
                self.amps[mask] = self.amps[mask][:, flip] * phase
            else:
                sign = np.where(bit == 1, -1.0, 1.0)
                self.amps[mask] = self.amps[mask] * sign

    def depolarize(self, positions: Sequence[int], p: float, rng: np.random.Generator,
                   active: np.ndarray | None = None):
        """Uniform non-identity Pauli string on the targets with probability p."""
        if p <= 0.0:
            return
        hit = rng.random(self.shots) < p
        if active is not None:
            hit &= active
        n_words = 4 ** len(positions)
        word = rng.integers(1, n_words, size=self.shots)
        word = np.where(hit, word, 0)
        for pos in positions:
            self.apply_pauli_indexed(pos, word & 3)
            word >>= 2

    def probability_one(self, pos: int) -> np.ndarray:
        lo = 1 << self._axis(pos)
        pr = np.abs(self.amps.reshape(self.shots, -1, 2, lo)) ** 2
        return pr[:, :, 1, :].sum(axis=(1, 2))

    def measure_z(self, pos: int, rng: np.random.Generator) -> np.ndarray:
        """Sample and collapse a Z measurement; returns per-shot bits."""
        p1 = self.probability_one(pos)
        bits = (rng.random(self.shots) < p1).astype(np.int8)
        p_keep = np.where(bits == 1, p1, 1.0 - p1)
        if np.any(p_keep < 1e-15):
            raise RuntimeError("measurement probabilities underflow; state is corrupted")
        lo = 1 << self._axis(pos)
        view = self.amps.reshape(self.shots, -1, 2, lo)
        sel = np.zeros((self.shots, 1, 2, 1))
        sel[np.arange(self.shots), 0, bits, 0] = 1.0
        collapsed = (view * sel).reshape(self.shots, -1)
        self.amps = collapsed / np.sqrt(p_keep)[:, None]
        return bits

    def drop_qubit(self, pos: int, bits: np.ndarray):
        """Remove a collapsed qubit whose per-shot computational value is known."""
        b = self._axis(pos)
        lo = 1 << b
        view = self.amps.reshape(self.shots, -1, 2, lo)
        taken = np.take_along_axis(view, bits.astype(np.intp)[:, None, None, None], axis=2)
        self.amps = np.ascontiguousarray(taken[:, :, 0, :].reshape(self.shots, -1))
        del self.axis_of[pos]
        for p, axis in self.axis_of.items():
            if axis > b:
                self.axis_of[p] = axis - 1

    def idle_decay(self, pos: int, duration_us: float, t1_us: float, t2_us: float,
                   rng: np.random.Generator):
        """Trajectory-sampled amplitude damping plus pure dephasing."""
        gamma, p_z = decay_probabilities(duration_us, t1_us, t2_us)
        if gamma > 0.0:
            p1 = self.probability_one(pos)
            jump = rng.random(self.shots) < gamma * p1
            lo = 1 << self._axis(pos)
            view = self.amps.reshape(self.shots, -1, 2, lo)
            out = view.copy()
            out[jump, :, 0, :] = view[jump, :, 1, :]
            out[jump, :, 1, :] = 0.0
            out[~jump, :, 1, :] *= sqrt(1.0 - gamma)
            norm = np.where(jump, np.sqrt(np.maximum(p1, 1e-300)),
                            np.sqrt(np.maximum(1.0 - gamma * p1, 1e-300)))
            self.amps = (out / norm[:, None, None, None]).reshape(self.shots, -1)
        if p_z > 0.0:
            flip = rng.random(self.shots) < p_z
            self.apply_pauli_indexed(pos, np.where(flip, 3, 0))

    def readout(self, bits: np.ndarray, confusion: np.ndarray,
                rng: np.random.Generator) -> np.ndarray:
        """Classical readout flips per the confusion matrix column."""
        p_read1 = np.where(bits == 1, confusion[1, 1], confusion[1, 0])
        return (rng.random(self.shots) < p_read1).astype(np.int8)


@dataclass
class TransportResult:
    """Raw per-basis outcome counts of a sampled transport run.

    Outcome integers carry one bit per path position (bit i = position i):
    intermediate positions hold their recorded measurement bits, positions
    0 and n-1 hold the tomography outcomes.
    """

    mode: str
    path: PathSpec
    shots_per_basis: int
    counts_by_basis: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.path.n

    def intermediate_positions(self) -> range:
        return range(1, self.n - 1)

    def pair_tomography(self) -> TomographySet:
        """Counts marginalized onto the surviving pair (positions 0 and n-1)."""
        tset = TomographySet(shots_per_basis=self.shots_per_basis)
        for pair, counts in self.counts_by_basis.items():
            for outcome, weight in counts.items():
                k = (outcome & 1) | (((outcome >> (self.n - 1)) & 1) << 1)
                tset.add(pair, k, weight)
        return tset

    def categorize(self) -> dict[tuple[int, int], TomographySet]:
        """Split pair counts by the discriminator of the recorded outcomes."""
        out = {c: TomographySet(shots_per_basis=self.shots_per_basis)
               for c in reachable_configurations(self.path.hops)}
        for pair, counts in self.counts_by_basis.items():
            for outcome, weight in counts.items():
                s = [(outcome >> pos) & 1 for pos in self.intermediate_positions()]
                config = discriminator(s)
                k = (outcome & 1) | (((outcome >> (self.n - 1)) & 1) << 1)
                out.setdefault(config, TomographySet(shots_per_basis=self.shots_per_basis)).add(pair, k, weight)
        return out


def _count(ints: np.ndarray) -> dict[int, int]:
    values, counts = np.unique(ints, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def _gate_with_noise(batch: ShotBatch, pos: int, gate: Gate, noise: NoiseModel,
                     rng: np.random.Generator, mask: np.ndarray | None = None):
    batch.apply_gate(pos, gate, mask)
    batch.depolarize([pos], noise.one_qubit_depol, rng, active=mask)


def _entangle_pair(batch: ShotBatch, noise: NoiseModel, rng: np.random.Generator):
    batch.add_qubit(0)
    batch.add_qubit(1)
    _gate_with_noise(batch, 0, Gate.H, noise, rng)
    _gate_with_noise(batch, 1, Gate.H, noise, rng)
    batch.apply_cz(0, 1)
    batch.depolarize([0, 1], noise.edge_depol(0), rng)


def _tomography_layer(batch: ShotBatch, basis_pair: tuple[str, str], first: int, last: int,
                      noise: NoiseModel, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    for op in tomography_rotations(basis_pair, (first, last)):
        _gate_with_noise(batch, op.targets[0], op.kind, noise, rng)
    bits_first = batch.measure_z(first, rng)
    read_first = batch.readout(bits_first, noise.qubit_confusion(first), rng)
    bits_last = batch.measure_z(last, rng)
    read_last = batch.readout(bits_last, noise.qubit_confusion(last), rng)
    return read_first, read_last


def _teleport_one_basis(n: int, mode: str, noise: NoiseModel, shots: int,
                        basis_pair: tuple[str, str], rng: np.random.Generator,
                        simplified_correction: bool) -> np.ndarray:
    batch = ShotBatch(shots)
    _entangle_pair(batch, noise, rng)
    read = {}
    for i in range(1, n - 1):
        batch.add_qubit(i + 1)
        _gate_with_noise(batch, i + 1, Gate.H, noise, rng)
        batch.apply_cz(i, i + 1)
        batch.depolarize([i, i + 1], noise.edge_depol(i), rng)
        _gate_with_noise(batch, i, Gate.H, noise, rng)  # X-basis measurement rotation
        bits = batch.measure_z(i, rng)
        read[i] = batch.readout(bits, noise.qubit_confusion(i), rng)
        batch.drop_qubit(i, bits)

    if mode == "dynamic":
        latency = noise.dynamic_correction_latency_us
        last = n - 1

        def idle_layer():
            for pos in (0, last):
                t1, t2 = noise.qubit_t1t2(pos)
                batch.idle_decay(pos, latency, t1, t2, rng)

        if simplified_correction:
            idle_layer()
            z = np.zeros(shots, dtype=np.int8)
            x = np.zeros(shots, dtype=np.int8)
            for i in range(1, n - 1):
                if i % 2:
                    z ^= read[i]
                else:
                    x ^= read[i]
            if n % 2:
                _gate_with_noise(batch, last, Gate.H, noise, rng)
            batch.apply_pauli_indexed(last, np.where(z == 1, 3, 0))
            batch.depolarize([last], noise.one_qubit_depol, rng, active=z == 1)
            batch.apply_pauli_indexed(last, np.where(x == 1, 1, 0))
            batch.depolarize([last], noise.one_qubit_depol, rng, active=x == 1)
        else:
            for i in range(n - 2, 0, -1):
                idle_layer()
                cond = read[i] == 1
                batch.apply_pauli_indexed(last, np.where(cond, 1, 0))
                batch.depolarize([last], noise.one_qubit_depol, rng, active=cond)
                _gate_with_noise(batch, last, Gate.H, noise, rng)

    read_first, read_last = _tomography_layer(batch, basis_pair, 0, n - 1, noise, rng)
    ints = read_first.astype(np.int64) + (read_last.astype(np.int64) << (n - 1))
    for i in range(1, n - 1):
        ints += read[i].astype(np.int64) << i
    return ints


def _swap_one_basis(n: int, noise: NoiseModel, shots: int, basis_pair: tuple[str, str],
                    rng: np.random.Generator) -> np.ndarray:
    batch = ShotBatch(shots)
    _entangle_pair(batch, noise, rng)
    read = {}
    for k in range(1, n - 1):
        batch.add_qubit(k + 1)
        p_edge = noise.edge_depol(k)
        for control, target in ((k, k + 1), (k + 1, k), (k, k + 1)):
            batch.apply_cnot(control, target)
            batch.depolarize([k, k + 1], p_edge, rng)
        bits = batch.measure_z(k, rng)
        read[k] = batch.readout(bits, noise.qubit_confusion(k), rng)
        batch.drop_qubit(k, bits)
    read_first, read_last = _tomography_layer(batch, basis_pair, 0, n - 1, noise, rng)
    ints = read_first.astype(np.int64) + (read_last.astype(np.int64) << (n - 1))
    for i in range(1, n - 1):
        ints += read[i].astype(np.int64) << i
    return ints


def run_teleportation(path, mode: str, noise: NoiseModel, shots: int,
                      rng: np.random.Generator,
                      simplified_correction: bool = False) -> TransportResult:
    """Sample `shots` trajectories per tomography basis for one teleportation run."""
    path = _as_path(path)
    if mode not in ("dynamic", "postselect"):
        raise ValueError(f"mode must be dynamic or postselect, got {mode}")
    if shots <= 0:
        raise ValueError("shot budget must be positive")
    if path.hops < 1:
        raise ValueError("teleportation needs at least one intermediate qubit")
    result = TransportResult(mode, path, shots)
    basis_rngs = rng.spawn(len(BASIS_PAIRS))
    for pair, basis_rng in zip(BASIS_PAIRS, basis_rngs):
        ints = _teleport_one_basis(path.n, mode, noise, shots, pair, basis_rng,
                                   simplified_correction)
        result.counts_by_basis[pair] = _count(ints)
    return result


def run_swap_transport(path, noise: NoiseModel, shots: int,
                       rng: np.random.Generator) -> TransportResult:
    """Move the pair qubit with SWAP chains (three noisy CNOTs per hop)."""
    path = _as_path(path)
    if shots <= 0:
        raise ValueError("shot budget must be positive")
    if path.hops < 1:
        raise ValueError("swap transport needs at least one intermediate qubit")
    result = TransportResult("swap", path, shots)
    basis_rngs = rng.spawn(len(BASIS_PAIRS))
    for pair, basis_rng in zip(BASIS_PAIRS, basis_rngs):
        ints = _swap_one_basis(path.n, noise, shots, pair, basis_rng)
        result.counts_by_basis[pair] = _count(ints)
    return result


def run_idle_pair(delay_us: float, noise: NoiseModel, shots: int,
                  rng: np.random.Generator) -> TransportResult:
    """Prepare the two-qubit graph state, idle both qubits, then run tomography."""
    if shots <= 0:
        raise ValueError("shot budget must be positive")
    result = TransportResult("idle", PathSpec.line(2), shots)
    for pair, basis_rng in zip(BASIS_PAIRS, rng.spawn(len(BASIS_PAIRS))):
        batch = ShotBatch(shots)
        _entangle_pair(batch, noise, basis_rng)
        for pos in (0, 1):
            t1, t2 = noise.qubit_t1t2(pos)
            batch.idle_decay(pos, delay_us, t1, t2, basis_rng)
        read_first, read_last = _tomography_layer(batch, pair, 0, 1, noise, basis_rng)
        ints = read_first.astype(np.int64) + (read_last.astype(np.int64) << 1)
        result.counts_by_basis[pair] = _count(ints)
    return result


def noisy_pair_density(gate_error: float, one_qubit_depol: float = 0.0) -> np.ndarray:
    """Exact-channel density matrix of the noisily prepared two-qubit graph state."""
    plus = np.full(4, 0.5, dtype=complex)
    rho = np.outer(plus, plus.conj())
    for q in (0, 1):
        rho = depolarizing_channel(rho, (q,), one_qubit_depol)
    cz = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    rho = cz @ rho @ cz.conj().T
    return depolarizing_channel(rho, (0, 1), gate_error)


def exact_pair_distributions(rho: np.ndarray, confusion: Sequence[np.ndarray],
                             one_qubit_depol: float = 0.0) -> dict:
    """Per-basis outcome distributions of a two-qubit state through noisy readout."""
    eye = np.eye(2, dtype=complex)
    out = {}
    for pair in BASIS_PAIRS:
        rotated = rho
        for q, axis in enumerate(pair):
            for g in rotation_gates(axis):
                u = np.kron(GATE_MATRICES[g], eye) if q == 1 else np.kron(eye, GATE_MATRICES[g])
                rotated = u @ rotated @ u.conj().T
                rotated = depolarizing_channel(rotated, (q,), one_qubit_depol)
        out[pair] = readout_channel(np.real(np.diag(rotated)), confusion)
    return out


# ---------------------------------------------------------------------------
# Analytic (infinite-shot, noiseless) evaluation


def _exact_probs(state: PureState) -> dict[tuple[str, str], np.ndarray]:
    return {pair: born_probabilities(state, (0, 1), pair) for pair in BASIS_PAIRS}


def analytic_teleportation(path, mode: str, simplified_correction: bool = False,
                           rng: np.random.Generator | None = None) -> dict:
    """Exact noiseless teleportation outputs.

    For ``dynamic`` the corrected pair state is outcome-independent, so a
    single branch is evaluated (sampled when an rng is given). For
    ``postselect`` one representative branch per reachable configuration is
    evaluated together with its exact weight.
    """
    path = _as_path(path)
    hops = path.hops
    if hops < 1:
        raise ValueError("teleportation needs at least one intermediate qubit")
    if mode == "dynamic":
        if rng is None:
            outcomes = (0,) * hops
        else:
            outcomes = tuple(int(b) for b in rng.integers(0, 2, size=hops))
        state = teleport_pure(path, outcomes)
        state = apply_gates(state, correction_sequence(outcomes, target=1,
                                                       simplified=simplified_correction))
        return {"state": state, "probs_by_basis": _exact_probs(state)}
    if mode == "postselect":
        configs = reachable_configurations(hops)
        branches = {}
        for config in configs:
            outcomes = representative_outcomes(config, hops)
            state = teleport_pure(path, outcomes)
            branches[config] = {
                "weight": 1.0 / len(configs),
                "state": state,
                "probs_by_basis": _exact_probs(state),
            }
        return {"configurations": branches}
    raise ValueError(f"mode must be dynamic or postselect, got {mode}")


def analytic_swap(path) -> dict:
    """Noiseless SWAP transport leaves the pair state exactly in place."""
    path = _as_path(path)
    state = phi_p2()
    return {"state": state, "probs_by_basis": _exact_probs(state)}
