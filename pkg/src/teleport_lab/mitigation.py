"""Readout error mitigation and probability-simplex projection.

Probability vectors are indexed so that bit i of the outcome index
(weight 2^i) is the i-th measured qubit, matching the simulator and
``channels.readout_channel``.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .channels import check_confusion_matrix


class MitigationError(RuntimeError):
    """Raised when readout mitigation cannot be applied."""


def qrem_correct(p_meas: np.ndarray, confusion: Sequence[np.ndarray]) -> np.ndarray:
    """Invert per-qubit readout confusion, one tensor axis at a time.

    Never materializes the 2^k x 2^k joint matrix; the result keeps unit
    sum but may contain negative entries.
    """
    k = len(confusion)
    p = np.asarray(p_meas, dtype=float)
    if p.shape != (1 << k,):
        raise ValueError(f"expected {1 << k} outcomes for {k} confusion matrices")
    for i, a in enumerate(confusion):
        a = check_confusion_matrix(a)
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        if abs(det) <= 1e-6:
            raise MitigationError(f"confusion matrix for qubit {i} is singular")
        inv = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det
        lo = 1 << i
        view = p.reshape(-1, 2, lo)
        p = np.einsum("ij,ajb->aib", inv, view).reshape(-1)
    return p


def michelot_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex.

    Iteratively shifts the active entries by the common slack and drops
    the ones that fall to zero or below, until all retained entries
    exceed the shift.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("input must be a non-empty 1-d vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("input must be finite")
    active = np.ones(v.size, dtype=bool)
    n_active = v.size
    while True:
        shift = (v[active].sum() - 1.0) / n_active
        keep = v > shift
        keep &= active
        n_keep = int(keep.sum())
        if n_keep == n_active or n_keep == 0:
            break
        active = keep
        n_active = n_keep
    out = np.where(active, np.maximum(v - shift, 0.0), 0.0)
    return out


def estimate_confusion_matrices(true_confusion: Sequence[np.ndarray], shots: int,
                                rng: np.random.Generator) -> list[np.ndarray]:
    """Calibrate per-qubit confusion matrices from simulated readout shots.

    Prepares the all-zeros and all-ones registers ``shots`` times each and
    counts per-qubit flips, assuming independent qubits.
    """
    if shots <= 0:
        raise ValueError("calibration needs a positive shot count")
    k = len(true_confusion)
    p_read1_prep0 = np.array([check_confusion_matrix(a)[1, 0] for a in true_confusion])
    p_read1_prep1 = np.array([check_confusion_matrix(a)[1, 1] for a in true_confusion])
    flips0 = (rng.random((shots, k)) < p_read1_prep0).sum(axis=0)
    flips1 = (rng.random((shots, k)) >= p_read1_prep1).sum(axis=0)
    out = []
    for q in range(k):
        e01 = flips0[q] / shots
        e10 = flips1[q] / shots
        out.append(np.array([[1.0 - e01, e10], [e01, 1.0 - e10]]))
    return out
