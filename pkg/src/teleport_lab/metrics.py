"""Entanglement and quality measures on two-qubit density matrices.

Density matrices are plain 4x4 complex ndarrays indexed with the same
bit convention as the simulator: the first qubit of the pair is the
least significant bit of the row/column index.
"""
from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-9
TRACE_TOL = 1e-9


def check_density_matrix(rho: np.ndarray, atol: float = HERMITICITY_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > max(atol, TRACE_TOL) or abs(np.trace(rho).imag) > atol:
        raise ValueError(f"density matrix trace is {np.trace(rho)}, expected 1")
    return rho


def density_from_state(amplitudes: np.ndarray) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex)
    return np.outer(v, v.conj())


def hermitian_eigensystem(matrix: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60):
    """Eigenvalues and eigenvectors of a Hermitian matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvectors as columns). Self-contained so
    that library eigensolvers remain available as independent test oracles.
    """
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if np.max(np.abs(a - a.conj().T)) > 1e-8 * max(1.0, np.max(np.abs(a))):
        raise ValueError("matrix is not Hermitian")
    a = (a + a.conj().T) / 2.0
    v = np.eye(n, dtype=complex)
    scale = max(np.max(np.abs(a)), 1e-300)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = abs(a[p, q])
                off = max(off, beta)
                if beta <= tol * scale:
                    continue
                phase = a[p, q] / beta
                app, aqq = a[p, p].real, a[q, q].real
                if app == aqq:
                    t = 1.0
                else:
                    tau = (app - aqq) / (2.0 * beta)
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # Plane rotation R: R[p,p]=c, R[p,q]=-s*phase, R[q,p]=s*conj(phase), R[q,q]=c
                rp = c * a[:, p] + s * np.conj(phase) * a[:, q]
                rq = -s * phase * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rp, rq
                rp = c * a[p, :] + s * phase * a[q, :]
                rq = -s * np.conj(phase) * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rp, rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = c * v[:, p] + s * np.conj(phase) * v[:, q]
                vq = -s * phase * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = vp, vq
        if off <= tol * scale:
            break
    eigvals = np.real(np.diag(a))
    order = np.argsort(eigvals, kind="stable")
    return eigvals[order], v[:, order]


def partial_transpose(rho: np.ndarray, subsystem: int = 0) -> np.ndarray:
    """Transpose the indices of one qubit of a two-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("partial_transpose expects a 4x4 matrix")
    if subsystem not in (0, 1):
        raise ValueError("subsystem must be 0 or 1")
    # reshape axes: (row hi bit, row lo bit, col hi bit, col lo bit)
    t = rho.reshape(2, 2, 2, 2)
    if subsystem == 0:  # low bit
        t = t.transpose(0, 3, 2, 1)
    else:
        t = t.transpose(2, 1, 0, 3)
    return t.reshape(4, 4)


def negativity(rho: np.ndarray) -> float:
    """Absolute sum of negative eigenvalues of the partial transpose (first qubit).

    Eigenvalues within the eigensolver tolerance of zero do not count, so
    separable product states report exactly 0.
    """
    rho = check_density_matrix(rho)
    eigvals, _ = hermitian_eigensystem(partial_transpose(rho, 0))
    neg = abs(float(eigvals[eigvals < -1e-12].sum()))
    return float(min(neg, 0.5))


def fidelity(rho: np.ndarray, ideal: np.ndarray) -> float:
    """Overlap tr(rho . ideal) against a pure-state projector."""
    rho = check_density_matrix(rho, atol=1e-6)
    ideal = np.asarray(ideal, dtype=complex)
    if np.max(np.abs(ideal @ ideal - ideal)) > 1e-6:
        raise ValueError("ideal state must be an idempotent (pure) projector")
    value = np.trace(rho @ ideal)
    if abs(value.imag) > 1e-9:
        raise ValueError(f"fidelity has a non-real value {value}")
    return float(min(max(value.real, 0.0), 1.0))


def project_eigenvalues(eigvals: np.ndarray) -> np.ndarray:
    """Closest probability-simplex point to a unit-sum eigenvalue list.

    Repeatedly zeroes the most negative eigenvalue and spreads the deficit
    uniformly over the remaining ones.
    """
    vals = sorted((float(x) for x in eigvals), reverse=True)
    d = len(vals)
    out = [0.0] * d
    acc = 0.0
    i = d
    while i > 0 and vals[i - 1] + acc / i < 0:
        acc += vals[i - 1]
        i -= 1
    for j in range(i):
        out[j] = vals[j] + acc / i
    return np.array(out)


def nearest_physical(rho_raw: np.ndarray) -> np.ndarray:
    """Closest PSD unit-trace matrix in Frobenius norm, eigenvectors unchanged."""
    rho_raw = np.asarray(rho_raw, dtype=complex)
    if np.max(np.abs(rho_raw - rho_raw.conj().T)) > 1e-6:
        raise ValueError("input must be Hermitian within 1e-6")
    if abs(np.trace(rho_raw) - 1.0) > 1e-6:
        raise ValueError("input must have unit trace within 1e-6")
    eigvals, vecs = hermitian_eigensystem(rho_raw)  # ascending
    if eigvals[0] >= 0:
        return (rho_raw + rho_raw.conj().T) / 2.0
    clipped = project_eigenvalues(eigvals)[::-1].astype(complex)  # back to ascending
    rho = vecs @ np.diag(clipped) @ vecs.conj().T
    return (rho + rho.conj().T) / 2.0
