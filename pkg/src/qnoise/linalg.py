"""Dense linear algebra on multi-qubit Hilbert spaces.

Operators are plain ``numpy`` arrays of shape ``(2**n, 2**n)``. Qubit 0 is the
leftmost tensor factor, so the basis index of ``|b_0 b_1 ... b_{n-1}>`` is
``sum(b_j * 2**(n-1-j))``.
"""
from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10


class DimensionError(ValueError):
    pass


def n_qubits_of(a: np.ndarray) -> int:
    """Number of qubits of a square ``2**n`` operator."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    n = int(a.shape[0]).bit_length() - 1
    if n < 1 or 2**n != a.shape[0]:
        raise DimensionError(f"dimension {a.shape[0]} is not a power of two")
    return n


def qubit_subset(members: Iterable[int], n: int) -> tuple[int, ...]:
    """Validate a set of qubit indices and return it sorted."""
    members = tuple(sorted(int(m) for m in members))
    if not members:
        raise ValueError("qubit subset must be non-empty")
    if len(set(members)) != len(members):
        raise ValueError(f"repeated qubit index in {members}")
    if members[0] < 0 or members[-1] >= n:
        raise ValueError(f"qubit indices {members} out of range for {n} qubits")
    return members


def kron(*ops: np.ndarray) -> np.ndarray:
    return reduce(np.kron, ops)


def partial_transpose(rho: np.ndarray, part: Iterable[int]) -> np.ndarray:
    """Transpose the bra/ket indices of the qubits in ``part``."""
    n = n_qubits_of(rho)
    part = qubit_subset(part, n)
    t = np.asarray(rho).reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for j in part:
        axes[j], axes[n + j] = axes[n + j], axes[j]
    return t.transpose(axes).reshape(2**n, 2**n)


def partial_trace(rho: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Reduced state on the qubits in ``keep`` (kept in ascending order)."""
    n = n_qubits_of(rho)
    keep = qubit_subset(keep, n)
    traced = [j for j in range(n) if j not in keep]
    t = np.asarray(rho).reshape((2,) * (2 * n))
    # move kept row/col axes first, then contract traced row with traced col
    order = list(keep) + traced + [n + j for j in keep] + [n + j for j in traced]
    t = t.transpose(order)
    dk, dt = 2 ** len(keep), 2 ** len(traced)
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def permute_qubits(rho: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Relabel qubits: qubit ``perm[k]`` of ``rho`` becomes qubit ``k`` of the result.

    For two qubits, ``permute_qubits(kron(A, B), (1, 0)) == kron(B, A)``.
    """
    n = n_qubits_of(rho)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of range({n})")
    t = np.asarray(rho).reshape((2,) * (2 * n))
    return t.transpose(perm + [n + p for p in perm]).reshape(2**n, 2**n)


def hermiticity_defect(h: np.ndarray) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T)))


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    defect = hermiticity_defect(h)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian (max |h - h^dag| = {defect:.3e})")


def hermitian_eigvals(h: np.ndarray) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, in descending order."""
    h = np.asarray(h)
    check_hermitian(h)
    return np.linalg.eigvalsh(h)[::-1]


def sqrt_psd(rho: np.ndarray) -> np.ndarray:
    """PSD square root; eigenvalues in ``[-1e-10, 0)`` are clamped to zero."""
    rho = np.asarray(rho)
    check_hermitian(rho)
    w, v = np.linalg.eigh(rho)
    if w[0] < -PSD_TOL:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def singular_values(a: np.ndarray) -> np.ndarray:
    return np.linalg.svd(np.asarray(a), compute_uv=False)


def trace_distance(r1: np.ndarray, r2: np.ndarray) -> float:
    r1, r2 = np.asarray(r1), np.asarray(r2)
    if r1.shape != r2.shape:
        raise DimensionError(f"shape mismatch {r1.shape} vs {r2.shape}")
    diff = r1 - r2
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))
