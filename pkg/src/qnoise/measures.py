"""Entanglement and distance quantifiers for multi-qubit density matrices."""
from __future__ import annotations

from dataclasses import dataclass, fields
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .linalg import (check_hermitian, hermitian_eigvals, n_qubits_of, partial_transpose,
                     permute_qubits, singular_values, sqrt_psd)
from .rtn import NoiseParams, beta
from .states import Coupling, Family, as_coupling, as_family

DENSITY_TOL = 1e-8
NEG_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class MeasureRecord:
    t: float
    q: float
    gamma_over_nu: float
    family: str
    coupling: str
    negativity: float = float("nan")
    lbc: float = float("nan")
    witness: float = float("nan")
    vn_entropy: float = float("nan")
    linear_entropy: float = float("nan")
    qjsd_init: float = float("nan")
    qjsd_mm: float = float("nan")

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


MEASURE_NAMES = ("negativity", "lbc", "witness", "vn_entropy", "linear_entropy", "qjsd_init", "qjsd_mm")


def check_density(rho: np.ndarray, tol: float = DENSITY_TOL) -> None:
    """Raise ``ValueError`` unless ``rho`` is a Hermitian, unit-trace PSD matrix."""
    rho = np.asarray(rho)
    n_qubits_of(rho)
    check_hermitian(rho)
    tr = np.trace(rho).real
    if abs(tr - 1) > tol:
        raise ValueError(f"density matrix has trace {tr}")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {w[0]:.3e}")


def bipartitions(n: int) -> list[tuple[int, tuple[int, ...]]]:
    """All unordered ``k | n-k`` cuts, ``k = 1 .. n//2``, as ``(k, block)``.

    For ``k = n/2`` each cut is listed once, by the block containing qubit 0.
    """
    if n < 2:
        raise ValueError("need at least 2 qubits")
    out = []
    for k in range(1, n // 2 + 1):
        for block in combinations(range(n), k):
            if 2 * k == n and 0 not in block:
                continue
            out.append((k, block))
    return out


def negativity_bipartition(rho: np.ndarray, part) -> float:
    """Sum of absolute partial-transpose eigenvalues minus one, clamped at 0."""
    check_density(rho)
    lam = hermitian_eigvals(partial_transpose(rho, part))
    val = float(np.sum(np.abs(lam)) - 1.0)
    if val < -NEG_CLAMP_TOL * 1e3:
        raise ValueError(f"negativity {val:.3e} is significantly negative")
    return max(val, 0.0)


def negativity_n(rho: np.ndarray, n: int | None = None) -> float:
    """Average bipartite negativity: ``(2/n) sum_k mean_P N^P[k|n-k]``."""
    n = n_qubits_of(rho) if n is None else n
    if 2**n != np.asarray(rho).shape[0]:
        raise ValueError(f"rho is not a {n}-qubit operator")
    strata: dict[int, list[float]] = {}
    for k, block in bipartitions(n):
        strata.setdefault(k, []).append(negativity_bipartition(rho, block))
    return float(2.0 / n * sum(np.mean(v) for v in strata.values()))


@lru_cache(maxsize=None)
def lbc_operators(n: int) -> tuple[np.ndarray, ...]:
    """``L^(pq) (x) L_0`` for all SO(2**(n-1)) generators, L_0 on the last qubit."""
    d = 2 ** (n - 1)
    l0 = np.array([[0, -1j], [1j, 0]])
    ops = []
    for p, q in combinations(range(d), 2):
        g = np.zeros((d, d), dtype=complex)
        g[p, q], g[q, p] = -1j, 1j
        ops.append(np.kron(g, l0))
    return tuple(ops)


def lbc_terms(rho: np.ndarray, n: int | None = None) -> np.ndarray:
    """Per-cut, per-generator terms ``C_l^(j)``, shape ``(n, L)``."""
    rho = np.asarray(rho)
    check_density(rho)
    n = n_qubits_of(rho) if n is None else n
    if n > 5:
        raise ValueError("LBC is implemented for n <= 5")
    ops = lbc_operators(n)
    out = np.empty((n, len(ops)))
    for j in range(n):
        perm = [k for k in range(n) if k != j] + [j]
        r = permute_qubits(rho, perm)
        sr = sqrt_psd(r)
        srt = sqrt_psd(r.T)
        for ell, s in enumerate(ops):
            lam = singular_values(sr @ s @ srt)
            if lam.size > 4 and lam[4] > 1e-9:
                raise ArithmeticError(f"more than four non-vanishing values: {lam[:6]}")
            out[j, ell] = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
    return out


def lbc(rho: np.ndarray, n: int | None = None) -> float:
    """Lower bound to multi-qubit concurrence, ``sqrt((1/n) sum_j sum_l C_l^(j)**2)``."""
    terms = lbc_terms(rho, n)
    return float(np.sqrt(np.sum(terms**2) / terms.shape[0]))


def witness_expectation(w: np.ndarray, rho: np.ndarray) -> float:
    w, rho = np.asarray(w), np.asarray(rho)
    if w.shape != rho.shape:
        raise ValueError(f"shape mismatch {w.shape} vs {rho.shape}")
    val = np.einsum("ij,ji->", w, rho)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def witness_closed_form(family, coupling, q: float, p: NoiseParams, t) -> float | np.ndarray:
    """Witness expectation along the noisy evolution, written with ``beta_kappa``."""
    family, coupling = as_family(family), as_coupling(coupling)
    b = {k: beta(k, p, t) for k in (2, 4, 6, 8)}
    if family is Family.GHZ and coupling is Coupling.CE:
        return 7 / 16 - 3 * q / 8 * (b[4] + b[8] / 12 + 17 / 12)
    if family is Family.GHZ:
        return 7 / 16 - q / 8 * (b[2] ** 4 + 6 * b[2] ** 2 + 0.5)
    if coupling is Coupling.CE:
        return 11 / 16 - q / 4 * (b[2] + 0.5 * (b[4] + b[8]) + b[6] + 0.75)
    return 11 / 16 - q / 4 * (5 / 8 * b[2] ** 4 + b[2] ** 3 + 0.75 * b[2] ** 2 + b[2] + 3 / 8)


def _entropy_bits(lam: np.ndarray) -> float:
    lam = np.clip(lam, 0.0, 1.0)
    lam = lam[lam > 0]
    return max(float(-np.sum(lam * np.log2(lam))), 0.0) + 0.0  # no -0.0


def vn_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy in bits."""
    check_density(rho)
    return _entropy_bits(hermitian_eigvals(rho))


def qjsd(r1: np.ndarray, r2: np.ndarray) -> float:
    """Quantum Jensen-Shannon divergence in bits, in [0, 1]."""
    r1, r2 = np.asarray(r1), np.asarray(r2)
    if r1.shape != r2.shape:
        raise ValueError(f"shape mismatch {r1.shape} vs {r2.shape}")
    val = vn_entropy(0.5 * (r1 + r2)) - 0.5 * vn_entropy(r1) - 0.5 * vn_entropy(r2)
    return min(max(val, 0.0), 1.0)


def linear_entropy(rho: np.ndarray) -> float:
    """``d/(d-1) (1 - Tr rho^2)``; equals ``16/15 (1 - Tr rho^2)`` for four qubits."""
    rho = np.asarray(rho)
    n_qubits_of(rho)
    d = rho.shape[0]
    purity = float(np.real(np.einsum("ij,ji->", rho, rho)))
    return d / (d - 1) * (1.0 - purity)
