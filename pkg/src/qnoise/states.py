"""Initial states, entanglement witnesses and reference states."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Family(str, Enum):
    GHZ = "GHZ"
    W = "W"


class Coupling(str, Enum):
    CE = "CE"  # one noise realization shared by all qubits
    IE = "IE"  # one independent realization per qubit


def as_family(x) -> Family:
    return x if isinstance(x, Family) else Family(str(x).upper())


def as_coupling(x) -> Coupling:
    return x if isinstance(x, Coupling) else Coupling(str(x).upper())


@dataclass(frozen=True)
class SystemConfig:
    family: Family = Family.GHZ
    coupling: Coupling = Coupling.CE
    q: float = 1.0
    n_qubits: int = 4

    def __post_init__(self):
        object.__setattr__(self, "family", as_family(self.family))
        object.__setattr__(self, "coupling", as_coupling(self.coupling))
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"purity q must lie in [0, 1], got {self.q}")
        if self.n_qubits < 2:
            raise ValueError(f"need at least 2 qubits, got {self.n_qubits}")


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"need at least 2 qubits, got {n}")


def ghz_vector(n: int = 4) -> np.ndarray:
    _check_n(n)
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return v


def w_vector(n: int = 4) -> np.ndarray:
    """Uniform superposition of the single-excitation basis states."""
    _check_n(n)
    v = np.zeros(2**n, dtype=complex)
    v[[1 << k for k in range(n)]] = 1 / np.sqrt(n)
    return v


def state_vector(family, n: int = 4) -> np.ndarray:
    return ghz_vector(n) if as_family(family) is Family.GHZ else w_vector(n)


def projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def maximally_mixed(n: int = 4) -> np.ndarray:
    return np.eye(2**n, dtype=complex) / 2**n


def initial_density(cfg: SystemConfig) -> np.ndarray:
    """Pure target state mixed with white noise: ``(1-q) I/d + q |psi><psi|``."""
    d = 2**cfg.n_qubits
    psi = state_vector(cfg.family, cfg.n_qubits)
    return (1 - cfg.q) / d * np.eye(d, dtype=complex) + cfg.q * projector(psi)


def witness(family, n: int = 4) -> np.ndarray:
    """Projector-based witness for the GHZ or W family."""
    family = as_family(family)
    d = 2**n
    if family is Family.GHZ:
        return 0.5 * np.eye(d, dtype=complex) - projector(ghz_vector(n))
    return (n - 1) / n * np.eye(d, dtype=complex) - projector(w_vector(n))
