import numpy as np
import pytest

from qnoise.linalg import kron
from qnoise.states import Coupling, Family, SystemConfig, initial_density

SX = np.array([[0, 1], [1, 0]], dtype=complex)
HAD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def exact_average(cfg: SystemConfig, b: dict) -> np.ndarray:
    """Noise average built from channels rather than tables.

    IE: each qubit sees an independent bit flip with probability (1 - b2)/2.
    CE: one shared phase, so in the X basis entry (i, j) is damped by
    b_|m_i - m_j| where m is the total X magnetization.
    """
    rho = initial_density(cfg).astype(complex)
    n = cfg.n_qubits
    if cfg.coupling is Coupling.IE:
        for j in range(n):
            xj = kron(*[SX if k == j else np.eye(2) for k in range(n)])
            rho = (1 + b[2]) / 2 * rho + (1 - b[2]) / 2 * xj @ rho @ xj
        return rho
    h = kron(*[HAD] * n)
    m = np.array([sum(1 - 2 * int(c) for c in format(i, f"0{n}b")) for i in range(2**n)])
    damp = np.array([[1.0 if a == c else b[abs(a - c)] for c in m] for a in m])
    return h @ ((h @ rho @ h) * damp) @ h


VARIANTS = [(f, c) for f in Family for c in Coupling]


@pytest.fixture(params=VARIANTS, ids=lambda v: f"{v[0].value}-{v[1].value}")
def variant(request):
    return request.param
