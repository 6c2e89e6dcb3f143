import numpy as np
import pytest

from qnoise.linalg import hermitian_eigvals
from qnoise.states import (Coupling, Family, SystemConfig, as_coupling, as_family, ghz_vector,
                           initial_density, maximally_mixed, projector, w_vector, witness)


def test_vectors():
    g, w = ghz_vector(4), w_vector(4)
    assert np.linalg.norm(g) == pytest.approx(1)
    assert np.linalg.norm(w) == pytest.approx(1)
    assert w[1] == pytest.approx(0.5)
    assert w[0b1000] == pytest.approx(0.5)
    assert np.vdot(g, w) == 0
    assert g[0] == g[15] == pytest.approx(1 / np.sqrt(2))
    np.testing.assert_allclose(w_vector(3)[[1, 2, 4]], 1 / np.sqrt(3))
    with pytest.raises(ValueError):
        ghz_vector(1)


def test_enum_parsing():
    assert as_family("ghz") is Family.GHZ
    assert as_coupling("Ie") is Coupling.IE
    with pytest.raises(ValueError):
        as_family("cluster")


def test_config_validation():
    with pytest.raises(ValueError):
        SystemConfig(Family.GHZ, Coupling.CE, q=1.5)
    with pytest.raises(ValueError):
        SystemConfig(Family.W, Coupling.CE, n_qubits=1)
    cfg = SystemConfig("w", "ie", 0.3)
    assert cfg.family is Family.W and cfg.coupling is Coupling.IE


def test_initial_density_examples():
    np.testing.assert_allclose(initial_density(SystemConfig("ghz", "ce", 0.0)), np.eye(16) / 16)
    pure = initial_density(SystemConfig("ghz", "ce", 1.0))
    np.testing.assert_allclose(pure, projector(ghz_vector(4)))
    lam = hermitian_eigvals(initial_density(SystemConfig("ghz", "ce", 0.5)))
    np.testing.assert_allclose(lam, [1 / 32 + 0.5] + [1 / 32] * 15, atol=1e-15)


@pytest.mark.parametrize("family", list(Family))
@pytest.mark.parametrize("q", np.linspace(0, 1, 11))
def test_initial_density_min_eigenvalue(family, q):
    rho = initial_density(SystemConfig(family, "ce", q))
    assert np.trace(rho).real == pytest.approx(1, abs=1e-14)
    assert abs(hermitian_eigvals(rho)[-1] - (1 - q) / 16) < 1e-12


def test_witness_traces():
    wg, ww = witness("ghz"), witness("w")
    assert np.trace(wg @ projector(ghz_vector(4))).real == pytest.approx(-0.5)
    assert np.trace(ww @ projector(w_vector(4))).real == pytest.approx(-0.25)
    assert np.trace(wg @ maximally_mixed(4)).real == pytest.approx(7 / 16)
    np.testing.assert_allclose(wg, wg.conj().T)


def test_maximally_mixed():
    mm = maximally_mixed(4)
    assert np.trace(mm) == pytest.approx(1)
    np.testing.assert_allclose(hermitian_eigvals(mm), np.full(16, 1 / 16))


@pytest.mark.parametrize("family", list(Family))
def test_witness_nonnegative_on_product_states(family):
    rng = np.random.default_rng(17)
    w = witness(family)
    worst = np.inf
    for _ in range(1000):
        v = np.ones(1, dtype=complex)
        for _ in range(4):
            a = rng.normal(size=2) + 1j * rng.normal(size=2)
            v = np.kron(v, a / np.linalg.norm(a))
        worst = min(worst, np.vdot(v, w @ v).real)
    assert worst >= -1e-10
