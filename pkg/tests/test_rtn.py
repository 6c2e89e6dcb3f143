import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qnoise.rtn import (NoiseParams, beta, child_seed, draw_switches, phase_on_grid, sample_phases,
                        sample_trajectory)

GRID = np.linspace(0, 20, 201)
REGIMES = [NoiseParams.from_ratio(0.1), NoiseParams.from_ratio(10.0)]


def test_noise_params_validation():
    with pytest.raises(ValueError):
        NoiseParams(nu=0.0)
    with pytest.raises(ValueError):
        NoiseParams(gamma=-1.0)
    p = NoiseParams.from_ratio(3.0, nu=2.0)
    assert p.gamma == 6.0
    assert p.is_markovian(2) and not p.is_markovian(4)


def test_frozen_gamma_gives_linear_phase():
    p = NoiseParams(nu=1.3, gamma=0.0)
    for seed in range(10):
        s = sample_trajectory(p, GRID, seed)
        assert s.switch_times.size == 0
        np.testing.assert_allclose(s.eta, s.theta0 * 1.3 * GRID, rtol=0, atol=1e-12)


def test_grid_validation():
    p = NoiseParams()
    for bad in ([], [0.0, 1.0, 1.0], [0.0, 2.0, 1.0], [-1.0, 0.0]):
        with pytest.raises(ValueError):
            sample_trajectory(p, bad, 0)


def test_trajectory_invariants():
    p = NoiseParams(nu=2.0, gamma=3.0)
    s = sample_trajectory(p, GRID, 7)
    assert s.eta[0] == 0
    assert s.theta0 in (-1, 1)
    assert np.all(np.abs(np.diff(s.eta)) <= 2.0 * np.diff(GRID) + 1e-12)
    assert np.all(np.diff(s.switch_times) > 0)


def test_phase_integrates_piecewise_constant_sign():
    eta = phase_on_grid(1.0, 1, np.array([1.0, 3.0]), np.array([0.0, 1.0, 2.0, 3.0, 4.0, 5.0]))
    np.testing.assert_allclose(eta, [0, 1, 0, -1, 0, 1])


def test_determinism_and_seed_types():
    p = NoiseParams(gamma=0.7)
    a = sample_trajectory(p, GRID, 11)
    b = sample_trajectory(p, GRID, 11)
    c = sample_trajectory(p, GRID, np.random.SeedSequence(11))
    np.testing.assert_array_equal(a.eta, b.eta)
    np.testing.assert_array_equal(a.eta, c.eta)
    assert not np.array_equal(a.eta, sample_trajectory(p, GRID, 12).eta)


def test_batch_matches_single_trajectories():
    p = NoiseParams(gamma=1.5)
    batch = sample_phases(p, GRID, 20, master_seed=5)
    for i in (0, 7, 19):
        single = sample_trajectory(p, GRID, child_seed(5, i))
        np.testing.assert_allclose(batch[i, 0], single.eta, atol=1e-12)
    shifted = sample_phases(p, GRID, 5, master_seed=5, offset=7)
    np.testing.assert_allclose(shifted[0], batch[7], atol=1e-12)


def _sign_stats(gamma, t, tau, m=100_000, seed=3):
    p = NoiseParams(gamma=gamma)
    rng = np.random.default_rng(seed)
    at_t = np.empty(m)
    prod = np.empty(m)
    for k in range(m):
        th0, sw = draw_switches(p, t + tau, rng)
        n1 = np.searchsorted(sw, t, side="right")
        n2 = np.searchsorted(sw, t + tau, side="right")
        at_t[k] = th0 * (-1) ** n1
        prod[k] = (-1) ** (n2 - n1)
    return at_t, prod


def test_sign_mean_and_autocorrelation():
    gamma, t, tau = 0.8, 1.0, 0.6
    at_t, prod = _sign_stats(gamma, t, tau)
    m = at_t.size
    assert abs(at_t.mean()) < 3 / np.sqrt(m)
    expected = np.exp(-2 * gamma * tau)
    sigma = np.sqrt((1 - expected**2) / m)
    assert abs(prod.mean() - expected) < 3 * sigma


def test_theta_method_matches_switches():
    s = sample_trajectory(NoiseParams(gamma=2.0), GRID, 1)
    assert s.theta(0.0) == s.theta0
    if s.switch_times.size:
        assert s.theta(s.switch_times[0]) == -s.theta0


@pytest.mark.parametrize("p", REGIMES + [NoiseParams(gamma=2.0)])
@pytest.mark.parametrize("kappa", [2, 4, 6, 8])
def test_beta_at_zero_and_bounded(p, kappa):
    assert beta(kappa, p, 0.0) == pytest.approx(1.0, abs=1e-15)
    vals = beta(kappa, p, np.linspace(0, 30, 3001))
    assert np.all(np.abs(vals) <= 1 + 1e-12)


@pytest.mark.parametrize("kappa", [2, 4, 8])
def test_beta_frozen_fluctuator(kappa):
    p = NoiseParams(nu=0.7, gamma=0.0)
    np.testing.assert_allclose(beta(kappa, p, GRID), np.cos(kappa * 0.7 * GRID), atol=1e-12)


@pytest.mark.parametrize("p", REGIMES)
@pytest.mark.parametrize("kappa", [2, 4, 6, 8])
def test_beta_flat_start(p, kappa):
    h = 1e-6 / p.nu
    assert abs((beta(kappa, p, h) - 1) / h) < 1e-4


@pytest.mark.parametrize("kappa", [2, 4, 8])
def test_beta_markovian_monotone(kappa):
    p = NoiseParams.from_ratio(10.0)
    vals = beta(kappa, p, np.linspace(0, 30, 3001))
    assert np.all(vals >= 0)
    assert np.all(np.diff(vals) <= 1e-15)


@pytest.mark.parametrize("kappa", [2, 4])
def test_beta_critical_point_is_continuous(kappa):
    t = np.linspace(0, 10, 101)
    at = beta(kappa, NoiseParams(gamma=float(kappa)), t)
    np.testing.assert_allclose(at, np.exp(-kappa * t) * (1 + kappa * t))
    for eps in (1e-6, -1e-6):
        near = beta(kappa, NoiseParams(gamma=kappa * (1 + eps)), t)
        np.testing.assert_allclose(near, at, atol=1e-5)


def test_beta_large_time_does_not_overflow():
    p = NoiseParams.from_ratio(1000.0)
    with np.errstate(over="raise"):
        val = beta(2, p, 1e4)
    assert np.isfinite(val) and 0 < val < 1


def test_beta_kappa_zero_and_negative_time():
    assert beta(0, NoiseParams(), 3.0) == 1.0
    with pytest.raises(ValueError):
        beta(2, NoiseParams(), -0.1)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.floats(0.0, 20.0), st.floats(0.0, 50.0))
def test_beta_bounded_property(kappa, gamma, t):
    assert abs(beta(kappa, NoiseParams(gamma=gamma), t)) <= 1 + 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("p", REGIMES, ids=["non-markovian", "markovian"])
def test_beta_matches_monte_carlo(p):
    m = 100_000
    eta = sample_phases(p, GRID, m, master_seed=99)[:, 0, :]
    for kappa in (2, 4, 8):
        err = np.max(np.abs(beta(kappa, p, GRID) - np.cos(kappa * eta).mean(axis=0)))
        assert err < 4 / np.sqrt(m)
