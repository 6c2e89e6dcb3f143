"""Random telegraph noise: exact trajectory sampling and the characteristic function.

The fluctuator takes values +1/-1, starts from either with probability 1/2 and
flips at the events of a Poisson process of rate ``gamma``. The accumulated
phase is ``eta(t) = nu * int_0^t theta(s) ds``; since theta is piecewise
constant the integral is evaluated exactly between switch events.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class NoiseParams:
    nu: float = 1.0
    gamma: float = 1.0
    epsilon0: float = 0.0

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")

    @classmethod
    def from_ratio(cls, gamma_over_nu: float, nu: float = 1.0, epsilon0: float = 0.0) -> "NoiseParams":
        return cls(nu=nu, gamma=gamma_over_nu * nu, epsilon0=epsilon0)

    def is_markovian(self, kappa: int) -> bool:
        """True when ``beta(kappa)`` decays without oscillating (gamma > kappa*nu)."""
        return self.gamma > kappa * self.nu


@dataclass(frozen=True)
class TrajectorySample:
    t_grid: np.ndarray
    eta: np.ndarray
    theta0: int
    switch_times: np.ndarray = field(repr=False)

    def theta(self, t) -> np.ndarray:
        """Fluctuator value at time(s) ``t`` (right-continuous)."""
        k = np.searchsorted(self.switch_times, t, side="right")
        return self.theta0 * (1 - 2 * (np.asarray(k) % 2))


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-d sequence")
    if t[0] < 0:
        raise ValueError("time grid must start at t >= 0")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def phase_on_grid(nu: float, theta0: int, switch_times: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Exact ``eta(t)`` for a fluctuator with the given switches."""
    s = np.concatenate(([0.0], switch_times))
    signs = theta0 * (1.0 - 2.0 * (np.arange(s.size) % 2))
    # eta at each switch time, integrating segment by segment
    eta_at_s = np.concatenate(([0.0], np.cumsum(signs[:-1] * np.diff(s)))) * nu
    k = np.searchsorted(s, t, side="right") - 1
    return eta_at_s[k] + nu * signs[k] * (t - s[k])


def draw_switches(p: NoiseParams, horizon: float, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Initial sign and sorted switch times of one fluctuator on ``[0, horizon]``."""
    theta0 = 1 if rng.random() < 0.5 else -1
    n_switch = rng.poisson(p.gamma * horizon) if p.gamma > 0 else 0
    return theta0, np.sort(rng.uniform(0.0, horizon, size=n_switch))


def sample_trajectory(p: NoiseParams, t_grid, rng_seed) -> TrajectorySample:
    """Draw one RTN realization and its accumulated phase on ``t_grid``.

    ``rng_seed`` may be an int, a ``numpy.random.SeedSequence`` or a
    ``Generator``; the result is a deterministic function of it.
    """
    t = _check_grid(t_grid)
    theta0, switch_times = draw_switches(p, t[-1], _rng(rng_seed))
    eta = phase_on_grid(p.nu, theta0, switch_times, t)
    return TrajectorySample(t_grid=t, eta=eta, theta0=theta0, switch_times=switch_times)


def phases_batch(nu: float, theta0: np.ndarray, switches: list, t: np.ndarray) -> np.ndarray:
    """``phase_on_grid`` for many paths at once, shape ``(len(switches), len(t))``.

    Uses ``eta(t) = nu*theta0*(t - 2*sum_{s_i <= t} (-1)**(i-1) (t - s_i))``.
    """
    m = len(switches)
    counts = np.fromiter((s.size for s in switches), dtype=np.int64, count=m)
    starts = np.concatenate(([0], np.cumsum(counts)))
    flat = np.concatenate(switches) if starts[-1] else np.empty(0)
    path = np.repeat(np.arange(m), counts)
    parity = (np.arange(flat.size) - starts[path]) % 2
    alt = np.where(parity == 0, 1.0, -1.0)
    # prefix sums of the alternating signs and signed switch times, with a leading zero
    c = np.concatenate(([0.0], np.cumsum(alt)))
    d = np.concatenate(([0.0], np.cumsum(alt * flat)))
    span = t[-1] + 1.0
    keys = path * span + flat
    queries = np.arange(m)[:, None] * span + t[None, :]
    k = np.searchsorted(keys, queries, side="right")
    c_k = c[k] - c[starts[:-1]][:, None]
    d_k = d[k] - d[starts[:-1]][:, None]
    return nu * np.asarray(theta0, dtype=float)[:, None] * (t[None, :] - 2.0 * (t[None, :] * c_k - d_k))


def child_seed(master_seed: int, *index: int) -> np.random.SeedSequence:
    """Seed for trajectory ``index`` of a run; independent of scheduling."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(i) for i in index))


def sample_phases(p: NoiseParams, t_grid, n_traj: int, master_seed: int, n_paths: int = 1,
                  offset: int = 0) -> np.ndarray:
    """Phases for trajectories ``offset .. offset+n_traj-1``, shape ``(n_traj, n_paths, len(t_grid))``.

    Trajectory ``i`` draws its ``n_paths`` independent paths in order from
    ``child_seed(master_seed, i)``.
    """
    t = _check_grid(t_grid)
    theta0, switches = [], []
    for i in range(offset, offset + n_traj):
        rng = np.random.default_rng(child_seed(master_seed, i))
        for _ in range(n_paths):
            th, s = draw_switches(p, t[-1], rng)
            theta0.append(th)
            switches.append(s)
    return phases_batch(p.nu, np.array(theta0), switches, t).reshape(n_traj, n_paths, t.size)


def beta(kappa: int, p: NoiseParams, t) -> np.ndarray | float:
    """Characteristic function ``<cos(kappa * eta(t))>`` of the RTN phase.

    Accepts scalar or array ``t``. At ``gamma == kappa*nu`` the common limit
    ``exp(-gamma t)(1 + gamma t)`` of both branches is used.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("beta is defined for t >= 0")
    if kappa == 0:
        out = np.ones_like(t_arr)
        return float(out) if out.ndim == 0 else out
    kappa = abs(int(kappa))
    g, w = p.gamma, kappa * p.nu
    damp = np.exp(-g * t_arr)
    if math.isclose(g, w, rel_tol=1e-12, abs_tol=0.0):
        out = damp * (1.0 + g * t_arr)
    elif g > w:
        big = math.sqrt(g * g - w * w)
        # e^{-gt}cosh, e^{-gt}sinh written with e^{-(g-big)t} to avoid overflow
        e1 = np.exp(-(g - big) * t_arr)
        e2 = np.exp(-(g + big) * t_arr)
        out = 0.5 * (e1 + e2) + (g / big) * 0.5 * (e1 - e2)
    else:
        big = math.sqrt(w * w - g * g)
        out = damp * (np.cos(big * t_arr) + (g / big) * np.sin(big * t_arr))
    return float(out) if out.ndim == 0 else out
