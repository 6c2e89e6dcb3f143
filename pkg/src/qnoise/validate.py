"""Self-validation: every acceptance check, run against a grid preset.

``run_validate`` returns a ``Report``; ``report.ok`` is true iff every check
passed. ``REQUIRED_CHECKS`` is the inventory a preset must cover.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from . import measures as M
from .evolution import AnalyticStateError, analytic_series, check_analytic_state, mc_series
from .linalg import hermiticity_defect, trace_distance
from .rtn import NoiseParams, beta, sample_phases
from .states import Coupling, Family, SystemConfig, witness

VARIANTS = [(f, c) for f in Family for c in Coupling]

REQUIRED_CHECKS = (
    "witness_closed_form",
    "detection_thresholds",
    "mc_vs_analytic",
    "pure_state_values",
    "regime_behaviour",
    "stationary_ordering",
    "state_validity",
    "beta_mc",
    "trajectory_monotonicity",
    "lbc_bound",
)


class UsageError(ValueError):
    pass


@dataclass
class Check:
    name: str
    value: float
    bound: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: value={self.value:.6g} bound={self.bound} {self.detail}".rstrip()


@dataclass
class Report:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[dict]:
        return [dict(name=c.name, value=c.value, bound=c.bound, detail=c.detail) for c in self.checks if not c.passed]

    def text(self) -> str:
        return "\n".join(c.line() for c in self.checks)


@dataclass(frozen=True)
class Preset:
    q_values: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    t_grid: tuple = tuple(np.round(np.arange(301) * 0.1, 10))
    gamma_values: tuple = (0.1, 10.0)
    mc_trajectories: int = 20000
    mc_times: tuple = (1.0, 5.0, 10.0)
    mc_q_values: tuple = (0.5, 1.0)
    beta_trajectories: int = 100000
    beta_tol: float = 0.012
    beta_t_max: float = 20.0
    lbc_samples: int = 500
    seed: int = 2024
    checks: tuple = REQUIRED_CHECKS


PRESETS = {
    "default": Preset(),
    # same checks and tolerances on smaller Monte Carlo runs; beta bound is 4/sqrt(M)
    "quick": Preset(mc_times=(5.0,), mc_q_values=(1.0,), beta_trajectories=20000,
                    beta_tol=4 / np.sqrt(20000), lbc_samples=100),
}


# --------------------------------------------------------------------------
# oracles

def wootters_concurrence(rho: np.ndarray) -> float:
    """Two-qubit concurrence from the spin-flipped spectrum."""
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    r = rho @ yy @ rho.conj() @ yy
    lam = np.sqrt(np.clip(np.sort(np.linalg.eigvals(r).real)[::-1], 0, None))
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_mixed_two_qubit(rng: np.random.Generator) -> np.ndarray:
    """Full-rank state: a random pure state blended with a Hilbert-Schmidt random state.

    Full rank keeps the spin-flip spectrum away from zero, where square roots
    would amplify roundoff to ~1e-8.
    """
    p = rng.uniform(0.0, 0.95)
    return p * random_density(4, rng, rank=1) + (1 - p) * random_density(4, rng)


def witness_root(family, coupling, p: NoiseParams, t: float) -> float:
    """Purity at which the closed-form witness expectation crosses zero (linear in q)."""
    at0 = M.witness_closed_form(family, coupling, 0.0, p, t)
    at1 = M.witness_closed_form(family, coupling, 1.0, p, t)
    return at0 / (at0 - at1)


def refined_minimum(f, t_grid: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Minimum of ``f`` near the smallest sampled value, refined between neighbours."""
    k = int(np.argmin(values))
    lo, hi = t_grid[max(k - 1, 0)], t_grid[min(k + 1, len(t_grid) - 1)]
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    if res.fun < values[k]:
        return float(res.x), float(res.fun)
    return float(t_grid[k]), float(values[k])


# --------------------------------------------------------------------------
# checks

def _series(pre, family, coupling, q, g, overrides=None, t=None):
    return analytic_series(SystemConfig(family, coupling, q), NoiseParams.from_ratio(g),
                           pre.t_grid if t is None else t, coefficient_overrides=overrides, check=False)


def check_witness_closed_form(pre: Preset, overrides=None) -> Check:
    worst, where = 0.0, ""
    t = np.asarray(pre.t_grid)
    for fam, cpl in VARIANTS:
        w = witness(fam)
        for g in pre.gamma_values:
            for q in pre.q_values:
                rho = _series(pre, fam, cpl, q, g, (overrides or {}).get((fam, cpl)))
                num = np.einsum("ij,tji->t", w, rho).real
                ref = M.witness_closed_form(fam, cpl, q, NoiseParams.from_ratio(g), t)
                err = float(np.max(np.abs(num - ref)))
                if err > worst:
                    worst, where = err, f"{fam.value}-{cpl.value} q={q} g={g}"
    return Check("witness_closed_form", worst, "< 1e-10", worst < 1e-10, where)


def check_detection_thresholds(pre: Preset) -> Check:
    p = NoiseParams.from_ratio(1.0)
    errs = []
    for fam, target, quoted in ((Family.GHZ, 7 / 15, 0.4667), (Family.W, 11 / 15, 0.7333)):
        for cpl in Coupling:
            r = witness_root(fam, cpl, p, 0.0)
            errs.append(abs(r - target))
            errs.append(0.0 if round(r, 4) == quoted else 1.0)
    # long-time CE limit: every beta -> 0
    late = witness_root(Family.GHZ, Coupling.CE, NoiseParams.from_ratio(10.0), 200.0)
    ok = max(errs) < 1e-9 and abs(late - 14 / 17) < 1e-9 and 0.815 <= late <= 0.830
    return Check("detection_thresholds", max(errs + [abs(late - 14 / 17)]), "< 1e-9 and long-time root in [0.815, 0.830]",
                 ok, f"long-time GHZ-CE root={late:.6f}")


def check_mc_vs_analytic(pre: Preset) -> Check:
    worst, where = 0.0, ""
    for fam, cpl in VARIANTS:
        for g in pre.gamma_values:
            for q in pre.mc_q_values:
                cfg = SystemConfig(fam, cpl, q)
                p = NoiseParams.from_ratio(g)
                mc = mc_series(cfg, p, pre.mc_times, pre.mc_trajectories, pre.seed)
                an = analytic_series(cfg, p, pre.mc_times)
                for k, tk in enumerate(pre.mc_times):
                    d = trace_distance(mc[k], an[k])
                    if d > worst:
                        worst, where = d, f"{fam.value}-{cpl.value} q={q} g={g} t={tk}"
    return Check("mc_vs_analytic", worst, "< 0.02", worst < 0.02, where)


def check_pure_state_values(pre: Preset) -> Check:
    from .states import projector, state_vector

    ghz, w = projector(state_vector("GHZ")), projector(state_vector("W"))
    errs = [abs(M.negativity_n(ghz) - 1), abs(M.negativity_n(w) - (1 + np.sqrt(3) / 2) / 2),
            abs(M.lbc(ghz) - 1), abs(M.lbc(w) - np.sqrt(3) / 2)]
    return Check("pure_state_values", max(errs), "< 1e-9", max(errs) < 1e-9)


def _neg_series(pre, fam, cpl, q, g, t=None):
    return np.array([M.negativity_n(r) for r in _series(pre, fam, cpl, q, g, t=t)])


def check_regime_behaviour(pre: Preset) -> Check:
    t = np.asarray(pre.t_grid)
    msgs, ok = [], True
    # (a) GHZ-CE Markovian plateau
    a = _neg_series(pre, Family.GHZ, Coupling.CE, 1.0, 10.0)
    late = a[(t >= 20) & (t <= 30)]
    var = float(late.max() - late.min())
    ok &= var < 1e-3 and late.min() > 0.1
    msgs.append(f"a:var={var:.2e},min={late.min():.3f}")
    # (b) GHZ-IE Markovian decay
    b = float(M.negativity_n(_series(pre, Family.GHZ, Coupling.IE, 1.0, 10.0, t=[30.0])[0]))
    ok &= b < 1e-3
    msgs.append(f"b:N(30)={b:.2e}")
    # (c) GHZ-IE non-Markovian death and revival
    c = _neg_series(pre, Family.GHZ, Coupling.IE, 1.0, 0.1)
    early = t < 10
    p = NoiseParams.from_ratio(0.1)
    cfg = SystemConfig("GHZ", "IE", 1.0)

    def neg_at(tt):
        return M.negativity_n(analytic_series(cfg, p, [tt], check=False)[0])

    t_min, n_min = refined_minimum(neg_at, t[early], c[early])
    revival = float(c[t > t_min].max()) if np.any(t > t_min) else 0.0
    ok &= n_min <= 1e-6 and t_min < 10 and revival > 0.01
    msgs.append(f"c:min={n_min:.1e}@{t_min:.4f},revival={revival:.3f}")
    # (d) W-CE stationary witness never detects
    w_stat = min(11 / 16 - q * 3 / 16 for q in np.linspace(0, 1, 101))
    w_late = min(float(M.witness_closed_form("W", "CE", q, NoiseParams.from_ratio(g), 1e3))
                 for q in pre.q_values for g in pre.gamma_values)
    ok &= w_stat > 0 and w_late > 0
    msgs.append(f"d:min stationary W={min(w_stat, w_late):.4f}")
    return Check("regime_behaviour", float(ok), "all of (a)-(d)", bool(ok), " ".join(msgs))


def check_stationary_ordering(pre: Preset) -> Check:
    worst = np.inf
    for fam in Family:
        for g in pre.gamma_values:
            rho = _series(pre, fam, Coupling.CE, 1.0, g, t=[30.0])[0]
            worst = min(worst, M.negativity_n(rho) - M.lbc(rho))
    return Check("stationary_ordering", worst, ">= -1e-9", worst >= -1e-9, "min(N - C) over CE, t=30")


def check_state_validity(pre: Preset) -> Check:
    bad, worst_tr, worst_h, min_eig = [], 0.0, 0.0, np.inf
    for fam, cpl in VARIANTS:
        for g in pre.gamma_values:
            for q in pre.q_values:
                rho = _series(pre, fam, cpl, q, g)
                for k, r in enumerate(rho):
                    worst_tr = max(worst_tr, abs(np.trace(r).real - 1))
                    worst_h = max(worst_h, hermiticity_defect(r))
                    min_eig = min(min_eig, np.linalg.eigvalsh(r)[0])
                    try:
                        check_analytic_state(r, label=f"{fam.value}-{cpl.value} q={q} g={g} t={pre.t_grid[k]}",
                                             trace_tol=1e-12, herm_tol=1e-12, eig_tol=1e-9)
                    except AnalyticStateError as e:
                        bad.append(str(e))
    ok = not bad
    return Check("state_validity", float(len(bad)), "0 violations", ok,
                 f"trace={worst_tr:.1e} herm={worst_h:.1e} min_eig={min_eig:.1e}" + (f" first: {bad[0]}" if bad else ""))


def check_beta_mc(pre: Preset) -> Check:
    t = np.linspace(0, pre.beta_t_max, 201)
    worst, where = 0.0, ""
    for g in pre.gamma_values:
        p = NoiseParams.from_ratio(g)
        eta = sample_phases(p, t, pre.beta_trajectories, pre.seed)[:, 0, :]
        for kappa in (2, 4, 8):
            diff = float(np.max(np.abs(np.cos(kappa * eta).mean(axis=0) - beta(kappa, p, t))))
            if diff > worst:
                worst, where = diff, f"kappa={kappa} g={g}"
    return Check("beta_mc", worst, f"< {pre.beta_tol:.4g}", worst < pre.beta_tol, where)


def check_trajectory_monotonicity(pre: Preset) -> Check:
    from .states import initial_density, maximally_mixed

    worst = 0.0
    for fam in Family:
        cfg = SystemConfig(fam, Coupling.IE, 1.0)
        rho0, mm = initial_density(cfg), maximally_mixed()
        rhos = _series(pre, fam, Coupling.IE, 1.0, max(pre.gamma_values))
        d_init = np.array([M.qjsd(r, rho0) for r in rhos])
        d_mm = np.array([M.qjsd(r, mm) for r in rhos])
        s_l = np.array([M.linear_entropy(r) for r in rhos])
        worst = max(worst, -np.diff(d_init).min(), np.diff(d_mm).max(), -np.diff(s_l).min())
    return Check("trajectory_monotonicity", worst, "<= 1e-6 per step", worst <= 1e-6, "IE, Markovian, q=1")


def check_lbc_bound(pre: Preset) -> Check:
    rng = np.random.default_rng(pre.seed)
    worst = -np.inf
    for k in range(pre.lbc_samples):
        rho = random_mixed_two_qubit(rng)
        worst = max(worst, M.lbc(rho) - wootters_concurrence(rho))
    return Check("lbc_bound", worst, "<= 1e-9", worst <= 1e-9, f"{pre.lbc_samples} random two-qubit states")


CHECKS = {
    "witness_closed_form": check_witness_closed_form,
    "detection_thresholds": check_detection_thresholds,
    "mc_vs_analytic": check_mc_vs_analytic,
    "pure_state_values": check_pure_state_values,
    "regime_behaviour": check_regime_behaviour,
    "stationary_ordering": check_stationary_ordering,
    "state_validity": check_state_validity,
    "beta_mc": check_beta_mc,
    "trajectory_monotonicity": check_trajectory_monotonicity,
    "lbc_bound": check_lbc_bound,
}


def run_validate(preset="default", coefficient_overrides=None, **overrides) -> Report:
    """Run every check of ``preset``; keyword overrides replace preset fields.

    ``coefficient_overrides`` maps ``(family, coupling)`` to token overrides for
    the closed-form tables and is meant for sensitivity probes.
    """
    pre = PRESETS[preset] if isinstance(preset, str) else preset
    if overrides:
        pre = replace(pre, **overrides)
    if not pre.t_grid or not pre.q_values or not pre.gamma_values or not pre.mc_times:
        raise UsageError("validation grid is empty")
    missing = set(REQUIRED_CHECKS) - set(pre.checks)
    if missing:
        raise UsageError(f"preset is missing checks: {sorted(missing)}")
    report = Report()
    for name in pre.checks:
        start = time.perf_counter()
        if name == "witness_closed_form":
            chk = CHECKS[name](pre, coefficient_overrides)
        else:
            chk = CHECKS[name](pre)
        chk.seconds = time.perf_counter() - start
        report.checks.append(chk)
    return report
