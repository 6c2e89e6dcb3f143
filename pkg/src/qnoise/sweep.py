"""Parameter sweeps over (gamma/nu, q, nu*t) and table emission.

Times are dimensionless (``nu = 1``) and the switching rate is given as
``gamma/nu``. Rows are ordered by ``(gamma/nu, q, t)``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import measures as M
from .evolution import analytic_series, mc_series
from .linalg import trace_distance
from .rtn import NoiseParams
from .states import Coupling, Family, SystemConfig, as_coupling, as_family, initial_density, maximally_mixed, witness

CSV_COLUMNS = ["t", "q", "gamma_over_nu", "family", "coupling", "negativity", "lbc", "witness",
               "vn_entropy", "linear_entropy", "qjsd_init", "qjsd_mm"]
FORMATS = ("csv", "json", "svg")


@dataclass
class SweepSpec:
    family: Family = Family.GHZ
    coupling: Coupling = Coupling.CE
    q_values: list = field(default_factory=lambda: [1.0])
    gamma_over_nu_values: list = field(default_factory=lambda: [0.1])
    t_max: float = 30.0
    t_steps: int = 301
    measures: frozenset = frozenset(M.MEASURE_NAMES)
    mode: str = "analytic"
    mc_trajectories: int = 20000
    seed: int = 0
    n_qubits: int = 4

    def __post_init__(self):
        self.family = as_family(self.family)
        self.coupling = as_coupling(self.coupling)
        self.q_values = [float(q) for q in self.q_values]
        self.gamma_over_nu_values = [float(g) for g in self.gamma_over_nu_values]
        self.measures = frozenset(self.measures)
        if not self.q_values or not self.gamma_over_nu_values:
            raise ValueError("q and gamma/nu lists must be non-empty")
        if any(not 0 <= q <= 1 for q in self.q_values):
            raise ValueError("q values must lie in [0, 1]")
        if any(g < 0 for g in self.gamma_over_nu_values):
            raise ValueError("gamma/nu must be non-negative")
        if self.t_steps < 2:
            raise ValueError("t_steps must be >= 2")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        unknown = self.measures - set(M.MEASURE_NAMES)
        if unknown:
            raise ValueError(f"unknown measures: {sorted(unknown)}")
        if self.mode not in ("analytic", "mc"):
            raise ValueError(f"mode must be 'analytic' or 'mc', got {self.mode!r}")
        if self.mode == "analytic" and self.n_qubits != 4:
            raise ValueError("analytic mode needs n_qubits == 4")
        if self.mc_trajectories < 1:
            raise ValueError("mc_trajectories must be >= 1")

    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.t_steps)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QNOISE_THREADS", "1")))
    except ValueError:
        return 1


def evolve_grid(spec: SweepSpec, q: float, g: float) -> np.ndarray:
    cfg = SystemConfig(spec.family, spec.coupling, q, spec.n_qubits)
    p = NoiseParams.from_ratio(g)
    if spec.mode == "analytic":
        return analytic_series(cfg, p, spec.t_grid())
    return mc_series(cfg, p, spec.t_grid(), spec.mc_trajectories, spec.seed)


def measure_row(rho, rho0, w, wanted, **keys) -> M.MeasureRecord:
    n = M.n_qubits_of(rho)
    vals = {}
    if "negativity" in wanted:
        vals["negativity"] = M.negativity_n(rho, n)
    if "lbc" in wanted:
        vals["lbc"] = M.lbc(rho, n)
    if "witness" in wanted:
        vals["witness"] = M.witness_expectation(w, rho)
    if "vn_entropy" in wanted:
        vals["vn_entropy"] = M.vn_entropy(rho)
    if "linear_entropy" in wanted:
        vals["linear_entropy"] = M.linear_entropy(rho)
    if "qjsd_init" in wanted:
        vals["qjsd_init"] = M.qjsd(rho, rho0)
    if "qjsd_mm" in wanted:
        vals["qjsd_mm"] = M.qjsd(rho, maximally_mixed(n))
    return M.MeasureRecord(**keys, **vals)


def run_sweep(spec: SweepSpec) -> list[M.MeasureRecord]:
    """One record per grid point, ordered by (gamma/nu, q, t)."""
    t = spec.t_grid()
    w = witness(spec.family, spec.n_qubits)
    blocks = [(g, q) for g in spec.gamma_over_nu_values for q in spec.q_values]
    states = [evolve_grid(spec, q, g) for g, q in blocks]
    jobs = []
    for (g, q), rhos in zip(blocks, states):
        rho0 = initial_density(SystemConfig(spec.family, spec.coupling, q, spec.n_qubits))
        for k, tk in enumerate(t):
            jobs.append((rhos[k], rho0, dict(t=float(tk), q=q, gamma_over_nu=g,
                                             family=spec.family.value, coupling=spec.coupling.value)))

    def work(job):
        rho, rho0, keys = job
        return measure_row(rho, rho0, w, spec.measures, **keys)

    threads = _threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, jobs))
    return [work(j) for j in jobs]


def mc_compare(family, coupling, q_values, gamma_values, times, n_traj: int, seed: int) -> list[dict]:
    """Trace distance and negativity of Monte Carlo vs closed-form states."""
    rows = []
    for g in gamma_values:
        p = NoiseParams.from_ratio(g)
        for q in q_values:
            cfg = SystemConfig(family, coupling, q)
            mc = mc_series(cfg, p, times, n_traj, seed)
            an = analytic_series(cfg, p, times)
            for k, tk in enumerate(times):
                rows.append(dict(t=float(tk), q=float(q), gamma_over_nu=float(g), family=cfg.family.value,
                                 coupling=cfg.coupling.value, trajectories=n_traj,
                                 trace_distance=trace_distance(mc[k], an[k]),
                                 negativity_mc=M.negativity_n(mc[k]), negativity_analytic=M.negativity_n(an[k])))
    return rows


# --------------------------------------------------------------------------
# emission

def _fmt(v) -> str:
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def _as_dicts(table) -> list[dict]:
    return [asdict(r) if isinstance(r, M.MeasureRecord) else dict(r) for r in table]


def _columns(rows: list[dict]) -> list[str]:
    if set(rows[0]) == set(CSV_COLUMNS):
        return CSV_COLUMNS
    return list(rows[0])


def emit(table, fmt: str, measure: str = "negativity", x: str = "t") -> bytes:
    """Serialize a table as CSV, JSON or an SVG line plot of ``measure`` vs ``x``."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    rows = _as_dicts(table)
    if not rows:
        raise ValueError("cannot emit an empty table")
    cols = _columns(rows)
    if fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(cols)
        for r in rows:
            wr.writerow([_fmt(r[c]) for c in cols])
        return buf.getvalue().encode()
    if fmt == "json":
        clean = [{c: (None if isinstance(r[c], float) and math.isnan(r[c]) else r[c]) for c in cols} for r in rows]
        return (json.dumps({"columns": cols, "rows": clean}, indent=1) + "\n").encode()
    return _svg(rows, measure, x)


def read_table(data: bytes, fmt: str) -> list[dict]:
    """Inverse of ``emit`` for CSV and JSON."""
    text = data.decode()
    if fmt == "json":
        obj = json.loads(text)
        return [{c: (float("nan") if r[c] is None else r[c]) for c in obj["columns"]} for r in obj["rows"]]
    if fmt == "csv":
        out = []
        for r in csv.DictReader(io.StringIO(text)):
            out.append({k: (v if k in ("family", "coupling") else _parse_num(v)) for k, v in r.items()})
        return out
    raise ValueError(f"cannot read format {fmt!r}")


def _parse_num(v: str):
    try:
        return int(v)
    except ValueError:
        return float(v)


def _svg(rows: list[dict], measure: str, x: str) -> bytes:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if measure not in rows[0] or x not in rows[0]:
        raise ValueError(f"columns {measure!r}/{x!r} not in table")
    matplotlib.rcParams["svg.hashsalt"] = "qnoise"
    fig, ax = plt.subplots(figsize=(6, 4))
    series: dict = {}
    for r in rows:
        key = (r.get("family"), r.get("coupling"), r.get("q"), r.get("gamma_over_nu"))
        series.setdefault(key, ([], []))
        series[key][0].append(r[x])
        series[key][1].append(r[measure])
    for (fam, cpl, q, g), (xs, ys) in series.items():
        ax.plot(xs, ys, lw=1.2, label=f"{fam}-{cpl} q={q:g} γ/ν={g:g}")
    ax.set_xlabel("νt" if x == "t" else x.replace("_", " "))
    ax.set_ylabel(measure.replace("_", " "))
    ax.legend(fontsize=7)
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()
