import json

import numpy as np
import pytest

from qnoise import cli, measures as M
from qnoise.evolution import analytic_series
from qnoise.rtn import NoiseParams
from qnoise.states import SystemConfig
from qnoise.sweep import CSV_COLUMNS, SweepSpec, emit, mc_compare, read_table, run_sweep
from qnoise.validate import PRESETS, REQUIRED_CHECKS, UsageError, refined_minimum, run_validate

HEADER = b"t,q,gamma_over_nu,family,coupling,negativity,lbc,witness,vn_entropy,linear_entropy,qjsd_init,qjsd_mm\n"


def small_spec(**kw):
    base = dict(family="GHZ", coupling="IE", q_values=[0.5, 1.0], gamma_over_nu_values=[0.1, 10.0],
                t_max=3.0, t_steps=4)
    base.update(kw)
    return SweepSpec(**base)


def test_spec_validation():
    for bad in (dict(t_steps=1), dict(q_values=[1.2]), dict(q_values=[]), dict(measures={"bogus"}),
                dict(mode="euler"), dict(t_max=0.0), dict(gamma_over_nu_values=[-1.0])):
        with pytest.raises(ValueError):
            small_spec(**bad)
    with pytest.raises(ValueError):
        small_spec(n_qubits=3)
    small_spec(n_qubits=3, mode="mc")


def test_rows_ordered_by_gamma_q_t():
    rows = run_sweep(small_spec())
    keys = [(r.gamma_over_nu, r.q, r.t) for r in rows]
    assert keys == sorted(keys)
    assert len(rows) == 2 * 2 * 4


def test_unrequested_measures_are_nan():
    rows = run_sweep(small_spec(measures={"witness"}))
    assert all(np.isnan(r.lbc) and not np.isnan(r.witness) for r in rows)


def test_csv_shape_and_header():
    spec = SweepSpec("GHZ", "CE", [1.0], [10.0], t_max=30.0, t_steps=300, measures={"negativity", "witness"})
    data = emit(run_sweep(spec), "csv")
    lines = data.splitlines(keepends=True)
    assert len(lines) == 301
    assert lines[0] == HEADER
    assert b"np.float64" not in data and b"-0.0," not in data


def test_csv_reals_round_trip_exactly():
    rows = run_sweep(small_spec())
    back = read_table(emit(rows, "csv"), "csv")
    for r, b in zip(rows, back):
        assert list(b) == CSV_COLUMNS
        assert b["negativity"] == r.negativity and b["qjsd_mm"] == r.qjsd_mm


def test_json_round_trip():
    rows = run_sweep(small_spec(measures={"negativity", "lbc"}))
    data = emit(rows, "json")
    assert json.loads(data)["columns"] == CSV_COLUMNS
    back = read_table(data, "json")
    for r, b in zip(rows, back):
        for c in CSV_COLUMNS:
            v = getattr(r, c)
            if isinstance(v, float) and np.isnan(v):
                assert np.isnan(b[c])
            else:
                assert b[c] == v


def test_emit_errors():
    with pytest.raises(ValueError):
        emit([], "csv")
    with pytest.raises(ValueError):
        emit(run_sweep(small_spec()), "xlsx")


def test_svg_has_axis_labels():
    svg = emit(run_sweep(small_spec()), "svg", measure="negativity").decode()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg
    assert "negativity" in svg and "νt" in svg
    assert emit(run_sweep(small_spec()), "svg") == emit(run_sweep(small_spec()), "svg")


def test_byte_identical_across_thread_counts(monkeypatch):
    spec = small_spec(mode="mc", mc_trajectories=700, seed=4, measures={"negativity", "qjsd_init"})
    monkeypatch.setenv("QNOISE_THREADS", "1")
    one = emit(run_sweep(spec), "csv")
    monkeypatch.setenv("QNOISE_THREADS", "4")
    four = emit(run_sweep(spec), "csv")
    assert one == four
    assert emit(run_sweep(spec), "csv") == four


def test_ghz_ce_plateau():
    spec = SweepSpec("GHZ", "CE", [1.0], [10.0], t_max=30.0, t_steps=300, measures={"negativity"})
    neg = np.array([r.negativity for r in run_sweep(spec)])
    tail = neg[-50:]
    assert tail.max() - tail.min() < 1e-3
    assert tail.min() > 0.1


def test_ghz_ie_sudden_death_and_revival():
    spec = SweepSpec("GHZ", "IE", [1.0], [0.1], t_max=30.0, t_steps=300, measures={"negativity"})
    t = spec.t_grid()
    neg = np.array([r.negativity for r in run_sweep(spec)])
    k = int(np.argmin(neg[t < 10]))
    assert neg[k] < 1e-3
    assert neg[k:].max() > 0.01
    # the zeros are isolated points; locate one between grid nodes
    cfg = SystemConfig("GHZ", "IE", 1.0)
    p = NoiseParams.from_ratio(0.1)
    f = lambda x: M.negativity_n(analytic_series(cfg, p, [x])[0])
    t_star, n_star = refined_minimum(f, t[t < 10], neg[t < 10])
    assert n_star <= 1e-6 and t_star < 10
    assert neg[t > t_star].max() > 0.01


@pytest.mark.slow
def test_mc_sweep_tracks_analytic():
    kw = dict(family="GHZ", coupling="IE", q_values=[1.0], gamma_over_nu_values=[0.1, 10.0], t_max=10.0,
              t_steps=11, measures={"negativity"})
    an = run_sweep(SweepSpec(**kw))
    mc = run_sweep(SweepSpec(**kw, mode="mc", mc_trajectories=20000, seed=1))
    assert max(abs(a.negativity - m.negativity) for a, m in zip(an, mc)) < 0.03


def test_mc_compare_rows():
    rows = mc_compare("W", "CE", [1.0], [10.0], np.array([0.5, 1.0]), 400, 0)
    assert len(rows) == 2
    assert {"trace_distance", "negativity_mc", "negativity_analytic"} <= set(rows[0])
    assert all(r["trace_distance"] < 0.2 for r in rows)


# --------------------------------------------------------------------------
# command line

def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_sweep_stdout(capsys):
    code, out, _ = run(capsys, "sweep", "--q", "1", "--gamma-ratio", "10", "--t-steps", "3", "--t-max", "2")
    assert code == 0
    assert out.splitlines()[0] + "\n" == HEADER.decode()
    assert len(out.splitlines()) == 4


def test_cli_usage_errors(capsys, tmp_path):
    assert run(capsys, "sweep", "--t-steps", "1")[0] == 1
    assert run(capsys, "sweep", "--q", "2")[0] == 1
    assert run(capsys, "sweep", "--config", str(tmp_path / "missing.json"))[0] == 1
    with pytest.raises(SystemExit) as e:
        cli.main(["frobnicate"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        cli.main(["sweep", "--family", "cluster"])
    assert e.value.code == 1


def test_cli_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"family": "w", "coupling": "ie", "q": [0.5], "gamma-ratio": "10",
                               "t_steps": 3, "t_max": 1.0, "measures": "witness"}))
    code, out, _ = run(capsys, "sweep", "--config", str(cfg))
    assert code == 0
    assert out.splitlines()[1].split(",")[3:5] == ["W", "IE"]
    code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--coupling", "ce", "--q", "0.25,1")
    body = [line.split(",") for line in out.splitlines()[1:]]
    assert {r[4] for r in body} == {"CE"}
    assert {r[1] for r in body} == {"0.25", "1.0"}
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert run(capsys, "sweep", "--config", str(cfg))[0] == 1


def test_cli_writes_files(capsys, tmp_path):
    out = tmp_path / "n.json"
    assert run(capsys, "sweep", "--t-steps", "2", "--t-max", "1", "--format", "json", "--out", str(out))[0] == 0
    assert json.loads(out.read_text())["columns"] == CSV_COLUMNS
    svg = tmp_path / "traj.svg"
    code = run(capsys, "trajectory", "--family", "w", "--gamma-ratio", "10", "--t-steps", "4",
               "--format", "svg", "--out", str(svg), "--plot-measure", "qjsd_mm")[0]
    assert code == 0
    text = svg.read_text()
    assert "linear entropy" in text and "qjsd mm" in text


def test_cli_trajectory_csv_has_both_couplings(capsys):
    code, out, _ = run(capsys, "trajectory", "--t-steps", "3", "--t-max", "1", "--gamma-ratio", "10")
    assert code == 0
    assert {line.split(",")[4] for line in out.splitlines()[1:]} == {"CE", "IE"}


def test_cli_mc_compare(capsys):
    code, out, _ = run(capsys, "mc-compare", "--trajectories", "300", "--times", "1", "--q", "1",
                       "--gamma-ratio", "10")
    assert code == 0
    assert out.startswith("t,q,gamma_over_nu,family,coupling,trajectories,trace_distance")
    assert run(capsys, "mc-compare", "--format", "svg", "--trajectories", "10", "--times", "1")[0] == 1


def test_cli_validate_failure_exit_code(capsys, monkeypatch):
    import qnoise.validate as V

    def failing(pre, overrides=None):
        return V.Check("witness_closed_form", 1.0, "< 1e-10", False)

    monkeypatch.setitem(V.CHECKS, "witness_closed_form", failing)
    for name in REQUIRED_CHECKS[1:]:
        monkeypatch.setitem(V.CHECKS, name, lambda pre, n=name: V.Check(n, 0.0, "", True))
    code, out, err = run(capsys, "validate", "--preset", "quick")
    assert code == 2
    assert "[FAIL] witness_closed_form" in out
    assert json.loads(err)["failures"][0]["name"] == "witness_closed_form"


# --------------------------------------------------------------------------
# validation harness

def test_presets_cover_every_check():
    for pre in PRESETS.values():
        assert set(pre.checks) == set(REQUIRED_CHECKS)
    assert len(REQUIRED_CHECKS) == 10


def test_dropping_a_check_is_a_usage_error():
    for name in REQUIRED_CHECKS:
        trimmed = tuple(c for c in REQUIRED_CHECKS if c != name)
        with pytest.raises(UsageError, match=name):
            run_validate("quick", checks=trimmed)


def test_empty_grid_is_a_usage_error():
    with pytest.raises(UsageError):
        run_validate("quick", t_grid=())
    with pytest.raises(UsageError):
        run_validate("quick", q_values=())


def test_perturbed_coefficient_fails_witness_check():
    from qnoise.states import Coupling, Family
    from qnoise.validate import check_witness_closed_form

    pre = PRESETS["quick"]
    assert check_witness_closed_form(pre).passed
    bumped = {(Family.GHZ, Coupling.CE): {"F": lambda v: v + 1e-3}}
    chk = check_witness_closed_form(pre, bumped)
    assert not chk.passed
    assert chk.value == pytest.approx(1e-3, rel=1e-6)


@pytest.mark.slow
def test_cli_validate_quick_preset(capsys, tmp_path):
    report = tmp_path / "report.json"
    code, out, _ = run(capsys, "validate", "--preset", "quick", "--out", str(report))
    assert code == 0
    assert out.count("[PASS]") == len(REQUIRED_CHECKS)
    data = json.loads(report.read_text())
    assert data["ok"] and not data["failures"]
    assert [c["name"] for c in data["checks"]] == list(REQUIRED_CHECKS)
