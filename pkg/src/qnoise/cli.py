"""Command-line front end.

    qnoise sweep      --family ghz --coupling ce --q 1 --gamma-ratio 0.1,10 --out n.csv
    qnoise trajectory --family w --gamma-ratio 10 --format svg --out traj.svg
    qnoise mc-compare --family ghz --coupling ie --trajectories 20000
    qnoise validate   --preset quick

Options may also come from ``--config file.json`` (same names, dashes or
underscores); explicit flags win. Exit codes: 0 ok, 1 usage, 2 validation failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import sweep as S
from .measures import MEASURE_NAMES
from .validate import PRESETS, UsageError, run_validate

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

DEFAULTS = dict(family="ghz", coupling="ce", q="1", gamma_ratio="0.1,10", t_max=30.0, t_steps=301,
                mode="analytic", trajectories=20000, seed=0, measures="all", out=None, format="csv",
                plot_measure="negativity", times="1,5,10")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(x) for x in text]
    vals = [float(x) for x in str(text).split(",") if x.strip()]
    if not vals:
        raise UsageError(f"empty list: {text!r}")
    return vals


def _measures(text) -> frozenset:
    if isinstance(text, list):
        text = ",".join(text)
    if text == "all":
        return frozenset(MEASURE_NAMES)
    return frozenset(x.strip() for x in text.split(",") if x.strip())


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with default options")
    p.add_argument("--family", choices=["ghz", "w"])
    p.add_argument("--coupling", choices=["ce", "ie"])
    p.add_argument("--q", help="comma list of purities")
    p.add_argument("--gamma-ratio", help="comma list of gamma/nu values")
    p.add_argument("--t-max", type=float, help="final time in units of 1/nu")
    p.add_argument("--t-steps", type=int, help="number of time points")
    p.add_argument("--mode", choices=["analytic", "mc"])
    p.add_argument("--trajectories", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--measures", help="comma list or 'all'")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=list(S.FORMATS))
    p.add_argument("--plot-measure", help="column plotted by --format svg")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qnoise", description="Four-qubit entanglement under random telegraph noise.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(sub.add_parser("sweep", help="measures on a (gamma/nu, q, t) grid"))
    _common(sub.add_parser("trajectory", help="(S_L, N) and (S_L, QJSD) series, CE and IE"))
    mc = sub.add_parser("mc-compare", help="Monte Carlo vs closed-form states")
    _common(mc)
    mc.add_argument("--times", help="comma list of times for the comparison")
    val = sub.add_parser("validate", help="run every acceptance check")
    val.add_argument("--preset", choices=sorted(PRESETS), default="default")
    val.add_argument("--out", help="write the JSON report here")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Defaults < config file < explicit flags."""
    opts = dict(DEFAULTS)
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        try:
            loaded = json.loads(Path(cfg_path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {cfg_path}: {e}") from e
        for k, v in loaded.items():
            key = k.replace("-", "_")
            if key not in DEFAULTS:
                raise UsageError(f"unknown config key {k!r}")
            opts[key] = v
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            opts[k] = v
    return opts


def spec_from(opts: dict) -> S.SweepSpec:
    try:
        return S.SweepSpec(family=str(opts["family"]).upper(), coupling=str(opts["coupling"]).upper(),
                           q_values=_floats(opts["q"]), gamma_over_nu_values=_floats(opts["gamma_ratio"]),
                           t_max=float(opts["t_max"]), t_steps=int(opts["t_steps"]),
                           measures=_measures(opts["measures"]), mode=opts["mode"],
                           mc_trajectories=int(opts["trajectories"]), seed=int(opts["seed"]))
    except ValueError as e:
        raise UsageError(str(e)) from e


def _write(data: bytes, out) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)


def cmd_sweep(opts: dict) -> int:
    table = S.run_sweep(spec_from(opts))
    _write(S.emit(table, opts["format"], measure=opts["plot_measure"]), opts["out"])
    return EXIT_OK


def cmd_trajectory(opts: dict) -> int:
    rows = []
    for coupling in ("CE", "IE"):
        spec = spec_from({**opts, "coupling": coupling,
                          "measures": "negativity,linear_entropy,qjsd_init,qjsd_mm"})
        rows.extend(S.run_sweep(spec))
    measure = opts["plot_measure"]
    _write(S.emit(rows, opts["format"], measure=measure, x="linear_entropy"), opts["out"])
    return EXIT_OK


def cmd_mc_compare(opts: dict) -> int:
    spec = spec_from(opts)
    rows = S.mc_compare(spec.family, spec.coupling, spec.q_values, spec.gamma_over_nu_values,
                        np.array(_floats(opts["times"])), spec.mc_trajectories, spec.seed)
    fmt = opts["format"]
    if fmt == "svg":
        raise UsageError("mc-compare emits csv or json")
    _write(S.emit(rows, fmt), opts["out"])
    return EXIT_OK


def cmd_validate(args) -> int:
    report = run_validate(args.preset)
    print(report.text())
    if args.out:
        Path(args.out).write_text(json.dumps({"ok": report.ok, "failures": report.failures(),
                                              "checks": [c.__dict__ for c in report.checks]}, indent=1, default=float))
    if not report.ok:
        print(json.dumps({"failures": report.failures()}, default=float), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        opts = resolve(args)
        return {"sweep": cmd_sweep, "trajectory": cmd_trajectory, "mc-compare": cmd_mc_compare}[args.command](opts)
    except UsageError as e:
        print(f"qnoise: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
