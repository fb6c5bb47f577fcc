"""Command-line entry point.

Every subcommand takes a configuration file path or ``preset:NAME``.
Exit codes: 0 success, 2 invalid configuration, 3 tolerance breach in
``compare --strict``.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

from .predictor import classify, predict_packets, prediction_report
from .runner import _clean, run, sweep
from .scenario import PRESETS, ScenarioError, evaluate, load_scenario

EXIT_OK, EXIT_INVALID, EXIT_BREACH = 0, 2, 3


def _outdir(args, sc):
    return Path(args.out) if args.out else Path("out") / sc.scenario_id


def _print_json(obj):
    print(json.dumps(_clean(obj), sort_keys=True, indent=2))


def cmd_simulate(args, sc):
    report = run(sc, _outdir(args, sc))
    print(f"{sc.scenario_id}: wrote {len(report.files)} files to {report.outdir}")
    for lvl in report.summary["levels"]:
        print(f"  k={lvl['k']} case={lvl['case']} conservation={lvl['conservation_error']:.2e}")
    return EXIT_OK


def cmd_project(args, sc):
    report = run(sc, _outdir(args, sc), outputs=("snapshots",), measure=False)
    print(f"{sc.scenario_id}: wrote {len(report.files)} files to {report.outdir}")
    return EXIT_OK


def cmd_predict(args, sc):
    levels = []
    for k in sc.k_levels:
        proj = sc.projection if k else "none"
        label = classify(sc.eta0_value, k, proj)
        preds = predict_packets(sc.eta0_value, k, proj, sc.gamma_value, sc.h, sc.symbol, sc.band)
        levels.append({"k": k, **prediction_report(preds, label)})
    if args.out:
        run(sc, _outdir(args, sc), outputs=("prediction",), measure=False)
    _print_json({"scenario_id": sc.scenario_id, "levels": levels})
    return EXIT_OK


def cmd_norms(args, sc):
    report = run(sc, _outdir(args, sc), outputs=("norms",), measure=False)
    norms = json.loads((Path(report.outdir) / "norms.json").read_text())
    for lvl in norms["levels"]:
        st, ls = lvl["strichartz"], lvl["local_smoothing"]
        print(f"k={lvl['k']} strichartz(p={st['p']}, q={st['q']}) ratio={st['ratio']:.6g} "
              f"smoothing ratio={ls['smoothing_ratio']:.6g}")
    return EXIT_OK


def cmd_compare(args, sc):
    report = run(sc, _outdir(args, sc), outputs=("comparison", "timeseries"))
    breaches = report.summary["breaches"]
    for lvl in report.summary["levels"]:
        for p in lvl["packets"]:
            print(f"k={lvl['k']} pick={p['pick_eta']:+.6f} factor={p['amplitude_factor']:.6f} "
                  f"amp(t=0)={p['amplitude_meas_t0']:.6f} v_pred={p['velocity_pred']:+.4f} "
                  f"v_meas={p['velocity_meas']:+.4f}")
    print(f"{len(breaches)} tolerance breaches")
    for b in breaches[: args.show]:
        print(f"  k={b['k']} packet={b['packet']} t={b['t']:.4g} {b['quantity']}="
              f"{b['error']:.3g} > {b['tolerance']:.3g}")
    return EXIT_BREACH if args.strict and breaches else EXIT_OK


def cmd_sweep(args, sc):
    h_list = [float(evaluate(h)) for h in args.h_list.split(",")]
    report = sweep(sc, h_list, outdir=_outdir(args, sc), workers=args.workers)
    for row in report.rows:
        print(f"h={row['h']:.6g} k={row['k']} strichartz={row['strichartz_ratio']:.6g} "
              f"smoothing={row['smoothing_ratio']:.6g} remainder={row['remainder_sq']:.6g}")
    return EXIT_OK


def cmd_presets(args, sc=None):
    for name, p in sorted(PRESETS.items()):
        print(f"{name:22s} eta0={p.eta0!s:20s} projection={p.projection} k={list(p.k_levels)}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bigridlab",
        description="Lattice Schrodinger wave packets with two-grid filtering.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress and regime warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="configuration file or preset:NAME")
        p.add_argument("-o", "--out", help="output directory (default out/<scenario_id>)")
        p.set_defaults(func=func)
        return p

    add("simulate", cmd_simulate, "run the full pipeline and write every requested output")
    add("project", cmd_project, "write filtered data and spectra only")
    add("predict", cmd_predict, "print the predicted packets per level")
    add("norms", cmd_norms, "Strichartz and local-smoothing ratios per level")
    p = add("compare", cmd_compare, "measured vs predicted packet table")
    p.add_argument("--strict", action="store_true", help="exit 3 if any error exceeds its tolerance")
    p.add_argument("--show", type=int, default=10, help="number of breaches to list")
    p = add("sweep", cmd_sweep, "norm ratios over a mesh refinement at fixed window length")
    p.add_argument("--h-list", required=True,
                   help="comma-separated descending mesh sizes, e.g. 2*pi/128,2*pi/256")
    p.add_argument("--workers", type=int, default=None, help="parallel scenarios (default: CPU count)")
    p = sub.add_parser("presets", help="list the built-in scenarios")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "presets":
        return args.func(args)
    try:
        sc = load_scenario(args.config)
        return args.func(args, sc)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        # scenario-dependent preconditions that only surface during execution
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
