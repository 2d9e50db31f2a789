"""Command line entry point.

Exit codes: 0 success / consensus reached, 1 bad input or config,
2 graph not strongly connected, 3 time limit without consensus,
4 divergence, 5 runs not comparable.
"""

import argparse
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import fileio
from .analysis import analyze, compare_rates
from .dynamics import Termination, simulate
from .errors import Incomparable, NonMonotone, NotStronglyConnected, ParseError
from .graph import build_laplacian, connectivity, left_eigenvector
from .protocol import check_monotone, padded_hull, parse_protocol

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_SC = 2
EXIT_TIME_LIMIT = 3
EXIT_DIVERGENCE = 4
EXIT_INCOMPARABLE = 5

_EXIT_FOR = {
    Termination.CONSENSUS: EXIT_OK,
    Termination.TIME_LIMIT: EXIT_TIME_LIMIT,
    Termination.DIVERGENCE: EXIT_DIVERGENCE,
}


class InputError(Exception):
    pass


def _fmt_vec(v):
    return " ".join(f"{x:.10g}" for x in v)


def cmd_check_graph(args, out):
    g = fileio.read_graph(args.graph, args.format)
    rep = connectivity(g)
    if args.export:
        fileio.write_graph(g, args.export, args.export_format)
    if rep.strongly_connected:
        xi = left_eigenvector(build_laplacian(g))
        print(f"strongly connected; xi = {_fmt_vec(xi)}", file=out)
        return EXIT_OK
    parts = ["not strongly connected",
             f"spanning tree: {'yes' if rep.has_spanning_tree else 'no'}"]
    if rep.has_spanning_tree:
        roots = sorted(r + 1 for r in rep.root_candidates)
        word = "root" if len(roots) == 1 else "roots"
        parts.append(f"{word}: " + ", ".join(f"node {r}" for r in roots))
    print("; ".join(parts), file=out)
    return EXIT_NOT_SC


def _apply_overrides(cfg, args):
    if getattr(args, "graph", None):
        cfg.graph_source = Path(args.graph)
    if getattr(args, "protocol", None):
        cfg.protocol_spec = args.protocol
    if getattr(args, "x0", None):
        cfg.x0 = fileio.parse_vector(args.x0)
    if getattr(args, "unchecked", False):
        cfg.mode = "unchecked"
    if getattr(args, "plot", False):
        cfg.plot = True
    if getattr(args, "out", None):
        cfg.outputs = Path(args.out)
    sim = {}
    for key in ("dt", "t_max", "consensus_tol", "record_every", "integrator"):
        val = getattr(args, key, None)
        if val is not None:
            sim[key] = val
    if sim:
        try:
            cfg.sim = replace(cfg.sim, **sim)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return cfg


def _load_config(path=None, preset=None):
    if path and preset:
        raise InputError("give either a config file or --preset, not both")
    if preset:
        try:
            return fileio.load_preset(preset)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if path:
        return fileio.read_config(path)
    return fileio.ExperimentConfig()


def run_experiment(cfg):
    """Simulate one validated config. Returns ``(graph, protocol, traj, summary)``."""
    try:
        cfg.validate()
    except ValueError as exc:
        raise InputError(str(exc)) from None
    g = fileio.read_graph(cfg.graph_source)
    try:
        cfg.validate(g.n)
        p = parse_protocol(cfg.protocol_spec, cfg.base_dir)
    except ValueError as exc:
        raise InputError(str(exc)) from None

    x0 = np.array(cfg.x0)
    lo, hi = padded_hull(x0)
    mono = check_monotone(p, lo, hi)
    certified = cfg.mode == "certified"
    if certified and not mono.monotone_on_range:
        w1, w2 = mono.witness
        raise InputError(
            f"protocol is not increasing on [{lo:.6g}, {hi:.6g}] (decreases between "
            f"{w1:.6g} and {w2:.6g}); use --unchecked to run anyway")

    traj = simulate(g, p, x0, cfg.sim, certified=certified)
    summary = {
        "label": cfg.label,
        "protocol": cfg.protocol_spec,
        "mode": cfg.mode,
        "n": g.n,
        "x0": list(x0),
        "terminated_by": traj.terminated_by.value,
        "decision_value": traj.decision_value,
        "consensus_time": traj.consensus_time,
        "steps": traj.steps,
        "final_disagreement": traj.final_disagreement,
        "oscillation_amplitude": traj.oscillation_amplitude(),
        "protocol_monotone_on_range": mono.monotone_on_range,
        "monotone_range": [lo, hi],
        "estimated_sector_bound": mono.estimated_sector_bound,
        "xi": None if traj.xi is None else list(traj.xi),
        "group_decision": None if traj.xi is None else float(traj.xi @ x0),
        "dt": cfg.sim.dt,
        "t_max": cfg.sim.t_max,
        "consensus_tol": cfg.sim.consensus_tol,
        "integrator": cfg.sim.integrator,
    }
    report = None
    if traj.xi is not None:
        report = analyze(traj, traj.xi, build_laplacian(g), p)
        summary.update(
            v_monotone=report.v_monotone,
            first_v_violation=report.first_violation,
            max_conservation_drift=report.max_conservation_drift,
            fitted_decay_rate=report.fitted_decay_rate,
            sos_residual=report.sos_residual,
        )
    summary["analysis"] = report
    return g, p, traj, summary


def _write_run(traj, summary, outdir, stem="trajectory"):
    outdir.mkdir(parents=True, exist_ok=True)
    fileio.write_trajectory_csv(traj, outdir / f"{stem}.csv")
    report = summary.pop("analysis", None)
    fileio.write_summary(summary, outdir / ("summary.json" if stem == "trajectory"
                                            else f"{stem}_summary.json"))
    if report is not None:
        fileio.write_record(report.as_record(), outdir / f"{stem}_analysis.txt")


def cmd_simulate(args, out):
    cfg = _apply_overrides(_load_config(args.config, args.preset), args)
    outdir = cfg.outputs or Path("nlconsensus_out")
    g, p, traj, summary = run_experiment(cfg)
    _write_run(traj, summary, outdir)
    if cfg.plot:
        from .plotting import plot_trajectory
        plot_trajectory(traj, outdir / "trajectory.svg", cfg.label or cfg.protocol_spec)

    print(f"terminated by: {traj.terminated_by.value}", file=out)
    if traj.decision_value is not None:
        print(f"decision value: {traj.decision_value:.10g}", file=out)
        print(f"consensus time: {traj.consensus_time:.6g}", file=out)
    else:
        print(f"final disagreement: {traj.final_disagreement:.6g}", file=out)
        print(f"oscillation amplitude (last 10%): {summary['oscillation_amplitude']:.6g}",
              file=out)
    if summary["group_decision"] is not None:
        print(f"weighted average xi^T x0: {summary['group_decision']:.10g}", file=out)
        print(f"conservation drift: {summary['max_conservation_drift']:.3e}", file=out)
        print(f"V non-increasing: {'yes' if summary['v_monotone'] else 'no'}", file=out)
    print(f"outputs written to {outdir}", file=out)
    return _EXIT_FOR[traj.terminated_by]


def cmd_compare(args, out):
    if args.preset:
        if args.configs:
            raise InputError("give either two config files or --preset, not both")
        names = {"example2": ("example2_nonlinear", "example2_linear")}.get(args.preset)
        if names is None:
            raise InputError(f"unknown comparison preset {args.preset!r}; available: example2")
        cfgs = [_load_config(preset=n) for n in names]
    elif len(args.configs) == 2:
        cfgs = [_load_config(path=c) for c in args.configs]
    else:
        raise InputError("compare needs two config files or --preset")
    for cfg, proto in zip(cfgs, (args.protocol_a, args.protocol_b)):
        _apply_overrides(cfg, args)
        if proto:
            cfg.protocol_spec = proto

    runs = [run_experiment(c) for c in cfgs]
    (ga, _, ta, sa), (gb, _, tb, sb) = runs
    if ga != gb or not np.array_equal(ta.x[0], tb.x[0]):
        raise InputError("compared configs must share the graph and x0")

    labels = [c.label or c.protocol_spec for c in cfgs]
    outdir = cfgs[0].outputs or Path("nlconsensus_out")
    _write_run(ta, sa, outdir, "run_a")
    _write_run(tb, sb, outdir, "run_b")
    try:
        cmp = compare_rates(ta, tb, args.eps)
    except Incomparable as exc:
        print(f"incomparable: {exc}", file=out)
        return EXIT_INCOMPARABLE

    record = {"a": labels[0], "b": labels[1], **asdict(cmp), "rate_ratio": cmp.rate_ratio}
    fileio.write_summary(record, outdir / "comparison.json")
    if cfgs[0].plot or cfgs[1].plot:
        from .plotting import plot_comparison
        plot_comparison(ta, tb, outdir / "comparison.svg", labels)

    winner = {"A": labels[0], "B": labels[1]}.get(cmp.faster, "tie")
    print(f"eps = {args.eps:g}", file=out)
    for tag, lab, t, r in (("A", labels[0], cmp.time_a, cmp.rate_a),
                           ("B", labels[1], cmp.time_b, cmp.rate_b)):
        ts = "not reached" if t is None else f"{t:.6g}"
        rs = "n/a" if r is None else f"{r:.6g}"
        print(f"{tag} {lab}: time to eps {ts}, fitted rate {rs}", file=out)
    print(f"faster: {winner}", file=out)
    return EXIT_OK


def cmd_presets(args, out):
    for name in fileio.list_presets():
        print(name, file=out)
    return EXIT_OK


def _add_sim_flags(p):
    p.add_argument("--graph", help="graph file (overrides config)")
    p.add_argument("--x0", help="initial state, comma separated")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--tol", dest="consensus_tol", type=float, help="consensus tolerance")
    p.add_argument("--record-every", dest="record_every", type=int)
    p.add_argument("--integrator", choices=["rk4", "euler"])
    p.add_argument("--unchecked", action="store_true",
                   help="skip strong-connectivity and monotonicity requirements")
    p.add_argument("--plot", action="store_true", help="write SVG plots")
    p.add_argument("--out", help="output directory (default ./nlconsensus_out)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nlconsensus",
        description="Nonlinear consensus protocols on weighted digraphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-graph", help="connectivity verdict and left eigenvector")
    p.add_argument("graph")
    p.add_argument("--format", choices=["auto", "matrix", "edges"], default="auto")
    p.add_argument("--export", help="write the parsed graph to this path")
    p.add_argument("--export-format", choices=["matrix", "edges"], default="matrix")
    p.set_defaults(func=cmd_check_graph)

    p = sub.add_parser("simulate", help="run one experiment")
    p.add_argument("config", nargs="?", help="key = value config file")
    p.add_argument("--preset", help="bundled preset name")
    p.add_argument("--protocol", help="linear:<a> | linsin:<a> | piecewise | table:<path>")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="race two protocols on one graph")
    p.add_argument("configs", nargs="*", help="two config files")
    p.add_argument("--preset", help="bundled comparison (example2)")
    p.add_argument("--protocol-a")
    p.add_argument("--protocol-b")
    p.add_argument("--eps", type=float, default=1e-3, help="disagreement threshold")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("presets", help="list bundled presets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, NonMonotone, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotStronglyConnected as exc:
        print(f"error: {exc}; use --unchecked to run anyway", file=sys.stderr)
        return EXIT_NOT_SC


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
