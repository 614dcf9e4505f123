"""Command-line entry point: ``syncsbm <subcommand> ...``.

Exit status is 0 on success, 2 on a usage error and 1 on a runtime error.
Randomized subcommands require ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .experiments import (
    PHASE_HEADER,
    TOPOLOGIES,
    TRIALS_HEADER,
    ExperimentConfig,
    connectivity_experiment,
    cycle_probability_experiment,
    estimate_success,
    giant_component_experiment,
    giant_csv,
    GIANT_HEADER,
    phase_csv,
    phase_diagram,
    run_trials,
    trials_csv,
    write_manifest,
)
from .group import GroupAxiomError, cyclic_group, load_group_table
from .metrics import dist_c, dist_g
from .mle import SolverCapError, solve_exact
from .model import Hypothesis, ModelParams, ObservedNetwork, ParameterError, canonical_truth, generate_network
from .theory import threshold_report
from .experiments import assess_mle

THEORY_HEADER = ["a", "b", "M", "cluster_lhs", "region", "sbm_lhs", "sdp_lhs", "gpm_ok", "spectral_lhs"]


class UsageError(Exception):
    pass


def parse_grid(text):
    """``start:stop:step`` inclusive of ``stop`` within 1e-12, or a comma list."""
    if ":" not in text:
        return [float(x) for x in text.split(",") if x.strip()]
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"bad grid {text!r}; expected start:stop:step") from None
    if step <= 0 or stop < start:
        raise UsageError(f"bad grid {text!r}; need step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-12)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def _g(x):
    # shortest round-trip repr so region labels can be re-derived from the columns
    return "" if x is None else repr(float(x))


def _table(rows, header, fmt):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return _csv_to_json(buf.getvalue()) if fmt == "json" else buf.getvalue()


def _scalar(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return None if text == "" else text


def _csv_to_json(text):
    rows = list(csv.reader(io.StringIO(text)))
    return json.dumps([{k: _scalar(v) for k, v in zip(rows[0], r)} for r in rows[1:]], indent=1) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _add_model_flags(p, rates_required=True):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--group-table", dest="group_table")
    p.add_argument("--clamp", action="store_true", help="clip rate-derived probabilities above 1 instead of failing")


def _add_common(p, seed=True, out=True):
    if seed:
        p.add_argument("--seed", type=int, required=True)
    if out:
        p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="default: taken from the --out suffix, else csv")


def build_parser():
    parser = argparse.ArgumentParser(prog="syncsbm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a truth and a network")
    _add_model_flags(p)
    _add_common(p)
    p.add_argument("--identity-truth", action="store_true")

    p = sub.add_parser("solve", help="exact MLE on a saved network")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--truth")
    _add_model_flags(p)
    p.add_argument("--n-cap", type=int, default=20)
    p.add_argument("--timings", action="store_true")
    _add_common(p, seed=False)

    p = sub.add_parser("theory", help="threshold table over an (a, b) grid")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--a-grid", required=True)
    p.add_argument("--b-grid", required=True)
    _add_common(p, seed=False)

    for name, help_ in (("experiment", "Monte Carlo success rates"), ("phase", "empirical phase diagram")):
        p = sub.add_parser(name, help=help_)
        _add_model_flags(p)
        _add_common(p)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--solver", choices=("mle", "baseline", "both"), default="mle")
        p.add_argument("--identity-truth", action="store_true")
        p.add_argument("--n-cap", type=int, default=20)
        p.add_argument("--timings", action="store_true")
        if name == "phase":
            p.add_argument("--a-grid", required=True)
            p.add_argument("--b-grid", required=True)

    for name in ("giant", "connectivity"):
        p = sub.add_parser(name, help=f"Erdos-Renyi {name} experiment")
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--a", type=float, required=True)
        p.add_argument("--trials", type=int, default=100)
        _add_common(p)

    p = sub.add_parser("cycles", help="feasibility rate of uniformly labelled cycles")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--topology", choices=sorted(TOPOLOGIES), required=True)
    p.add_argument("--trials", type=int, default=10000)
    _add_common(p)
    return parser


def _check_out(args):
    out = getattr(args, "out", None)
    if out is not None and not Path(out).resolve().parent.is_dir():
        raise UsageError(f"output directory for {out} does not exist")


def _group(args):
    if getattr(args, "group_table", None):
        try:
            group = load_group_table(args.group_table)
        except (OSError, ValueError, KeyError) as exc:
            raise RuntimeError(f"cannot read group table {args.group_table}: {exc}") from exc
        if args.M is not None and args.M != group.order:
            raise UsageError(f"--M {args.M} does not match group table order {group.order}")
        args.M = group.order
        return group
    if args.M is None:
        raise UsageError("--M is required")
    return cyclic_group(args.M)


def _rates(args):
    ab = args.a is not None or args.b is not None
    pq = args.p is not None or args.q is not None
    if ab == pq:
        raise UsageError("give exactly one of (--a, --b) or (--p, --q)")
    if ab and (args.a is None or args.b is None):
        raise UsageError("--a and --b go together")
    if pq and (args.p is None or args.q is None):
        raise UsageError("--p and --q go together")


def _params(args):
    _rates(args)
    if args.a is not None:
        return ModelParams.from_rates(args.n, args.M, args.a, args.b, clamp=args.clamp)
    return ModelParams(args.n, args.M, args.p, args.q)


def _truth_path(out):
    out = Path(out)
    return out.with_name(out.stem + ".truth.json")


def cmd_generate(args):
    group = _group(args)
    params = _params(args)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    truth = canonical_truth(params, rng, args.identity_truth, group=group)
    net = generate_network(params, truth, rng, group=group)
    text = net.to_json() + "\n" if args.format == "json" else net.to_csv()
    _emit(text, args.out)
    if args.out:
        _truth_path(args.out).write_text(json.dumps({"kappa": truth.kappa.tolist(), "g": truth.g.tolist()}) + "\n")
    return 0


def cmd_solve(args):
    group = _group(args)
    params = _params(args)
    path = Path(args.inp)
    try:
        net = ObservedNetwork.load(path, group)
    except (OSError, ValueError, KeyError) as exc:
        raise RuntimeError(f"cannot read network {path}: {exc}") from exc
    if net.n != args.n:
        raise UsageError(f"--n {args.n} does not match network size {net.n}")
    result = solve_exact(net, params, cap=args.n_cap)
    dc = dg = None
    truth_file = args.truth or (_truth_path(path) if _truth_path(path).exists() else None)
    if truth_file:
        t = json.loads(Path(truth_file).read_text())
        truth = Hypothesis(t["kappa"], t["g"])
        outcome = assess_mle(result, truth, group)
        dc, dg = outcome.dist_c, outcome.dist_g
    record = result.to_dict(dc, dg)
    if not args.timings:
        record["wall_time_ms"] = None
    if args.format == "json":
        text = json.dumps(record) + "\n"
    else:
        text = _table([[_g(v) if isinstance(v, float) else ("" if v is None else v) for v in record.values()]],
                      list(record), "csv")
    _emit(text, args.out)
    return 0


def cmd_theory(args):
    rows = []
    for a in parse_grid(args.a_grid):
        for b in parse_grid(args.b_grid):
            r = threshold_report(a, b, args.M)
            rows.append([_g(a), _g(b), args.M, _g(r.cluster_lhs), r.region.value, _g(r.sbm_lhs),
                         _g(r.sdp_lhs), "" if r.gpm_ok is None else int(r.gpm_ok), _g(r.spectral_lhs)])
    _emit(_table(rows, THEORY_HEADER, args.format), args.out)
    return 0


def _config(args, **extra):
    group = _group(args)
    params = _params(args)  # validates rates against n without clamping
    kw = dict(n=args.n, M=args.M, trials=args.trials, master_seed=args.seed, solver=args.solver,
              workers=args.workers, identity_truth=args.identity_truth, clamp=args.clamp, cap=args.n_cap,
              group=None if getattr(args, "group_table", None) is None else group)
    if args.a is not None:
        kw.update(a=args.a, b=args.b)
    else:
        kw.update(p=params.p, q=params.q)
    kw.update(extra)
    return ExperimentConfig(**kw)


def cmd_experiment(args):
    t0 = time.perf_counter()
    config = _config(args)
    records = run_trials(config)
    estimates = estimate_success(config, records)
    for solver, est in estimates.items():
        print(f"{solver}: {est.summary()}")
        if args.out:
            out = Path(args.out)
            if len(estimates) > 1:
                out = out.with_name(f"{out.stem}_{solver}{out.suffix}")
            text = trials_csv([r[solver] for r in records], timings=args.timings)
            _emit(_csv_to_json(text) if args.format == "json" else text, out)
    if args.out:
        write_manifest(Path(args.out).with_suffix(".manifest.json"), config.describe(),
                       time.perf_counter() - t0,
                       {"rates": {s: [e.rate_cluster, e.rate_group] for s, e in estimates.items()}})
    return 0


def cmd_phase(args):
    t0 = time.perf_counter()
    if args.solver == "both":
        raise UsageError("phase takes --solver mle or baseline")
    a_grid, b_grid = parse_grid(args.a_grid), parse_grid(args.b_grid)
    args.a, args.b = a_grid[0], b_grid[0]
    args.p = args.q = None
    clamp = args.clamp
    args.clamp = True  # per-cell overflow is handled by phase_diagram
    config = _config(args)
    cells = phase_diagram(a_grid, b_grid, config, on_overflow="clamp" if clamp else "skip")
    text = phase_csv(cells)
    _emit(_csv_to_json(text) if args.format == "json" else text, args.out)
    if args.out:
        write_manifest(Path(args.out).with_suffix(".manifest.json"), config.describe(),
                       time.perf_counter() - t0,
                       {"common_random_numbers": True, "on_overflow": "clamp" if clamp else "skip"})
    return 0


def cmd_giant(args):
    t0 = time.perf_counter()
    res = giant_component_experiment(args.n, args.a, args.trials, args.seed)
    print(f"mean Z_n/n {res.mean_fraction:.4f}  min {res.min_fraction:.4f}  "
          f"share above 1-1/loglog n {res.fraction_above:.3f}")
    text = giant_csv(res)
    _emit(_csv_to_json(text) if args.format == "json" else text, args.out)
    if args.out:
        write_manifest(Path(args.out).with_suffix(".manifest.json"),
                       {"n": args.n, "a": args.a, "trials": args.trials, "seed": args.seed},
                       time.perf_counter() - t0)
    return 0


def cmd_connectivity(args):
    res = connectivity_experiment(args.n, args.a, args.trials, args.seed)
    rows = [[args.n, _g(args.a), args.trials, res.connected, _g(res.rate)]]
    print(f"P(connected) = {res.rate:.3f} ({res.connected}/{res.trials})")
    if args.out:
        _emit(_table(rows, ["n", "a", "trials", "connected", "rate"], args.format), args.out)
    return 0


def cmd_cycles(args):
    res = cycle_probability_experiment(args.M, args.topology, args.trials, args.seed)
    print(f"feasible {res.rate:.5f}  expected M^-{res.cycles} = {res.expected:.5f}  sigma {res.sigma:.5f}")
    if args.out:
        rows = [[args.M, args.topology, res.cycles, args.trials, res.feasible, _g(res.rate), _g(res.expected)]]
        _emit(_table(rows, ["M", "topology", "cycles", "trials", "feasible", "rate", "expected"], args.format),
              args.out)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "theory": cmd_theory,
    "experiment": cmd_experiment,
    "phase": cmd_phase,
    "giant": cmd_giant,
    "connectivity": cmd_connectivity,
    "cycles": cmd_cycles,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "format", "csv") is None:
        out = getattr(args, "out", None)
        args.format = "json" if out and Path(out).suffix == ".json" else "csv"
    try:
        _check_out(args)
        return COMMANDS[args.command](args)
    except (UsageError, ParameterError) as exc:
        print(f"syncsbm {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, SolverCapError, GroupAxiomError, OSError, ValueError) as exc:
        print(f"syncsbm {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
