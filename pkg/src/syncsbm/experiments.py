"""Seeded Monte Carlo harness: trials, success rates, phase diagrams, random-graph checks.

Every trial draws from its own stream derived from ``(master_seed, trial_index)``,
so results do not depend on scheduling or worker count. Phase diagrams reuse
the same trial seeds in every cell.
"""

from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .baseline import two_stage_recover
from .consistency import (
    edges_feasible,
    giant_component_size,
    independent_cycle_count,
    is_connected,
    sample_er_graph,
)
from .group import FiniteGroup, cyclic_group
from .metrics import dist_c, dist_g
from .mle import DEFAULT_CAP, component_labels, solve_exact, synchronize_within_clusters
from .model import ModelParams, ObservedNetwork, ParameterError, canonical_truth, generate_network
from .theory import classify_region

SOLVERS = ("mle", "baseline")
WILSON_Z = 1.96

TRIALS_HEADER = ["trial_index", "dist_c", "dist_g", "cluster_success", "group_success",
                 "num_optima", "conn1", "conn2", "ms"]
PHASE_HEADER = ["a", "b", "n", "M", "trials", "rate_c", "lo_c", "hi_c", "rate_g", "lo_g", "hi_g", "region"]
GIANT_HEADER = ["n", "a", "trial", "z_n"]


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    M: int
    a: float | None = None
    b: float | None = None
    p: float | None = None
    q: float | None = None
    trials: int = 100
    master_seed: int = 0
    solver: str = "mle"
    workers: int = 1
    identity_truth: bool = False
    a_inner: float | None = None  # overrides only the in-community rate used for sampling
    clamp: bool = True
    cap: int = DEFAULT_CAP
    group: FiniteGroup | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.solver not in (*SOLVERS, "both"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if (self.a is None) == (self.p is None) or (self.b is None) == (self.q is None):
            raise ValueError("give exactly one of (a, b) or (p, q)")
        if self.solver in ("mle", "both") and self.n > self.cap:
            raise ValueError(f"n={self.n} exceeds the exact-solver cap of {self.cap}")
        if self.group is not None and self.group.order != self.M:
            raise ValueError("group order does not match M")

    @property
    def solvers(self):
        return SOLVERS if self.solver == "both" else (self.solver,)

    def params(self):
        if self.a is not None:
            return ModelParams.from_rates(self.n, self.M, self.a, self.b, clamp=self.clamp)
        return ModelParams(self.n, self.M, self.p, self.q)

    def inner_probability(self):
        if self.a_inner is None:
            return None
        p = self.a_inner * math.log(self.n) / self.n
        if p > 1 and not self.clamp:
            raise ParameterError(f"a_inner*log(n)/n = {p:.4g} above 1")
        return min(p, 1.0)

    def get_group(self):
        return self.group if self.group is not None else cyclic_group(self.M)

    def describe(self):
        d = {k: v for k, v in asdict(self).items() if k != "group"}
        d["group"] = None if self.group is None else self.group.to_dict()
        return d


@dataclass(frozen=True)
class TrialOutcome:
    trial_index: int
    solver: str
    dist_c: int
    dist_g: int
    cluster_success: bool
    group_success: bool
    num_optima: int
    conn1: bool
    conn2: bool
    wall_time_ms: float = field(default=0.0, compare=False)

    def row(self, timings=False):
        return [self.trial_index, self.dist_c, self.dist_g, int(self.cluster_success),
                int(self.group_success), self.num_optima, int(self.conn1), int(self.conn2),
                f"{self.wall_time_ms:.3f}" if timings else ""]


def trial_rng(master_seed, trial_index):
    """Independent generator for one trial, keyed by ``(master_seed, trial_index)``."""
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=(int(trial_index),)))


def group_distance(g, truth, components, group):
    """``dist_g`` in which a true community spread over several in-community
    components of the estimate counts as unrecovered.

    Such a community has a free relative offset between its pieces, so the
    estimator cannot pin its elements down (irrelevant when ``M = 1``).
    """
    total = 0
    for label in (1, 2):
        members = np.nonzero(truth.kappa == label)[0]
        d = dist_g(g[members], truth.g[members], truth.kappa[members], group)
        if group.order > 1 and components is not None:
            comp = components[members]
            if np.any(comp != comp[0]):
                d = 1
        total += d
    return total


def assess_mle(result, truth, group, trial_index=0, conn=(True, True)):
    """Turn an ``MleResult`` into a ``TrialOutcome``.

    Community recovery needs the truth to be the unique optimum up to label
    swap; ties count as failure. Group recovery needs community recovery and
    zero group distance.
    """
    if not result.optima:
        return TrialOutcome(trial_index, "mle", 1, 2, False, False, 0, *conn, result.wall_time_ms)
    rep = result.optima[0]
    dc = 0 if (result.unique_up_to_symmetry and dist_c(rep.kappa, truth.kappa) == 0) else 1
    dg = group_distance(rep.g, truth, rep.component_labels, group)
    return TrialOutcome(trial_index, "mle", dc, dg, dc == 0, dc == 0 and dg == 0,
                        result.num_optima, *conn, result.wall_time_ms)


def assess_baseline(result, truth, group, network, trial_index=0, conn=(True, True), ms=0.0):
    sync = synchronize_within_clusters(network, result.kappa)
    comps = component_labels(network.n, sync.components)
    dc = dist_c(result.kappa, truth.kappa)
    dg = group_distance(result.g, truth, comps, group)
    return TrialOutcome(trial_index, "baseline", dc, dg, dc == 0, dc == 0 and dg == 0, 1, *conn, ms)


def truth_connectivity(network, truth):
    return tuple(is_connected(network, np.nonzero(truth.kappa == k)[0]) for k in (1, 2))


def run_trial(config: ExperimentConfig, trial_index):
    """One draw of truth and network, solved by each configured solver.

    Returns ``{solver_name: TrialOutcome}``.
    """
    rng = trial_rng(config.master_seed, trial_index)
    params = config.params()
    group = config.get_group()
    truth = canonical_truth(params, rng, config.identity_truth, group=group)
    network = generate_network(params, truth, rng, group=group, p_inner=config.inner_probability())
    conn = truth_connectivity(network, truth)
    out = {}
    for solver in config.solvers:
        if solver == "mle":
            result = solve_exact(network, params, cap=config.cap)
            out[solver] = assess_mle(result, truth, group, trial_index, conn)
        else:
            t0 = time.perf_counter()
            res = two_stage_recover(network, params, rng)
            ms = (time.perf_counter() - t0) * 1e3
            out[solver] = assess_baseline(res, truth, group, network, trial_index, conn, ms)
    return out


def _run_job(job):
    config, trial_index = job
    return run_trial(config, trial_index)


def _map(jobs, workers):
    if workers == 1 or len(jobs) <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(jobs) // (4 * workers))
        return list(pool.map(_run_job, jobs, chunksize=chunk))


def run_trials(config):
    """All trials of ``config`` ordered by trial index."""
    return _map([(config, t) for t in range(config.trials)], config.workers)


def wilson_interval(successes, trials, z=WILSON_Z):
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # rounding can leave the bound a hair inside an estimate of exactly 0 or 1
    return max(0.0, min(centre - half, phat)), min(1.0, max(centre + half, phat))


@dataclass(frozen=True)
class SuccessEstimate:
    trials: int
    cluster_successes: int
    group_successes: int

    @property
    def rate_cluster(self):
        return self.cluster_successes / self.trials

    @property
    def rate_group(self):
        return self.group_successes / self.trials

    @property
    def interval_cluster(self):
        return wilson_interval(self.cluster_successes, self.trials)

    @property
    def interval_group(self):
        return wilson_interval(self.group_successes, self.trials)

    def summary(self):
        lo_c, hi_c = self.interval_cluster
        lo_g, hi_g = self.interval_group
        return (f"cluster {self.rate_cluster:.3f} [{lo_c:.3f}, {hi_c:.3f}]  "
                f"group {self.rate_group:.3f} [{lo_g:.3f}, {hi_g:.3f}]  ({self.trials} trials)")


def summarize(outcomes):
    return SuccessEstimate(len(outcomes), sum(o.cluster_success for o in outcomes),
                           sum(o.group_success for o in outcomes))


def estimate_success(config, outcomes=None):
    """Success counts and Wilson intervals, keyed by solver name."""
    records = outcomes if outcomes is not None else run_trials(config)
    return {s: summarize([r[s] for r in records]) for s in config.solvers}


@dataclass
class PhaseDiagramCell:
    a: float
    b: float
    n: int
    M: int
    trials: int
    estimate: SuccessEstimate | None
    theory_region: str
    status: str = "ok"  # ok | skipped | error
    message: str = ""
    outcomes: list = field(default_factory=list, repr=False)

    @property
    def success_rate_cluster(self):
        return None if self.estimate is None else self.estimate.rate_cluster

    @property
    def success_rate_group(self):
        return None if self.estimate is None else self.estimate.rate_group

    @property
    def wilson_low(self):
        return None if self.estimate is None else self.estimate.interval_cluster[0]

    @property
    def wilson_high(self):
        return None if self.estimate is None else self.estimate.interval_cluster[1]

    def row(self):
        head = [_fmt(self.a), _fmt(self.b), self.n, self.M, self.trials]
        if self.estimate is None:
            return head + [self.status.upper()] * 6 + [self.theory_region]
        lo_c, hi_c = self.estimate.interval_cluster
        lo_g, hi_g = self.estimate.interval_group
        return head + [_fmt(self.estimate.rate_cluster), _fmt(lo_c), _fmt(hi_c),
                       _fmt(self.estimate.rate_group), _fmt(lo_g), _fmt(hi_g), self.theory_region]


def _fmt(x):
    return f"{x:.6f}"


def phase_diagram(a_grid, b_grid, config, on_overflow="skip"):
    """Success rates over an (a, b) grid for ``config``'s single solver.

    Cells whose rates give a probability above one are skipped with an
    explicit marker unless ``on_overflow="clamp"``. Errors inside a cell are
    recorded on the cell and the sweep continues.
    """
    if not len(a_grid) or not len(b_grid):
        raise ValueError("grids must be non-empty")
    if config.solver == "both":
        raise ValueError("phase diagrams take a single solver")
    if on_overflow not in ("skip", "clamp"):
        raise ValueError("on_overflow must be 'skip' or 'clamp'")
    cells, jobs, owners = [], [], []
    scale = math.log(config.n) / config.n
    for a in a_grid:
        for b in b_grid:
            a, b = float(a), float(b)
            region = classify_region(a, b, config.M).value
            cell = PhaseDiagramCell(a, b, config.n, config.M, config.trials, None, region)
            cells.append(cell)
            if max(a, b) * scale > 1 and on_overflow == "skip":
                cell.status = "skipped"
                cell.message = f"rate*log(n)/n above 1 at n={config.n}"
                continue
            try:
                cell_cfg = replace(config, a=a, b=b, p=None, q=None, clamp=True)
            except ValueError as exc:
                cell.status, cell.message = "error", str(exc)
                continue
            for t in range(config.trials):
                jobs.append((cell_cfg, t))
                owners.append(cell)
    try:
        results = _map(jobs, config.workers)
    except Exception:
        results = []
        for job in jobs:
            try:
                results.append(_run_job(job))
            except Exception as exc:  # noqa: BLE001 - recorded per cell
                results.append(exc)
    for cell, res in zip(owners, results):
        if isinstance(res, Exception):
            cell.status, cell.message = "error", str(res)
        else:
            cell.outcomes.append(res[config.solver])
    for cell in cells:
        if cell.status == "ok":
            cell.estimate = summarize(cell.outcomes)
    return cells


def phase_csv(cells):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PHASE_HEADER)
    for cell in cells:
        w.writerow(cell.row())
    return buf.getvalue()


def trials_csv(outcomes, timings=False):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRIALS_HEADER)
    for o in sorted(outcomes, key=lambda o: o.trial_index):
        w.writerow(o.row(timings))
    return buf.getvalue()


# --- random-graph experiments ------------------------------------------------


def _er_probability(n, a):
    p = a * math.log(n) / n
    if p > 1:
        raise ParameterError(f"a*log(n)/n = {p:.4g} above 1")
    return p


@dataclass(frozen=True)
class ConnectivityResult:
    n: int
    a: float
    trials: int
    connected: int

    @property
    def rate(self):
        return self.connected / self.trials


def connectivity_experiment(n, a, trials, master_seed):
    """Fraction of G(n, a log n / n) samples that are connected."""
    if n < 2:
        raise ValueError("n must be >= 2")
    p = _er_probability(n, a)
    hits = 0
    for t in range(trials):
        g = sample_er_graph(n, p, trial_rng(master_seed, t))
        hits += giant_component_size(g) == n
    return ConnectivityResult(n, a, trials, hits)


@dataclass(frozen=True)
class GiantResult:
    n: int
    a: float
    z: tuple  # largest component size per trial

    @property
    def fractions(self):
        return np.array(self.z) / self.n

    @property
    def mean_fraction(self):
        return float(self.fractions.mean())

    @property
    def min_fraction(self):
        return float(self.fractions.min())

    @property
    def fraction_above(self):
        """Share of trials with ``Z_n/n > 1 - 1/log log n``."""
        cut = 1 - 1 / math.log(math.log(self.n)) if self.n > math.e else 0.0
        return float(np.mean(self.fractions > cut))


def giant_component_experiment(n, a, trials, master_seed):
    """Largest-component sizes of G(n, a log n / n)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if a <= 0:
        raise ValueError("a must be positive")
    p = _er_probability(n, a)
    z = tuple(giant_component_size(sample_er_graph(n, p, trial_rng(master_seed, t))) for t in range(trials))
    return GiantResult(n, a, z)


def giant_csv(result):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GIANT_HEADER)
    for t, z in enumerate(result.z):
        w.writerow([result.n, _fmt(result.a), t, z])
    return buf.getvalue()


TOPOLOGIES = {
    "tree": [(0, 1), (1, 2), (1, 3), (3, 4)],
    "triangle": [(0, 1), (1, 2), (0, 2)],
    "theta": [(0, 1), (1, 3), (0, 2), (2, 3), (0, 3)],
    "two_triangles": [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)],
}


@dataclass(frozen=True)
class CycleProbabilityResult:
    M: int
    cycles: int
    trials: int
    feasible: int

    @property
    def rate(self):
        return self.feasible / self.trials

    @property
    def expected(self):
        return float(self.M) ** (-self.cycles)

    @property
    def sigma(self):
        e = self.expected
        return math.sqrt(e * (1 - e) / self.trials)


def cycle_probability_experiment(M, topology, trials, master_seed, group=None):
    """Feasibility rate of ``topology`` when every edge carries a uniform element."""
    edges = TOPOLOGIES[topology] if isinstance(topology, str) else [tuple(e) for e in topology]
    group = group or cyclic_group(M)
    n = 1 + max(max(e) for e in edges)
    src = [min(e) for e in edges]
    dst = [max(e) for e in edges]
    base = ObservedNetwork(n, group, src, dst, [group.identity] * len(edges))
    c = independent_cycle_count(base)
    rng = np.random.default_rng(np.random.SeedSequence(int(master_seed)))
    labels = group.uniform_sample(rng, size=(trials, len(edges))).tolist()
    s, d = base.src.tolist(), base.dst.tolist()
    hits = sum(edges_feasible(n, group, s, d, row) for row in labels)
    return CycleProbabilityResult(group.order, c, trials, hits)


# --- manifests ---------------------------------------------------------------


def version_string():
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], capture_output=True,
                             text=True, timeout=5, cwd=Path(__file__).resolve().parent)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def write_manifest(path, config, wall_time_s, extra=None):
    data = {
        "config": config,
        "version": version_string(),
        "wall_time_s": round(wall_time_s, 3),
    }
    if extra:
        data.update(extra)
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
