"""Exact maximum-likelihood recovery by enumerating balanced bipartitions.

The likelihood of a hypothesis is proportional to
``(M p (1-q) / (q (1-p)))^{|E_inner|}`` times the indicator that every
in-community edge satisfies ``g_ij = g_i g_j^{-1}``. So the estimator either
maximizes or minimizes the in-community edge count over bipartitions whose
two induced subgraphs admit consistent group elements.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .consistency import check_sync_feasible, edges_feasible
from .model import Hypothesis, ObservedNetwork, edge_views, is_balanced

DEFAULT_CAP = 20


class Regime(str, enum.Enum):
    MAXIMIZE = "Maximize"
    MINIMIZE = "Minimize"


class SolverCapError(ValueError):
    pass


def likelihood_ratio(params):
    """``M p (1-q) / (q (1-p))``; ``inf`` when ``q = 0`` or ``p = 1``."""
    if params.q == 0 or params.p == 1:
        return math.inf
    return params.M * params.p * (1 - params.q) / (params.q * (1 - params.p))


def is_degenerate(params):
    return params.q == 0 or params.p == 1 or params.p == 0


RATIO_RTOL = 1e-12


def ratio_sign(params):
    """Sign of ``M p (1-q) - q (1-p)``, zero within a relative 1e-12.

    The tolerance keeps decimal inputs such as M=3, p=0.1, q=0.25 on the
    boundary despite binary rounding.
    """
    if params.q == 0 or params.p == 1:
        return 1
    lhs = params.M * params.p * (1 - params.q)
    rhs = params.q * (1 - params.p)
    if abs(lhs - rhs) <= RATIO_RTOL * max(lhs, rhs):
        return 0
    return 1 if lhs > rhs else -1


def regime(params):
    """Maximize the in-community edge count iff the ratio exceeds one.

    Equality falls in the minimize branch.
    """
    return Regime.MAXIMIZE if ratio_sign(params) > 0 else Regime.MINIMIZE


@dataclass
class Optimum:
    kappa: np.ndarray
    g: np.ndarray  # representative potentials, every component root at the identity
    components: tuple  # number of connected components inside each community
    completions: int  # number of g in G^n realising all in-community edges
    component_labels: np.ndarray | None = None  # in-community component id per node

    def hypothesis(self):
        return Hypothesis(self.kappa, self.g)


@dataclass
class MleResult:
    regime: Regime
    optimal_value: int | None
    optima: list
    explored: int
    checked: int = 0
    degenerate: bool = False
    wall_time_ms: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def feasible_instance(self):
        return bool(self.optima)

    @property
    def num_optima(self):
        return len(self.optima)

    @property
    def unique_up_to_symmetry(self):
        # optima are stored with node 0 in community 1, so distinct entries
        # are distinct partitions
        return len(self.optima) == 1

    def kappa_set(self):
        return {canonical_kappa(o.kappa) for o in self.optima}

    def to_dict(self, dist_c=None, dist_g=None):
        return {
            "regime": self.regime.value,
            "optimal_value": self.optimal_value,
            "num_optima": self.num_optima,
            "unique": self.unique_up_to_symmetry,
            "dist_c": dist_c,
            "dist_g": dist_g,
            "wall_time_ms": round(self.wall_time_ms, 3),
        }


def canonical_kappa(kappa):
    """Labels as a tuple with node 0 in community 1."""
    kappa = np.asarray(kappa)
    if kappa[0] == 2:
        kappa = 3 - kappa
    return tuple(int(x) for x in kappa)


def pinned_bipartitions(n):
    """Membership masks of community 1 for every balanced split with node 0 pinned.

    Rows follow lexicographic order of the other members of community 1.
    """
    half = n // 2
    rows = comb(n - 1, half - 1)
    masks = np.zeros((rows, n), dtype=bool)
    masks[:, 0] = True
    for r, rest in enumerate(itertools.combinations(range(1, n), half - 1)):
        masks[r, list(rest)] = True
    return masks


def _mask_to_kappa(mask):
    return np.where(mask, 1, 2).astype(np.int64)


def synchronize_within_clusters(network, kappa):
    """Consistent group elements for each community of ``kappa``, or the first witness.

    Returns ``SyncFeasibility`` over all nodes with edges restricted to the
    in-community ones; ``components`` lists the components of both communities.
    """
    kappa = np.asarray(kappa)
    inner = kappa[network.src] == kappa[network.dst]
    return check_sync_feasible(network, edge_mask=inner)


def _components_per_cluster(components, kappa):
    counts = {1: 0, 2: 0}
    for comp in components:
        counts[int(kappa[comp[0]])] += 1
    return counts[1], counts[2]


def component_labels(n, components):
    labels = np.empty(n, dtype=np.int64)
    for c, comp in enumerate(components):
        labels[comp] = c
    return labels


def _describe_optimum(network, kappa):
    res = synchronize_within_clusters(network, kappa)
    comps = _components_per_cluster(res.components, kappa)
    return Optimum(kappa, res.potentials, comps, network.M ** (comps[0] + comps[1]),
                   component_labels(network.n, res.components))


def solve_exact(network: ObservedNetwork, params, cap=DEFAULT_CAP):
    """All maximum-likelihood partitions of ``network``.

    Every pinned bipartition is scored by its in-community edge count, then
    candidates are checked for synchronization feasibility from the best
    score downward; the first score level with a feasible candidate holds
    all the optima.
    """
    n = network.n
    if n > cap:
        raise SolverCapError(f"n={n} exceeds the exact-solver cap of {cap}")
    if n % 2:
        raise ValueError("n must be even")
    start = time.perf_counter()
    reg = regime(params)
    masks = pinned_bipartitions(n)
    src, dst, g = network.src, network.dst, network.g
    scores = (masks[:, src] == masks[:, dst]).sum(axis=1)
    levels = np.unique(scores)
    if reg is Regime.MAXIMIZE:
        levels = levels[::-1]
    src_l, dst_l, g_l = src.tolist(), dst.tolist(), g.tolist()
    checked = 0
    optima = []
    best = None
    for level in levels:
        for row in np.nonzero(scores == level)[0]:
            checked += 1
            m = masks[row]
            inner = (m[src] == m[dst]).tolist()
            sel = [k for k, keep in enumerate(inner) if keep]
            if edges_feasible(n, network.group, [src_l[k] for k in sel], [dst_l[k] for k in sel], [g_l[k] for k in sel]):
                optima.append(_describe_optimum(network, _mask_to_kappa(m)))
        if optima:
            best = int(level)
            break
    elapsed = (time.perf_counter() - start) * 1e3
    return MleResult(reg, best, optima, explored=len(masks), checked=checked,
                     degenerate=is_degenerate(params), wall_time_ms=elapsed)


def _all_group_assignments(M, n):
    """Array of shape (M**n, n) listing every element assignment."""
    grids = np.indices((M,) * n).reshape(n, -1).T
    return grids.astype(np.int64)


def naive_oracle(network, params, max_nodes=10, max_assignments=10**7):
    """Full enumeration over balanced labelings and all group assignments.

    Meant only for cross-checking ``solve_exact`` on tiny instances.
    """
    n, M = network.n, network.M
    if n > max_nodes or M ** n > max_assignments:
        raise SolverCapError(f"oracle limited to n <= {max_nodes} and M^n <= {max_assignments}")
    start = time.perf_counter()
    group = network.group
    G = _all_group_assignments(M, n)
    # consistent[e, a]: edge e holds under assignment a
    rel = group.compose_table[G[:, network.src], group.inverse_table[G[:, network.dst]]]
    consistent = (rel == network.g[None, :]).T

    sign = ratio_sign(params)

    candidates = []
    for members in itertools.combinations(range(n), n // 2):
        kappa = np.full(n, 2, dtype=np.int64)
        kappa[list(members)] = 1
        inner = kappa[network.src] == kappa[network.dst]
        ok = np.all(consistent[inner], axis=0) if inner.any() else np.ones(G.shape[0], dtype=bool)
        count = int(ok.sum())
        if count:
            candidates.append((int(inner.sum()), kappa, count))
    elapsed = (time.perf_counter() - start) * 1e3
    reg = Regime.MAXIMIZE if sign > 0 else Regime.MINIMIZE
    if not candidates:
        return MleResult(reg, None, [], explored=comb(n, n // 2), wall_time_ms=elapsed)
    values = [c[0] for c in candidates]
    # likelihood of a feasible hypothesis is ratio**k; a flat likelihood
    # (ratio == 1) falls to the minimize branch
    best = max(values) if sign > 0 else min(values)
    seen = {}
    for k, kappa, count in candidates:
        if k == best:
            key = canonical_kappa(kappa)
            seen.setdefault(key, count)
    optima = [Optimum(np.array(key), None, (), count) for key, count in sorted(seen.items())]
    return MleResult(reg, best, optima, explored=comb(n, n // 2), checked=len(candidates),
                     degenerate=is_degenerate(params), wall_time_ms=elapsed)


def hypothesis_consistent(hypothesis, network):
    """Does every in-community edge of the hypothesis satisfy ``g_ij = g_i g_j^{-1}``?"""
    kappa, g = hypothesis.kappa, hypothesis.g
    group = network.group
    inner = kappa[network.src] == kappa[network.dst]
    implied = group.compose_table[g[network.src], group.inverse_table[g[network.dst]]]
    return bool(np.all(implied[inner] == network.g[inner]))


def log_likelihood_ratio(hypothesis, truth, network, params):
    """``log P(y | hypothesis) - log P(y | truth)``.

    ``-inf`` when the hypothesis breaks an in-community edge; ``nan`` when
    both hypotheses are impossible.
    """
    if not is_balanced(hypothesis.kappa):
        raise ValueError("hypothesis must be balanced")
    views = edge_views(network, hypothesis.kappa, truth.kappa)
    ok = hypothesis_consistent(hypothesis, network)
    ok_star = hypothesis_consistent(truth, network)
    if not ok and not ok_star:
        return math.nan
    if not ok:
        return -math.inf
    if not ok_star:
        return math.inf
    diff = views.r - views.r_star
    if diff == 0 or ratio_sign(params) == 0:
        return 0.0
    ratio = likelihood_ratio(params)
    if ratio == math.inf:
        return math.copysign(math.inf, diff)
    if ratio == 0:
        return -math.copysign(math.inf, diff)
    return diff * math.log(ratio)
