"""Ground truth, network generation and edge bookkeeping for the two-community model.

Nodes ``0..n/2-1`` form community 1 and the rest community 2. Every pair is
joined with probability ``p`` inside a community and ``q`` across. Edges
inside a community carry the clean relative element ``g_i g_j^{-1}``; edges
across carry a uniform element of the group.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .group import FiniteGroup, cyclic_group


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    n: int
    M: int
    p: float
    q: float
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise ParameterError(f"n must be even and >= 4, got {self.n}")
        if self.M < 1:
            raise ParameterError(f"M must be >= 1, got {self.M}")
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name}={v} outside [0, 1]")

    @classmethod
    def from_rates(cls, n, M, a, b, *, clamp=True):
        """Parameters with ``p = a log n / n`` and ``q = b log n / n``.

        With ``clamp=False`` a probability above one raises instead of being
        clipped, which is what command-line flows want.
        """
        if a < 0 or b < 0:
            raise ParameterError(f"rates must be non-negative, got a={a}, b={b}")
        scale = math.log(n) / n
        p, q = a * scale, b * scale
        if not clamp and (p > 1 or q > 1):
            raise ParameterError(
                f"a*log(n)/n = {p:.4g}, b*log(n)/n = {q:.4g}: probability above 1 at n={n}"
            )
        return cls(n, M, min(p, 1.0), min(q, 1.0), a, b)

    @property
    def half(self):
        return self.n // 2


@dataclass
class Hypothesis:
    """Community labels in {1, 2} and one group element per node."""

    kappa: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        self.kappa = np.asarray(self.kappa, dtype=np.int64)
        self.g = np.asarray(self.g, dtype=np.int64)
        if self.kappa.shape != self.g.shape:
            raise ValueError("kappa and g must have the same length")

    @property
    def n(self):
        return self.kappa.size

    def is_balanced(self):
        return is_balanced(self.kappa)


def is_balanced(kappa):
    kappa = np.asarray(kappa)
    ones = int(np.sum(kappa == 1))
    twos = int(np.sum(kappa == 2))
    return ones + twos == kappa.size and ones == twos


def _require_balanced(kappa):
    if not is_balanced(kappa):
        raise ValueError("labeling must use labels {1, 2} with equal community sizes")


def canonical_labels(n):
    return np.where(np.arange(n) < n // 2, 1, 2)


@dataclass
class ObservedNetwork:
    """Edge list ``(i, j, g_ij)`` with ``i < j``, stored as parallel integer arrays."""

    n: int
    group: FiniteGroup
    src: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    dst: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    g: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        g = np.asarray(self.g, dtype=np.int64)
        if not (src.shape == dst.shape == g.shape):
            raise ValueError("edge arrays must share a shape")
        if src.size:
            if np.any(src == dst):
                raise ValueError("self-loops are not allowed")
            if min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= self.n:
                raise ValueError(f"edge endpoint outside [0, {self.n})")
            if g.min() < 0 or g.max() >= self.group.order:
                raise ValueError("edge transformation outside the group")
            # orient as i < j; a reversed edge carries the inverse element
            flip = src > dst
            g = np.where(flip, self.group.inverse_table[g], g)
            src, dst = np.where(flip, dst, src), np.where(flip, src, dst)
            order = np.lexsort((dst, src))
            src, dst, g = src[order], dst[order], g[order]
            key = src * self.n + dst
            if np.any(key[1:] == key[:-1]):
                raise ValueError("duplicate edge")
        self.src, self.dst, self.g = src, dst, g

    @classmethod
    def from_edges(cls, n, group, edges):
        edges = list(edges)
        if not edges:
            return cls(n, group)
        arr = np.array(edges, dtype=np.int64).reshape(-1, 3)
        return cls(n, group, arr[:, 0], arr[:, 1], arr[:, 2])

    @property
    def M(self):
        return self.group.order

    @property
    def num_edges(self):
        return int(self.src.size)

    def edges(self):
        return [(int(i), int(j), int(h)) for i, j, h in zip(self.src, self.dst, self.g)]

    def transformation(self, i, j):
        """``g_ij`` for an edge in either orientation; ``None`` when absent."""
        lo, hi = (i, j) if i < j else (j, i)
        hits = np.nonzero((self.src == lo) & (self.dst == hi))[0]
        if not hits.size:
            return None
        h = int(self.g[hits[0]])
        return h if i < j else self.group.inverse(h)

    def adjacency(self):
        A = np.zeros((self.n, self.n), dtype=np.int8)
        A[self.src, self.dst] = 1
        A[self.dst, self.src] = 1
        return A

    def subgraph_mask(self, nodes):
        """Boolean mask over edges with both endpoints in ``nodes``."""
        inside = np.zeros(self.n, dtype=bool)
        inside[np.asarray(list(nodes), dtype=np.int64)] = True
        return inside[self.src] & inside[self.dst]

    # --- serialization -------------------------------------------------

    def to_dict(self):
        return {"n": self.n, "M": self.M, "edges": [list(e) for e in self.edges()]}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data, group=None):
        group = group or cyclic_group(data["M"])
        if group.order != data["M"]:
            raise ValueError(f"network M={data['M']} does not match group order {group.order}")
        return cls.from_edges(data["n"], group, data["edges"])

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# n={self.n} M={self.M}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "g"])
        w.writerows(self.edges())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, group=None):
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValueError("network CSV must start with a '# n=.. M=..' line")
        meta = dict(tok.split("=") for tok in lines[0][1:].split())
        n, M = int(meta["n"]), int(meta["M"])
        rows = list(csv.reader(lines[1:]))
        if rows[0] != ["i", "j", "g"]:
            raise ValueError(f"unexpected CSV header {rows[0]}")
        return cls.from_dict({"n": n, "M": M, "edges": [[int(x) for x in r] for r in rows[1:]]}, group)

    def save(self, path):
        path = Path(path)
        text = self.to_csv() if path.suffix == ".csv" else self.to_json()
        path.write_text(text)

    @classmethod
    def load(cls, path, group=None):
        path = Path(path)
        text = path.read_text()
        if path.suffix == ".csv":
            return cls.from_csv(text, group)
        return cls.from_dict(json.loads(text), group)


def canonical_truth(params, rng, identity_elements=False, group=None):
    """First half in community 1, second half in community 2.

    Group elements are uniform per node unless ``identity_elements`` is set.
    """
    group = group or cyclic_group(params.M)
    kappa = canonical_labels(params.n)
    if identity_elements:
        g = np.full(params.n, group.identity, dtype=np.int64)
    else:
        g = group.uniform_sample(rng, size=params.n)
    return Hypothesis(kappa, g)


def generate_network(params, truth, rng, group=None, p_inner=None):
    """Sample an observation from the model given the ground truth.

    ``p_inner`` overrides the in-community probability without touching the
    regime computed from ``params``.
    """
    group = group or cyclic_group(params.M)
    if group.order != params.M:
        raise ValueError("group order does not match params.M")
    _require_balanced(truth.kappa)
    if truth.g.size and (truth.g.min() < 0 or truth.g.max() >= group.order):
        raise ValueError("truth group elements out of range")
    n = params.n
    iu, ju = np.triu_indices(n, k=1)
    same = truth.kappa[iu] == truth.kappa[ju]
    p = params.p if p_inner is None else p_inner
    prob = np.where(same, p, params.q)
    present = rng.random(iu.size) < prob
    src, dst, same = iu[present], ju[present], same[present]
    clean = group.compose_table[truth.g[src], group.inverse_table[truth.g[dst]]]
    noise = group.uniform_sample(rng, size=src.size)
    g = np.where(same, clean, noise)
    return ObservedNetwork(n, group, src, dst, g)


@dataclass(frozen=True)
class EdgeViews:
    inner: np.ndarray  # mask over edges, same community under the labeling
    inter: np.ndarray
    r: int | None = None
    r_star: int | None = None

    @property
    def num_inner(self):
        return int(self.inner.sum())

    @property
    def num_inter(self):
        return int(self.inter.sum())


def edge_views(network, kappa, kappa_star=None):
    """Split edges by ``kappa``; with ``kappa_star`` also count ``r`` and ``r*``.

    ``r`` counts edges inside a community of ``kappa`` but across ``kappa_star``,
    ``r*`` the reverse, so ``r - r*`` equals the change in in-community edges.
    """
    kappa = np.asarray(kappa)
    _require_balanced(kappa)
    inner = kappa[network.src] == kappa[network.dst]
    if kappa_star is None:
        return EdgeViews(inner, ~inner)
    kappa_star = np.asarray(kappa_star)
    _require_balanced(kappa_star)
    inner_star = kappa_star[network.src] == kappa_star[network.dst]
    r = int(np.sum(inner & ~inner_star))
    r_star = int(np.sum(~inner & inner_star))
    return EdgeViews(inner, ~inner, r, r_star)
