"""Graph utilities: synchronization feasibility, components, Erdos-Renyi sampling.

Feasibility uses a union-find whose entries store the group element relating
each node to its parent. With potentials relative to the root, an edge
``(i, j, h)`` is consistent when ``rel(i) * rel(j)^{-1} == h``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .group import FiniteGroup, cyclic_group
from .model import ObservedNetwork


class OffsetUnionFind:
    """Disjoint sets with a group element on every parent link.

    ``rel[x]`` satisfies ``g_x = rel[x] * g_parent``; after ``find`` the
    parent is the root, so ``rel[x]`` is the potential of ``x`` with the
    root pinned at the identity.
    """

    def __init__(self, n, group: FiniteGroup):
        self.table = group.compose_table.tolist()
        self.inv = group.inverse_table.tolist()
        self.identity = group.identity
        self.parent = list(range(n))
        self.rel = [group.identity] * n
        self.size = [1] * n

    def find(self, x):
        parent, rel, table = self.parent, self.rel, self.table
        path = []
        while parent[x] != x:
            path.append(x)
            x = parent[x]
        root = x
        # walk back from the node nearest the root, composing toward it
        for node in reversed(path):
            p = parent[node]
            if p != root:
                rel[node] = table[rel[node]][rel[p]]
            parent[node] = root
        return root

    def union(self, i, j, h):
        """Impose ``g_i g_j^{-1} = h``. Returns (consistent, merged)."""
        ri, rj = self.find(i), self.find(j)
        a, b = self.rel[i], self.rel[j]
        table, inv = self.table, self.inv
        if ri == rj:
            return table[a][inv[b]] == h, False
        if self.size[ri] < self.size[rj]:
            # g_ri = y g_rj with y = a^{-1} h b
            self.parent[ri] = rj
            self.rel[ri] = table[table[inv[a]][h]][b]
            self.size[rj] += self.size[ri]
        else:
            # g_rj = x g_ri with x = b^{-1} h^{-1} a
            self.parent[rj] = ri
            self.rel[rj] = table[table[inv[b]][inv[h]]][a]
            self.size[ri] += self.size[rj]
        return True, True

    def potential(self, x):
        self.find(x)
        return self.rel[x]


@dataclass
class SyncFeasibility:
    feasible: bool
    components: list
    potentials: np.ndarray | None = None
    witness: list | None = None  # edges (i, j, g_ij) of one inconsistent cycle
    failed_edges: list = field(default_factory=list)


def _edge_arrays(network, node_subset=None, edge_mask=None):
    mask = np.ones(network.num_edges, dtype=bool) if edge_mask is None else np.asarray(edge_mask, dtype=bool)
    if node_subset is not None:
        mask = mask & network.subgraph_mask(node_subset)
    return network.src[mask], network.dst[mask], network.g[mask]


def _forest_path(adj, start, goal):
    """Node path from start to goal in a forest given as adjacency dict."""
    prev = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if u == goal:
            break
        for v in adj.get(u, ()):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    path = [goal]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def propagate(network, node_subset=None, edge_mask=None):
    """Union-find pass over the selected edges.

    Returns ``(uf, nodes, failed, tree_adj)``: edges that contradict the
    spanning forest built so far land in ``failed`` and are otherwise ignored,
    so the potentials always realise the forest edges.
    """
    src, dst, g = _edge_arrays(network, node_subset, edge_mask)
    nodes = range(network.n) if node_subset is None else sorted(set(int(v) for v in node_subset))
    uf = OffsetUnionFind(network.n, network.group)
    failed = []
    tree_adj = {}
    for i, j, h in zip(src.tolist(), dst.tolist(), g.tolist()):
        ok, merged = uf.union(i, j, h)
        if merged:
            tree_adj.setdefault(i, []).append(j)
            tree_adj.setdefault(j, []).append(i)
        elif not ok:
            failed.append((i, j, h))
    return uf, list(nodes), failed, tree_adj


def _components_from_uf(uf, nodes):
    groups = {}
    for v in nodes:
        groups.setdefault(uf.find(v), []).append(v)
    return sorted(groups.values())


def check_sync_feasible(network: ObservedNetwork, node_subset=None, edge_mask=None):
    """Can group elements on ``node_subset`` realise every internal edge exactly?

    ``edge_mask`` further restricts which edges are checked. Potentials are
    returned with each component root at the identity; on failure the witness
    is the fundamental cycle closed by the first contradicting edge.
    """
    uf, nodes, failed, tree_adj = propagate(network, node_subset, edge_mask)
    components = _components_from_uf(uf, nodes)
    if failed:
        i, j, h = failed[0]
        path = _forest_path(tree_adj, j, i)
        cycle = [(u, v, network.transformation(u, v)) for u, v in zip(path, path[1:])]
        cycle.append((i, j, h))
        return SyncFeasibility(False, components, None, cycle, failed)
    pot = np.full(network.n, network.group.identity, dtype=np.int64)
    for v in nodes:
        pot[v] = uf.potential(v)
    return SyncFeasibility(True, components, pot)


def edges_feasible(n, group, src, dst, g):
    """Fast yes/no feasibility for raw edge lists (hot loop of the exact solver)."""
    uf = OffsetUnionFind(n, group)
    for i, j, h in zip(src, dst, g):
        ok, _ = uf.union(i, j, h)
        if not ok:
            return False
    return True


def connected_components(network, node_subset=None):
    """Partition of ``node_subset`` (default: all nodes) into sorted components."""
    if node_subset is None:
        nodes = np.arange(network.n)
    else:
        nodes = np.array(sorted(set(int(v) for v in node_subset)), dtype=np.int64)
    if nodes.size == 0:
        return []
    src, dst, _ = _edge_arrays(network, nodes)
    _, labels = _components_of(network.n, src, dst)
    labels = labels[nodes]
    comps = {}
    for v, lab in zip(nodes.tolist(), labels.tolist()):
        comps.setdefault(lab, []).append(v)
    return sorted(comps.values())


def _components_of(n, src, dst):
    graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(n, n))
    return _cc(graph, directed=False)


def giant_component_size(network):
    """Size of the largest connected component."""
    _, labels = _components_of(network.n, network.src, network.dst)
    return int(np.bincount(labels).max())


def is_connected(network, node_subset=None):
    return len(connected_components(network, node_subset)) <= 1


@lru_cache(maxsize=8)
def _pairs(n):
    iu, ju = np.triu_indices(n, k=1)
    iu.setflags(write=False)
    ju.setflags(write=False)
    return iu, ju


def sample_er_graph(n, p, rng):
    """G(n, p) as a network over the trivial group."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    iu, ju = _pairs(n)
    present = rng.random(iu.size) < p
    src, dst = iu[present], ju[present]
    return ObservedNetwork(n, cyclic_group(1), src, dst, np.zeros(src.size, dtype=np.int64))


def independent_cycle_count(network, node_subset=None):
    """First Betti number ``|E| - |V| + #components`` of the induced subgraph."""
    components = connected_components(network, node_subset)
    num_nodes = sum(len(c) for c in components)
    num_edges = _edge_arrays(network, node_subset)[0].size
    return int(num_edges - num_nodes + len(components))
