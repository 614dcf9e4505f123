"""Finite-group arithmetic on element indices.

Elements are plain integers in ``[0, order)``; the group object carries the
Cayley table, inverse table and identity. Cyclic groups are the default;
anything else (S_3, dihedral groups, ...) comes in through explicit tables.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

import numpy as np


class GroupAxiomError(ValueError):
    """Raised when a table does not describe a group."""


class FiniteGroup:
    """Immutable finite group given by its composition table.

    ``compose_table[g, h]`` is the index of ``g * h``.
    """

    def __init__(self, compose_table, inverse_table, identity, *, validate=True):
        table = np.array(compose_table, dtype=np.int64)
        inv = np.array(inverse_table, dtype=np.int64)
        if table.ndim == 1:
            m = int(round(np.sqrt(table.size)))
            if m * m != table.size:
                raise GroupAxiomError(f"compose table of length {table.size} is not square")
            table = table.reshape(m, m)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise GroupAxiomError(f"compose table must be a non-empty square, got shape {table.shape}")
        m = table.shape[0]
        if inv.shape != (m,):
            raise GroupAxiomError(f"inverse table must have length {m}, got shape {inv.shape}")
        self.order = m
        self.identity = int(identity)
        table.setflags(write=False)
        inv.setflags(write=False)
        self.compose_table = table
        self.inverse_table = inv
        if validate:
            self._check_axioms()

    def _check_axioms(self):
        m = self.order
        t = self.compose_table
        if not 0 <= self.identity < m:
            raise GroupAxiomError(f"identity {self.identity} out of range for order {m}")
        if t.min() < 0 or t.max() >= m:
            raise GroupAxiomError("compose table holds indices outside [0, order)")
        if self.inverse_table.min() < 0 or self.inverse_table.max() >= m:
            raise GroupAxiomError("inverse table holds indices outside [0, order)")
        full = np.arange(m)
        for g in range(m):
            row = np.sort(t[g])
            if not np.array_equal(row, full):
                raise GroupAxiomError(f"row {g} of compose table is not a permutation")
            col = np.sort(t[:, g])
            if not np.array_equal(col, full):
                raise GroupAxiomError(f"column {g} of compose table is not a permutation")
        e = self.identity
        for g in range(m):
            if t[e, g] != g or t[g, e] != g:
                raise GroupAxiomError(f"identity {e} fails on element {g}")
            gi = self.inverse_table[g]
            if t[g, gi] != e or t[gi, g] != e:
                raise GroupAxiomError(f"inverse table wrong for pair ({g}, {gi})")
        # (g*h)*k == g*(h*k) for every triple, vectorised over k
        for g, h in itertools.product(range(m), repeat=2):
            left = t[t[g, h]]
            right = t[g][t[h]]
            bad = np.nonzero(left != right)[0]
            if bad.size:
                raise GroupAxiomError(f"associativity fails on triple ({g}, {h}, {int(bad[0])})")

    def _check(self, *elements):
        for g in elements:
            if not 0 <= g < self.order:
                raise IndexError(f"element {g} out of range for group of order {self.order}")

    def compose(self, g, h):
        self._check(g, h)
        return int(self.compose_table[g, h])

    def inverse(self, g):
        self._check(g)
        return int(self.inverse_table[g])

    def divide(self, g, h):
        """Return ``g * h^{-1}``."""
        self._check(g, h)
        return int(self.compose_table[g, self.inverse_table[h]])

    def uniform_sample(self, rng, size=None):
        """Uniform element(s); each index has probability exactly ``1/order``."""
        out = rng.integers(0, self.order, size=size)
        return int(out) if size is None else out

    def is_abelian(self):
        return bool(np.array_equal(self.compose_table, self.compose_table.T))

    def to_dict(self):
        return {
            "order": self.order,
            "compose": self.compose_table.ravel().tolist(),
            "inverse": self.inverse_table.tolist(),
            "identity": self.identity,
        }

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return (
            self.identity == other.identity
            and np.array_equal(self.compose_table, other.compose_table)
            and np.array_equal(self.inverse_table, other.inverse_table)
        )

    def __hash__(self):
        return hash((self.identity, self.compose_table.tobytes()))

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def cyclic_group(M):
    """Z_M with addition mod M."""
    M = int(M)
    if M < 1:
        raise ValueError(f"group order must be >= 1, got {M}")
    idx = np.arange(M)
    table = (idx[:, None] + idx[None, :]) % M
    inverse = (-idx) % M
    return FiniteGroup(table, inverse, 0, validate=False)


def group_from_tables(compose_table, inverse_table, identity):
    """Build a group from explicit tables, checking every axiom."""
    return FiniteGroup(compose_table, inverse_table, identity, validate=True)


def permutation_group(perms):
    """Group formed by a closed list of permutations (tuples), composed as functions.

    ``compose(a, b)`` is the permutation ``x -> a[b[x]]``. The identity
    permutation must be in the list.
    """
    perms = [tuple(p) for p in perms]
    index = {p: i for i, p in enumerate(perms)}
    size = len(perms[0])
    ident = tuple(range(size))
    if ident not in index:
        raise GroupAxiomError("identity permutation missing")
    table = np.empty((len(perms), len(perms)), dtype=np.int64)
    for i, a in enumerate(perms):
        for j, b in enumerate(perms):
            c = tuple(a[b[x]] for x in range(size))
            if c not in index:
                raise GroupAxiomError(f"set not closed: {a} o {b} = {c}")
            table[i, j] = index[c]
    inverse = []
    for a in perms:
        inv = [0] * size
        for x, y in enumerate(a):
            inv[y] = x
        inverse.append(index[tuple(inv)])
    return group_from_tables(table, inverse, index[ident])


def symmetric_group(k):
    """S_k as a permutation group (k! elements, lexicographic order)."""
    return permutation_group(itertools.permutations(range(k)))


def load_group_table(path):
    """Read a group from JSON ``{order, compose, inverse, identity}``."""
    with open(Path(path)) as fh:
        data = json.load(fh)
    group = group_from_tables(data["compose"], data["inverse"], data["identity"])
    if "order" in data and int(data["order"]) != group.order:
        raise GroupAxiomError(f"declared order {data['order']} != table size {group.order}")
    return group


def save_group_table(group, path):
    with open(Path(path), "w") as fh:
        json.dump(group.to_dict(), fh)
