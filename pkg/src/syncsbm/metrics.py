"""Exact-recovery distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .group import FiniteGroup


@dataclass(frozen=True)
class RecoveryDistances:
    dist_c: int
    dist_g: int


def dist_c(kappa, kappa_star):
    """0 when the labelings agree up to swapping the two labels, else 1."""
    kappa = np.asarray(kappa)
    kappa_star = np.asarray(kappa_star)
    if kappa.shape != kappa_star.shape:
        raise ValueError(f"length mismatch: {kappa.size} vs {kappa_star.size}")
    if np.array_equal(kappa, kappa_star):
        return 0
    swapped = np.where(kappa == 1, 2, np.where(kappa == 2, 1, kappa))
    return 0 if np.array_equal(swapped, kappa_star) else 1


def dist_g(g, g_star, kappa_star, group: FiniteGroup):
    """Number of true communities whose elements are not recovered up to a right offset.

    A community counts as recovered when one offset ``o`` gives
    ``g_star[i] == g[i] * o`` for all its members.
    """
    g = np.asarray(g, dtype=np.int64)
    g_star = np.asarray(g_star, dtype=np.int64)
    kappa_star = np.asarray(kappa_star)
    if not (g.shape == g_star.shape == kappa_star.shape):
        raise ValueError("g, g_star and kappa_star must have the same length")
    total = 0
    for label in np.unique(kappa_star):
        members = kappa_star == label
        # rows: offsets; g[i] * o for every offset at once
        shifted = group.compose_table[g[members]].T
        ok = np.all(shifted == g_star[members], axis=1)
        total += 0 if ok.any() else 1
    return total


def trial_success(distances: RecoveryDistances):
    """(cluster_success, group_success) for one trial."""
    return distances.dist_c == 0, distances.dist_g == 0


def misclassified_fraction(kappa, kappa_star):
    """Diagnostic only: smallest fraction of wrong labels over both label matchings."""
    kappa = np.asarray(kappa)
    kappa_star = np.asarray(kappa_star)
    wrong = np.mean(kappa != kappa_star)
    return float(min(wrong, 1.0 - wrong))
