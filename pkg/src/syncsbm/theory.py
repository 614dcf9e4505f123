"""Closed-form exact-recovery thresholds with ``p = a log n / n`` and ``q = b log n / n``.

Boundaries are strict: a point sitting exactly on a threshold is classified
as impossible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.optimize import brentq

class Region(str, enum.Enum):
    IMPOSSIBLE = "Impossible"
    CLUSTER_ONLY = "ClusterOnly"
    BOTH = "Both"


def _check_rates(a, b):
    if a < 0 or b < 0:
        raise ValueError(f"rates must be non-negative, got a={a}, b={b}")


def cluster_threshold_lhs(a, b, M):
    """``(a + b)/2 - sqrt(a b / M)``; community recovery needs this above 1."""
    _check_rates(a, b)
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    return (a + b) / 2 - math.sqrt(a * b / M)


def cluster_threshold_lhs_limit(a, b):
    """Large-M form ``(a + b)/2`` (the connectivity threshold of the whole graph).

    Conjectural: the finite-group results do not cover M growing without bound.
    """
    _check_rates(a, b)
    return (a + b) / 2


def sbm_threshold_lhs(a, b):
    """``(sqrt(a) - sqrt(b))^2``; the plain SBM needs this above 2."""
    _check_rates(a, b)
    return (math.sqrt(a) - math.sqrt(b)) ** 2


def connectivity_lhs(a):
    """``a/2``; each community is connected w.h.p. iff this exceeds 1."""
    _check_rates(a, 0)
    return a / 2


def sdp_threshold_lhs(a, b):
    """``a - sqrt(2b) log(e a / sqrt(2b))``; the SDP succeeds above 2."""
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    if b < 0:
        raise ValueError(f"b must be non-negative, got {b}")
    if b == 0:
        return float(a)
    s = math.sqrt(2 * b)
    # split the log so tiny a does not underflow to log(0)
    return a - s * (1 + math.log(a) - math.log(s))


def gpm_condition(a, b):
    """Sufficient condition for the generalized power method: ``sqrt(2b) < a`` and SDP lhs above 2."""
    return math.sqrt(2 * b) < a and sdp_threshold_lhs(a, b) > 2


def spectral_condition_lhs(a, b):
    """``sqrt(a + b)/a``; compared against an unspecified constant, so no verdict."""
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    if b < 0:
        raise ValueError(f"b must be non-negative, got {b}")
    return math.sqrt(a + b) / a


def classify_region(a, b, M):
    cluster_ok = cluster_threshold_lhs(a, b, M) > 1
    if not cluster_ok:
        return Region.IMPOSSIBLE
    return Region.BOTH if connectivity_lhs(a) > 1 else Region.CLUSTER_ONLY


@dataclass(frozen=True)
class ThresholdReport:
    a: float
    b: float
    M: int
    cluster_lhs: float
    cluster_possible: bool
    connectivity_lhs: float
    group_possible: bool
    sbm_lhs: float
    sdp_lhs: float | None
    gpm_ok: bool | None
    spectral_lhs: float | None
    region: Region


def threshold_report(a, b, M):
    cl = cluster_threshold_lhs(a, b, M)
    region = classify_region(a, b, M)
    positive = a > 0
    return ThresholdReport(
        a=a, b=b, M=M,
        cluster_lhs=cl,
        cluster_possible=cl > 1,
        connectivity_lhs=connectivity_lhs(a),
        group_possible=region is Region.BOTH,
        sbm_lhs=sbm_threshold_lhs(a, b),
        sdp_lhs=sdp_threshold_lhs(a, b) if positive else None,
        gpm_ok=gpm_condition(a, b) if positive else None,
        spectral_lhs=spectral_condition_lhs(a, b) if positive else None,
        region=region,
    )


def _bisect(f, lo, hi):
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * 2.220446049250313e-16, maxiter=500)


def _roots_on_halfline(f, mid):
    """Roots in ``t >= 0`` of a function decreasing on [0, mid] and increasing to +inf after."""
    roots = []
    f_lo, f_mid = f(0.0), f(mid)
    if f_mid > 0:
        return None
    if f_lo == 0:
        roots.append(0.0)
    elif f_lo > 0:
        roots.append(_bisect(f, 0.0, mid))
    if f_mid == 0:
        if not roots or roots[-1] != mid:
            roots.append(mid)
        return tuple(roots)
    hi = max(2 * mid, 1.0)
    while f(hi) <= 0:
        hi *= 2
    roots.append(_bisect(f, mid, hi))
    return tuple(roots)


def boundary_b(a, M=1, which="cluster"):
    """Values of ``b >= 0`` on a threshold curve for fixed ``a``.

    Returns a tuple of roots in increasing order (one or two of them), or
    ``None`` when the curve does not cross this ``a``. ``which`` selects the
    community threshold (lhs = 1) or the SDP threshold (lhs = 2). Both curves
    are solved in ``t = sqrt(b)``, where they are convex with a single minimum.
    """
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    if which == "cluster":
        # t^2/2 - sqrt(a/M) t + a/2 - 1, minimal at t = sqrt(a/M)
        f = lambda t: cluster_threshold_lhs(a, t * t, M) - 1
        roots = _roots_on_halfline(f, math.sqrt(a / M))
    elif which == "sdp":
        # minimal where sqrt(2b) = a, i.e. t = a / sqrt(2)
        f = lambda t: sdp_threshold_lhs(a, t * t) - 2
        roots = _roots_on_halfline(f, a / math.sqrt(2))
    else:
        raise ValueError(f"unknown boundary {which!r}")
    return None if roots is None else tuple(t * t for t in roots)
