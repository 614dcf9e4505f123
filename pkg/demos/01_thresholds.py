"""
Threshold calculator
====================

Where does a point (a, b) sit relative to the recovery thresholds?
"""
from syncsbm.theory import boundary_b, threshold_report

###############################################################################
# A single report: the cluster condition grows with the group order M, the
# group condition only needs the in-community graph to be connected.

for M in (1, 2, 8):
    r = threshold_report(a=6.0, b=1.0, M=M)
    print(f"M={M}: cluster lhs {r.cluster_lhs:.3f}, region {r.region.value}")

###############################################################################
# Boundary curves. For each a, the values of b where the cluster condition is
# exactly 1 (None means the curve misses that a).

for a in (2.0, 4.0, 8.0, 16.0):
    print(a, boundary_b(a, M=2), boundary_b(a, which="sdp"))
