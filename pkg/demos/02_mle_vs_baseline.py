"""
Exact MLE against a two-stage baseline
======================================
"""
import numpy as np

from syncsbm.baseline import two_stage_recover
from syncsbm.metrics import dist_c
from syncsbm.mle import solve_exact
from syncsbm.model import ModelParams, canonical_truth, generate_network

rng = np.random.default_rng(7)
params = ModelParams.from_rates(n=16, M=3, a=4.0, b=0.5)
truth = canonical_truth(params, rng)
net = generate_network(params, truth, rng)
print(params, "edges:", len(net.src))

###############################################################################
# The exact solver enumerates balanced bipartitions and keeps the ones whose
# in-community edges admit a consistent group assignment.

res = solve_exact(net, params)
print(res.regime.value, "value", res.optimal_value, "optima", res.num_optima)
for opt in res.optima:
    print("  dist_c =", dist_c(opt.kappa, truth.kappa))

###############################################################################
# Spectral bisection followed by synchronization on each side.

base = two_stage_recover(net, params, rng, truth=truth)
print("baseline dist_c", base.dist_c, "dist_g", base.dist_g)
