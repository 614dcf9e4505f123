"""
Cycle consistency
=================

With uniform edge labels, a graph with r independent cycles is consistent
with probability M^-r.
"""
from syncsbm.experiments import TOPOLOGIES, cycle_probability_experiment

for topo in TOPOLOGIES:
    for M in (2, 3):
        r = cycle_probability_experiment(M, topo, trials=20000, master_seed=5)
        print(f"{topo:>13} M={M}: observed {r.rate:.4f}, expected {r.expected:.4f}")
