"""
Erdos-Renyi checks
==================

Connectivity flips around a = 1 for p = a log n / n, and a giant component
appears once the mean degree passes 1.
"""
from syncsbm.experiments import connectivity_experiment, giant_component_experiment

for a in (0.5, 0.9, 1.1, 2.0):
    r = connectivity_experiment(1000, a, trials=50, master_seed=11)
    print(f"a={a}: P(connected) ~ {r.rate:.2f}")

g = giant_component_experiment(1000, 0.5, trials=20, master_seed=12)
print("largest component fraction:", round(g.mean_fraction, 3), "min", round(g.min_fraction, 3))
