"""
A small phase diagram
=====================

Success rates of the exact solver over an (a, b) grid. Cells whose
probabilities exceed 1 at this n are skipped.
"""
from syncsbm.experiments import ExperimentConfig, phase_csv, phase_diagram

config = ExperimentConfig(n=12, M=2, a=1, b=1, trials=30, master_seed=3)
cells = phase_diagram([1.0, 2.0, 4.0], [0.0, 0.5, 1.0], config)
print(phase_csv(cells))

# all cells share trial seeds, so differences between cells are not seed noise
