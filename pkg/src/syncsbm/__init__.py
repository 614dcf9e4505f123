"""Joint community detection and group synchronization: simulation and exact inference."""

__version__ = "0.1.0"

from .group import FiniteGroup, GroupAxiomError, cyclic_group, group_from_tables, symmetric_group
from .model import Hypothesis, ModelParams, ObservedNetwork, canonical_truth, edge_views, generate_network
from .metrics import RecoveryDistances, dist_c, dist_g, trial_success
from .consistency import (
    check_sync_feasible,
    connected_components,
    giant_component_size,
    independent_cycle_count,
    sample_er_graph,
)
from .mle import MleResult, Regime, log_likelihood_ratio, naive_oracle, regime, solve_exact, synchronize_within_clusters
from .baseline import spectral_bisection, two_stage_recover
from .theory import (
    Region,
    boundary_b,
    classify_region,
    cluster_threshold_lhs,
    gpm_condition,
    sdp_threshold_lhs,
    spectral_condition_lhs,
    threshold_report,
)
from .experiments import (
    ExperimentConfig,
    connectivity_experiment,
    cycle_probability_experiment,
    estimate_success,
    giant_component_experiment,
    phase_diagram,
    run_trial,
    wilson_interval,
)
