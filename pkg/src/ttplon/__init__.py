"""Exact Local Optima Networks for small Travelling Thief Problem instances.

Four interdependency models are supported: no coupling (TTP0), the standard
velocity/load coupling (TTPA), item value decay over carrying time (TTPB),
and both (TTPC).
"""

from .backend import kernels
from .generator import (
    GeneratorConfig,
    compute_capacity,
    compute_renting_rate,
    generate_instance,
    generate_items,
    read_instance,
    write_instance,
)
from .graph import MetricsRecord, avg_path_length, clustering_coefficient, er_clustering, metrics
from .lon import Lon, enumerate_solutions, extract_lon
from .model import (
    FeasibilityError,
    Instance,
    Model,
    Solution,
    Trajectory,
    dropped_value,
    fitness,
    raw_value,
    simulate,
    velocity_at,
)
from .search import Policy, joint_neighbours, kp_neighbours, local_search, tsp_neighbours
from .stats import ExperimentConfig, aggregate_class, fisher_mean, run_experiment, spearman

__version__ = "0.1.0"
