"""Score-based causal structure search over simulated linear-Gaussian data.

Greedy equivalence search with a penalized Gaussian likelihood score, random
SEM simulation, equal-width binning, recovery metrics, and a seeded factorial
experiment harness.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .binning import CONTINUOUS, BinSpec, bin_equal_width
from .graphs import (
    Dag,
    GraphError,
    Pdag,
    consistent_extension,
    dag_to_cpdag,
    is_cpdag,
    meek_closure,
    parse_dag,
    parse_pdag,
    pdag_to_cpdag,
    read_dag,
    read_pdag,
    skeleton,
    v_structures,
    write_graph,
)
from .metrics import MetricCounts, MetricsReport, adjacency_metrics, shd
from .oracle import EquivalenceClass, enumerate_cpdags, enumerate_dags, equivalence_class, exhaustive_best
from .scoring import GaussianBicScorer, ScoreConfig, ScoreError, local_bic, total_score
from .search import Operator, SearchConfig, SearchResult, apply_operator, enumerate_operators, ges
from .simulate import (
    DagSpec,
    Dataset,
    assign_weights,
    dag3_fixture,
    fixture_dag,
    random_dag,
    read_dataset,
    sample_data,
    sem_covariance,
    write_dataset,
)

__all__ = [
    "BinSpec",
    "CONTINUOUS",
    "Dag",
    "DagSpec",
    "Dataset",
    "EquivalenceClass",
    "GaussianBicScorer",
    "GraphError",
    "MetricCounts",
    "MetricsReport",
    "Operator",
    "Pdag",
    "ScoreConfig",
    "ScoreError",
    "SearchConfig",
    "SearchResult",
    "adjacency_metrics",
    "apply_operator",
    "assign_weights",
    "bin_equal_width",
    "consistent_extension",
    "dag3_fixture",
    "dag_to_cpdag",
    "enumerate_cpdags",
    "enumerate_dags",
    "enumerate_operators",
    "equivalence_class",
    "exhaustive_best",
    "fixture_dag",
    "ges",
    "is_cpdag",
    "local_bic",
    "meek_closure",
    "parse_dag",
    "parse_pdag",
    "pdag_to_cpdag",
    "random_dag",
    "read_dag",
    "read_dataset",
    "read_pdag",
    "sample_data",
    "sem_covariance",
    "shd",
    "skeleton",
    "total_score",
    "v_structures",
    "write_dataset",
    "write_graph",
]
