"""Structural recovery metrics: SHD plus skeleton-level rates."""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Dag, GraphError, Pdag, dag_to_cpdag, skeleton


@dataclass(frozen=True)
class MetricCounts:
    true_edges_found: int
    false_edges: int
    gold_edges: int
    gold_gaps: int
    found_edges: int


@dataclass(frozen=True)
class MetricsReport:
    shd: int
    tpr: float
    fpr: float
    tdr: float
    f1: float
    counts: MetricCounts


def shd(found: Pdag, gold: Pdag) -> int:
    """Structural Hamming distance between completed graphs: one unit per node
    pair whose edge mark pattern (absent, undirected, either direction)
    differs."""
    if found.node_count != gold.node_count:
        raise GraphError(
            f"node counts differ: {found.node_count} vs {gold.node_count}"
        )
    total = 0
    for a in range(found.node_count):
        for b in range(a + 1, found.node_count):
            if found.edge_mark(a, b) != gold.edge_mark(a, b):
                total += 1
    return total


def adjacency_metrics(found: Pdag, gold_dag: Dag) -> MetricsReport:
    """Orientation-blind recovery rates of found against the true DAG, plus
    SHD of found against the true DAG's completed class.

    Degenerate denominators resolve to zero: TDR with no found edges, F1 with
    TPR + TDR = 0, FPR with no gold gaps, TPR with no gold edges.
    """
    if found.node_count != gold_dag.node_count:
        raise GraphError(
            f"node counts differ: {found.node_count} vs {gold_dag.node_count}"
        )
    p = gold_dag.node_count
    sk_found = skeleton(found)
    sk_gold = skeleton(gold_dag)
    tp = len(sk_found & sk_gold)
    fp = len(sk_found - sk_gold)
    gold_edges = len(sk_gold)
    gold_gaps = p * (p - 1) // 2 - gold_edges
    found_edges = len(sk_found)
    tpr = tp / gold_edges if gold_edges else 0.0
    fpr = fp / gold_gaps if gold_gaps else 0.0
    tdr = tp / found_edges if found_edges else 0.0
    f1 = 2.0 * tdr * tpr / (tdr + tpr) if tdr + tpr > 0 else 0.0
    return MetricsReport(
        shd=shd(found, dag_to_cpdag(gold_dag)),
        tpr=tpr,
        fpr=fpr,
        tdr=tdr,
        f1=f1,
        counts=MetricCounts(tp, fp, gold_edges, gold_gaps, found_edges),
    )
