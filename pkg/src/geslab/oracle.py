"""Exhaustive enumeration oracles for small node counts.

These are deliberately brute force: they provide ground truth that the search
and metric code is tested against, so they must stay independent of the
operator-based machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .graphs import Dag, GraphError, Pdag, consistent_extension, dag_to_cpdag, v_structures
from .scoring import GaussianBicScorer, ScoreConfig
from .simulate import Dataset

# Number of labelled DAGs by node count, used as a self-check.
DAG_COUNTS = {0: 1, 1: 1, 2: 3, 3: 25, 4: 543, 5: 29281}

_MAX_ENUMERATION_NODES = 5


def enumerate_dags(node_count: int) -> list[Dag]:
    """Every labelled DAG on node_count nodes, node_count <= 5."""
    if node_count > _MAX_ENUMERATION_NODES:
        raise ValueError(f"enumeration is limited to {_MAX_ENUMERATION_NODES} nodes, got {node_count}")
    pairs = list(itertools.combinations(range(node_count), 2))
    dags = []
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                edges.append((a, b))
            elif c == 2:
                edges.append((b, a))
        try:
            dags.append(Dag(node_count, edges))
        except GraphError:
            continue
    return dags


def enumerate_cpdags(node_count: int) -> list[Pdag]:
    """Every CPDAG on node_count nodes, deduplicated, in a stable order."""
    seen = set()
    out = []
    for dag in enumerate_dags(node_count):
        cp = dag_to_cpdag(dag)
        if cp not in seen:
            seen.add(cp)
            out.append(cp)
    return out


@dataclass(frozen=True)
class EquivalenceClass:
    """A Markov equivalence class: its DAG members and its CPDAG."""

    members: frozenset[Dag]
    representative: Pdag


def equivalence_class(graph: Dag | Pdag) -> EquivalenceClass:
    """The Markov equivalence class of graph.

    Accepts either a member DAG or the class CPDAG; enumerates the 2**k
    orientations of the undirected part and keeps those that are acyclic with
    exactly the class's colliders.
    """
    if isinstance(graph, Dag):
        cpdag, reference = dag_to_cpdag(graph), graph
    else:
        cpdag, reference = graph, consistent_extension(graph)
    wanted = v_structures(reference)
    members = set()
    undirected = sorted(cpdag.undirected)
    for flips in itertools.product((False, True), repeat=len(undirected)):
        edges = set(cpdag.directed)
        edges.update((b, a) if flip else (a, b) for (a, b), flip in zip(undirected, flips))
        try:
            candidate = Dag(cpdag.node_count, edges)
        except GraphError:
            continue
        if v_structures(candidate) == wanted:
            members.add(candidate)
    return EquivalenceClass(frozenset(members), cpdag)


def exhaustive_best_local(local_score, node_count: int) -> tuple[float, frozenset[Pdag]]:
    """Globally best-scoring equivalence classes under a pluggable local score.

    local_score(node, parents) must return the local score contribution; the
    DAG total is the sum over nodes.  Returns the best total together with all
    CPDAGs whose canonical member attains it exactly.

    Limited to node_count <= 4 to keep runtime sane (543 DAGs, 32 cached
    locals per node at most).
    """
    if node_count > 4:
        raise ValueError(f"exhaustive_best is limited to 4 nodes, got {node_count}")
    cache: dict[tuple[int, frozenset[int]], float] = {}

    def local(v: int, parents: frozenset[int]) -> float:
        key = (v, parents)
        if key not in cache:
            cache[key] = local_score(v, parents)
        return cache[key]

    best_by_class: dict[Pdag, float] = {}
    for dag in enumerate_dags(node_count):
        cp = dag_to_cpdag(dag)
        if cp in best_by_class:
            continue  # one canonical member per class is enough
        total = sum(local(v, dag.parents(v)) for v in range(node_count))
        best_by_class[cp] = total
    best = max(best_by_class.values())
    winners = frozenset(cp for cp, s in best_by_class.items() if s == best)
    return best, winners


def exhaustive_best(
    data: Dataset, config: ScoreConfig = ScoreConfig()
) -> tuple[Pdag | frozenset[Pdag], float]:
    """Globally best-scoring equivalence class for a dataset by brute force.

    Returns the winning CPDAG and its total score; on an exact score tie the
    first element is the frozenset of all tied CPDAGs instead.
    """
    scorer = GaussianBicScorer(data, config)
    best, winners = exhaustive_best_local(scorer.local, data.p)
    if len(winners) == 1:
        return next(iter(winners)), best
    return winners, best
