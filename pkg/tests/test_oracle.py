"""Enumeration oracles: labelled-DAG counts, class partitions, exhaustive search."""

from __future__ import annotations

import random

import pytest

from geslab.graphs import Dag, Pdag, dag_to_cpdag
from geslab.oracle import (
    DAG_COUNTS,
    enumerate_cpdags,
    enumerate_dags,
    equivalence_class,
    exhaustive_best_local,
)


@pytest.mark.parametrize("p", [0, 1, 2, 3, 4])
def test_labelled_dag_counts(p):
    assert len(enumerate_dags(p)) == DAG_COUNTS[p]


def test_labelled_dag_count_five_nodes():
    assert len(enumerate_dags(5)) == DAG_COUNTS[5]


def test_enumerate_dags_rejects_large_inputs():
    with pytest.raises(ValueError):
        enumerate_dags(6)


def test_classes_partition_all_dags():
    for p in (2, 3, 4):
        dags = enumerate_dags(p)
        classes = enumerate_cpdags(p)
        sizes = [len(equivalence_class(cp).members) for cp in classes]
        assert sum(sizes) == len(dags)
        seen = set()
        for cp in classes:
            members = equivalence_class(cp).members
            assert not (members & seen)
            seen |= members
        assert len(seen) == len(dags)


def test_chain_class_has_three_members():
    chain = Dag(3, [(0, 1), (1, 2)])
    cls = equivalence_class(chain)
    assert cls.representative == dag_to_cpdag(chain)
    assert cls.members == frozenset(
        {
            Dag(3, [(0, 1), (1, 2)]),
            Dag(3, [(1, 0), (1, 2)]),
            Dag(3, [(1, 0), (2, 1)]),
        }
    )


def test_collider_class_is_singleton():
    collider = Dag(3, [(0, 1), (2, 1)])
    assert equivalence_class(collider).members == frozenset({collider})


def test_every_member_maps_to_the_same_cpdag():
    rng = random.Random(11)
    dags = enumerate_dags(4)
    for dag in rng.sample(dags, 60):
        cp = dag_to_cpdag(dag)
        cls = equivalence_class(dag)
        members = cls.members
        assert cls.representative == cp
        assert dag in members
        for member in members:
            assert dag_to_cpdag(member) == cp


def test_exhaustive_best_finds_planted_structure():
    target_parents = {0: frozenset(), 1: frozenset({0, 2}), 2: frozenset()}

    def local_score(v, parents):
        return -float(len(frozenset(parents) ^ target_parents[v]))

    best, winners = exhaustive_best_local(local_score, 3)
    assert best == 0.0
    assert winners == frozenset({Pdag(3, directed=[(0, 1), (2, 1)])})


def test_exhaustive_best_rejects_large_inputs():
    with pytest.raises(ValueError):
        exhaustive_best_local(lambda v, parents: 0.0, 5)


def test_exhaustive_best_ties_report_all_classes():
    best, winners = exhaustive_best_local(lambda v, parents: 0.0, 2)
    assert best == 0.0
    assert winners == frozenset(
        {Pdag(2), Pdag(2, undirected=[(0, 1)])}
    )
