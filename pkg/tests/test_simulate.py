import numpy as np
import pytest

from geslab.simulate import (
    DagSpec,
    Dataset,
    FIXTURE_SPECS,
    assign_weights,
    dag3_fixture,
    fixture_dag,
    random_dag,
    read_dataset,
    sample_data,
    sem_covariance,
    write_dataset,
)
from geslab.graphs import Dag


def test_dag_spec_validation():
    with pytest.raises(ValueError):
        DagSpec(0, 0.5)
    with pytest.raises(ValueError):
        DagSpec(3, 1.5)
    with pytest.raises(ValueError):
        DagSpec(3, 0.5, target_edge_count=4)


def test_random_dag_edge_count_and_determinism():
    spec = DagSpec(6, 0.4, target_edge_count=7, seed=3)
    dag = random_dag(spec)
    assert dag.node_count == 6
    assert len(dag.edges) == 7
    assert random_dag(spec) == dag


def test_random_dag_density_extremes():
    assert len(random_dag(DagSpec(5, 0.0, seed=1)).edges) == 0
    assert len(random_dag(DagSpec(5, 1.0, seed=1)).edges) == 10


def test_random_dag_rejection_cap():
    spec = DagSpec(3, 1.0, target_edge_count=1, seed=0)
    with pytest.raises(RuntimeError):
        random_dag(spec, max_tries=25)


def test_random_dag_varies_topological_order():
    tails = set()
    rng = np.random.default_rng(9)
    for _ in range(40):
        dag = random_dag(DagSpec(4, 1.0), rng)
        order = dag.topological_order()
        tails.add(order[0])
    assert len(tails) > 1


def test_assign_weights_ranges():
    dag = Dag(4, [(0, 1), (1, 2), (2, 3)])
    weighted = assign_weights(dag, np.random.default_rng(0))
    assert set(weighted.weights) == set(dag.edges)
    assert all(0.1 <= w <= 1.0 for w in weighted.weights.values())
    narrow = assign_weights(dag, np.random.default_rng(0), low=0.5, high=1.0)
    assert all(0.5 <= w <= 1.0 for w in narrow.weights.values())


def test_sample_data_requires_weights():
    with pytest.raises(ValueError, match="assign_weights"):
        sample_data(Dag(2, [(0, 1)]), 10, np.random.default_rng(0))


def test_sample_data_matches_analytic_covariance():
    dag = Dag(3, [(0, 1), (1, 2)]).with_weights({(0, 1): 0.8, (1, 2): 0.6})
    data = sample_data(dag, 60_000, np.random.default_rng(42))
    want = sem_covariance(dag)
    got = np.cov(data.values, rowvar=False)
    assert np.allclose(got, want, atol=0.06)


def test_sample_data_deterministic_for_seed():
    dag = assign_weights(dag3_fixture(), np.random.default_rng(5))
    a = sample_data(dag, 100, np.random.default_rng(7))
    b = sample_data(dag, 100, np.random.default_rng(7))
    assert np.array_equal(a.values, b.values)


def test_dag3_shape():
    dag = dag3_fixture()
    assert dag.node_count == 5
    assert len(dag.edges) == 7
    assert dag.parents(3) == frozenset({0, 1, 2, 4})
    for a in range(4):
        for b in range(a + 1, 4):
            assert (a, b) in dag.edges


def test_fixture_registry_shapes():
    want = {"dag1": (5, 3), "dag2": (5, 5), "dag3": (5, 7), "dag4": (20, 51), "dag5": (20, 99)}
    for name, (nodes, edges) in want.items():
        dag = fixture_dag(name)
        assert dag.node_count == nodes
        assert len(dag.edges) == edges
        assert set(dag.weights) == set(dag.edges)
    assert set(FIXTURE_SPECS) == set(want)


def test_fixture_weights_are_stable():
    assert fixture_dag("dag2") == fixture_dag("dag2")
    with pytest.raises(KeyError):
        fixture_dag("dag9")


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.array([[1.0, np.inf]]))
    with pytest.raises(ValueError):
        Dataset(np.ones((2, 2)), ("a",))
    with pytest.raises(ValueError):
        Dataset(np.ones((2, 2)), ("a", "a"))
    ds = Dataset(np.ones((2, 3)))
    assert ds.column_labels == ("X0", "X1", "X2")
    assert (ds.n, ds.p) == (2, 3)


def test_dataset_csv_roundtrip_is_exact(tmp_path):
    dag = fixture_dag("dag1")
    data = sample_data(dag, 50, np.random.default_rng(13))
    path = tmp_path / "data.csv"
    write_dataset(data, path)
    back = read_dataset(path)
    assert back.column_labels == data.column_labels
    assert np.array_equal(back.values, data.values)
    assert back.provenance == "continuous"


def test_read_dataset_rejects_empty(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(ValueError):
        read_dataset(path)
    path.write_text("a,b\n")
    with pytest.raises(ValueError):
        read_dataset(path)
