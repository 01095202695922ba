"""Acceptance gate: eight end-to-end checks at fixed seeds and tolerances.

Each test prints one verdict line so a full run reads as a checklist.  The
seeds below are frozen; changing them invalidates the recorded rates.
"""

from __future__ import annotations

import os
import tempfile
import time

import numpy as np
import pytest

from geslab.binning import CONTINUOUS, BinSpec
from geslab.experiment import ExperimentPlan, desk_plan, run_experiment, write_results
from geslab.graphs import Dag, Pdag, dag_to_cpdag, is_cpdag
from geslab.metrics import adjacency_metrics, shd
from geslab.oracle import enumerate_dags, exhaustive_best
from geslab.scoring import GaussianBicScorer, ScoreConfig
from geslab.search import SearchConfig, ges
from geslab.simulate import (
    DagSpec,
    Dataset,
    assign_weights,
    dag3_fixture,
    fixture_dag,
    random_dag,
    sample_data,
)


def _verdict(label: str, ok: bool, detail: str) -> bool:
    print(f"acceptance[{label}]: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(key))


def _random_instance(rng: np.random.Generator, p: int, n: int):
    prob = float(rng.uniform(0.2, 0.8))
    dag = assign_weights(random_dag(DagSpec(p, prob), rng), rng)
    return dag, sample_data(dag, n, rng)


@pytest.fixture(scope="module")
def desk_rows():
    start = time.time()
    rows = run_experiment(desk_plan(), workers=2)
    return rows, time.time() - start


def _mean(vals):
    return sum(vals) / len(vals)


def test_1_score_equivalence_within_markov_classes():
    """Every member of a Markov class gets the same total score."""
    start = time.time()
    classes: dict[Pdag, list[Dag]] = {}
    for dag in enumerate_dags(4):
        classes.setdefault(dag_to_cpdag(dag), []).append(dag)
    worst = 0.0
    for i in range(200):
        rng = _rng(101, i)
        _, data = _random_instance(rng, 4, 200)
        scorer = GaussianBicScorer(data, ScoreConfig())
        for members in classes.values():
            totals = [
                sum(scorer.local(v, frozenset(d.parents(v))) for v in range(4))
                for d in members
            ]
            lo, hi = min(totals), max(totals)
            worst = max(worst, (hi - lo) / max(1.0, abs(hi)))
    elapsed = time.time() - start
    ok = worst <= 1e-8 and elapsed <= 120
    _verdict(
        "1 score equivalence",
        ok,
        f"max within-class rel spread {worst:.2e} over 200 datasets, {elapsed:.0f}s",
    )
    assert worst <= 1e-8
    assert elapsed <= 120


def _oracle_mark(g: Pdag, a: int, b: int) -> str:
    if (a, b) in g.directed:
        return ">"
    if (b, a) in g.directed:
        return "<"
    if (a, b) in g.undirected or (b, a) in g.undirected:
        return "-"
    return ""


def _oracle_adjacent_pairs(edges) -> set[tuple[int, int]]:
    return {(min(a, b), max(a, b)) for a, b in edges}


def test_2_metrics_match_bruteforce_oracle():
    """SHD and the adjacency rates agree exactly with a from-scratch count."""
    start = time.time()
    for i in range(1000):
        rng = _rng(606, i)
        p = int(rng.integers(3, 9))
        if i % 10 == 0:
            gold_prob, found_prob = 0.0, float(rng.uniform(0.0, 1.0))
        elif i % 10 == 9:
            gold_prob, found_prob = 1.0, 0.0
        else:
            gold_prob = float(rng.uniform(0.0, 1.0))
            found_prob = float(rng.uniform(0.0, 1.0))
        gold = random_dag(DagSpec(p, gold_prob), rng)
        found = dag_to_cpdag(random_dag(DagSpec(p, found_prob), rng))
        report = adjacency_metrics(found, gold)

        gold_cpdag = dag_to_cpdag(gold)
        want_shd = sum(
            _oracle_mark(found, a, b) != _oracle_mark(gold_cpdag, a, b)
            for a in range(p)
            for b in range(a + 1, p)
        )
        sk_gold = _oracle_adjacent_pairs(gold.edges)
        sk_found = _oracle_adjacent_pairs(
            set(found.directed) | set(found.undirected)
        )
        tp = len(sk_found & sk_gold)
        fp = len(sk_found - sk_gold)
        gold_edges = len(sk_gold)
        gold_gaps = p * (p - 1) // 2 - gold_edges
        found_edges = len(sk_found)
        tpr = tp / gold_edges if gold_edges else 0.0
        fpr = fp / gold_gaps if gold_gaps else 0.0
        tdr = tp / found_edges if found_edges else 0.0
        f1 = 2.0 * tdr * tpr / (tdr + tpr) if tdr + tpr > 0 else 0.0

        assert report.shd == want_shd
        assert shd(found, gold_cpdag) == want_shd
        assert report.tpr == tpr
        assert report.fpr == fpr
        assert report.tdr == tdr
        assert report.f1 == f1
    elapsed = time.time() - start
    ok = elapsed <= 60
    _verdict("2 metric oracle", ok, f"1000 pairs exact, {elapsed:.0f}s")
    assert elapsed <= 60


def test_3_search_traces_valid_and_monotone():
    """Every intermediate graph is a CPDAG and every step strictly improves."""
    bad = 0
    for i in range(500):
        rng = _rng(202, i)
        p = int(rng.integers(3, 7))
        n = int(rng.integers(80, 400))
        _, data = _random_instance(rng, p, n)
        steps: list[Pdag] = []
        res = ges(data, SearchConfig(score=ScoreConfig()), on_step=steps.append)
        ok = all(is_cpdag(s) for s in steps)
        ok &= all(delta > 0.0 for _, _, delta in res.trace)
        scorer = GaussianBicScorer(data, ScoreConfig())
        empty = sum(scorer.local(v, frozenset()) for v in range(p))
        want = empty + sum(delta for _, _, delta in res.trace)
        ok &= abs(res.final_score - want) <= 1e-8 * max(1.0, abs(want))
        bad += not ok
    _verdict("3 search validity", bad == 0, f"{500 - bad}/500 traces clean")
    assert bad == 0


def test_4_small_instance_optimality_rate():
    """Greedy search matches the exhaustive optimum on nearly all instances.

    The 0.95 gate was frozen from a pilot of this exact seeded procedure,
    which measured 197/200.
    """
    hits = 0
    for i in range(200):
        rng = _rng(424, i)
        _, data = _random_instance(rng, 4, 1000)
        res = ges(data, SearchConfig(score=ScoreConfig(lam=1.0)))
        _, best_score = exhaustive_best(data, ScoreConfig(lam=1.0))
        if abs(res.final_score - best_score) <= 1e-8 * max(1.0, abs(best_score)):
            hits += 1
    rate = hits / 200
    _verdict("4 optimality rate", rate >= 0.95, f"{hits}/200 = {rate:.3f}, gate 0.95")
    assert rate >= 0.95


def test_5_large_sample_recovery_of_fixture_class():
    """Strong-weight redraws of the dense-sink fixture are recovered at scale.

    Known shortfall, analyzed in the README: at this sample size roughly one
    weight draw in seven lets a rival equivalence class out-score the
    generating one (conditioning on the shared collider nearly cancels a weak
    direct effect), and the greedy moves stall in genuine one-edit local
    optima on another tenth of draws.  The gate stays at 0.90 rather than
    being tuned down to what the search happens to achieve.
    """
    start = time.time()
    gold = dag_to_cpdag(dag3_fixture())
    hits = 0
    for trial in range(50):
        rng = _rng(535, trial)
        dag = assign_weights(dag3_fixture(), rng, low=0.5, high=1.0)
        data = sample_data(dag, 50_000, rng)
        res = ges(data, SearchConfig(score=ScoreConfig(lam=1.0)))
        hits += res.graph == gold
    elapsed = time.time() - start
    rate = hits / 50
    ok = rate >= 0.90 and elapsed <= 300
    _verdict(
        "5 large-sample recovery",
        ok,
        f"{hits}/50 = {rate:.2f}, gate 0.90, {elapsed:.0f}s",
    )
    assert elapsed <= 300
    assert rate >= 0.90


def test_6_binning_and_sample_size_trends(desk_rows):
    """Desk-scale runs reproduce the three headline trends."""
    rows, elapsed = desk_rows
    cont = [r for r in rows if r.bin_condition == "continuous" and r.lam == 1.0]
    f1_small = _mean([r.f1 for r in cont if r.n == 100])
    f1_large = _mean([r.f1 for r in cont if r.n == 1000])
    trend_a = f1_large > f1_small

    trend_b = True
    for b in ("continuous", "2", "5", "10", "15"):
        tpr_low = _mean([r.tpr for r in rows if r.bin_condition == b and r.lam == 1.0])
        tpr_high = _mean([r.tpr for r in rows if r.bin_condition == b and r.lam == 4.0])
        trend_b &= tpr_high < tpr_low

    shd_by_bin = {
        b: _mean(
            [
                r.shd
                for r in rows
                if r.dag_id == "dag3"
                and r.n == 1000
                and r.lam == 1.0
                and r.bin_condition == b
            ]
        )
        for b in ("continuous", "2", "5", "10", "15")
    }
    trend_c = min(shd_by_bin, key=shd_by_bin.get) == "continuous"

    ok = trend_a and trend_b and trend_c and elapsed <= 600
    _verdict(
        "6 trend replication",
        ok,
        f"F1 {f1_small:.3f}->{f1_large:.3f}; TPR drop at high penalty in all "
        f"bin conditions: {trend_b}; fixture SHD by bins "
        f"{ {k: round(v, 2) for k, v in shd_by_bin.items()} }; {elapsed:.0f}s",
    )
    assert trend_a
    assert trend_b
    assert trend_c
    assert elapsed <= 600


def test_7_continuous_f1_sanity_band(desk_rows):
    """Mean F1 on continuous five-node data sits in the plausible band."""
    rows, _ = desk_rows
    mean_f1 = _mean(
        [
            r.f1
            for r in rows
            if r.bin_condition == "continuous" and r.n == 1000 and r.lam == 1.0
        ]
    )
    ok = 0.5 <= mean_f1 <= 1.0
    _verdict("7 sanity band", ok, f"mean F1 {mean_f1:.3f} in [0.5, 1.0]")
    assert ok


def test_8_determinism_and_affine_invariance():
    """Worker count never changes output bytes; affine rescaling never
    changes a recovered graph."""
    plan = ExperimentPlan(
        fixtures=(("dag2", fixture_dag("dag2")), ("dag3", fixture_dag("dag3"))),
        sample_sizes=(100, 500),
        bin_conditions=(CONTINUOUS, BinSpec(2), BinSpec(5)),
        lambdas=(1.0, 2.0),
        replicates=3,
        design="sim1",
        master_seed=20260815,
    )
    blobs = []
    for workers in (1, 2, 3):
        rows = run_experiment(plan, workers=workers)
        with tempfile.TemporaryDirectory() as td:
            path = os.path.join(td, "results.csv")
            write_results(rows, path)
            with open(path, "rb") as fh:
                blobs.append(fh.read())
    identical = blobs[0] == blobs[1] == blobs[2]

    mismatches = 0
    for i in range(100):
        rng = _rng(808, i)
        p = int(rng.integers(3, 7))
        n = int(rng.integers(100, 500))
        _, data = _random_instance(rng, p, n)
        scale = rng.uniform(0.5, 2.0, size=p)
        shift = rng.uniform(-10.0, 10.0, size=p)
        moved = Dataset(
            data.values * scale + shift, data.column_labels, data.provenance
        )
        g1 = ges(data, SearchConfig(score=ScoreConfig())).graph
        g2 = ges(moved, SearchConfig(score=ScoreConfig())).graph
        mismatches += g1 != g2

    ok = identical and mismatches == 0
    _verdict(
        "8 determinism and invariance",
        ok,
        f"byte-identical across 1/2/3 workers: {identical}; "
        f"affine mismatches {mismatches}/100",
    )
    assert identical
    assert mismatches == 0
