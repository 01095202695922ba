"""Factorial simulation harness: seeded replicates over fixtures, sample
sizes, bin conditions, and penalty weights, with delimited outputs."""

from __future__ import annotations

import csv
import json
import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .binning import CONTINUOUS, BinSpec, bin_equal_width
from .graphs import Dag, GraphError, Pdag
from .metrics import adjacency_metrics
from .scoring import ScoreConfig, ScoreError
from .search import SearchConfig, ges
from .simulate import DagSpec, assign_weights, fixture_dag, random_dag, sample_data

DESIGNS = ("sim1", "sim2")
DEFAULT_MASTER_SEED = 20260815
LARGE_GRAPH_MAX_PARENTS = 8

_DATA_STREAM = 0
_WEIGHT_STREAM = 1


@dataclass(frozen=True)
class ExperimentPlan:
    """One factorial design: weighted fixtures crossed with sample sizes, bin
    conditions, and penalty weights, replicated under a single master seed.

    sim1 draws data once per (fixture, n, replicate) from the fixture's fixed
    weights; sim2 redraws edge weights once per (fixture, replicate) and
    reuses that parameterization across all sample sizes.
    """

    fixtures: tuple[tuple[str, Dag], ...]
    sample_sizes: tuple[int, ...]
    bin_conditions: tuple[BinSpec, ...]
    lambdas: tuple[float, ...]
    replicates: int
    design: str = "sim1"
    master_seed: int = DEFAULT_MASTER_SEED

    def __post_init__(self):
        if self.design not in DESIGNS:
            raise ValueError(f"design must be one of {DESIGNS}, got {self.design!r}")
        if not self.fixtures:
            raise ValueError("plan needs at least one fixture")
        names = [name for name, _ in self.fixtures]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate fixture names in {names}")
        if not all(n >= 1 for n in self.sample_sizes) or not self.sample_sizes:
            raise ValueError(f"bad sample sizes {self.sample_sizes}")
        if not self.bin_conditions:
            raise ValueError("plan needs at least one bin condition")
        if not all(lam > 0 for lam in self.lambdas) or not self.lambdas:
            raise ValueError(f"bad lambdas {self.lambdas}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be positive, got {self.replicates}")

    @property
    def max_node_count(self) -> int:
        return max(dag.node_count for _, dag in self.fixtures)


@dataclass(frozen=True)
class ResultRow:
    dag_id: str
    replicate: int
    n: int
    bin_condition: str
    lam: float
    shd: int
    tpr: float
    fpr: float
    tdr: float
    f1: float
    final_score: float
    runtime_ms: float
    seed: int
    flags: str


RESULT_COLUMNS = (
    "dag_id",
    "n",
    "bin_condition",
    "lambda",
    "replicate",
    "shd",
    "tpr",
    "fpr",
    "tdr",
    "f1",
    "final_score",
    "seed",
    "flags",
)

TIMING_COLUMNS = ("dag_id", "n", "bin_condition", "lambda", "replicate", "runtime_ms")


def full_plan(design: str = "sim1", master_seed: int = DEFAULT_MASTER_SEED) -> ExperimentPlan:
    """The full factorial design over all five fixtures, 200 replicates."""
    return ExperimentPlan(
        fixtures=tuple((name, fixture_dag(name)) for name in ("dag1", "dag2", "dag3", "dag4", "dag5")),
        sample_sizes=(100, 500, 1000),
        bin_conditions=(CONTINUOUS, BinSpec(2), BinSpec(5), BinSpec(10), BinSpec(15)),
        lambdas=(1.0, 2.0, 4.0),
        replicates=200,
        design=design,
        master_seed=master_seed,
    )


def desk_plan(design: str = "sim1", master_seed: int = DEFAULT_MASTER_SEED) -> ExperimentPlan:
    """Five-node fixtures only, 20 replicates: minutes, not hours."""
    return ExperimentPlan(
        fixtures=tuple((name, fixture_dag(name)) for name in ("dag1", "dag2", "dag3")),
        sample_sizes=(100, 500, 1000),
        bin_conditions=(CONTINUOUS, BinSpec(2), BinSpec(5), BinSpec(10), BinSpec(15)),
        lambdas=(1.0, 2.0, 4.0),
        replicates=20,
        design=design,
        master_seed=master_seed,
    )


def _dag_key(dag_id: str) -> int:
    return zlib.crc32(dag_id.encode())


def _data_seed_seq(master: int, dag_id: str, n: int, replicate: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((master, _dag_key(dag_id), n, replicate, _DATA_STREAM))


def _weight_seed_seq(master: int, dag_id: str, replicate: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((master, _dag_key(dag_id), replicate, _WEIGHT_STREAM))


def _seed_word(seq: np.random.SeedSequence) -> int:
    return int(seq.generate_state(1, np.uint64)[0])


def max_parents_policy(node_count: int) -> int | None:
    """Unbounded search on small graphs; capped on the 20-node fixtures."""
    return None if node_count <= 5 else LARGE_GRAPH_MAX_PARENTS


def _search_rows(dag_id, gold, data, seed_word, n, replicate, plan):
    """Run the bin-by-lambda grid against one continuous draw."""
    rows = []
    cap = max_parents_policy(gold.node_count)
    for bin_spec in plan.bin_conditions:
        prepared = bin_equal_width(data, bin_spec)
        for lam in plan.lambdas:
            config = SearchConfig(score=ScoreConfig(lam=lam), max_parents=cap)
            flags = []
            started = time.perf_counter()
            try:
                result = ges(prepared, config)
                found = result.graph
                final_score = result.final_score
                if result.floor_hit:
                    flags.append("variance-floor-hit")
            except (ScoreError, GraphError):
                found = Pdag(gold.node_count)
                final_score = float("nan")
                flags.append("search-failed")
            runtime_ms = (time.perf_counter() - started) * 1000.0
            report = adjacency_metrics(found, gold)
            counts = report.counts
            if (
                counts.gold_edges == 0
                or counts.gold_gaps == 0
                or counts.found_edges == 0
                or report.tpr + report.tdr == 0
            ):
                flags.append("degenerate-denominator")
            rows.append(
                ResultRow(
                    dag_id=dag_id,
                    replicate=replicate,
                    n=n,
                    bin_condition=bin_spec.label,
                    lam=lam,
                    shd=report.shd,
                    tpr=report.tpr,
                    fpr=report.fpr,
                    tdr=report.tdr,
                    f1=report.f1,
                    final_score=final_score,
                    runtime_ms=runtime_ms,
                    seed=seed_word,
                    flags=";".join(flags),
                )
            )
    return rows


def _sim1_task(args):
    plan, dag_id, dag, n, replicate = args
    seq = _data_seed_seq(plan.master_seed, dag_id, n, replicate)
    data = sample_data(dag, n, np.random.default_rng(seq))
    return _search_rows(dag_id, dag, data, _seed_word(seq), n, replicate, plan)


def _sim2_task(args):
    plan, dag_id, dag, replicate = args
    wseq = _weight_seed_seq(plan.master_seed, dag_id, replicate)
    redrawn = assign_weights(dag, np.random.default_rng(wseq))
    rows = []
    for n in plan.sample_sizes:
        seq = _data_seed_seq(plan.master_seed, dag_id, n, replicate)
        data = sample_data(redrawn, n, np.random.default_rng(seq))
        rows.extend(_search_rows(dag_id, redrawn, data, _seed_word(seq), n, replicate, plan))
    return rows


def _bin_order(label: str) -> float:
    return math.inf if label == "continuous" else float(label)


def _row_sort_key(row: ResultRow):
    return (row.dag_id, row.n, _bin_order(row.bin_condition), row.lam, row.replicate)


def _run_tasks(task_fn, task_args, workers: int) -> list[ResultRow]:
    rows: list[ResultRow] = []
    if workers <= 1:
        for args in task_args:
            rows.extend(task_fn(args))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(task_fn, task_args):
                rows.extend(chunk)
    rows.sort(key=_row_sort_key)
    return rows


def run_sim1(plan: ExperimentPlan, workers: int = 1) -> list[ResultRow]:
    """Fixed fixture weights; one data draw per (fixture, n, replicate)."""
    if plan.design != "sim1":
        raise ValueError(f"plan has design {plan.design!r}")
    task_args = [
        (plan, dag_id, dag, n, replicate)
        for dag_id, dag in plan.fixtures
        for n in plan.sample_sizes
        for replicate in range(plan.replicates)
    ]
    return _run_tasks(_sim1_task, task_args, workers)


def run_sim2(plan: ExperimentPlan, workers: int = 1) -> list[ResultRow]:
    """Edge weights redrawn once per (fixture, replicate), shared across n."""
    if plan.design != "sim2":
        raise ValueError(f"plan has design {plan.design!r}")
    task_args = [
        (plan, dag_id, dag, replicate)
        for dag_id, dag in plan.fixtures
        for replicate in range(plan.replicates)
    ]
    return _run_tasks(_sim2_task, task_args, workers)


def run_experiment(plan: ExperimentPlan, workers: int = 1) -> list[ResultRow]:
    return run_sim1(plan, workers) if plan.design == "sim1" else run_sim2(plan, workers)


def _format_cell(column: str, row: ResultRow):
    if column == "lambda":
        return repr(row.lam)
    value = getattr(row, column)
    if isinstance(value, float):
        return repr(value)
    return value


def write_results(rows, path: str | Path) -> None:
    """Canonical delimited output; excludes timings so reruns on different
    worker counts stay byte-identical."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(c, row) for c in RESULT_COLUMNS])


def write_timings(rows, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIMING_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.dag_id,
                    row.n,
                    row.bin_condition,
                    repr(row.lam),
                    row.replicate,
                    format(row.runtime_ms, ".3f"),
                ]
            )


def read_results(path: str | Path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(RESULT_COLUMNS):
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        rows = []
        for record in reader:
            rows.append(
                ResultRow(
                    dag_id=record["dag_id"],
                    replicate=int(record["replicate"]),
                    n=int(record["n"]),
                    bin_condition=record["bin_condition"],
                    lam=float(record["lambda"]),
                    shd=int(record["shd"]),
                    tpr=float(record["tpr"]),
                    fpr=float(record["fpr"]),
                    tdr=float(record["tdr"]),
                    f1=float(record["f1"]),
                    final_score=float(record["final_score"]),
                    runtime_ms=float("nan"),
                    seed=int(record["seed"]),
                    flags=record["flags"],
                )
            )
    return rows


def write_metadata(plan: ExperimentPlan, path: str | Path, workers: int = 1) -> None:
    meta = {
        "version": __version__,
        "design": plan.design,
        "master_seed": plan.master_seed,
        "replicates": plan.replicates,
        "sample_sizes": list(plan.sample_sizes),
        "bin_conditions": [spec.label for spec in plan.bin_conditions],
        "lambdas": list(plan.lambdas),
        "fixtures": {
            name: {
                "node_count": dag.node_count,
                "edge_count": len(dag.edges),
                "max_parents": max_parents_policy(dag.node_count),
            }
            for name, dag in plan.fixtures
        },
        "variance_floor": ScoreConfig().variance_floor,
        "tie_epsilon": ScoreConfig().tie_epsilon,
        "workers": workers,
    }
    Path(path).write_text(json.dumps(meta, indent=2) + "\n")


_PLAN_KEYS = {
    "design",
    "master_seed",
    "dag_fixtures",
    "sample_sizes",
    "bin_conditions",
    "lambdas",
    "replicates",
}


def _fixture_from_entry(entry, position: int) -> tuple[str, Dag]:
    if isinstance(entry, str):
        return entry, fixture_dag(entry)
    if isinstance(entry, dict):
        extra = set(entry) - {"name", "node_count", "edge_prob", "target_edge_count", "seed"}
        if extra:
            raise ValueError(f"unknown fixture keys {sorted(extra)}")
        spec = DagSpec(
            node_count=entry["node_count"],
            edge_prob=entry["edge_prob"],
            target_edge_count=entry.get("target_edge_count"),
            seed=entry.get("seed", 0),
        )
        rng = np.random.default_rng(spec.seed)
        dag = assign_weights(random_dag(spec, rng), rng)
        return entry.get("name", f"spec{position}"), dag
    raise ValueError(f"fixture entry must be a name or an object, got {entry!r}")


def plan_from_json(source: str | Path | dict) -> ExperimentPlan:
    """Build a plan from a JSON document; unknown keys are rejected."""
    if isinstance(source, dict):
        doc = source
    else:
        doc = json.loads(Path(source).read_text())
    if not isinstance(doc, dict):
        raise ValueError("plan document must be a JSON object")
    unknown = set(doc) - _PLAN_KEYS
    if unknown:
        raise ValueError(f"unknown plan keys {sorted(unknown)}")
    missing = {"dag_fixtures", "sample_sizes", "lambdas", "replicates"} - set(doc)
    if missing:
        raise ValueError(f"plan is missing keys {sorted(missing)}")
    fixtures = tuple(
        _fixture_from_entry(entry, i) for i, entry in enumerate(doc["dag_fixtures"])
    )
    bins = tuple(
        BinSpec.parse(str(b)) for b in doc.get("bin_conditions", ["continuous"])
    )
    return ExperimentPlan(
        fixtures=fixtures,
        sample_sizes=tuple(int(n) for n in doc["sample_sizes"]),
        bin_conditions=bins,
        lambdas=tuple(float(l) for l in doc["lambdas"]),
        replicates=int(doc["replicates"]),
        design=doc.get("design", "sim1"),
        master_seed=int(doc.get("master_seed", DEFAULT_MASTER_SEED)),
    )
