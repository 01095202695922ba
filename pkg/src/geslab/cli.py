"""Command line interface: graph generation, sampling, binning, search,
evaluation, factorial experiments, and report rendering."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .binning import BinSpec, bin_equal_width
from .experiment import (
    desk_plan,
    plan_from_json,
    read_results,
    run_experiment,
    write_metadata,
    write_results,
    write_timings,
)
from .graphs import GraphError, read_dag, read_pdag, write_graph
from .metrics import adjacency_metrics
from .report import GROUP_FIELDS, aggregate, emit_report
from .scoring import ScoreConfig, ScoreError
from .search import PHASES, SearchConfig, ges
from .simulate import (
    DagSpec,
    FIXTURE_SPECS,
    assign_weights,
    fixture_dag,
    random_dag,
    read_dataset,
    sample_data,
    write_dataset,
)


def _cmd_gen_dag(args) -> int:
    if args.fixture:
        if args.nodes is not None or args.edge_prob is not None:
            raise ValueError("--fixture cannot be combined with --nodes/--edge-prob")
        dag = fixture_dag(args.fixture)
    else:
        if args.nodes is None or args.edge_prob is None:
            raise ValueError("either --fixture or both --nodes and --edge-prob are required")
        spec = DagSpec(args.nodes, args.edge_prob, target_edge_count=args.edges, seed=args.seed)
        rng = np.random.default_rng(spec.seed)
        dag = random_dag(spec, rng)
        if not args.unweighted:
            dag = assign_weights(dag, rng)
    write_graph(dag, args.out)
    print(f"wrote {dag.node_count}-node DAG with {len(dag.edges)} edges to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    dag = read_dag(args.dag)
    data = sample_data(dag, args.samples, np.random.default_rng(args.seed))
    write_dataset(data, args.out)
    print(f"wrote {data.n} x {data.p} samples to {args.out}")
    return 0


def _cmd_bin(args) -> int:
    data = read_dataset(args.input)
    out = bin_equal_width(data, BinSpec.parse(args.bins))
    write_dataset(out, args.out)
    print(f"wrote {out.provenance} data to {args.out}")
    return 0


def _cmd_search(args) -> int:
    data = read_dataset(args.input)
    phases = tuple(ph for ph in PHASES if not (args.no_turning and ph == "turning"))
    config = SearchConfig(
        score=ScoreConfig(lam=args.lam),
        phases=phases,
        max_parents=args.max_parents,
    )
    result = ges(data, config)
    write_graph(result.graph, args.out)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("phase", "operator", "delta"))
            for phase, op, delta in result.trace:
                writer.writerow((phase, op, repr(delta)))
    print(f"final score {result.final_score:.6f} after {len(result.trace)} moves")
    print(f"wrote graph to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    found = read_pdag(args.found)
    gold = read_dag(args.gold)
    report = adjacency_metrics(found, gold)
    writer = csv.writer(sys.stdout)
    writer.writerow(
        (
            "shd",
            "tpr",
            "fpr",
            "tdr",
            "f1",
            "true_edges_found",
            "false_edges",
            "gold_edges",
            "gold_gaps",
            "found_edges",
        )
    )
    c = report.counts
    writer.writerow(
        (
            report.shd,
            repr(report.tpr),
            repr(report.fpr),
            repr(report.tdr),
            repr(report.f1),
            c.true_edges_found,
            c.false_edges,
            c.gold_edges,
            c.gold_gaps,
            c.found_edges,
        )
    )
    return 0


def _cmd_experiment(args) -> int:
    if args.plan:
        plan = plan_from_json(args.plan)
    else:
        plan = desk_plan(design=args.design)
    if args.seed is not None:
        plan = type(plan)(
            fixtures=plan.fixtures,
            sample_sizes=plan.sample_sizes,
            bin_conditions=plan.bin_conditions,
            lambdas=plan.lambdas,
            replicates=plan.replicates,
            design=plan.design,
            master_seed=args.seed,
        )
    heavy = plan.max_node_count > 5 or plan.replicates > 50
    if heavy and not args.full_scale:
        raise ValueError(
            "plan includes 20-node fixtures or more than 50 replicates; "
            "pass --full-scale to confirm a long run"
        )
    if heavy:
        print(
            "warning: full-scale plan; expect a long run "
            f"({plan.max_node_count} nodes, {plan.replicates} replicates)",
            file=sys.stderr,
        )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = run_experiment(plan, workers=args.workers)
    write_results(rows, out_dir / "results.csv")
    write_timings(rows, out_dir / "timings.csv")
    write_metadata(plan, out_dir / "metadata.json", workers=args.workers)
    print(f"wrote {len(rows)} rows to {out_dir / 'results.csv'}")
    print(f"timings in {out_dir / 'timings.csv'}, run details in {out_dir / 'metadata.json'}")
    return 0


def _cmd_report(args) -> int:
    rows = read_results(args.input)
    group_by = [f.strip() for f in args.group_by.split(",") if f.strip()]
    table = aggregate(rows, group_by)
    formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    written = emit_report(table, args.out_dir, formats=formats)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geslab",
        description="Score-based structure search over simulated linear-Gaussian data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-dag", help="write a random or fixture DAG to a graph file")
    gen.add_argument("--fixture", choices=sorted(FIXTURE_SPECS), help="named benchmark DAG")
    gen.add_argument("--nodes", type=int, help="node count for a random DAG")
    gen.add_argument("--edge-prob", type=float, help="edge probability for a random DAG")
    gen.add_argument("--edges", type=int, help="exact edge count (rejection sampled)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--unweighted", action="store_true", help="skip weight assignment")
    gen.add_argument("-o", "--out", required=True)
    gen.set_defaults(func=_cmd_gen_dag)

    sim = sub.add_parser("simulate", help="sample a dataset from a weighted DAG")
    sim.add_argument("--dag", required=True, help="graph file with edge weights")
    sim.add_argument("-n", "--samples", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("-o", "--out", required=True)
    sim.set_defaults(func=_cmd_simulate)

    binp = sub.add_parser("bin", help="discretize a continuous dataset")
    binp.add_argument("-i", "--input", required=True)
    binp.add_argument("--bins", required=True, help="bin count, or 'continuous' for a no-op")
    binp.add_argument("-o", "--out", required=True)
    binp.set_defaults(func=_cmd_bin)

    search = sub.add_parser("search", help="run the greedy structure search on a dataset")
    search.add_argument("-i", "--input", required=True)
    search.add_argument("--lambda", dest="lam", type=float, default=1.0, help="penalty weight")
    search.add_argument("--no-turning", action="store_true", help="skip the turning phase")
    search.add_argument("--max-parents", type=int, default=None)
    search.add_argument("--trace", help="optional CSV path for the move trace")
    search.add_argument("-o", "--out", required=True)
    search.set_defaults(func=_cmd_search)

    ev = sub.add_parser("eval", help="score a found graph against the true DAG")
    ev.add_argument("--found", required=True, help="graph file from search")
    ev.add_argument("--gold", required=True, help="graph file of the true DAG")
    ev.set_defaults(func=_cmd_eval)

    exp = sub.add_parser("experiment", help="run a factorial simulation study")
    exp.add_argument("--plan", help="JSON plan file; defaults to a desk-scale study")
    exp.add_argument("--design", choices=("sim1", "sim2"), default="sim1",
                     help="design for the default plan")
    exp.add_argument("--seed", type=int, default=None, help="override the master seed")
    exp.add_argument("--out-dir", default="experiment-out")
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--full-scale", action="store_true",
                     help="confirm running 20-node fixtures or > 50 replicates")
    exp.set_defaults(func=_cmd_experiment)

    rep = sub.add_parser("report", help="aggregate results and render tables/figures")
    rep.add_argument("-i", "--input", required=True, help="results.csv from an experiment")
    rep.add_argument("--group-by", default="dag_id,n,bin_condition,lambda",
                     help=f"comma-separated fields from {GROUP_FIELDS}")
    rep.add_argument("--format", dest="formats", default="csv,svg",
                     help="comma-separated subset of csv,svg")
    rep.add_argument("--out-dir", default="report-out")
    rep.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, GraphError, ScoreError, OSError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
