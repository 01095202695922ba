"""Aggregation of result rows and report emission (CSV tables, SVG figures)."""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiment import ResultRow

METRICS = ("shd", "tpr", "fpr", "tdr", "f1")
GROUP_FIELDS = ("dag_id", "n", "bin_condition", "lambda", "replicate")
_FIELD_ATTR = {"lambda": "lam"}


@dataclass(frozen=True)
class SummaryRow:
    group: tuple
    count: int
    means: tuple[float, ...]
    sds: tuple[float, ...]


@dataclass(frozen=True)
class SummaryTable:
    group_fields: tuple[str, ...]
    rows: tuple[SummaryRow, ...]

    @property
    def columns(self) -> tuple[str, ...]:
        stats = []
        for metric in METRICS:
            stats += [f"{metric}_mean", f"{metric}_sd"]
        return (*self.group_fields, "count", *stats)


def _six_digits(value: float) -> float:
    return float(f"{value:.6g}")


def _group_sort_value(field: str, value):
    if field == "bin_condition":
        return math.inf if value == "continuous" else float(value)
    return value


def aggregate(rows, group_by) -> SummaryTable:
    """Mean, sample standard deviation, and count of every metric per group.

    Values are rounded to six significant digits, which is also the emitted
    CSV precision, so a written table reads back equal.  Groups are ordered
    naturally, with bin conditions by width count and continuous last.
    """
    group_by = tuple(group_by)
    unknown = [f for f in group_by if f not in GROUP_FIELDS]
    if unknown:
        raise ValueError(f"unknown group fields {unknown}; choose from {GROUP_FIELDS}")
    buckets: dict[tuple, list[ResultRow]] = {}
    for row in rows:
        key = tuple(getattr(row, _FIELD_ATTR.get(f, f)) for f in group_by)
        buckets.setdefault(key, []).append(row)
    summary_rows = []
    for key in sorted(
        buckets,
        key=lambda k: tuple(_group_sort_value(f, v) for f, v in zip(group_by, k)),
    ):
        members = buckets[key]
        means = []
        sds = []
        for metric in METRICS:
            values = [float(getattr(row, metric)) for row in members]
            means.append(_six_digits(statistics.fmean(values)))
            sds.append(_six_digits(statistics.stdev(values)) if len(values) > 1 else 0.0)
        summary_rows.append(
            SummaryRow(group=key, count=len(members), means=tuple(means), sds=tuple(sds))
        )
    return SummaryTable(group_fields=group_by, rows=tuple(summary_rows))


def _format_group_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_summary(table: SummaryTable, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.columns)
        for row in table.rows:
            cells = [_format_group_value(v) for v in row.group]
            cells.append(str(row.count))
            for mean, sd in zip(row.means, row.sds):
                cells += [f"{mean:.6g}", f"{sd:.6g}"]
            writer.writerow(cells)


def _parse_group_value(field: str, text: str):
    if field in ("n", "replicate"):
        return int(text)
    if field == "lambda":
        return float(text)
    return text


def read_summary(path: str | Path) -> SummaryTable:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        stat_count = 2 * len(METRICS) + 1
        group_fields = tuple(header[: len(header) - stat_count])
        want = (*group_fields, "count") + tuple(
            f"{m}_{s}" for m in METRICS for s in ("mean", "sd")
        )
        if tuple(header) != want:
            raise ValueError(f"{path}: unexpected summary columns {header}")
        rows = []
        for record in reader:
            group = tuple(
                _parse_group_value(f, v) for f, v in zip(group_fields, record)
            )
            rest = record[len(group_fields) :]
            count = int(rest[0])
            stats = [float(v) for v in rest[1:]]
            rows.append(
                SummaryRow(
                    group=group,
                    count=count,
                    means=tuple(stats[0::2]),
                    sds=tuple(stats[1::2]),
                )
            )
    return SummaryTable(group_fields=group_fields, rows=tuple(rows))


def _series_layout(table: SummaryTable):
    """Pick the x-axis field (bin condition when present, then n) and treat
    every distinct combination of the remaining group fields as one series."""
    for candidate in ("bin_condition", "n", *table.group_fields):
        if candidate in table.group_fields:
            x_field = candidate
            break
    x_index = table.group_fields.index(x_field)
    series_indices = [i for i in range(len(table.group_fields)) if i != x_index]
    series: dict[tuple, list[tuple]] = {}
    for row in table.rows:
        key = tuple(row.group[i] for i in series_indices)
        series.setdefault(key, []).append(row)
    return x_field, x_index, series_indices, series


def _series_name(table, series_indices, key) -> str:
    if not key:
        return "all"
    return "-".join(str(v) for v in key)


def plot_metric(table: SummaryTable, metric: str, path: str | Path) -> None:
    """Line chart of the group means for one metric; each series carries the
    SVG element id series-<name>."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    if not table.group_fields:
        raise ValueError("plotting needs at least one group field")
    metric_index = METRICS.index(metric)
    x_field, x_index, series_indices, series = _series_layout(table)
    categories = sorted(
        {row.group[x_index] for row in table.rows},
        key=lambda v: _group_sort_value(x_field, v),
    )
    positions = {value: i for i, value in enumerate(categories)}
    plt.rcParams["svg.hashsalt"] = "report"
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for key in sorted(series, key=lambda k: tuple(map(str, k))):
        rows = series[key]
        xs = [positions[row.group[x_index]] for row in rows]
        ys = [row.means[metric_index] for row in rows]
        order = sorted(range(len(xs)), key=xs.__getitem__)
        name = _series_name(table, series_indices, key)
        (line,) = ax.plot(
            [xs[i] for i in order],
            [ys[i] for i in order],
            marker="o",
            label=name,
        )
        line.set_gid(f"series-{name}")
    ax.set_xticks(range(len(categories)))
    ax.set_xticklabels([str(c) for c in categories])
    ax.set_xlabel(x_field)
    ax.set_ylabel(f"mean {metric}")
    if len(series) > 1:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_report(
    table: SummaryTable, out_dir: str | Path, formats=("csv", "svg")
) -> list[Path]:
    """Write summary.csv and/or one SVG figure per metric into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    unknown = [f for f in formats if f not in ("csv", "svg")]
    if unknown:
        raise ValueError(f"unknown report formats {unknown}")
    written: list[Path] = []
    if "csv" in formats:
        path = out_dir / "summary.csv"
        write_summary(table, path)
        written.append(path)
    if "svg" in formats:
        for metric in METRICS:
            path = out_dir / f"{metric}.svg"
            plot_metric(table, metric, path)
            written.append(path)
    return written
