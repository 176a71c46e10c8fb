"""Benchmark harness: per-instance stage timings and node counts.

Each generated instance is solved with the accelerated pipeline and,
when small enough, the naive pipeline for comparison. Rows mirror the
solve stats (timings in seconds, node counts, rewarding-set count); the
report computes the log-log slope of total time against full-graph size
over the successful accelerated rows.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import TreesolveError
from .generator import GeneratorParams, generate_instance
from .graph import DEFAULT_NODE_CAP
from .pipeline import SolveStats, solve

ACCEL_COLUMNS = [
    "index",
    "n_actions",
    "budget",
    "score_root",
    "t_rewarding_s",
    "t_full_s",
    "t_reduced_s",
    "t_tree_s",
    "t_total_s",
    "n_full",
    "n_reduced",
    "n_tree",
    "n_rewarding_sets",
    "status",
]

NAIVE_COLUMNS = [
    "index",
    "n_actions",
    "budget",
    "score_root",
    "t_full_s",
    "t_reduced_s",
    "t_tree_s",
    "t_total_s",
    "n_full",
    "n_reduced",
    "n_tree",
    "status",
]


@dataclass(frozen=True)
class BenchRow:
    index: int
    params: GeneratorParams
    stats: SolveStats | None
    status: str  # "ok" or the failure reason

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...]  # accelerated pipeline
    naive_rows: tuple[BenchRow, ...]

    def slope(self) -> float | None:
        """Log-log slope of t_total vs n_full over the accelerated rows."""
        points = [
            (math.log10(r.stats.n_full), math.log10(r.stats.t_total))
            for r in self.rows
            if r.ok and r.stats.n_full > 0 and r.stats.t_total > 0
        ]
        if len(points) < 2:
            return None
        xs = [x for x, _ in points]
        ys = [y for _, y in points]
        n = len(points)
        mx = sum(xs) / n
        my = sum(ys) / n
        sxx = sum((x - mx) ** 2 for x in xs)
        if sxx == 0:
            return None
        return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx


def run_bench(
    instances: Sequence[GeneratorParams],
    *,
    naive_max_states: int = 50_000,
    timeout: float | None = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> BenchReport:
    rows: list[BenchRow] = []
    naive_rows: list[BenchRow] = []
    for index, params in enumerate(instances):
        try:
            scn = generate_instance(params)
        except TreesolveError as exc:
            rows.append(BenchRow(index, params, None, f"generation failed: {exc}"))
            continue
        try:
            result = solve(scn, timeout=timeout, node_cap=node_cap)
            rows.append(BenchRow(index, params, result.stats, "ok"))
        except TreesolveError as exc:
            rows.append(BenchRow(index, params, None, str(exc)))
            continue
        if result.stats.n_full > naive_max_states:
            continue
        try:
            naive = solve(scn, naive=True, timeout=timeout, node_cap=node_cap)
            naive_rows.append(BenchRow(index, params, naive.stats, "ok"))
        except TreesolveError as exc:
            naive_rows.append(BenchRow(index, params, None, str(exc)))
    return BenchReport(rows=tuple(rows), naive_rows=tuple(naive_rows))


def _row_cells(row: BenchRow, naive: bool) -> list:
    s = row.stats
    if s is None:
        blank = [""] * (len(NAIVE_COLUMNS) - 4 if naive else len(ACCEL_COLUMNS) - 4)
        budget = f"{float(row.params.budget):g}"
        return [row.index, row.params.n_actions, budget, *blank, row.status]
    cells = [
        row.index,
        s.n_actions,
        f"{s.budget:g}",
        f"{s.score_root:.9f}",
    ]
    if not naive:
        cells.append(f"{s.t_rewarding:.6f}")
    cells += [
        f"{s.t_full:.6f}",
        f"{s.t_reduced:.6f}",
        f"{s.t_tree:.6f}",
        f"{s.t_total:.6f}",
        s.n_full,
        s.n_reduced,
        s.n_tree,
    ]
    if not naive:
        cells.append(s.n_rewarding_sets)
    cells.append(row.status)
    return cells


def write_csv(report: BenchReport, path: str, naive_path: str | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ACCEL_COLUMNS)
        for row in report.rows:
            writer.writerow(_row_cells(row, naive=False))
    if naive_path is None:
        return
    with open(naive_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(NAIVE_COLUMNS)
        for row in report.naive_rows:
            writer.writerow(_row_cells(row, naive=True))
