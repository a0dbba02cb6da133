"""Scaling benchmark for tree recognition over the generated graph classes."""

from __future__ import annotations

import csv
import gc
import io
import math
import statistics
import time
from dataclasses import dataclass
from typing import Iterable, Optional

from .gen import gen_grid, gen_linked_list, gen_perfect_binary_tree, gen_star
from .grammar import tree_reduction
from .hostgraph import HostGraph

CSV_COLUMNS = ("class", "nodes", "trial", "seconds", "steps")


@dataclass(frozen=True)
class BenchRecord:
    graph_class: str
    nodes: int
    trial: int
    seconds: float
    steps: int

    def row(self) -> tuple:
        return self.graph_class, self.nodes, self.trial, f"{self.seconds:.6f}", self.steps


def _grid_side(n: int) -> int:
    return max(1, math.isqrt(n))


def _tree_depth(n: int) -> int:
    # perfect binary tree of depth d has 2^(d+1) - 1 nodes
    return max(0, (n + 1).bit_length() - 2)


GENERATORS = {
    "list": gen_linked_list,
    "tree": lambda n: gen_perfect_binary_tree(_tree_depth(n)),
    "grid": lambda n: gen_grid(_grid_side(n), _grid_side(n)),
    "star": gen_star,
}


def instance(graph_class: str, size: int):
    try:
        return GENERATORS[graph_class](size)
    except KeyError:
        raise ValueError(f"unknown graph class {graph_class!r}; choose from {sorted(GENERATORS)}") from None


def time_instance(g) -> tuple:
    """``(seconds, steps)`` for one recognition run.

    Building the indexed host is excluded from the measurement; planting the
    root on the lowest-id node and the derivation itself are included.
    """
    hg = HostGraph(g)
    first = min(hg._lab)
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        t0 = time.perf_counter()
        hg.set_rootedness(first, 1)
        run = tree_reduction(g, host=hg)
        elapsed = time.perf_counter() - t0
    finally:
        if gc_was_enabled:
            gc.enable()
    return elapsed, run.steps


def run_benchmark(classes: Iterable[str], sizes: Iterable[int], trials: int = 5, *, progress=None) -> list:
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    records = []
    for cls in classes:
        for n in sizes:
            g = instance(cls, n)
            for t in range(trials):
                seconds, steps = time_instance(g)
                rec = BenchRecord(cls, g.node_count, t, seconds, steps)
                records.append(rec)
                if progress is not None:
                    progress(rec)
    return records


def write_csv(records: Iterable[BenchRecord], fh=None) -> str:
    buf = fh or io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue() if fh is None else ""


def read_csv(fh) -> list:
    return [
        BenchRecord(row["class"], int(row["nodes"]), int(row["trial"]), float(row["seconds"]), int(row["steps"]))
        for row in csv.DictReader(fh)
    ]


@dataclass(frozen=True)
class SlopeFit:
    graph_class: str
    slope: float
    intercept: float
    r_squared: float
    points: tuple  # (nodes, median seconds)


def medians(records: Iterable[BenchRecord], graph_class: str) -> list:
    by_n: dict = {}
    for r in records:
        if r.graph_class == graph_class:
            by_n.setdefault(r.nodes, []).append(r.seconds)
    return [(n, statistics.median(ts)) for n, ts in sorted(by_n.items())]


def loglog_fit(points) -> tuple:
    """Least-squares line through ``(log n, log t)``; returns ``(slope, intercept, r²)``."""
    xs = [math.log(n) for n, _ in points]
    ys = [math.log(t) for _, t in points]
    if len(xs) < 2:
        raise ValueError("need at least two sizes to fit a slope")
    fit = statistics.linear_regression(xs, ys)
    my = statistics.fmean(ys)
    ss_tot = sum((y - my) ** 2 for y in ys)
    ss_res = sum((y - (fit.slope * x + fit.intercept)) ** 2 for x, y in zip(xs, ys))
    r2 = 1.0 - ss_res / ss_tot if ss_tot else 1.0
    return fit.slope, fit.intercept, r2


def fit_class(records: Iterable[BenchRecord], graph_class: str) -> SlopeFit:
    pts = medians(list(records), graph_class)
    slope, intercept, r2 = loglog_fit(pts)
    return SlopeFit(graph_class, slope, intercept, r2, tuple(pts))


def parse_sizes(text: str) -> list:
    """``"1000,2000"`` or a range ``"1000..10000"`` (ten evenly spaced points) or ``"1000..10000:4"``."""
    if ".." in text:
        lo, _, rest = text.partition("..")
        hi, _, count = rest.partition(":")
        lo, hi = int(lo), int(hi)
        k = int(count) if count else 10
        if k < 2 or hi <= lo:
            return [lo]
        return sorted({round(lo + (hi - lo) * i / (k - 1)) for i in range(k)})
    return sorted(int(s) for s in text.split(",") if s)


def summary(records: list, classes: Optional[Iterable[str]] = None) -> list:
    classes = classes or sorted({r.graph_class for r in records})
    out = []
    for cls in classes:
        fit = fit_class(records, cls)
        out.append(f"{cls}: slope={fit.slope:.3f} r2={fit.r_squared:.3f} points={len(fit.points)}")
    return out
