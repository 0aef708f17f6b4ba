"""Benchmark runners for IRBFGS, HBFGS and FBFGS with CSV output."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .sampling import Problem
from .solver import SolverConfig, TraceRecord, solve

ALGORITHMS = ("IRBFGS", "HBFGS", "FBFGS")

TRACE_HEADER = ["run_id", "k", "fev", "N_k", "theta_k", "alpha_k", "metric", "wall_time_ms"]
AGGREGATE_HEADER = ["fev", "mean_metric", "min_metric", "max_metric"]
GRID_POINTS = 200


class ConfigError(ValueError):
    pass


def run_irbfgs(problem, config, run_id=0, record_timing=False) -> list:
    return solve(problem, config, "ir", run_id=run_id, record_timing=record_timing).trace


def run_hbfgs(problem, config, run_id=0, record_timing=False) -> list:
    """IR-NS with the optimization-phase sample size fixed to the restored one."""
    return solve(problem, config, "heuristic", run_id=run_id, record_timing=record_timing).trace


def run_fbfgs(problem, config, run_id=0, record_timing=False) -> list:
    """Backtracking BFGS on the full sample of a finite-sum problem."""
    if not problem.finite_sum:
        raise ConfigError("FBFGS needs a finite-sum problem (unbounded sample given)")
    return solve(problem, config, "full", run_id=run_id, record_timing=record_timing).trace


RUNNERS = {"IRBFGS": run_irbfgs, "HBFGS": run_hbfgs, "FBFGS": run_fbfgs}


@dataclass
class RunSpec:
    """One algorithm on one problem over several seeds.

    ``problem`` may be a :class:`Problem` or a zero-argument factory.
    """

    algorithm: str
    problem: Problem | Callable[[], Problem]
    config: SolverConfig = field(default_factory=SolverConfig)
    num_runs: int = 10
    seeds: list | None = None
    name: str | None = None

    def __post_init__(self):
        self.algorithm = self.algorithm.upper()
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.seeds is None:
            self.seeds = [self.config.seed + i for i in range(self.num_runs)]
        elif len(self.seeds) != self.num_runs:
            self.num_runs = len(self.seeds)
        if self.num_runs < 1:
            raise ConfigError("num_runs must be >= 1")

    def resolve_problem(self) -> Problem:
        if not isinstance(self.problem, Problem):
            self.problem = self.problem()
        return self.problem

    def validate(self) -> Problem:
        prob = self.resolve_problem()
        if self.algorithm == "FBFGS" and not prob.finite_sum:
            raise ConfigError("FBFGS is only valid for finite-sum problems")
        return prob


def run_spec(spec: RunSpec, record_timing=False) -> list:
    """Traces of all runs of ``spec``, one list per seed."""
    prob = spec.validate()
    runner = RUNNERS[spec.algorithm]
    return [runner(prob, replace(spec.config, seed=int(s)), run_id=i, record_timing=record_timing)
            for i, s in enumerate(spec.seeds)]


def fev_grid(traces, points=GRID_POINTS) -> np.ndarray:
    lo = max(1, min(t[0].fev for t in traces))
    hi = max(lo, max(t[-1].fev for t in traces))
    return np.geomspace(lo, hi, points)


def carry_forward(trace, grid) -> np.ndarray:
    """Metric of the last record with ``fev <= g`` (first record before the trace starts)."""
    fevs = np.array([r.fev for r in trace])
    vals = np.array([r.metric for r in trace])
    idx = np.searchsorted(fevs, grid, side="right") - 1
    return vals[np.clip(idx, 0, None)]


def aggregate(traces, points=GRID_POINTS):
    grid = fev_grid(traces, points)
    M = np.vstack([carry_forward(t, grid) for t in traces])
    return grid, M.mean(axis=0), M.min(axis=0), M.max(axis=0)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_traces(path, traces) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for trace in traces:
            for r in trace:
                w.writerow([_fmt(getattr(r, c)) for c in TRACE_HEADER])


def write_aggregate(path, traces, points=GRID_POINTS) -> None:
    grid, mean, lo, hi = aggregate(traces, points)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_HEADER)
        for row in zip(grid, mean, lo, hi):
            w.writerow([_fmt(v) for v in row])


def read_traces(path) -> list:
    """Read a trace CSV back into per-run lists of :class:`TraceRecord`."""
    runs: dict[int, list] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rec = TraceRecord(int(row["run_id"]), int(row["k"]), int(row["fev"]), int(row["N_k"]),
                              float(row["theta_k"]), float(row["alpha_k"]), float(row["metric"]),
                              float(row["wall_time_ms"]))
            runs.setdefault(rec.run_id, []).append(rec)
    return [runs[k] for k in sorted(runs)]


def run_suite(run_specs, out_dir, record_timing=False) -> list:
    """Run every spec; write ``<name>_runs.csv`` and ``<name>_aggregate.csv`` per spec.

    Returns the written paths. Runs execute sequentially and files are
    written after each spec completes.
    """
    for spec in run_specs:
        spec.validate()
    out = Path(out_dir)
    os.makedirs(out, exist_ok=True)
    paths = []
    for spec in run_specs:
        traces = run_spec(spec, record_timing)
        name = (spec.name or spec.algorithm).lower()
        runs_path = out / f"{name}_runs.csv"
        agg_path = out / f"{name}_aggregate.csv"
        write_traces(runs_path, traces)
        write_aggregate(agg_path, traces)
        paths += [runs_path, agg_path]
    return paths
