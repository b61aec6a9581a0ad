"""Speed/accuracy comparison of samplers against a known truth."""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..chain import DEFAULT_BURN_IN, MaxJumpCap, run_bd, run_mj_mcmc
from ..schedules import EpsilonSchedule, parse_schedule
from .metrics import all_metrics

METRICS = ("auc_pr", "auc_roc", "p_plus", "p_minus")
SERIES_COLUMNS = ("wall_time_s", "iteration") + METRICS


@dataclass
class SamplerConfig:
    """``kind`` is ``"bd"`` or ``"mj"``; iterations count BD jump events for ``bd``."""

    name: str
    kind: str
    iterations: int
    schedule: EpsilonSchedule = None
    cap: MaxJumpCap = None

    def __post_init__(self):
        if self.kind not in ("bd", "mj"):
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if isinstance(self.schedule, str):
            self.schedule = parse_schedule(self.schedule)
        if self.kind == "mj" and self.schedule is None:
            raise ValueError("mj sampler needs a schedule")


@dataclass
class MetricsReport:
    name: str
    auc_pr: float
    auc_roc: float
    p_plus: float
    p_minus: float
    wall_time: float
    iterations: int
    inclusion: np.ndarray = None
    series: list = field(default_factory=list)

    def metric_series(self, metric):
        return np.array([row["iteration"] for row in self.series]), np.array(
            [row[metric] for row in self.series])


def geometric_checkpoints(total, ratio=1.5, first=1):
    points = []
    x = float(first)
    while x < total:
        points.append(int(math.floor(x)))
        x *= ratio
    points.append(int(total))
    return sorted(set(points))


class _Snapshotter:
    """Metric snapshots from running sums; burn-in is a fixed fraction of each prefix."""

    def __init__(self, k, truth, total, burn_in, ratio, by):
        self.truth = truth
        self.burn_in = burn_in
        self.by = by
        self.ratio = ratio
        self.evals = set(geometric_checkpoints(total, ratio))
        store = set(self.evals)
        store.update(int(math.floor(burn_in * t)) for t in self.evals)
        self.store = store
        self.cum = {0: (np.zeros(k), 0.0)}
        self.run = np.zeros(k)
        self.run_w = 0.0
        self.rows = []
        self.t0 = time.perf_counter()
        self.next_time = 1e-3

    def __call__(self, s, bits, weight):
        self.run += weight * bits
        self.run_w += weight
        if s in self.store:
            self.cum[s] = (self.run.copy(), self.run_w)
        if self.by == "iteration":
            if s in self.evals:
                self._emit(s, int(math.floor(self.burn_in * s)))
        else:
            elapsed = time.perf_counter() - self.t0
            if elapsed >= self.next_time:
                self.next_time = elapsed * self.ratio
                start = max(c for c in self.cum if c <= math.floor(self.burn_in * s))
                self._emit(s, start)

    def _emit(self, s, start):
        base, base_w = self.cum[start]
        w = self.run_w - base_w
        if w <= 0:
            return
        scores = (self.run - base) / w
        row = {"wall_time_s": time.perf_counter() - self.t0, "iteration": s}
        row.update(all_metrics(scores, self.truth))
        self.rows.append(row)


def run_sampler(model, config, m0, seed, burn_in=DEFAULT_BURN_IN, threads=None, on_sample=None):
    if config.kind == "bd":
        return run_bd(model, m0, n_events=config.iterations, burn_in=burn_in, seed=seed,
                      threads=threads, record=False, on_sample=on_sample)
    return run_mj_mcmc(model, m0, config.schedule, config.iterations, cap=config.cap,
                       burn_in=burn_in, seed=seed, threads=threads, record=False,
                       on_sample=on_sample)


def run_benchmark(model, truth, configs, m0=None, seed=0, burn_in=DEFAULT_BURN_IN,
                  ratio=1.5, by="iteration", threads=None):
    """Run every sampler config and snapshot metrics at geometric checkpoints.

    ``by="iteration"`` places checkpoints on an iteration grid (fully
    reproducible); ``by="time"`` places them on a wall-clock grid.
    """
    truth = np.asarray(truth, dtype=np.uint8)
    if m0 is None:
        m0 = np.zeros(model.k, dtype=np.uint8)
    reports = []
    for cfg in configs:
        snap = _Snapshotter(model.k, truth, cfg.iterations, burn_in, ratio, by)
        t0 = time.perf_counter()
        trace = run_sampler(model, cfg, m0, seed, burn_in, threads, on_sample=snap)
        wall = time.perf_counter() - t0
        incl = trace.inclusion()
        final = all_metrics(incl, truth)
        reports.append(MetricsReport(cfg.name, wall_time=wall, iterations=trace.n_samples,
                                     inclusion=incl, series=snap.rows, **final))
    return reports


def iterations_to_reach(report, target, metric="auc_pr"):
    """First checkpoint iteration at which ``metric`` reaches ``target`` (None if never)."""
    its, vals = report.metric_series(metric)
    hit = np.flatnonzero(vals >= target)
    return int(its[hit[0]]) if hit.size else None
