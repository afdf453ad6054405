"""Trajectory sampling, stagnation detection and box-plot summaries."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

SAMPLES_PER_DECADE = 50
DEFAULT_STAGNATION_WINDOW = 10**6


def geometric_schedule(max_steps: int, per_decade: int = SAMPLES_PER_DECADE,
                       extra: Iterable[int] = ()) -> list[int]:
    """Sample steps ``ceil(10**(i/per_decade))`` up to ``max_steps``, deduplicated.

    Always contains 1 and ``max_steps``; ``extra`` points inside the range are merged in.
    """
    points = {1, max_steps}
    i = 0
    while True:
        p = math.ceil(10 ** (i / per_decade) - 1e-9)
        if p >= max_steps:
            break
        points.add(p)
        i += 1
    points.update(int(x) for x in extra if 1 <= x <= max_steps)
    return sorted(points)


@dataclass(frozen=True)
class MetricsSample:
    step: int
    n_total: int
    n_diff: int
    success_rate: float


@dataclass
class MetricsSeries:
    samples: list[MetricsSample] = field(default_factory=list)
    final: MetricsSample | None = None

    def record(self, step: int, n_total: int, n_diff: int, successes: int,
               interactions: int) -> MetricsSample:
        if self.samples and step <= self.samples[-1].step:
            raise ValueError(f"sample at step {step} is not after step {self.samples[-1].step}")
        rate = successes / interactions if interactions else 0.0
        sample = MetricsSample(step, n_total, n_diff, rate)
        self.samples.append(sample)
        return sample

    @property
    def steps(self) -> np.ndarray:
        return np.array([s.step for s in self.samples], dtype=np.int64)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "n_total", "n_diff", "success_rate"])
        for s in self.samples:
            w.writerow([s.step, s.n_total, s.n_diff, f"{s.success_rate:.6f}"])
        return buf.getvalue()


def detect_stagnation(series: MetricsSeries, window: int = DEFAULT_STAGNATION_WINDOW) -> bool:
    """True if ``n_diff`` did not move over the last ``window`` steps of the run.

    The reference value is the latest sample taken at or before ``T - window``.
    """
    if not series.samples:
        raise ValueError("empty series")
    horizon = series.samples[-1].step
    if window > horizon:
        raise ValueError(f"window {window} exceeds the recorded horizon {horizon}")
    start = horizon - window
    anchor = None
    tail = []
    for s in series.samples:
        if s.step <= start:
            anchor = s
        else:
            tail.append(s)
    if anchor is not None:
        tail.insert(0, anchor)
    return len({s.n_diff for s in tail}) == 1


@dataclass(frozen=True)
class BoxStats:
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]
    mean: float
    count: int


def box_stats(values: Sequence[float]) -> BoxStats:
    """Quartiles (linear interpolation), 1.5 IQR outliers and whiskers at the
    furthest non-outlying points."""
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        raise ValueError("box_stats needs at least one value")
    q1, median, q3 = np.percentile(x, [25, 50, 75])
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = x[(x >= lo) & (x <= hi)]
    return BoxStats(
        median=float(median),
        q1=float(q1),
        q3=float(q3),
        whisker_low=float(inside.min()),
        whisker_high=float(inside.max()),
        outliers=tuple(float(v) for v in x[(x < lo) | (x > hi)]),
        mean=float(x.mean()),
        count=int(x.size),
    )


def mean_trajectory(series_list: Sequence[MetricsSeries], schedule: Sequence[int],
                    n_agents: int) -> dict[str, np.ndarray]:
    """Ensemble mean of n_total, n_diff and success rate on a common step grid.

    Runs that converged early are held at the consensus state (n_total = N,
    n_diff = 1, success rate 1) for the remaining grid points.
    """
    grid = np.asarray(schedule, dtype=np.int64)
    totals = np.empty((len(series_list), grid.size))
    diffs = np.empty_like(totals)
    rates = np.empty_like(totals)
    for r, series in enumerate(series_list):
        steps = series.steps
        idx = np.searchsorted(steps, grid, side="right") - 1
        t = series.column("n_total").astype(float)
        d = series.column("n_diff").astype(float)
        sr = series.column("success_rate").astype(float)
        past = grid > steps[-1]
        converged = series.samples[-1].n_diff == 1 and series.samples[-1].n_total == n_agents
        idx = np.clip(idx, 0, steps.size - 1)
        totals[r], diffs[r], rates[r] = t[idx], d[idx], sr[idx]
        if converged:
            totals[r, past], diffs[r, past], rates[r, past] = n_agents, 1, 1.0
    return {"step": grid, "n_total": totals.mean(0), "n_diff": diffs.mean(0),
            "success_rate": rates.mean(0)}
