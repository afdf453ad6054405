"""Declarative sweeps: m0 sweep, rho sweep, topology comparison and size scaling."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .generators import (
    BaselineParams,
    GenerationError,
    MLWParams,
    derive_seed,
    gen_baseline,
    gen_mlw,
)
from .graph import (
    CommunityRatioReport,
    Graph,
    GraphStats,
    community_ratio,
    complete_graph,
    compute_stats,
    format_edge_list,
)
from .metrics import (
    DEFAULT_STAGNATION_WINDOW,
    BoxStats,
    MetricsSeries,
    box_stats,
    detect_stagnation,
    geometric_schedule,
    mean_trajectory,
)
from .naming_game import run as play


KINDS = ("m0_sweep", "rho_sweep", "topology_compare", "scaling")
TOPOLOGIES = ("mlw", "rg", "sw", "sf")

M0_GRID = list(range(3, 20)) + list(range(20, 101, 10))
RHO_GRID = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


@dataclass
class MLWTemplate:
    """MLW parameters shared by every point of a sweep (everything except N, m0, rho)."""

    p1: float = 0.0
    p2: float = 0.28
    p3: float = 0.39
    p4: float = 0.43
    e1: int = 2
    e2: int = 2
    e3: int = 2
    e4: int = 2
    alpha: float = 1.0

    def params(self, N: int, rho: float, m0: int) -> MLWParams:
        return MLWParams.from_rho(N, rho, m0, **asdict(self))


@dataclass
class BaselineTemplate:
    sw_rewire_prob: float = 0.2


@dataclass
class ExperimentConfig:
    kind: str = "m0_sweep"
    N: int = 1000
    runs: int = 30
    max_steps: int = 10**7
    base_seed: int = 0
    m0_values: list[int] = field(default_factory=lambda: list(M0_GRID))
    rho_values: list[float] = field(default_factory=lambda: [0.5])
    topologies: list[str] = field(default_factory=lambda: list(TOPOLOGIES))
    n_values: list[int] = field(default_factory=lambda: [100, 200, 400])
    scaling_network: str = "complete"
    mlw: MLWTemplate = field(default_factory=MLWTemplate)
    baselines: BaselineTemplate = field(default_factory=BaselineTemplate)
    regenerate_network_per_run: bool = True
    pair_selection: str = "node"
    stagnation_window: int = DEFAULT_STAGNATION_WINDOW
    threshold_factor: float = 2.0
    save_series: bool = True
    save_networks: bool = False

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.pair_selection not in ("node", "edge"):
            raise ValueError("pair_selection must be 'node' or 'edge'")
        if self.scaling_network not in ("complete", "mlw"):
            raise ValueError("scaling_network must be 'complete' or 'mlw'")
        bad = [t for t in self.topologies if t not in TOPOLOGIES]
        if bad:
            raise ValueError(f"unknown topologies {bad}; expected a subset of {TOPOLOGIES}")
        if self.kind == "topology_compare" and "mlw" not in self.topologies:
            raise ValueError("topology_compare needs 'mlw' among topologies to match degrees against")
        for point in self.points():
            if point.topology == "mlw":
                self.mlw.params(point.N, point.rho, point.m0)

    def points(self) -> list[SweepPoint]:
        return sweep_points(self)


@dataclass(frozen=True)
class SweepPoint:
    index: int
    topology: str
    N: int
    m0: int | None = None
    rho: float | None = None

    @property
    def label(self) -> str:
        parts = [f"topology={self.topology}", f"N={self.N}"]
        if self.m0 is not None:
            parts.append(f"m0={self.m0}")
        if self.rho is not None:
            parts.append(f"rho={self.rho:g}")
        return ";".join(parts)


def sweep_points(cfg: ExperimentConfig) -> list[SweepPoint]:
    pts: list[tuple] = []
    if cfg.kind == "m0_sweep":
        pts = [("mlw", cfg.N, m0, rho) for rho in cfg.rho_values for m0 in cfg.m0_values]
    elif cfg.kind == "rho_sweep":
        pts = [("mlw", cfg.N, m0, rho) for m0 in cfg.m0_values for rho in cfg.rho_values]
    elif cfg.kind == "topology_compare":
        rho = cfg.rho_values[0]
        pts = [(t, cfg.N, m0, rho) for m0 in cfg.m0_values for t in cfg.topologies]
    elif cfg.kind == "scaling":
        for n in cfg.n_values:
            if cfg.scaling_network == "complete":
                pts.append(("complete", n, None, None))
            else:
                pts.extend(("mlw", n, m0, rho) for rho in cfg.rho_values for m0 in cfg.m0_values)
    return [SweepPoint(i, *p) for i, p in enumerate(pts)]


@dataclass
class RunResult:
    point: int
    run: int
    converged: bool
    convergence_time: int | None
    final_n_diff: int
    final_n_total: int
    peak_n_total: int
    stagnated: bool | None
    network_stats: GraphStats
    ratio_report: CommunityRatioReport | None
    series: MetricsSeries = field(repr=False)
    n_lw: int | None = None
    network: Graph | None = field(default=None, repr=False)


@dataclass
class PointSummary:
    point: SweepPoint
    n_lw: int | None
    n_converged: int
    n_nonconverged: int
    time_stats: BoxStats | None
    censored_median: float
    mean_final_n_diff: float
    mean_ratio: float | None
    std_ratio: float | None
    avg_degree: float
    avg_path_length: float | None
    avg_clustering: float
    mean_peak_n_total: float
    n_stagnated: int

    @property
    def mean_time(self) -> float | None:
        return self.time_stats.mean if self.time_stats else None


@dataclass
class SweepSummary:
    config: ExperimentConfig
    points: list[PointSummary]
    rho_threshold: dict[int, float | None] = field(default_factory=dict)
    scaling_slope: float | None = None
    trajectories: dict[int, dict[str, np.ndarray]] = field(default_factory=dict)


@dataclass
class ExperimentOutput:
    summary: SweepSummary
    runs: list[RunResult]


class _NetworkFactory:
    """Builds (and for topology comparisons, density-matches) the network of each run."""

    def __init__(self, cfg: ExperimentConfig, points: list[SweepPoint]):
        self.cfg = cfg
        self.points = points
        self.matched: dict[tuple[int, float], float] = {}
        self._cache: dict[tuple[int, int], Graph] = {}
        if cfg.kind == "topology_compare":
            self._match_degrees()

    def net_seed(self, point: SweepPoint, run: int):
        r = run if self.cfg.regenerate_network_per_run else 0
        return derive_seed(self.cfg.base_seed, point.index, r, 0)

    def mlw_params(self, point: SweepPoint) -> MLWParams:
        return self.cfg.mlw.params(point.N, point.rho, point.m0)

    def _match_degrees(self) -> None:
        # baselines copy the mean degree of the MLW ensemble at the same reference m0
        n_nets = self.cfg.runs if self.cfg.regenerate_network_per_run else 1
        for ref in self.points:
            if ref.topology != "mlw":
                continue
            degrees = []
            for r in range(n_nets):
                g = self.build(ref, r)
                self._cache[(ref.index, r)] = g
                degrees.append(2 * g.n_edges / ref.N)
            self.matched[(ref.m0, ref.rho)] = float(np.mean(degrees))

    def build(self, point: SweepPoint, run: int) -> Graph:
        r = run if self.cfg.regenerate_network_per_run else 0
        cached = self._cache.get((point.index, r))
        if cached is not None:
            return cached
        seed = self.net_seed(point, run)
        try:
            if point.topology == "complete":
                return complete_graph(point.N)
            if point.topology == "mlw":
                return gen_mlw(self.mlw_params(point), seed)
            k = self.matched[(point.m0, point.rho)]
            params = BaselineParams(point.topology, point.N, k, self.cfg.baselines.sw_rewire_prob)
            return gen_baseline(params, seed)
        except (GenerationError, ValueError) as exc:
            raise GenerationError(f"point {point.index} ({point.label}): {exc}") from exc


def _run_one(cfg: ExperimentConfig, factory: _NetworkFactory, point: SweepPoint,
             run: int) -> RunResult:
    g = factory.build(point, run)
    stats = compute_stats(g)
    ratio = community_ratio(g) if g.community is not None else None
    window = cfg.stagnation_window
    extra = [cfg.max_steps - window] if 0 < window < cfg.max_steps else []
    game_seed = derive_seed(cfg.base_seed, point.index, run, 1)
    res = play(g, game_seed, cfg.max_steps, extra_samples=extra,
               edge_mode=cfg.pair_selection == "edge")
    stagnated = None
    if not res.converged and window <= res.steps:
        stagnated = detect_stagnation(res.series, window)
    return RunResult(
        point=point.index,
        run=run,
        converged=res.converged,
        convergence_time=res.convergence_time,
        final_n_diff=res.final_n_diff,
        final_n_total=res.final_n_total,
        peak_n_total=res.peak_n_total,
        stagnated=stagnated,
        network_stats=stats,
        ratio_report=ratio,
        series=res.series,
        n_lw=factory.mlw_params(point).n_lw if point.topology == "mlw" else None,
        network=g if cfg.save_networks else None,
    )


def summarise_point(point: SweepPoint, runs: list[RunResult]) -> PointSummary:
    times = [r.convergence_time for r in runs if r.converged]
    censored = [r.convergence_time if r.converged else math.inf for r in runs]
    ratios = [r.ratio_report.mean_ratio for r in runs if r.ratio_report is not None]
    pls = [r.network_stats.avg_path_length for r in runs]
    return PointSummary(
        point=point,
        n_lw=runs[0].n_lw,
        n_converged=len(times),
        n_nonconverged=len(runs) - len(times),
        time_stats=box_stats(times) if times else None,
        censored_median=float(np.median(censored)),
        mean_final_n_diff=float(np.mean([r.final_n_diff for r in runs])),
        mean_ratio=float(np.mean(ratios)) if ratios else None,
        std_ratio=float(np.std(ratios)) if ratios else None,
        avg_degree=float(np.mean([r.network_stats.avg_degree for r in runs])),
        avg_path_length=None if any(p is None for p in pls) else float(np.mean(pls)),
        avg_clustering=float(np.mean([r.network_stats.avg_clustering for r in runs])),
        mean_peak_n_total=float(np.mean([r.peak_n_total for r in runs])),
        n_stagnated=sum(1 for r in runs if r.stagnated),
    )


def estimate_rho_threshold(rhos: list[float], medians: list[float],
                           factor: float = 2.0) -> float | None:
    """Largest rho of the flat prefix before the median first exceeds ``factor`` x plateau.

    The plateau is the median of the point medians seen so far. Returns None when
    no rise is detected.
    """
    order = np.argsort(rhos)
    prefix: list[float] = []
    for pos, i in enumerate(order):
        m = medians[i]
        if prefix and m > factor * float(np.median(prefix)):
            return float(rhos[order[pos - 1]])
        prefix.append(m)
    return None


def scaling_slope(ns: list[int], mean_times: list[float]) -> float:
    """Least-squares slope of log(mean convergence time) against log(N)."""
    return float(np.polyfit(np.log(ns), np.log(mean_times), 1)[0])


def run_experiment(cfg: ExperimentConfig, workers: int | None = None,
                   progress: Callable[[int, int], None] | None = None) -> ExperimentOutput:
    cfg.validate()
    points = cfg.points()
    factory = _NetworkFactory(cfg, points)
    tasks = [(p, r) for p in points for r in range(cfg.runs)]
    results: dict[tuple[int, int], RunResult] = {}
    done_per_point = dict.fromkeys(range(len(points)), 0)
    points_done = 0

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(_run_one, cfg, factory, p, r): (p.index, r) for p, r in tasks}
        for fut, key in futures.items():
            results[key] = fut.result()
            done_per_point[key[0]] += 1
            if done_per_point[key[0]] == cfg.runs:
                points_done += 1
                if progress:
                    progress(points_done, len(points))

    runs = [results[k] for k in sorted(results)]
    by_point = {p.index: [r for r in runs if r.point == p.index] for p in points}
    summaries = [summarise_point(p, by_point[p.index]) for p in points]
    summary = SweepSummary(cfg, summaries)

    grid = geometric_schedule(cfg.max_steps)
    for p in points:
        summary.trajectories[p.index] = mean_trajectory([r.series for r in by_point[p.index]], grid, p.N)

    if cfg.kind == "rho_sweep":
        for m0 in cfg.m0_values:
            group = [s for s in summaries if s.point.m0 == m0]
            summary.rho_threshold[m0] = estimate_rho_threshold(
                [s.point.rho for s in group], [s.censored_median for s in group], cfg.threshold_factor)
    if cfg.kind == "scaling":
        pairs = [(s.point.N, s.mean_time) for s in summaries if s.mean_time]
        if len(pairs) >= 2:
            summary.scaling_slope = scaling_slope(*map(list, zip(*pairs)))
    return ExperimentOutput(summary, runs)


# --- CSV output -------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return "inf" if math.isinf(x) else f"{x:.6g}"
    return str(x)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


SUMMARY_HEADER = [
    "param", "median", "q1", "q3", "wlow", "whigh", "mean", "n_outliers",
    "point", "topology", "N", "m0", "rho", "n_lw", "n_converged", "n_nonconverged",
    "nonconv_fraction", "censored_median", "mean_final_n_diff", "mean_R", "std_R",
    "avg_degree", "avg_path_length", "avg_clustering", "mean_peak_n_total", "n_stagnated",
]


def summary_csv(summary: SweepSummary) -> str:
    rows = []
    for s in summary.points:
        b = s.time_stats
        box = [b.median, b.q1, b.q3, b.whisker_low, b.whisker_high, b.mean, len(b.outliers)] if b else [None] * 7
        total = s.n_converged + s.n_nonconverged
        rows.append([
            s.point.label, *box, s.point.index, s.point.topology, s.point.N, s.point.m0, s.point.rho,
            s.n_lw, s.n_converged, s.n_nonconverged, s.n_nonconverged / total, s.censored_median,
            s.mean_final_n_diff, s.mean_ratio, s.std_ratio, s.avg_degree, s.avg_path_length,
            s.avg_clustering, s.mean_peak_n_total, s.n_stagnated,
        ])
    return _csv(SUMMARY_HEADER, rows)


RUNS_HEADER = [
    "point", "run", "param", "converged", "convergence_time", "final_n_diff", "final_n_total",
    "peak_n_total", "stagnated", "avg_degree", "avg_path_length", "avg_clustering", "mean_R",
]


def runs_csv(output: ExperimentOutput) -> str:
    labels = {s.point.index: s.point.label for s in output.summary.points}
    rows = []
    for r in output.runs:
        st = r.network_stats
        rows.append([
            r.point, r.run, labels[r.point], r.converged, r.convergence_time, r.final_n_diff,
            r.final_n_total, r.peak_n_total, r.stagnated, st.avg_degree, st.avg_path_length,
            st.avg_clustering, r.ratio_report.mean_ratio if r.ratio_report else None,
        ])
    return _csv(RUNS_HEADER, rows)


def trajectory_csv(traj: dict[str, np.ndarray]) -> str:
    rows = [[int(s), float(t), float(d), float(r)]
            for s, t, d, r in zip(traj["step"], traj["n_total"], traj["n_diff"], traj["success_rate"])]
    return _csv(["step", "mean_n_total", "mean_n_diff", "mean_success_rate"], rows)


def write_results(output: ExperimentOutput, outdir: str | Path) -> Path:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    summary = output.summary
    cfg = summary.config
    (out / "summary.csv").write_text(summary_csv(summary))
    (out / "runs.csv").write_text(runs_csv(output))
    traj_dir = out / "trajectories"
    traj_dir.mkdir(exist_ok=True)
    for idx, traj in summary.trajectories.items():
        (traj_dir / f"{idx}.csv").write_text(trajectory_csv(traj))
    if cfg.save_series:
        series_dir = out / "series"
        series_dir.mkdir(exist_ok=True)
        for r in output.runs:
            (series_dir / f"{r.point}_{r.run}.csv").write_text(r.series.to_csv())
    if cfg.save_networks:
        net_dir = out / "networks"
        net_dir.mkdir(exist_ok=True)
        for r in output.runs:
            if r.network is not None:
                (net_dir / f"{r.point}_{r.run}.edges").write_text(format_edge_list(r.network))
    if summary.rho_threshold:
        rows = [[m0, th] for m0, th in sorted(summary.rho_threshold.items())]
        (out / "thresholds.csv").write_text(_csv(["m0", "rho_th"], rows))
    if summary.scaling_slope is not None:
        (out / "scaling.csv").write_text(_csv(["slope"], [[summary.scaling_slope]]))
    return out

