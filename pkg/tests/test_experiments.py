import math

import numpy as np
import pytest

from mlwng.experiments import (
    ExperimentConfig,
    MLWTemplate,
    estimate_rho_threshold,
    run_experiment,
    runs_csv,
    scaling_slope,
    summary_csv,
    write_results,
)


def small_cfg(**kw):
    base = dict(kind="m0_sweep", N=200, runs=3, max_steps=100_000, base_seed=7,
                m0_values=[4, 10], rho_values=[0.5], stagnation_window=20_000)
    base.update(kw)
    return ExperimentConfig(**base)


def test_rho_threshold_flat_then_rise():
    assert estimate_rho_threshold([0.2, 0.4, 0.6, 0.8], [10, 12, 9, 40]) == 0.6


def test_rho_threshold_unsorted_input():
    assert estimate_rho_threshold([0.8, 0.2, 0.6, 0.4], [40, 10, 9, 12]) == 0.6


def test_rho_threshold_no_rise():
    assert estimate_rho_threshold([0.1, 0.2, 0.3], [5, 6, 7]) is None


def test_rho_threshold_censored_medians():
    assert estimate_rho_threshold([0.1, 0.2, 0.3], [5, 6, math.inf]) == 0.2


def test_scaling_slope_exact_power_law():
    ns = [100, 200, 400, 800]
    assert scaling_slope(ns, [3 * n**1.5 for n in ns]) == pytest.approx(1.5)


def test_points_layout():
    cfg = small_cfg(m0_values=[4, 10, 20], rho_values=[0.3, 0.5])
    labels = [p.label for p in cfg.points()]
    assert labels[0] == "topology=mlw;N=200;m0=4;rho=0.3"
    assert len(labels) == 6 and len(set(labels)) == 6


def test_topology_compare_points():
    cfg = small_cfg(kind="topology_compare", m0_values=[10], rho_values=[0.7])
    assert [p.topology for p in cfg.points()] == ["mlw", "rg", "sw", "sf"]


def test_topology_compare_requires_mlw():
    with pytest.raises(ValueError, match="mlw"):
        small_cfg(kind="topology_compare", topologies=["rg", "sw"]).validate()


def test_invalid_point_rejected_up_front():
    with pytest.raises(ValueError, match="m0"):
        small_cfg(m0_values=[2]).validate()


def test_sweep_counts_and_consistency():
    out = run_experiment(small_cfg())
    assert len(out.runs) == 6
    for s in out.summary.points:
        assert s.n_converged + s.n_nonconverged == 3
    for r in out.runs:
        assert (r.convergence_time is not None) == r.converged
        if r.converged:
            assert r.final_n_diff == 1 and r.final_n_total == 200
        else:
            assert r.stagnated is not None


def test_sweep_is_reproducible(tmp_path):
    a = write_results(run_experiment(small_cfg()), tmp_path / "a")
    b = write_results(run_experiment(small_cfg(), workers=2), tmp_path / "b")
    for name in ("summary.csv", "runs.csv", "trajectories/0.csv", "series/1_2.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_different_base_seed_changes_results():
    a = run_experiment(small_cfg())
    b = run_experiment(small_cfg(base_seed=8))
    assert runs_csv(a) != runs_csv(b)


def test_fixed_network_across_runs():
    out = run_experiment(small_cfg(regenerate_network_per_run=False, save_networks=True,
                                   m0_values=[4]))
    assert len({frozenset(r.network.edge_set()) for r in out.runs}) == 1
    assert len({r.convergence_time for r in out.runs}) > 1


def test_topology_compare_matches_degree():
    cfg = small_cfg(kind="topology_compare", m0_values=[5], rho_values=[0.5], runs=2)
    out = run_experiment(cfg)
    deg = {s.point.topology: s.avg_degree for s in out.summary.points}
    assert abs(deg["rg"] - deg["mlw"]) < 0.02
    assert abs(deg["sf"] - deg["mlw"]) < 1.0
    assert abs(deg["sw"] - deg["mlw"]) <= 1.0


def test_rho_sweep_reports_threshold(tmp_path):
    cfg = small_cfg(kind="rho_sweep", m0_values=[4], rho_values=[0.2, 0.4])
    out = run_experiment(cfg)
    assert 4 in out.summary.rho_threshold
    write_results(out, tmp_path)
    assert (tmp_path / "thresholds.csv").read_text().startswith("m0,rho_th\n")


def test_scaling_reports_slope(tmp_path):
    cfg = small_cfg(kind="scaling", n_values=[20, 40, 80], runs=4)
    out = run_experiment(cfg)
    assert 1.0 < out.summary.scaling_slope < 2.0
    write_results(out, tmp_path)
    assert (tmp_path / "scaling.csv").exists()


def test_summary_csv_columns():
    out = run_experiment(small_cfg(m0_values=[4]))
    header, row = summary_csv(out.summary).splitlines()[:2]
    cols = dict(zip(header.split(","), row.split(",")))
    assert cols["param"] == "topology=mlw;N=200;m0=4;rho=0.5"
    assert int(cols["n_converged"]) + int(cols["n_nonconverged"]) == 3
    assert float(cols["mean_R"]) > 0


def test_mlw_template_forwards_knobs():
    p = MLWTemplate(e4=1, alpha=0.5).params(1000, 0.5, 10)
    assert (p.e4, p.alpha, p.n_lw) == (1, 0.5, 50)


def test_trajectory_grid_covers_cap():
    out = run_experiment(small_cfg(m0_values=[4]))
    traj = out.summary.trajectories[0]
    assert traj["step"][-1] == 100_000
    assert np.all(traj["n_diff"] >= 1)
