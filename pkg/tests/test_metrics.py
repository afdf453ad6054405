import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mlwng.graph import complete_graph
from mlwng.metrics import (
    MetricsSeries,
    box_stats,
    detect_stagnation,
    geometric_schedule,
    mean_trajectory,
)
from mlwng.naming_game import run


def quantile(sorted_x, q):
    pos = q * (len(sorted_x) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(sorted_x) - 1)
    return sorted_x[lo] + (pos - lo) * (sorted_x[hi] - sorted_x[lo])


def series_of(points):
    s = MetricsSeries()
    for step, n_diff in points:
        s.record(step, 10, n_diff, 0, 1)
    return s


def test_first_sample_after_one_step():
    res = run(complete_graph(10), 0, 100)
    first = res.series.samples[0]
    # one invention plus the hearer learning it
    assert (first.step, first.n_total, first.n_diff, first.success_rate) == (1, 2, 1, 0.0)


def test_success_rate_per_bin():
    s = MetricsSeries()
    assert s.record(10, 5, 2, 3, 10).success_rate == 0.3
    assert s.record(20, 5, 2, 0, 0).success_rate == 0.0


def test_out_of_order_sample_rejected():
    s = MetricsSeries()
    s.record(5, 1, 1, 0, 5)
    with pytest.raises(ValueError):
        s.record(5, 1, 1, 0, 0)


def test_csv_format():
    s = series_of([(1, 1), (3, 2)])
    assert s.to_csv() == "step,n_total,n_diff,success_rate\n1,10,1,0.000000\n3,10,2,0.000000\n"


def test_geometric_schedule():
    sched = geometric_schedule(10**4)
    assert sched[0] == 1 and sched[-1] == 10**4
    assert sched == sorted(set(sched))
    # 50 points per decade, fewer at the bottom where ceil collapses them
    assert 150 < len(sched) <= 201
    assert 5000 in geometric_schedule(10**4, extra=[5000, 0, 10**5])
    assert 0 not in geometric_schedule(10**4, extra=[0])


@given(st.integers(1, 10**8))
def test_schedule_bounds(max_steps):
    sched = geometric_schedule(max_steps)
    assert sched[0] == 1 and sched[-1] == max_steps
    assert all(b > a for a, b in zip(sched, sched[1:]))


def test_box_stats_one_to_nine():
    b = box_stats(range(1, 10))
    assert (b.median, b.q1, b.q3) == (5, 3, 7)
    assert (b.whisker_low, b.whisker_high, b.outliers) == (1, 9, ())
    assert b.mean == 5 and b.count == 9


def test_box_stats_constant():
    b = box_stats([4.0] * 7)
    assert b.median == b.q1 == b.q3 == b.whisker_low == b.whisker_high == 4.0
    assert b.outliers == ()


def test_box_stats_flags_outlier():
    b = box_stats([1, 2, 3, 4, 100])
    assert b.outliers == (100,)
    assert b.whisker_high == 4


def test_box_stats_empty():
    with pytest.raises(ValueError):
        box_stats([])


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=60))
def test_box_stats_against_sort_oracle(values):
    x = sorted(values)
    b = box_stats(values)
    q1, med, q3 = (quantile(x, q) for q in (0.25, 0.5, 0.75))
    assert b.median == pytest.approx(med, abs=1e-6)
    assert b.q1 == pytest.approx(q1, abs=1e-6) and b.q3 == pytest.approx(q3, abs=1e-6)
    lo, hi = b.q1 - 1.5 * (b.q3 - b.q1), b.q3 + 1.5 * (b.q3 - b.q1)
    inside = [v for v in x if lo <= v <= hi]
    assert b.whisker_low == min(inside) and b.whisker_high == max(inside)
    assert sorted(b.outliers) == [v for v in x if v < lo or v > hi]
    assert len(b.outliers) + len(inside) == len(x)


def test_stagnation_flat_tail():
    s = series_of([(1, 5), (100, 4), (400, 3), (900, 3), (1000, 3)])
    assert detect_stagnation(s, window=600)


def test_stagnation_anchor_before_window_counts():
    # the last sample at or before T - window (step 400) still shows n_diff = 4
    s = series_of([(1, 5), (400, 4), (900, 3), (1000, 3)])
    assert not detect_stagnation(s, window=600)
    assert detect_stagnation(s, window=100)


def test_stagnation_window_longer_than_run():
    with pytest.raises(ValueError):
        detect_stagnation(series_of([(1, 2), (50, 2)]), window=100)


def test_stagnation_moving_tail():
    s = series_of([(1, 5), (500, 4), (990, 3), (1000, 2)])
    assert not detect_stagnation(s, window=5)


def test_mean_trajectory_pads_converged_runs():
    fast = MetricsSeries()
    fast.record(1, 2, 1, 0, 1)
    fast.record(5, 4, 1, 2, 4)
    slow = MetricsSeries()
    slow.record(1, 2, 1, 0, 1)
    slow.record(10, 6, 2, 1, 9)
    traj = mean_trajectory([fast, slow], [1, 5, 10], n_agents=4)
    assert traj["n_total"].tolist() == [2, 3, 5]
    assert traj["n_diff"].tolist() == [1, 1, 1.5]
    assert np.allclose(traj["success_rate"], [0, (0.5 + 0) / 2, (1 + 1 / 9) / 2])
