"""Plot a sweep's results directory: convergence-time boxes and mean trajectories.

    python scripts/plot_results.py results/m0_sweep_rho05

Writes times.png and trajectories.png next to the CSVs. Needs matplotlib
(``pip install -e .[plot]``).
"""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def short_label(param):
    keep = [kv for kv in param.split(";") if not kv.startswith("N=") or "topology=complete" in param]
    return "\n".join(kv.split("=")[1] if kv.startswith("topology=") else kv for kv in keep)


def plot_times(outdir: Path):
    times = {}
    for row in read_csv(outdir / "runs.csv"):
        got = times.setdefault(row["param"], [])
        if row["converged"] == "1":
            got.append(float(row["convergence_time"]))
    order = list(times)
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(order)), 4))
    ax.boxplot([times[p] or [float("nan")] for p in order], whis=1.5)
    ax.set_xticks(range(1, len(order) + 1), [short_label(p) for p in order], fontsize=7)
    ax.set_yscale("log")
    ax.set_ylabel("convergence time (converged runs)")
    fig.tight_layout()
    fig.savefig(outdir / "times.png", dpi=150)


def plot_trajectories(outdir: Path):
    labels = {row["point"]: short_label(row["param"]).replace("\n", " ")
              for row in read_csv(outdir / "summary.csv")}
    fig, axes = plt.subplots(1, 3, figsize=(13, 3.8))
    for path in sorted((outdir / "trajectories").glob("*.csv"), key=lambda p: int(p.stem)):
        rows = read_csv(path)
        step = [int(r["step"]) for r in rows]
        for ax, col in zip(axes, ("mean_n_total", "mean_n_diff", "mean_success_rate")):
            ax.plot(step, [float(r[col]) for r in rows], label=labels.get(path.stem, path.stem), lw=1)
    for ax, title in zip(axes, ("total names", "different names", "success rate")):
        ax.set_xscale("log")
        ax.set_xlabel("interactions")
        ax.set_title(title)
    axes[1].set_yscale("log")
    axes[2].legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(outdir / "trajectories.png", dpi=150)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("results", type=Path)
    args = ap.parse_args()
    plot_times(args.results)
    plot_trajectories(args.results)
    print(args.results / "times.png", args.results / "trajectories.png")


if __name__ == "__main__":
    main()
