"""Command-line entry point.

Exit codes: 0 success (non-converged runs are data, not failures), 1 usage or
config error, 2 runtime failure such as a generator giving up on connectivity.

For ``sweep``, values given as flags override the ones in the config file.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, dump_config, load_config
from .experiments import run_experiment, write_results
from .generators import BaselineParams, GenerationError, MLWParams, gen_baseline, gen_mlw
from .graph import (
    Graph,
    community_ratio,
    complete_graph,
    compute_stats,
    read_edge_list,
    write_edge_list,
)
from .naming_game import DisconnectedGraphError
from .naming_game import run as play

EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(float(text))
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _add_network_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=["mlw", "rg", "sw", "sf", "complete"], default="mlw",
                   help="network model (default: %(default)s)")
    p.add_argument("--n", type=int, default=1000, help="number of nodes (default: %(default)s)")
    p.add_argument("--rho", type=float, default=0.5,
                   help="MLW: fraction of nodes in the initial local-worlds (default: %(default)s)")
    p.add_argument("--m0", type=int, default=10,
                   help="MLW: nodes per initial local-world, >= 3 (default: %(default)s)")
    p.add_argument("--alpha", type=float, default=1.0,
                   help="MLW: preferential attachment offset (default: %(default)s)")
    p.add_argument("--e4", type=int, default=2,
                   help="MLW: inter-local-world edges per operation e (default: %(default)s)")
    p.add_argument("--k", type=float, default=None,
                   help="rg/sw/sf: target average degree (required for those models)")
    p.add_argument("--rewire", type=float, default=0.2,
                   help="sw: rewiring probability (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: %(default)s)")


def _build_network(args) -> Graph:
    if args.model == "complete":
        return complete_graph(args.n)
    if args.model == "mlw":
        try:
            params = MLWParams.from_rho(args.n, args.rho, args.m0, alpha=args.alpha, e4=args.e4)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return gen_mlw(params, args.seed)
    if args.k is None:
        raise UsageError(f"--k is required for model {args.model}")
    params = BaselineParams(args.model, args.n, args.k, args.rewire)
    try:
        params.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return gen_baseline(params, args.seed)


def _stats_line(g: Graph) -> str:
    st = compute_stats(g)
    pl = "undefined" if st.avg_path_length is None else f"{st.avg_path_length:.4f}"
    parts = [f"nodes={g.n}", f"edges={g.n_edges}", f"<k>={st.avg_degree:.4f}", f"<pl>={pl}",
             f"<cc>={st.avg_clustering:.4f}", f"connected={str(st.connected).lower()}"]
    if g.community is not None:
        report = community_ratio(g)
        parts.append(f"communities={len(set(g.community))}")
        parts.append(f"R={report.mean_ratio:.6f}")
        parts.append(f"R_std={report.std:.6f}")
    return " ".join(parts)


def cmd_generate(args) -> int:
    g = _build_network(args)
    write_edge_list(g, args.out)
    print(_stats_line(g))
    return 0


def cmd_run(args) -> int:
    if args.max_steps < 1:
        raise UsageError("--max-steps must be >= 1")
    g = read_edge_list(args.graph) if args.graph else _build_network(args)
    try:
        res = play(g, args.game_seed, args.max_steps, edge_mode=args.pair_selection == "edge")
    except DisconnectedGraphError as exc:
        raise UsageError(str(exc)) from exc
    if args.series_out:
        Path(args.series_out).write_text(res.series.to_csv())
    if res.converged:
        print(f"CONVERGED time={res.convergence_time} n_total={res.final_n_total} "
              f"n_diff={res.final_n_diff} peak_n_total={res.peak_n_total}")
    else:
        print(f"NON-CONVERGED steps={res.steps} n_diff={res.final_n_diff} "
              f"n_total={res.final_n_total} peak_n_total={res.peak_n_total}")
    return 0


def cmd_sweep(args) -> int:
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except ConfigError as exc:
        raise UsageError(f"{args.config}: {exc}") from exc
    for flag, attr in (("runs", "runs"), ("max_steps", "max_steps"), ("base_seed", "base_seed")):
        value = getattr(args, flag)
        if value is not None:
            setattr(cfg, attr, value)
    if args.save_networks:
        cfg.save_networks = True
    if args.no_series:
        cfg.save_series = False
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    out = Path(args.out or Path("results") / Path(args.config).stem)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.yaml").write_text(dump_config(cfg))

    def progress(done, total):
        print(f"[{done}/{total}] points completed", file=sys.stderr, flush=True)

    output = run_experiment(cfg, workers=args.workers, progress=progress)
    write_results(output, out)
    print(out)
    return 0


def cmd_stats(args) -> int:
    print(_stats_line(read_edge_list(args.edges)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mlwng", description="Naming game on multi-local-world networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="generate a network and write it as an edge list",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_network_flags(p)
    p.add_argument("-o", "--out", default="graph.edges", help="output edge-list path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="play one naming game",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--graph", help="edge-list file; if omitted the network is generated from flags")
    _add_network_flags(p)
    p.add_argument("--game-seed", type=int, default=0, help="seed of the game itself")
    p.add_argument("--max-steps", type=int, default=10**7, help="interaction cap")
    p.add_argument("--pair-selection", choices=["node", "edge"], default="node",
                   help="speaker uniform over nodes then hearer over neighbours, or uniform edge")
    p.add_argument("--series-out", help="write the sampled trajectory CSV here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a configured experiment and write CSV results",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("config", help="YAML experiment config (see configs/)")
    p.add_argument("--out", help="results directory (default: results/<config name>)")
    p.add_argument("--workers", type=_positive_int, default=os.cpu_count(),
                   help="maximum concurrent runs")
    p.add_argument("--runs", type=_positive_int, default=None, help="override runs per point")
    p.add_argument("--max-steps", type=_positive_int, default=None, help="override the interaction cap")
    p.add_argument("--base-seed", type=int, default=None, help="override the base seed")
    p.add_argument("--save-networks", action="store_true", help="also write networks/<point>_<run>.edges")
    p.add_argument("--no-series", action="store_true", help="skip per-run series/<point>_<run>.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", help="print structural statistics of an edge-list file")
    p.add_argument("edges", help="edge-list file")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        if args.command == "stats" or getattr(args, "graph", None):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except GenerationError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
