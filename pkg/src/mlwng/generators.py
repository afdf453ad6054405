"""Multi-local-world (MLW) growth model and density-matched baseline topologies."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np

from .graph import Graph, is_connected

MAX_REGENERATIONS = 1000
MAX_EDGE_ATTEMPTS = 100


class GenerationError(RuntimeError):
    """A generator could not produce a valid (connected) graph."""


@dataclass(frozen=True)
class MLWParams:
    N: int = 1000
    m0: int = 10
    n_lw: int = 50
    p1: float = 0.0
    p2: float = 0.28
    p3: float = 0.39
    p4: float = 0.43
    e1: int = 2
    e2: int = 2
    e3: int = 2
    e4: int = 2
    alpha: float = 1.0

    @classmethod
    def from_rho(cls, N: int, rho: float, m0: int, **kw) -> MLWParams:
        """Size the initial local-worlds so that ``n_lw * m0 ~= rho * N``."""
        if not 0 < rho < 1:
            raise ValueError(f"rho must lie in (0, 1), got {rho}")
        n_lw = math.floor(rho * N / m0 + 1e-9)
        params = cls(N=N, m0=m0, n_lw=n_lw, **kw)
        params.validate()
        return params

    @property
    def e0(self) -> int:
        return self.m0 * (self.m0 - 1) // 2

    @property
    def rho(self) -> float:
        return self.n_lw * self.m0 / self.N

    def validate(self) -> None:
        if self.m0 < 3:
            raise ValueError(f"m0 must be >= 3 (got {self.m0})")
        if self.n_lw < 3:
            raise ValueError(f"N_LW must be >= 3 (got {self.n_lw})")
        if self.N <= self.n_lw * self.m0:
            raise ValueError(f"N must exceed N_LW * m0 = {self.n_lw * self.m0} (got N={self.N})")
        if not 0 <= self.p1 <= self.p2 <= self.p3 <= self.p4 <= 1:
            raise ValueError("need 0 <= p1 <= p2 <= p3 <= p4 <= 1")
        if self.p2 - self.p1 <= 0:
            raise ValueError("operation b must have positive probability or growth never ends")
        if min(self.e1, self.e2, self.e3, self.e4) < 1:
            raise ValueError("e1..e4 must be positive integers")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


OPERATIONS = "abcde"


@dataclass
class MLWTrace:
    """Bookkeeping from one MLW construction (dispatch counts, skipped sub-steps)."""

    dispatch: Counter = field(default_factory=Counter)
    skipped: Counter = field(default_factory=Counter)
    attempts: int = 1


def preferential_pick(candidates: Sequence[int], degrees: Sequence[int], alpha: float,
                      rng: np.random.Generator, exclude=frozenset()) -> int | None:
    """Draw a node with probability proportional to ``degree + alpha``.

    ``candidates`` minus ``exclude`` is the support; returns None if it is empty.
    """
    pool = [i for i in candidates if i not in exclude]
    if not pool:
        return None
    weights = [degrees[i] + alpha for i in pool]
    x = rng.random() * sum(weights)
    acc = 0.0
    for node, w in zip(pool, weights):
        acc += w
        if x < acc:
            return node
    return pool[-1]


def deletion_weights(far_degrees: Sequence[int], lw_degree_sum: float, lw_size: int,
                     alpha: float) -> list[float]:
    """Unnormalised removal weights ``(1 - Pi(k)) / (lw_size - 1)`` for each far endpoint."""
    denom = lw_degree_sum + alpha * lw_size
    scale = 1.0 / (lw_size - 1) if lw_size > 1 else 1.0
    return [scale * (1.0 - (k + alpha) / denom) for k in far_degrees]


def deletion_pick(g: Graph, node: int, lw_nodes: Sequence[int], alpha: float,
                  rng: np.random.Generator) -> tuple[int, int] | None:
    """Choose one intra-local-world edge of ``node`` to delete.

    Edges whose removal would isolate an endpoint are never chosen. Returns None
    when no edge qualifies.
    """
    members = set(lw_nodes)
    far = [v for v in sorted(g.adj[node]) if v in members]
    if g.degree(node) < 2:
        return None
    far = [v for v in far if g.degree(v) >= 2]
    if not far:
        return None
    degree_sum = sum(g.degree(i) for i in lw_nodes)
    weights = deletion_weights([g.degree(v) for v in far], degree_sum, len(lw_nodes), alpha)
    total = sum(weights)
    if total <= 0:
        return node, far[int(rng.random() * len(far))]
    x = rng.random() * total
    acc = 0.0
    for v, w in zip(far, weights):
        acc += w
        if x < acc:
            return node, v
    return node, far[-1]


class _MLWBuilder:
    def __init__(self, params: MLWParams, rng: np.random.Generator):
        self.p = params
        self.rng = rng
        self.g = Graph(0, [])
        self.worlds: list[list[int]] = []
        self.trace = MLWTrace()

    def degrees(self):
        # list view indexed by node id; Graph.adj is the source of truth
        return _DegreeView(self.g)

    def new_world(self) -> None:
        label = len(self.worlds)
        nodes = [self.g.add_node(label) for _ in range(self.p.m0)]
        for i, u in enumerate(nodes):
            for v in nodes[i + 1:]:
                self.g.add_edge(u, v)
        self.worlds.append(nodes)

    def pick_world(self) -> list[int]:
        return self.worlds[int(self.rng.random() * len(self.worlds))]

    def op_add_world(self) -> None:
        if self.g.n + self.p.m0 > self.p.N:
            self.trace.skipped["a"] += 1
            return
        self.new_world()

    def op_add_node(self) -> None:
        lw = self.pick_world()
        deg = self.degrees()
        targets: list[int] = []
        for _ in range(self.p.e1):
            t = preferential_pick(lw, deg, self.p.alpha, self.rng, exclude=set(targets))
            if t is None:
                break
            targets.append(t)
        label = self.g.community[lw[0]]
        u = self.g.add_node(label)
        for t in targets:
            self.g.add_edge(u, t)
        lw.append(u)

    def op_add_intra(self) -> None:
        lw = self.pick_world()
        size = len(lw)
        deg = self.degrees()
        for _ in range(self.p.e2):
            if self._intra_edges(lw) >= size * (size - 1) // 2:
                self.trace.skipped["c"] += 1
                continue
            for _ in range(MAX_EDGE_ATTEMPTS):
                u = lw[int(self.rng.random() * size)]
                v = preferential_pick(lw, deg, self.p.alpha, self.rng, exclude={u})
                if v is not None and self.g.add_edge(u, v):
                    break
            else:
                self.trace.skipped["c"] += 1

    def op_delete_intra(self) -> None:
        lw = self.pick_world()
        for _ in range(self.p.e3):
            node = lw[int(self.rng.random() * len(lw))]
            edge = deletion_pick(self.g, node, lw, self.p.alpha, self.rng)
            if edge is None:
                self.trace.skipped["d"] += 1
                continue
            self.g.remove_edge(*edge)

    def op_add_inter(self) -> None:
        k = len(self.worlds)
        if k < 2:
            self.trace.skipped["e"] += 1
            return
        i = int(self.rng.random() * k)
        j = int(self.rng.random() * (k - 1))
        if j >= i:
            j += 1
        lw1, lw2 = self.worlds[i], self.worlds[j]
        deg = self.degrees()
        for _ in range(self.p.e4):
            for _ in range(MAX_EDGE_ATTEMPTS):
                u = preferential_pick(lw1, deg, self.p.alpha, self.rng)
                v = preferential_pick(lw2, deg, self.p.alpha, self.rng)
                if self.g.add_edge(u, v):
                    break
            else:
                self.trace.skipped["e"] += 1

    def _intra_edges(self, lw: list[int]) -> int:
        members = set(lw)
        return sum(len(self.g.adj[u] & members) for u in lw) // 2

    def build(self) -> Graph:
        p = self.p
        for _ in range(p.n_lw):
            self.new_world()
        ops = (self.op_add_world, self.op_add_node, self.op_add_intra,
               self.op_delete_intra, self.op_add_inter)
        while self.g.n < p.N:
            op = dispatch(self.rng.random(), p)
            self.trace.dispatch[OPERATIONS[op]] += 1
            ops[op]()
        return self.g


class _DegreeView:
    __slots__ = ("adj",)

    def __init__(self, g: Graph):
        self.adj = g.adj

    def __getitem__(self, i: int) -> int:
        return len(self.adj[i])


def dispatch(r: float, p: MLWParams) -> int:
    """Index (0..4 for operations a..e) selected by a uniform draw ``r``."""
    if r < p.p1:
        return 0
    if r < p.p2:
        return 1
    if r < p.p3:
        return 2
    if r < p.p4:
        return 3
    return 4


def initial_mlw(params: MLWParams) -> Graph:
    """The isolated starting cliques, before any growth step."""
    b = _MLWBuilder(params, np.random.default_rng(0))
    for _ in range(params.n_lw):
        b.new_world()
    return b.g


def gen_mlw(params: MLWParams, seed, trace: MLWTrace | None = None) -> Graph:
    """Grow an MLW network; regenerates from derived seeds until it is connected."""
    params.validate()
    root = _seed_sequence(seed)
    for attempt in range(MAX_REGENERATIONS):
        rng = np.random.default_rng(derive_seed(root, attempt) if attempt else root)
        builder = _MLWBuilder(params, rng)
        g = builder.build()
        if is_connected(g):
            if trace is not None:
                trace.dispatch.update(builder.trace.dispatch)
                trace.skipped.update(builder.trace.skipped)
                trace.attempts = attempt + 1
            return g
    raise GenerationError(f"MLW network still disconnected after {MAX_REGENERATIONS} attempts: {params}")


@dataclass(frozen=True)
class BaselineParams:
    kind: str  # "rg", "sw" or "sf"
    N: int
    target_avg_degree: float
    sw_rewire_prob: float = 0.2

    def validate(self) -> None:
        if self.kind not in BASELINE_KINDS:
            raise ValueError(f"unknown baseline kind {self.kind!r}; expected one of {BASELINE_KINDS}")
        if not 0 < self.target_avg_degree < self.N - 1:
            raise ValueError("target average degree must lie in (0, N-1)")
        if not 0 <= self.sw_rewire_prob <= 1:
            raise ValueError("small-world rewire probability must lie in [0, 1]")

    @property
    def n_edges(self) -> int:
        return round(self.N * self.target_avg_degree / 2)

    @property
    def lattice_k(self) -> int:
        return nearest_even(self.target_avg_degree)

    @property
    def attach_m(self) -> int:
        return max(1, round(self.target_avg_degree / 2))


BASELINE_KINDS = ("rg", "sw", "sf")


def nearest_even(x: float) -> int:
    k = 2 * math.floor(x / 2 + 0.5)
    return max(2, k)


def _baseline_nx(params: BaselineParams, seed: int) -> nx.Graph:
    if params.kind == "rg":
        return nx.gnm_random_graph(params.N, params.n_edges, seed=seed)
    if params.kind == "sw":
        return nx.watts_strogatz_graph(params.N, params.lattice_k, params.sw_rewire_prob, seed=seed)
    return nx.barabasi_albert_graph(params.N, params.attach_m, seed=seed)


def gen_baseline(params: BaselineParams, seed) -> Graph:
    """Random-graph, small-world or scale-free network matched to a target mean degree."""
    params.validate()
    root = _seed_sequence(seed)
    for attempt in range(MAX_REGENERATIONS):
        child = derive_seed(root, attempt)
        h = _baseline_nx(params, int(child.generate_state(1)[0]))
        g = Graph.from_edges(params.N, ((min(u, v), max(u, v)) for u, v in h.edges()))
        if is_connected(g):
            return g
    raise GenerationError(f"{params.kind} network still disconnected after {MAX_REGENERATIONS} attempts")


def match_baselines(avg_degree: float, N: int, sw_rewire_prob: float = 0.2) -> list[BaselineParams]:
    return [BaselineParams(kind, N, avg_degree, sw_rewire_prob) for kind in BASELINE_KINDS]


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def derive_seed(seed, *keys: int) -> np.random.SeedSequence:
    """Child seed addressed by ``keys``; independent of how many others were drawn."""
    root = _seed_sequence(seed)
    return np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + keys)
