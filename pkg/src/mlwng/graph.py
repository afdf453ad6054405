"""Undirected simple graphs and the structural statistics reported for them."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path


class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    Adjacency is kept as one set per node so neighbour iteration is O(deg).
    ``community`` optionally holds one ground-truth label per node.
    """

    def __init__(self, n: int, community: list[int] | None = None):
        if n < 0:
            raise ValueError("node count must be non-negative")
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.n_edges = 0
        if community is not None and len(community) != n:
            raise ValueError("community labels must cover every node")
        self.community = community

    @property
    def n(self) -> int:
        return len(self.adj)

    def add_node(self, label: int | None = None) -> int:
        self.adj.append(set())
        if self.community is not None:
            if label is None:
                raise ValueError("labelled graph needs a label for a new node")
            self.community.append(label)
        return len(self.adj) - 1

    def add_edge(self, u: int, v: int) -> bool:
        """Insert edge ``(u, v)``; False means rejected (self-loop or duplicate)."""
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise IndexError(f"edge ({u}, {v}) outside node range")
        if u == v or v in self.adj[u]:
            return False
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.n_edges += 1
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        if v not in self.adj[u]:
            return False
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self.n_edges -= 1
        return True

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adj), dtype=np.int64, count=self.n)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, sorted."""
        for u, nbrs in enumerate(self.adj):
            for v in sorted(nbrs):
                if u < v:
                    yield u, v

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges())

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` with sorted neighbour lists."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum([len(a) for a in self.adj], out=indptr[1:])
        indices = np.empty(indptr[-1], dtype=np.int64)
        for u, nbrs in enumerate(self.adj):
            indices[indptr[u]:indptr[u + 1]] = sorted(nbrs)
        return indptr, indices

    def copy(self) -> Graph:
        g = Graph(self.n, None if self.community is None else list(self.community))
        g.adj = [set(a) for a in self.adj]
        g.n_edges = self.n_edges
        return g

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]],
                   community: list[int] | None = None) -> Graph:
        g = cls(n, community)
        for u, v in edges:
            if not g.add_edge(u, v):
                raise ValueError(f"invalid edge ({u}, {v}) for a simple graph")
        return g

    def __repr__(self) -> str:
        labelled = "" if self.community is None else f", {len(set(self.community))} communities"
        return f"Graph(n={self.n}, edges={self.n_edges}{labelled})"


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, u + 1) for u in range(n - 1)))


def is_connected(g: Graph) -> bool:
    seen = bytearray(g.n)
    seen[0] = 1
    queue = deque([0])
    reached = 1
    while queue:
        u = queue.popleft()
        for v in g.adj[u]:
            if not seen[v]:
                seen[v] = 1
                reached += 1
                queue.append(v)
    return reached == g.n


@dataclass(frozen=True)
class GraphStats:
    avg_degree: float
    avg_path_length: float | None  # None when disconnected
    avg_clustering: float
    connected: bool


def local_clustering(g: Graph) -> np.ndarray:
    """Per-node clustering coefficient; nodes of degree < 2 get 0."""
    cc = np.zeros(g.n)
    for u, nbrs in enumerate(g.adj):
        k = len(nbrs)
        if k < 2:
            continue
        links = sum(len(nbrs & g.adj[v]) for v in nbrs) // 2
        cc[u] = links / (k * (k - 1) / 2)
    return cc


def average_path_length(g: Graph) -> float | None:
    """Exact mean hop distance over unordered node pairs (None if disconnected)."""
    indptr, indices = g.csr()
    a = csr_matrix((np.ones(len(indices)), indices, indptr), shape=(g.n, g.n))
    dist = shortest_path(a, method="D", directed=False, unweighted=True)
    if np.isinf(dist).any():
        return None
    return float(dist.sum() / (g.n * (g.n - 1)))


def compute_stats(g: Graph) -> GraphStats:
    if g.n < 2:
        raise ValueError("statistics need at least two nodes")
    apl = average_path_length(g)
    return GraphStats(
        avg_degree=2 * g.n_edges / g.n,
        avg_path_length=apl,
        avg_clustering=float(local_clustering(g).mean()),
        connected=apl is not None,
    )


@dataclass
class CommunityRatioReport:
    per_community_ratio: dict[int, float]
    mean_ratio: float
    std: float
    undefined: list[int] = field(default_factory=list)


def community_ratio(g: Graph) -> CommunityRatioReport:
    """Inter/intra edge ratio per node of each community, and its mean over communities.

    An edge between two communities counts as inter for both of them.
    Communities without intra edges are listed in ``undefined`` and left out of
    the mean.
    """
    if g.community is None:
        raise ValueError("graph carries no community labels")
    labels = g.community
    size: dict[int, int] = {}
    for c in labels:
        size[c] = size.get(c, 0) + 1
    intra = dict.fromkeys(size, 0)
    inter = dict.fromkeys(size, 0)
    for u, v in g.edges():
        cu, cv = labels[u], labels[v]
        if cu == cv:
            intra[cu] += 1
        else:
            inter[cu] += 1
            inter[cv] += 1
    ratios = {}
    undefined = []
    for c in sorted(size):
        if intra[c] == 0:
            undefined.append(c)
            continue
        ratios[c] = inter[c] / intra[c] / size[c]
    values = list(ratios.values())
    mean = float(np.mean(values)) if values else math.nan
    std = float(np.std(values)) if values else math.nan
    return CommunityRatioReport(ratios, mean, std, undefined)


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))


def format_edge_list(g: Graph) -> str:
    lines = [f"N {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    if g.community is not None:
        lines.extend(f"C {u} {c}" for u, c in enumerate(g.community))
    return "\n".join(lines) + "\n"


def read_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def parse_edge_list(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or rows[0][0] != "N" or len(rows[0]) != 2:
        raise ValueError("edge list must start with 'N <node_count>'")
    n = int(rows[0][1])
    edges = []
    labels: dict[int, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if row[0] == "C" and len(row) == 3:
            labels[int(row[1])] = int(row[2])
        elif len(row) == 2:
            edges.append((int(row[0]), int(row[1])))
        else:
            raise ValueError(f"line {lineno}: cannot parse {' '.join(row)!r}")
    community = None
    if labels:
        if sorted(labels) != list(range(n)):
            raise ValueError("community block must label every node exactly once")
        community = [labels[u] for u in range(n)]
    return Graph.from_edges(n, edges, community)
