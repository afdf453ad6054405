import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mlwng.graph import (
    Graph,
    community_ratio,
    complete_graph,
    compute_stats,
    format_edge_list,
    is_connected,
    local_clustering,
    parse_edge_list,
)


@st.composite
def random_graphs(draw, min_n=2, max_n=30):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return Graph.from_edges(n, chosen)


def floyd_warshall(g):
    n = g.n
    d = [[0 if i == j else math.inf for j in range(n)] for i in range(n)]
    for u, v in g.edges():
        d[u][v] = d[v][u] = 1
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def brute_clustering(g):
    out = []
    for u in range(g.n):
        nb = sorted(g.adj[u])
        if len(nb) < 2:
            out.append(0.0)
            continue
        pairs = list(itertools.combinations(nb, 2))
        out.append(sum(g.has_edge(a, b) for a, b in pairs) / len(pairs))
    return out


def test_add_edge_basic():
    g = Graph(3)
    assert g.add_edge(0, 1)
    assert g.n_edges == 1 and g.edge_set() == {(0, 1)}


def test_add_edge_rejects_self_loop():
    g = Graph(3)
    assert not g.add_edge(0, 0)
    assert g.n_edges == 0 and g.edge_set() == set()


def test_add_edge_rejects_duplicate():
    g = Graph(3)
    assert g.add_edge(0, 1)
    assert not g.add_edge(1, 0)
    assert g.n_edges == 1


def test_add_edge_out_of_range():
    with pytest.raises(IndexError):
        Graph(3).add_edge(0, 3)


@given(random_graphs(), st.data())
def test_add_then_remove_restores_edges(g, data):
    before = g.edge_set()
    u = data.draw(st.integers(0, g.n - 1))
    v = data.draw(st.integers(0, g.n - 1).filter(lambda x: x != u))
    if g.add_edge(u, v):
        g.remove_edge(u, v)
    assert g.edge_set() == before


def test_connectivity_examples(path3, two_disjoint_edges):
    assert is_connected(path3)
    assert not is_connected(two_disjoint_edges)
    assert is_connected(complete_graph(5))


def test_stats_k4(k4):
    st_ = compute_stats(k4)
    assert st_.avg_degree == 3
    assert st_.avg_path_length == 1
    assert st_.avg_clustering == 1
    assert st_.connected


def test_stats_path3(path3):
    # pairs (0,1)=1, (1,2)=1, (0,2)=2
    st_ = compute_stats(path3)
    assert st_.avg_degree == pytest.approx(4 / 3)
    assert st_.avg_path_length == pytest.approx(4 / 3)
    assert st_.avg_clustering == 0


def test_stats_disconnected_flags_path_length(two_disjoint_edges):
    st_ = compute_stats(two_disjoint_edges)
    assert st_.avg_path_length is None and not st_.connected


@pytest.mark.parametrize("n", range(3, 21))
def test_complete_graph_stats(n):
    st_ = compute_stats(complete_graph(n))
    assert st_.avg_degree == n - 1
    assert st_.avg_path_length == pytest.approx(1)
    assert st_.avg_clustering == pytest.approx(1)


@given(random_graphs())
def test_path_length_matches_floyd_warshall(g):
    d = floyd_warshall(g)
    pairs = [d[i][j] for i in range(g.n) for j in range(i + 1, g.n)]
    apl = compute_stats(g).avg_path_length
    if any(math.isinf(x) for x in pairs):
        assert apl is None
    else:
        assert apl == pytest.approx(sum(pairs) / len(pairs))


@given(random_graphs())
def test_clustering_matches_triple_enumeration(g):
    assert local_clustering(g) == pytest.approx(brute_clustering(g))


def clique_with_tail(size, external):
    """``size``-clique labelled 0 plus one outside node (label 1) joined by ``external`` edges."""
    g = Graph(size + 1, [0] * size + [1])
    for u, v in itertools.combinations(range(size), 2):
        g.add_edge(u, v)
    for u in range(external):
        g.add_edge(u, size)
    return g


def test_ratio_worked_example_four_nodes():
    report = community_ratio(clique_with_tail(4, 1))
    assert report.per_community_ratio[0] == (1 / 6) / 4
    assert round(report.per_community_ratio[0], 4) == 0.0417
    # the single outside node has no intra edges
    assert report.undefined == [1]


def test_ratio_six_node_clique():
    g = clique_with_tail(6, 1)
    labels = g.community
    intra = sum(1 for u, v in g.edges() if labels[u] == labels[v] == 0)
    inter = sum(1 for u, v in g.edges() if labels[u] != labels[v])
    assert (intra, inter) == (15, 1)
    assert community_ratio(g).per_community_ratio[0] == pytest.approx(1 / 15 / 6)


def test_ratio_single_community_is_zero():
    g = complete_graph(5)
    g.community = [0] * 5
    report = community_ratio(g)
    assert report.mean_ratio == 0 and report.per_community_ratio == {0: 0.0}


def test_inter_edge_counts_for_both_communities():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)],
                         [0, 0, 0, 1, 1, 1])
    report = community_ratio(g)
    assert report.per_community_ratio == {0: pytest.approx(1 / 3 / 3), 1: pytest.approx(1 / 3 / 3)}


@given(st.integers(2, 4), st.integers(3, 6), st.data())
def test_ratio_invariant_under_relabelling(n_comm, size, data):
    n = n_comm * size
    labels = [u // size for u in range(n)]
    pairs = list(itertools.combinations(range(n), 2))
    intra_pairs = [p for p in pairs if labels[p[0]] == labels[p[1]]]
    edges = set(data.draw(st.lists(st.sampled_from(pairs), unique=True)))
    # guarantee every community has an intra edge
    edges |= {next(p for p in intra_pairs if labels[p[0]] == c) for c in range(n_comm)}
    g = Graph.from_edges(n, sorted(edges), labels)
    base = community_ratio(g)

    node_perm = data.draw(st.permutations(range(n)))
    label_perm = data.draw(st.permutations(range(n_comm)))
    new_labels = [0] * n
    for u in range(n):
        new_labels[node_perm[u]] = label_perm[labels[u]]
    h = Graph.from_edges(n, [(node_perm[u], node_perm[v]) for u, v in edges], new_labels)
    other = community_ratio(h)
    assert other.mean_ratio == pytest.approx(base.mean_ratio)
    for c, r in base.per_community_ratio.items():
        assert other.per_community_ratio[label_perm[c]] == pytest.approx(r)


def test_edge_list_round_trip():
    g = Graph.from_edges(4, [(2, 3), (0, 1), (1, 2)], [0, 0, 1, 1])
    text = format_edge_list(g)
    assert text == "N 4\n0 1\n1 2\n2 3\nC 0 0\nC 1 0\nC 2 1\nC 3 1\n"
    h = parse_edge_list(text)
    assert h.edge_set() == g.edge_set() and h.community == g.community


def test_edge_list_rejects_partial_labels():
    with pytest.raises(ValueError):
        parse_edge_list("N 3\n0 1\n1 2\nC 0 0\n")


def test_edge_list_rejects_missing_header():
    with pytest.raises(ValueError):
        parse_edge_list("0 1\n")


def test_csr_sorted_neighbours():
    g = Graph.from_edges(4, [(0, 3), (0, 1), (2, 0)])
    indptr, indices = g.csr()
    assert indptr.tolist() == [0, 3, 4, 5, 6]
    assert indices.tolist() == [1, 2, 3, 0, 0, 0]
    assert np.all(g.degrees() == [3, 1, 1, 1])
