"""Brute-force oracle checks for the 11 node metrics on small graphs."""
import itertools

import networkx as nx
import numpy as np
import pytest

from tests.conftest import from_edge_pairs
from embedbench.metrics import (METRIC_NAMES, CommunityAssignment,
                                MetricsTable, bfs_distances, compute_metrics,
                                detect_communities, normalize_metrics,
                                read_metrics_csv, write_metrics_csv)

EXACT = 1e-8
ITERATIVE = 1e-6


def col(table: MetricsTable, name: str) -> np.ndarray:
    return table.as_matrix()[:, METRIC_NAMES.index(name)]


def brute_betweenness(g) -> np.ndarray:
    """Enumerate all shortest paths per unordered pair and count pass-throughs."""
    n = g.node_count
    out = np.zeros(n)
    for s in range(n):
        for t in range(s + 1, n):
            paths = shortest_paths(g, s, t)
            if not paths:
                continue
            for v in range(n):
                if v in (s, t):
                    continue
                through = sum(1 for p in paths if v in p)
                out[v] += through / len(paths)
    return out


def shortest_paths(g, s, t):
    dist = bfs_distances(g, s)
    if not np.isfinite(dist[t]):
        return []
    target = dist[t]
    paths = []

    def walk(v, acc):
        if v == t:
            paths.append(acc)
            return
        for w in g.adjacency[v]:
            w = int(w)
            if dist[w] == dist[v] + 1 and dist[w] <= target:
                walk(w, acc + [w])

    walk(s, [s])
    return paths


def brute_eigenvector(g) -> np.ndarray:
    n = g.node_count
    a = np.zeros((n, n))
    for u, v in g.edges():
        a[u, v] = a[v, u] = 1.0
    vals, vecs = np.linalg.eigh(a)
    v = np.abs(vecs[:, np.argmax(vals)])
    return v / np.linalg.norm(v)


def brute_pagerank(g, d=0.85) -> np.ndarray:
    n = g.node_count
    m = np.zeros((n, n))
    for u in range(n):
        for v in g.adjacency[u]:
            m[int(v), u] = 1.0 / len(g.adjacency[u])
    # solve (I - d M) x = (1-d)/n * 1
    x = np.linalg.solve(np.eye(n) - d * m, np.full(n, (1 - d) / n))
    return x


def brute_clustering(g) -> np.ndarray:
    n = g.node_count
    out = np.zeros(n)
    for u in range(n):
        nbrs = [int(v) for v in g.adjacency[u]]
        k = len(nbrs)
        if k < 2:
            continue
        links = sum(1 for a, b in itertools.combinations(nbrs, 2)
                    if g.has_edge(a, b))
        out[u] = 2.0 * links / (k * (k - 1))
    return out


@pytest.fixture(scope="module")
def tables(small_graphs):
    out = []
    for g in small_graphs:
        comm = detect_communities(g, seed=0)
        out.append((g, comm, compute_metrics(g, comm)))
    return out


def test_degree_eccentricity_closeness_oracle(tables):
    for g, _, table in tables:
        n = g.node_count
        dists = np.array([bfs_distances(g, s) for s in range(n)])
        assert np.allclose(col(table, "degree"), g.degrees, atol=EXACT)
        assert np.allclose(col(table, "eccentricity"), dists.max(axis=1), atol=EXACT)
        assert np.allclose(col(table, "closeness"),
                           (n - 1) / dists.sum(axis=1), atol=EXACT)


def test_betweenness_oracle(tables):
    for g, _, table in tables:
        assert np.allclose(col(table, "betweenness"), brute_betweenness(g),
                           atol=EXACT)


def test_eigenvector_oracle(tables):
    for g, _, table in tables:
        assert np.allclose(col(table, "eigenvector"), brute_eigenvector(g),
                           atol=ITERATIVE)


def test_pagerank_oracle(tables):
    for g, _, table in tables:
        assert np.allclose(col(table, "pagerank"), brute_pagerank(g),
                           atol=ITERATIVE)


def test_clustering_knn_leverage_participation_wmd_oracle(tables):
    for g, comm, table in tables:
        n = g.node_count
        deg = g.degrees.astype(float)
        assert np.allclose(col(table, "clustering"), brute_clustering(g), atol=EXACT)
        knn = np.array([deg[g.adjacency[u]].mean() if deg[u] else 0.0
                        for u in range(n)])
        assert np.allclose(col(table, "knn"), knn, atol=EXACT)
        lev = np.array([
            np.mean([(deg[u] - deg[int(v)]) / (deg[u] + deg[int(v)])
                     for v in g.adjacency[u]]) if deg[u] else 0.0
            for u in range(n)])
        assert np.allclose(col(table, "leverage"), lev, atol=EXACT)
        # participation over the detected communities
        part = np.zeros(n)
        for u in range(n):
            if deg[u] == 0:
                continue
            per = {}
            for v in g.adjacency[u]:
                c = comm.community_of[int(v)]
                per[c] = per.get(c, 0) + 1
            part[u] = 1.0 - sum((k / deg[u]) ** 2 for k in per.values())
        assert np.allclose(col(table, "participation"), part, atol=EXACT)
        # within-module degree z-score
        wmd = np.zeros(n)
        intra = np.array([sum(1 for v in g.adjacency[u]
                              if comm.community_of[int(v)] == comm.community_of[u])
                          for u in range(n)], dtype=float)
        for c in set(comm.community_of):
            members = [u for u in range(n) if comm.community_of[u] == c]
            mu, sigma = intra[members].mean(), intra[members].std()
            for u in members:
                wmd[u] = (intra[u] - mu) / sigma if sigma > 0 else 0.0
        assert np.allclose(col(table, "wmd"), wmd, atol=EXACT)


def test_named_fixture_values(named_fixtures):
    star = named_fixtures["star"]
    table = compute_metrics(star, detect_communities(star, seed=0))
    # hub of a 6-leaf star: betweenness C(6,2)=15, clustering 0, closeness 1
    assert col(table, "betweenness")[0] == pytest.approx(15.0, abs=EXACT)
    assert col(table, "closeness")[0] == pytest.approx(1.0, abs=EXACT)
    assert np.all(col(table, "clustering") == 0)

    comp = named_fixtures["complete"]
    tc = compute_metrics(comp, detect_communities(comp, seed=0))
    assert np.allclose(col(tc, "clustering"), 1.0, atol=EXACT)
    assert np.allclose(col(tc, "betweenness"), 0.0, atol=EXACT)
    assert np.allclose(col(tc, "eigenvector"), 1 / np.sqrt(5), atol=ITERATIVE)

    cyc = named_fixtures["cycle"]
    tcy = compute_metrics(cyc, detect_communities(cyc, seed=0))
    assert np.allclose(col(tcy, "eccentricity"), 4.0, atol=EXACT)
    assert np.allclose(col(tcy, "pagerank"), 1 / 8, atol=ITERATIVE)


def test_networkx_cross_check(ba_graph):
    """Independent library oracle on a mid-size graph."""
    g = ba_graph
    nxg = nx.Graph(g.edges())
    nxg.add_nodes_from(range(g.node_count))
    table = compute_metrics(g, detect_communities(g, seed=0))
    bc = nx.betweenness_centrality(nxg, normalized=False)
    assert np.allclose(col(table, "betweenness"),
                       [bc[u] for u in range(g.node_count)], atol=1e-6)
    cl = nx.closeness_centrality(nxg)
    assert np.allclose(col(table, "closeness"),
                       [cl[u] for u in range(g.node_count)], atol=1e-8)
    pr = nx.pagerank(nxg, alpha=0.85, tol=1e-12)
    assert np.allclose(col(table, "pagerank"),
                       [pr[u] for u in range(g.node_count)], atol=1e-6)
    knn = nx.average_neighbor_degree(nxg)
    assert np.allclose(col(table, "knn"),
                       [knn[u] for u in range(g.node_count)], atol=1e-8)


def test_communities_deterministic_and_sorted(ba_graph):
    a = detect_communities(ba_graph, seed=3)
    b = detect_communities(ba_graph, seed=3)
    assert list(a.community_of) == list(b.community_of)
    # community ids ordered by smallest member index
    first_seen = {}
    for u, c in enumerate(a.community_of):
        first_seen.setdefault(c, u)
    ids = sorted(first_seen, key=first_seen.get)
    assert ids == sorted(ids)


def test_normalize_metrics_range(tables):
    for _, _, table in tables:
        norm = normalize_metrics(table)
        assert norm.min() >= 0.0 and norm.max() <= 1.0 + 1e-12
        for j in range(norm.shape[1]):
            colv = table.as_matrix()[:, j]
            if np.ptp(colv) == 0:
                assert np.all(norm[:, j] == 0)


def test_csv_round_trip(tmp_path, ba_graph):
    table = compute_metrics(ba_graph, detect_communities(ba_graph, seed=0))
    path = tmp_path / "m.csv"
    write_metrics_csv(table, path)
    header = path.read_text().splitlines()[0]
    assert header == ("label,degree,eccentricity,closeness,betweenness,"
                      "eigenvector,pagerank,clustering,knn,wmd,"
                      "participation,leverage")
    back = read_metrics_csv(path)
    assert back.labels == table.labels
    assert np.allclose(back.as_matrix(), table.as_matrix(), rtol=1e-9)


def test_disconnected_graph_rejected():
    g = from_edge_pairs(list("abcd"), [(0, 1), (2, 3)])
    with pytest.raises(Exception):
        compute_metrics(g, CommunityAssignment(community_of=np.zeros(4, dtype=np.int64), community_count=1))
