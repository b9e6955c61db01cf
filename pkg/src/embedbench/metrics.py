"""Per-node metric signatures (the 11-column V1 table) and communities.

Betweenness is the exact dependency-accumulation algorithm over all
single-source shortest-path trees, reported as the unnormalized unordered
pair count. Eigenvector/PageRank run power iteration to 1e-10.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, is_connected, to_networkx

METRIC_NAMES = (
    "degree",
    "eccentricity",
    "closeness",
    "betweenness",
    "eigenvector",
    "pagerank",
    "clustering",
    "knn",
    "wmd",
    "participation",
    "leverage",
)

PAGERANK_DAMPING = 0.85
_POWER_TOL = 1e-10
_MAX_ITER = 100000


@dataclass(frozen=True)
class CommunityAssignment:
    community_of: np.ndarray
    community_count: int


@dataclass(frozen=True)
class MetricsTable:
    """All 11 metrics per node, aligned to graph node indices."""

    labels: list[str]
    degree: np.ndarray
    eccentricity: np.ndarray
    closeness: np.ndarray
    betweenness: np.ndarray
    eigenvector: np.ndarray
    pagerank: np.ndarray
    clustering: np.ndarray
    knn: np.ndarray
    wmd: np.ndarray
    participation: np.ndarray
    leverage: np.ndarray

    def as_matrix(self) -> np.ndarray:
        return np.column_stack([np.asarray(getattr(self, m), dtype=float) for m in METRIC_NAMES])

    def column(self, name: str) -> np.ndarray:
        if name not in METRIC_NAMES:
            raise KeyError(f"unknown metric {name!r}")
        return np.asarray(getattr(self, name), dtype=float)


def detect_communities(g: Graph, seed: int = 0) -> CommunityAssignment:
    """Seeded greedy modularity (Louvain) partition.

    Communities are relabeled densely, ordered by smallest member index.
    """
    import networkx as nx

    if not is_connected(g):
        raise GraphError("community detection requires a connected graph")
    if g.edge_count == 0:
        return CommunityAssignment(np.zeros(g.node_count, dtype=np.int64), 1)
    parts = nx.community.louvain_communities(to_networkx(g), seed=seed)
    parts = sorted(parts, key=min)
    community_of = np.empty(g.node_count, dtype=np.int64)
    for k, members in enumerate(parts):
        for v in members:
            community_of[v] = k
    return CommunityAssignment(community_of, len(parts))


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    dist = np.full(g.node_count, -1, dtype=np.int64)
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u]
        for v in g.adjacency[u]:
            v = int(v)
            if dist[v] < 0:
                dist[v] = du + 1
                q.append(v)
    return dist


def betweenness_exact(g: Graph) -> np.ndarray:
    """Unnormalized betweenness (sum of pair dependencies over unordered pairs)."""
    n = g.node_count
    bc = np.zeros(n)
    for s in range(n):
        stack: list[int] = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            stack.append(u)
            for v in g.adjacency[u]:
                v = int(v)
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    q.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            for u in preds[w]:
                delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return bc / 2.0


def _eigenvector_centrality(g: Graph) -> np.ndarray:
    # power iteration on A + I: shift guarantees convergence on bipartite graphs
    n = g.node_count
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(_MAX_ITER):
        y = np.array([x[g.adjacency[i]].sum() for i in range(n)]) + x
        y /= np.linalg.norm(y)
        if np.abs(y - x).max() < _POWER_TOL * np.abs(y).max():
            x = y
            break
        x = y
    x = np.abs(x)
    return x / np.linalg.norm(x)


def _pagerank(g: Graph, damping: float = PAGERANK_DAMPING) -> np.ndarray:
    n = g.node_count
    deg = g.degrees.astype(float)
    x = np.full(n, 1.0 / n)
    for _ in range(_MAX_ITER):
        share = x / deg
        y = np.array([share[g.adjacency[i]].sum() for i in range(n)])
        y = damping * y + (1.0 - damping) / n
        if np.abs(y - x).sum() < _POWER_TOL:
            x = y
            break
        x = y
    return x / x.sum()


def compute_metrics(g: Graph, communities: CommunityAssignment) -> MetricsTable:
    """Compute all 11 metrics on a connected graph."""
    n = g.node_count
    if not is_connected(g):
        raise GraphError("metrics require a connected graph; take the largest component")
    deg = g.degrees.astype(float)

    ecc = np.zeros(n, dtype=np.int64)
    clo = np.zeros(n)
    for s in range(n):
        dist = bfs_distances(g, s)
        ecc[s] = dist.max()
        total = dist.sum()
        clo[s] = (n - 1) / total if total > 0 else 0.0

    btw = betweenness_exact(g)
    eig = _eigenvector_centrality(g)
    pr = _pagerank(g)

    clus = np.zeros(n)
    for i in range(n):
        k = len(g.adjacency[i])
        if k < 2:
            continue
        nbrs = g.adjacency[i]
        links = sum(
            int(np.intersect1d(g.adjacency[int(v)], nbrs, assume_unique=True).size)
            for v in nbrs
        ) // 2
        clus[i] = 2.0 * links / (k * (k - 1))

    knn = np.array([deg[g.adjacency[i]].mean() if len(g.adjacency[i]) else 0.0 for i in range(n)])

    com = communities.community_of
    M = communities.community_count
    # within-module degree: z-score of the intra-community link count
    intra = np.array(
        [int(np.sum(com[g.adjacency[i]] == com[i])) for i in range(n)], dtype=float
    )
    wmd = np.zeros(n)
    for k in range(M):
        members = np.flatnonzero(com == k)
        mu = intra[members].mean()
        sigma = intra[members].std()
        if sigma > 0:
            wmd[members] = (intra[members] - mu) / sigma

    part = np.zeros(n)
    for i in range(n):
        if deg[i] == 0:
            continue
        counts = np.bincount(com[g.adjacency[i]], minlength=M).astype(float)
        part[i] = 1.0 - np.sum((counts / deg[i]) ** 2)

    lev = np.zeros(n)
    for i in range(n):
        if deg[i] == 0:
            continue
        kj = deg[g.adjacency[i]]
        lev[i] = np.mean((deg[i] - kj) / (deg[i] + kj))

    return MetricsTable(
        labels=list(g.node_labels),
        degree=deg.astype(np.int64),
        eccentricity=ecc,
        closeness=clo,
        betweenness=btw,
        eigenvector=eig,
        pagerank=pr,
        clustering=clus,
        knn=knn,
        wmd=wmd,
        participation=part,
        leverage=lev,
    )


def normalize_metrics(table: MetricsTable) -> np.ndarray:
    """Min-max scale every metric column to [0, 1]; constant columns map to 0."""
    m = table.as_matrix()
    lo = m.min(axis=0)
    hi = m.max(axis=0)
    span = hi - lo
    out = np.zeros_like(m)
    nz = span > 0
    out[:, nz] = (m[:, nz] - lo[nz]) / span[nz]
    return out


def write_metrics_csv(table: MetricsTable, path) -> None:
    header = "label,degree,eccentricity,closeness,betweenness,eigenvector,pagerank,clustering,knn,wmd,participation,leverage"
    m = table.as_matrix()
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(header + "\n")
        for i, lab in enumerate(table.labels):
            vals = ",".join(f"{v:.10g}" for v in m[i])
            f.write(f"{lab},{vals}\n")


def read_metrics_csv(path) -> MetricsTable:
    with open(path, encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        if header[1:] != list(METRIC_NAMES):
            raise GraphError(f"unexpected metrics CSV header in {path}")
        labels = []
        rows = []
        for line in f:
            if not line.strip():
                continue
            parts = line.strip().split(",")
            labels.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    m = np.array(rows)
    cols = {name: m[:, j] for j, name in enumerate(METRIC_NAMES)}
    cols["degree"] = cols["degree"].astype(np.int64)
    cols["eccentricity"] = cols["eccentricity"].astype(np.int64)
    return MetricsTable(labels=labels, **cols)
