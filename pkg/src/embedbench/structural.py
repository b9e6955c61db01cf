"""Ego-network feature signatures (V2), Canberra k-means, and per-cluster
average distance vectors."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddingMatrix
from .graph import Graph

EGO_FEATURE_NAMES = (
    "degree",
    "edges_num",
    "density",
    "twoalter_num",
    "average_alter_alter_num",
    "average_degree",
    "clustering_coefficient",
)


def compute_ego_features(g: Graph) -> np.ndarray:
    """7 ego-network features per focal node; degenerate denominators -> 0."""
    n = g.node_count
    deg = g.degrees.astype(float)
    out = np.zeros((n, 7))
    for u in range(n):
        alters = g.adjacency[u]
        k = len(alters)
        out[u, 0] = k
        if k == 0:
            continue
        alter_set = set(int(a) for a in alters)
        # edges among alters
        links = sum(
            int(np.intersect1d(g.adjacency[int(v)], alters, assume_unique=True).size)
            for v in alters
        ) // 2
        out[u, 1] = links
        if k >= 2:
            out[u, 2] = links / (k * (k - 1) / 2)
            out[u, 6] = 2.0 * links / (k * (k - 1))
        two_step = set()
        for v in alters:
            for w in g.adjacency[int(v)]:
                w = int(w)
                if w != u and w not in alter_set:
                    two_step.add(w)
        out[u, 3] = len(two_step)
        out[u, 4] = float(deg[alters].mean())
        out[u, 5] = (deg[u] + deg[alters].sum()) / (1 + k)
    return out


def canberra(u: np.ndarray, v: np.ndarray) -> float:
    """Sum of |u_i - v_i| / (u_i + v_i) with the 0/0 -> 0 convention."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError("length mismatch")
    denom = u + v
    num = np.abs(u - v)
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = np.where(denom != 0, num / denom, 0.0)
    return float(terms.sum())


def _canberra_matrix(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # (n, k) distance matrix, vectorized over points
    diff = np.abs(x[:, None, :] - centroids[None, :, :])
    denom = x[:, None, :] + centroids[None, :, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = np.where(denom != 0, diff / denom, 0.0)
    return terms.sum(axis=2)


@dataclass(frozen=True)
class EgoClustering:
    k: int
    assignment: np.ndarray
    centroids: np.ndarray
    objective: float
    objective_history: tuple[float, ...]


def kmeans_canberra(features: np.ndarray, k: int, seed: int = 0,
                    max_iter: int = 100) -> EgoClustering:
    """k-means with Canberra assignment, mean centroids, farthest-point init.

    The recorded objective (post-assignment distortion) is kept monotone:
    if a mean update would raise it, iteration stops at the previous state.
    """
    x = np.asarray(features, dtype=float)
    n = len(x)
    if not (1 <= k <= n):
        raise ValueError("need 1 <= k <= node count")
    rng = np.random.default_rng(seed)
    centroids = np.empty((k, x.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = x[first]
    mind = _canberra_matrix(x, centroids[:1]).ravel()
    for j in range(1, k):
        nxt = int(np.argmax(mind))
        centroids[j] = x[nxt]
        mind = np.minimum(mind, _canberra_matrix(x, centroids[j:j + 1]).ravel())

    assignment = None
    history: list[float] = []
    for _ in range(max_iter):
        d = _canberra_matrix(x, centroids)
        new_assign = np.argmin(d, axis=1)  # ties -> lowest cluster index
        obj = float(d[np.arange(n), new_assign].sum())
        if history and obj > history[-1]:
            break  # mean update is not the Canberra minimizer; keep last state
        if assignment is not None and np.array_equal(new_assign, assignment):
            assignment = new_assign
            history.append(obj)
            break
        assignment = new_assign
        history.append(obj)
        new_centroids = centroids.copy()
        for j in range(k):
            members = assignment == j
            if members.any():
                new_centroids[j] = x[members].mean(axis=0)
            else:
                worst = int(np.argmax(d[np.arange(n), assignment]))
                new_centroids[j] = x[worst]
        centroids = new_centroids
    return EgoClustering(k=k, assignment=assignment, centroids=centroids,
                         objective=history[-1], objective_history=tuple(history))


def distance_vector(g: Graph, e: EmbeddingMatrix, focal: int) -> np.ndarray:
    """Sorted Euclidean distances from the focal row to each neighbor row."""
    nbrs = g.adjacency[focal]
    if len(nbrs) == 0:
        return np.zeros(0)
    diff = e.vectors[nbrs] - e.vectors[focal]
    return np.sort(np.sqrt(np.einsum("ij,ij->i", diff, diff)))


def average_distance_vector(vectors: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Ragged mean across member vectors: dimension j averages the vectors
    long enough to have it; returns (means, support counts)."""
    if not vectors:
        raise ValueError("need at least one member")
    max_len = max(len(v) for v in vectors)
    sums = np.zeros(max_len)
    counts = np.zeros(max_len, dtype=np.int64)
    for v in vectors:
        sums[:len(v)] += v
        counts[:len(v)] += 1
    means = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    return means, counts


def structure_summary(g: Graph, embeddings: list[EmbeddingMatrix], k: int,
                      seed: int = 0) -> dict:
    """Full structural pipeline: V2 features -> clusters -> per-cluster
    average distance vectors for every embedding space."""
    feats = compute_ego_features(g)
    clustering = kmeans_canberra(feats, k, seed=seed)
    clusters = []
    for j in range(k):
        members = np.flatnonzero(clustering.assignment == j)
        entry = {
            "id": int(j),
            "members": [int(m) for m in members],
            "centroid": [float(c) for c in clustering.centroids[j]],
            "spaces": {},
        }
        for e in embeddings:
            vecs = [distance_vector(g, e, int(m)) for m in members
                    if len(g.adjacency[int(m)]) > 0]
            if vecs:
                means, counts = average_distance_vector(vecs)
                entry["spaces"][e.model_id] = {
                    "average_distance_vector": [float(v) for v in means],
                    "supports": [int(c) for c in counts],
                }
            else:
                entry["spaces"][e.model_id] = {
                    "average_distance_vector": [], "supports": []}
        clusters.append(entry)
    return {"k": k, "objective": clustering.objective, "clusters": clusters}


def write_structure_json(summary: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
