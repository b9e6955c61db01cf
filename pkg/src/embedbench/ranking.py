"""Neighbor ranking lists in graph and embedding spaces, scored with NDCG."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .embedding import EmbeddingMatrix
from .graph import Graph, shared_neighbors
from .metrics import METRIC_NAMES, MetricsTable, normalize_metrics

DEFAULT_LIST_LENGTH = 50


@dataclass(frozen=True)
class RankingList:
    anchor: int
    space_id: str
    measure: str  # cosine | euclidean | graph
    k: int
    nodes: np.ndarray   # ranked candidate indices
    scores: np.ndarray  # similarity (cosine) or distance (euclidean/graph)

    def score_deltas(self) -> np.ndarray:
        """Adjacent-pair score changes, for the curve-area display."""
        if len(self.scores) < 2:
            return np.zeros(0)
        return np.abs(np.diff(self.scores))


def rank_graph_space(g: Graph, table: MetricsTable, anchor: int, k: int,
                     order_by: str = "adjacency_shared_friends") -> RankingList:
    """Graph-space ranking: the anchor's neighbors by shared-friend count, or
    all nodes by normalized metric distance."""
    n = g.node_count
    if not (0 <= anchor < n):
        raise ValueError(f"invalid anchor {anchor}")
    if order_by == "adjacency_shared_friends":
        cands = np.array([int(v) for v in g.adjacency[anchor]], dtype=np.int64)
        shared = np.array([shared_neighbors(g, anchor, int(v)) for v in cands], dtype=float)
        deg = g.degrees[cands]
        order = np.lexsort((cands, -deg, -shared))
        return RankingList(anchor, "graph", "graph", k,
                           cands[order][:k], shared[order][:k])
    if order_by.startswith("metric_distance:"):
        metric = order_by.split(":", 1)[1]
        if metric not in METRIC_NAMES:
            raise ValueError(f"unknown metric {metric!r}")
        norm = normalize_metrics(table)
        col = norm[:, METRIC_NAMES.index(metric)]
        cands = np.array([v for v in range(n) if v != anchor], dtype=np.int64)
        dist = np.abs(col[cands] - col[anchor])
        order = np.lexsort((cands, dist))
        return RankingList(anchor, "graph", "graph", k,
                           cands[order][:k], dist[order][:k])
    raise ValueError(f"unknown order_by {order_by!r}")


def rank_embedding_space(e: EmbeddingMatrix, anchor: int, measure: str,
                         k: int = DEFAULT_LIST_LENGTH) -> RankingList:
    n = len(e.labels)
    if not (0 <= anchor < n):
        raise ValueError(f"invalid anchor {anchor}")
    cands = np.array([v for v in range(n) if v != anchor], dtype=np.int64)
    a = e.vectors[anchor]
    if measure == "euclidean":
        diff = e.vectors[cands] - a
        scores = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        order = np.lexsort((cands, scores))  # ascending distance
    elif measure == "cosine":
        na = np.linalg.norm(a)
        if na == 0:
            raise ValueError("cosine similarity undefined for zero anchor vector")
        norms = np.linalg.norm(e.vectors[cands], axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            scores = np.where(norms > 0, e.vectors[cands] @ a / (norms * na), 0.0)
        order = np.lexsort((cands, -scores))  # descending similarity
    else:
        raise ValueError(f"unknown measure {measure!r}")
    return RankingList(anchor, e.model_id, measure, k,
                       cands[order][:k], scores[order][:k])


def relevance_grades(ideal: RankingList) -> dict[int, int]:
    """Position-based grades from the ideal list: top gets |REL|, next
    |REL|-1, ...; absent candidates grade 0."""
    rel_size = min(ideal.k, len(ideal.nodes))
    return {int(node): rel_size - pos for pos, node in enumerate(ideal.nodes[:rel_size])}


def _dcg(grades: list[int]) -> float:
    return sum((2.0 ** rel - 1.0) / math.log2(i + 2) for i, rel in enumerate(grades))


def ndcg(presented: RankingList, ideal: RankingList, k: int | None = None) -> float:
    """Graded NDCG of a presented list against the graph-space ideal."""
    if k is None:
        k = presented.k
    if k <= 0:
        raise ValueError("k must be positive")
    grades = relevance_grades(ideal)
    got = [grades.get(int(v), 0) for v in presented.nodes[:k]]
    best = sorted(grades.values(), reverse=True)[:k]
    idcg = _dcg(best)
    if idcg == 0.0:
        return 0.0
    return _dcg(got) / idcg


def cross_space_presence(lists: list[RankingList], node: int) -> int:
    """In how many of the given embedding-space lists the node appears."""
    return sum(1 for lst in lists if node in set(int(v) for v in lst.nodes))


def ranking_payload(g: Graph, table: MetricsTable, anchor: int,
                    space: RankingList, ideal: RankingList,
                    other_lists: list[RankingList]) -> dict:
    """Service/CLI JSON for one ranking list (Fig.-5-style rows)."""
    norm = normalize_metrics(table)
    entries = []
    for node, score in zip(space.nodes, space.scores):
        node = int(node)
        entries.append({
            "node": node,
            "label": g.node_labels[node],
            "score": float(score),
            "shared_friends": shared_neighbors(g, anchor, node),
            "presence": cross_space_presence(other_lists, node),
            "metric_bars": dict(zip(METRIC_NAMES, map(float, norm[node]))),
        })
    return {
        "anchor": anchor,
        "space": space.space_id,
        "measure": space.measure,
        "k": space.k,
        "ndcg": ndcg(space, ideal),
        "score_deltas": [float(d) for d in space.score_deltas()],
        "entries": entries,
    }
