"""Structural-similarity walk machinery: degree rings, DTW distances,
multilayer context graph, and the weighted cross-layer walk.

Pairwise comparisons are restricted to each node's nearest neighbors in
sorted degree order (O(log n) candidates per node), which keeps the layer
build quadratic-free without changing the method's character.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, is_connected
from .walks import WalkConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Struc2vecConfig:
    layers: int = 3
    stay_probability: float = 0.7  # probability of an intra-layer step
    # how many degree-order neighbors each node is compared against;
    # None = 2 * ceil(log2 n), values >= n-1 give the complete pair set
    candidate_window: int | None = None

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if not (0.0 < self.stay_probability < 1.0):
            raise ValueError("stay_probability must be in (0, 1)")
        if self.candidate_window is not None and self.candidate_window < 1:
            raise ValueError("candidate_window must be >= 1")


def degree_rings(g: Graph, max_depth: int) -> list[list[np.ndarray]]:
    """Per node: sorted degree sequence of each BFS ring up to max_depth.

    Ring 0 is the node's own degree.
    """
    n = g.node_count
    deg = g.degrees
    rings: list[list[np.ndarray]] = []
    for s in range(n):
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        q = deque([s])
        levels: list[list[int]] = [[s]]
        while q:
            u = q.popleft()
            if dist[u] >= max_depth:
                continue
            for v in g.adjacency[u]:
                v = int(v)
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    if dist[v] >= len(levels):
                        levels.append([])
                    levels[dist[v]].append(v)
                    q.append(v)
        rings.append([np.sort(deg[lv]).astype(np.float64) for lv in levels])
    return rings


def dtw_cost(a: np.ndarray, b: np.ndarray) -> float:
    """Dynamic time warping with elementwise cost max(x,y)/min(x,y) - 1."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0.0 if la == lb else math.inf
    cost = np.maximum.outer(a, b) / np.minimum.outer(a, b) - 1.0
    acc = np.full((la + 1, lb + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, la + 1):
        for j in range(1, lb + 1):
            acc[i, j] = cost[i - 1, j - 1] + min(acc[i - 1, j], acc[i, j - 1],
                                                 acc[i - 1, j - 1])
    return float(acc[la, lb])


def degree_order_candidates(g: Graph, per_node: int | None = None) -> list[tuple[int, int]]:
    """Pairs (u, v), u < v, with v among u's nearest nodes in degree order.

    Ties in degree are broken by a seeded shuffle rather than node index:
    with index order, a large block of equal-degree nodes degenerates into a
    sliding-window path whose arbitrary 1-D geometry leaks into the walk
    contexts; a shuffled block mixes instead.
    """
    n = g.node_count
    if per_node is None:
        per_node = max(2, 2 * int(math.ceil(math.log2(max(n, 2)))))
    tiebreak = np.random.default_rng(0x5EC2).permutation(n)
    order = np.lexsort((tiebreak, g.degrees))
    pairs = set()
    half = max(1, per_node // 2)
    for pos, u in enumerate(order):
        lo = max(0, pos - half)
        hi = min(n, pos + half + 1)
        for v in order[lo:hi]:
            if u != v:
                pairs.add((min(int(u), int(v)), max(int(u), int(v))))
    return sorted(pairs)


@dataclass(frozen=True)
class LayerGraph:
    """Multilayer context graph over structural-distance candidate pairs."""

    layer_count: int
    # per layer, per node: neighbor index array and cumulative weight array
    neighbors: list[list[np.ndarray]]
    cum_weights: list[list[np.ndarray]]
    up_weight: list[np.ndarray]    # per layer k (< top): w(u_k -> u_{k+1})
    down_weight: list[np.ndarray]  # per layer k (> 0): w(u_k -> u_{k-1}) == 1


def build_layers(g: Graph, cfg: Struc2vecConfig,
                 candidates: list[tuple[int, int]] | None = None) -> LayerGraph:
    """Build the weighted multilayer graph (intra weight e^-f_k)."""
    n = g.node_count
    max_depth = cfg.layers - 1
    rings = degree_rings(g, max_depth)
    diameter_bound = max(len(r) for r in rings)
    layer_count = cfg.layers
    if layer_count > diameter_bound:
        log.warning("layers=%d truncated to %d (graph depth limit)",
                    layer_count, diameter_bound)
        layer_count = diameter_bound
    if candidates is None:
        candidates = degree_order_candidates(g, per_node=cfg.candidate_window)

    # cumulative structural distance per pair, per layer while both rings exist
    deg = g.degrees.astype(np.float64)
    us = np.array([u for u, _ in candidates], dtype=np.int64)
    vs = np.array([v for _, v in candidates], dtype=np.int64)
    # ring 0 is a single degree, so its warping cost is just the degree ratio
    cost0 = (np.maximum(deg[us], deg[vs]) / np.minimum(deg[us], deg[vs]) - 1.0
             if len(candidates) else np.zeros(0))
    pair_f: list[np.ndarray] = []
    for idx, (u, v) in enumerate(candidates):
        depth = min(len(rings[u]), len(rings[v]), layer_count)
        f = np.empty(depth)
        acc = 0.0
        for k in range(depth):
            acc += cost0[idx] if k == 0 else dtw_cost(rings[u][k], rings[v][k])
            f[k] = acc
        pair_f.append(f)

    neighbors: list[list[np.ndarray]] = []
    cum_weights: list[list[np.ndarray]] = []
    up_weight: list[np.ndarray] = []
    down_weight: list[np.ndarray] = []
    for k in range(layer_count):
        adj: list[list[int]] = [[] for _ in range(n)]
        wts: list[list[float]] = [[] for _ in range(n)]
        all_w = []
        for (u, v), f in zip(candidates, pair_f):
            if k < len(f):
                w = math.exp(-f[k])
                adj[u].append(v)
                wts[u].append(w)
                adj[v].append(u)
                wts[v].append(w)
                all_w.append(w)
        avg_w = float(np.mean(all_w)) if all_w else 0.0
        nb = [np.array(a, dtype=np.int64) for a in adj]
        cw = [np.cumsum(w) if w else np.zeros(0) for w in wts]
        neighbors.append(nb)
        cum_weights.append(cw)
        # up weight log(Gamma + e): Gamma = incident edges above the layer mean
        gamma = np.array(
            [np.sum(np.array(wts[u]) > avg_w) if wts[u] else 0 for u in range(n)],
            dtype=np.float64,
        )
        up_weight.append(np.log(gamma + math.e))
        down_weight.append(np.ones(n))
    return LayerGraph(layer_count=layer_count, neighbors=neighbors,
                      cum_weights=cum_weights, up_weight=up_weight,
                      down_weight=down_weight)


def walks_struc2vec(g: Graph, cfg: WalkConfig, s2v: Struc2vecConfig,
                    layers: LayerGraph | None = None) -> np.ndarray:
    """Weighted walk over the multilayer graph; records node ids only."""
    if not is_connected(g):
        raise GraphError("walks require a connected graph")
    if layers is None:
        layers = build_layers(g, s2v)
    n = g.node_count
    top = layers.layer_count - 1
    out = np.empty((n * cfg.walks_per_node, cfg.walk_length), dtype=np.int32)
    for w in range(cfg.walks_per_node):
        for v0 in range(n):
            wid = w * n + v0
            rng = np.random.default_rng((cfg.seed, 0x5EC2, wid))
            cur = v0
            layer = 0
            out[wid, 0] = cur
            filled = 1
            while filled < cfg.walk_length:
                nb = layers.neighbors[layer][cur]
                if len(nb) == 0:
                    layer -= 1  # layer 0 always has candidates for n >= 2
                    continue
                if rng.random() < s2v.stay_probability:
                    cw = layers.cum_weights[layer][cur]
                    j = int(np.searchsorted(cw, rng.random() * cw[-1], side="right"))
                    if j >= len(nb):
                        j = len(nb) - 1
                    cur = int(nb[j])
                    out[wid, filled] = cur
                    filled += 1
                else:
                    up = layers.up_weight[layer][cur] if layer < top else 0.0
                    down = layers.down_weight[layer][cur] if layer > 0 else 0.0
                    if up + down <= 0:
                        continue
                    if rng.random() * (up + down) < up:
                        layer += 1
                    else:
                        layer -= 1
    return out
