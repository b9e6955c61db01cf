"""Random-walk corpus generation: uniform (first-order) and biased
second-order walks with per-directed-edge alias tables.

Each walk draws from its own seeded RNG stream keyed by (seed, walk id), so
corpora are byte-identical across runs and independent of scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import Graph, GraphError, is_connected


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 80
    window: int = 10
    dimension: int = 128
    epochs: int = 5
    negatives_per_positive: int = 5
    initial_learning_rate: float = 0.025
    seed: int = 0

    def __post_init__(self):
        for name in ("walks_per_node", "walk_length", "window", "dimension",
                     "epochs", "negatives_per_positive"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.initial_learning_rate <= 0:
            raise ValueError("initial_learning_rate must be positive")


@dataclass(frozen=True)
class Node2vecParams:
    p: float
    q: float

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")


_U64 = np.uint64


@njit(cache=True, inline="always")
def _mix64(z):
    # splitmix64 finalizer
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


@njit(cache=True, inline="always")
def _stream_seed(seed, stream):
    s = _mix64(_U64(seed) + _U64(0x9E3779B97F4A7C15) * (_U64(stream) + _U64(1)))
    if s == _U64(0):
        s = _U64(0x9E3779B97F4A7C15)
    return s


@njit(cache=True, inline="always")
def _next_u64(state):
    # xorshift64*
    x = state
    x ^= x >> _U64(12)
    x ^= x << _U64(25)
    x ^= x >> _U64(27)
    return x, x * _U64(2685821657736338717)


@njit(cache=True, inline="always")
def _next_float(state):
    state, r = _next_u64(state)
    return state, (r >> _U64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _uniform_walk_kernel(indptr, indices, walks_per_node, walk_length, seed):
    n = indptr.shape[0] - 1
    out = np.empty((n * walks_per_node, walk_length), dtype=np.int32)
    for w in range(walks_per_node):
        for v in range(n):
            wid = w * n + v
            state = _stream_seed(seed, wid)
            cur = v
            out[wid, 0] = cur
            for t in range(1, walk_length):
                deg = indptr[cur + 1] - indptr[cur]
                state, r = _next_u64(state)
                cur = indices[indptr[cur] + np.int64(r % _U64(deg))]
                out[wid, t] = cur
    return out


@njit(cache=True, inline="always")
def _has_edge(indptr, indices, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        x = indices[mid]
        if x == v:
            return True
        if x < v:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit(cache=True)
def _build_alias(weights, prob, alias):
    k = weights.shape[0]
    total = 0.0
    for i in range(k):
        total += weights[i]
    scaled = np.empty(k)
    for i in range(k):
        scaled[i] = weights[i] * k / total
    small = np.empty(k, dtype=np.int64)
    large = np.empty(k, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(k):
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        nl -= 1
        l = large[nl]
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] = scaled[l] + scaled[s] - 1.0
        if scaled[l] < 1.0:
            small[ns] = l
            ns += 1
        else:
            large[nl] = l
            nl += 1
    while nl > 0:
        nl -= 1
        prob[large[nl]] = 1.0
        alias[large[nl]] = large[nl]
    while ns > 0:
        ns -= 1
        prob[small[ns]] = 1.0
        alias[small[ns]] = small[ns]


@njit(cache=True)
def _build_edge_aliases(indptr, indices, p, q):
    n = indptr.shape[0] - 1
    m = indices.shape[0]
    offsets = np.zeros(m + 1, dtype=np.int64)
    for e in range(m):
        v = indices[e]
        offsets[e + 1] = offsets[e] + (indptr[v + 1] - indptr[v])
    prob = np.empty(offsets[m])
    alias = np.empty(offsets[m], dtype=np.int64)
    for u in range(n):
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            dv = indptr[v + 1] - indptr[v]
            w = np.empty(dv)
            for j in range(dv):
                x = indices[indptr[v] + j]
                if x == u:
                    w[j] = 1.0 / p
                elif _has_edge(indptr, indices, u, x):
                    w[j] = 1.0
                else:
                    w[j] = 1.0 / q
            _build_alias(w, prob[offsets[e]:offsets[e + 1]], alias[offsets[e]:offsets[e + 1]])
    return offsets, prob, alias


@njit(cache=True, inline="always")
def _edge_id(indptr, indices, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        x = indices[mid]
        if x == v:
            return mid
        if x < v:
            lo = mid + 1
        else:
            hi = mid
    return np.int64(-1)


@njit(cache=True)
def _node2vec_walk_kernel(indptr, indices, offsets, prob, alias,
                          walks_per_node, walk_length, seed):
    n = indptr.shape[0] - 1
    out = np.empty((n * walks_per_node, walk_length), dtype=np.int32)
    for w in range(walks_per_node):
        for v in range(n):
            wid = w * n + v
            state = _stream_seed(seed, wid)
            prev = v
            out[wid, 0] = v
            deg = indptr[v + 1] - indptr[v]
            state, r = _next_u64(state)
            cur = np.int64(indices[indptr[v] + np.int64(r % _U64(deg))])
            if walk_length > 1:
                out[wid, 1] = cur
            for t in range(2, walk_length):
                e = _edge_id(indptr, indices, prev, cur)
                base = offsets[e]
                dv = indptr[cur + 1] - indptr[cur]
                state, f = _next_float(state)
                slot = np.int64(f * dv)
                if slot >= dv:
                    slot = dv - 1
                state, f2 = _next_float(state)
                if f2 >= prob[base + slot]:
                    slot = alias[base + slot]
                nxt = np.int64(indices[indptr[cur] + slot])
                out[wid, t] = nxt
                prev = cur
                cur = nxt
    return out


def walks_uniform(g: Graph, cfg: WalkConfig) -> np.ndarray:
    """First-order uniform walks: (node_count*walks_per_node, walk_length)."""
    if not is_connected(g):
        raise GraphError("walks require a connected graph")
    indptr, indices = g.csr()
    return _uniform_walk_kernel(indptr, indices, cfg.walks_per_node,
                                cfg.walk_length, cfg.seed)


def node2vec_transition_tables(g: Graph, params: Node2vecParams):
    """Per-directed-edge alias tables for the second-order bias."""
    indptr, indices = g.csr()
    offsets, prob, alias = _build_edge_aliases(indptr, indices, params.p, params.q)
    return indptr, indices, offsets, prob, alias


def walks_node2vec(g: Graph, cfg: WalkConfig, params: Node2vecParams) -> np.ndarray:
    """Second-order biased walks (1/p back, 1 to common neighbor, 1/q out)."""
    if not is_connected(g):
        raise GraphError("walks require a connected graph")
    indptr, indices, offsets, prob, alias = node2vec_transition_tables(g, params)
    return _node2vec_walk_kernel(indptr, indices, offsets, prob, alias,
                                 cfg.walks_per_node, cfg.walk_length, cfg.seed)
