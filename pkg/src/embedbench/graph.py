"""Undirected graph container, edge-list IO, and synthetic graph generators.

Nodes are dense integer indices 0..n-1 with string labels preserved from the
source file. All graphs are simple (no self-loops, no parallel edges) and
undirected; directed source data is symmetrized on load.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

log = logging.getLogger(__name__)


class GraphError(ValueError):
    """Invalid graph data or graph operation."""


class ParseError(GraphError):
    """Malformed edge-list input."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph in adjacency-list form.

    adjacency[i] is a sorted int64 array of neighbor indices. Instances are
    safe to share across threads after construction.
    """

    node_labels: list[str]
    adjacency: list[np.ndarray]

    @property
    def node_count(self) -> int:
        return len(self.node_labels)

    @cached_property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @cached_property
    def label_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.node_labels)}

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat (indptr, indices) view of the adjacency, for numba kernels."""
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        if self.node_count and indptr[-1]:
            indices = np.concatenate(self.adjacency).astype(np.int32)
        else:
            indices = np.zeros(0, dtype=np.int32)
        return indptr, indices

    def has_edge(self, u: int, v: int) -> bool:
        a = self.adjacency[u]
        j = np.searchsorted(a, v)
        return j < len(a) and a[j] == v

    def edges(self):
        """Yield (u, v) with u < v."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield u, int(v)

    def validate(self) -> None:
        n = self.node_count
        if len(set(self.node_labels)) != n:
            raise GraphError("node labels are not unique")
        for i, a in enumerate(self.adjacency):
            if len(a) and (np.any(np.diff(a) <= 0)):
                raise GraphError(f"adjacency[{i}] not sorted/deduplicated")
            if len(a) and (a.min() < 0 or a.max() >= n):
                raise GraphError(f"adjacency[{i}] has out-of-range index")
            if i in a:
                raise GraphError(f"self-loop at node {i}")
        for i, a in enumerate(self.adjacency):
            for j in a:
                if not self.has_edge(int(j), i):
                    raise GraphError(f"asymmetric edge ({i}, {j})")


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters for the synthetic graph generators.

    kind "barabasi_albert" grows from a ba_m-clique by preferential
    attachment; kind "planted_partition" builds equal-size communities with
    Bernoulli intra/inter edges plus designated bridge nodes that carry
    exactly one inter-community edge each.
    """

    kind: str
    n: int
    ba_m: int = 1
    communities: int = 0
    intra_p: float = 0.0
    inter_p: float = 0.0
    bridges_per_community: int = 0
    seed: int = 0
    require_connected: bool = False

    def __post_init__(self):
        if self.kind not in ("barabasi_albert", "planted_partition"):
            raise GraphError(f"unknown synthetic kind {self.kind!r}")
        if self.kind == "barabasi_albert":
            if self.ba_m < 1:
                raise GraphError("ba_m must be >= 1")
            if self.n <= self.ba_m:
                raise GraphError("n must exceed ba_m")
        else:
            if not (0 <= self.inter_p < self.intra_p <= 1):
                raise GraphError("need 0 <= inter_p < intra_p <= 1")
            if self.communities < 1 or self.n <= self.communities:
                raise GraphError("need n > communities >= 1")
            if self.bridges_per_community < 0:
                raise GraphError("bridges_per_community must be >= 0")


def from_edge_pairs(labels: list[str], pairs) -> tuple[Graph, int]:
    """Build a Graph from (i, j) index pairs.

    Self-loops and duplicate edges are dropped; returns the graph and the
    number of dropped entries.
    """
    n = len(labels)
    seen = set()
    dropped = 0
    for i, j in pairs:
        if i == j:
            dropped += 1
            continue
        key = (i, j) if i < j else (j, i)
        if key in seen:
            dropped += 1
        else:
            seen.add(key)
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in seen:
        adj[i].append(j)
        adj[j].append(i)
    adjacency = [np.array(sorted(a), dtype=np.int64) for a in adj]
    return Graph(node_labels=list(labels), adjacency=adjacency), dropped


def load_edge_list(path, comment_prefix: str = "#", delimiter=None) -> Graph:
    """Read a `<src> <dst>` per-line edge file into a Graph.

    Labels are arbitrary strings, indexed in order of first appearance.
    Self-loops and duplicate edges are dropped with a counted warning.
    """
    labels: list[str] = []
    index: dict[str, int] = {}
    pairs: list[tuple[int, int]] = []

    def idx(tok: str) -> int:
        i = index.get(tok)
        if i is None:
            i = len(labels)
            index[tok] = i
            labels.append(tok)
        return i

    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith(comment_prefix):
                continue
            toks = line.split(delimiter)
            if len(toks) != 2:
                raise ParseError(
                    f"{path}:{lineno}: expected 2 tokens, got {len(toks)}",
                    line_number=lineno,
                )
            pairs.append((idx(toks[0]), idx(toks[1])))
    if not labels:
        raise ParseError(f"{path}: empty graph")
    g, dropped = from_edge_pairs(labels, pairs)
    if dropped:
        log.warning("%s: dropped %d self-loop/duplicate edges", path, dropped)
    return g


def write_edge_list(g: Graph, path) -> None:
    """Write sorted (min, max) label pairs, one edge per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for u, v in g.edges():
            f.write(f"{g.node_labels[u]} {g.node_labels[v]}\n")


def connected_components(g: Graph) -> list[np.ndarray]:
    """Components as sorted index arrays, ordered by smallest member index."""
    n = g.node_count
    seen = np.zeros(n, dtype=bool)
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        members = [s]
        while stack:
            u = stack.pop()
            for v in g.adjacency[u]:
                v = int(v)
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
                    members.append(v)
        comps.append(np.array(sorted(members), dtype=np.int64))
    return comps


def is_connected(g: Graph) -> bool:
    return g.node_count > 0 and len(connected_components(g)) == 1


def largest_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph of the largest component, plus old->new index map.

    The map has -1 for dropped nodes. Ties between equal-size components go
    to the one containing the smallest original index.
    """
    if g.node_count == 0:
        raise GraphError("empty graph")
    comps = connected_components(g)
    best = max(comps, key=len)  # max() keeps the earliest on ties
    mapping = np.full(g.node_count, -1, dtype=np.int64)
    mapping[best] = np.arange(len(best))
    labels = [g.node_labels[int(i)] for i in best]
    adjacency = [mapping[g.adjacency[int(i)]] for i in best]
    sub = Graph(node_labels=labels, adjacency=adjacency)
    return sub, mapping


def shared_neighbors(g: Graph, u: int, v: int) -> int:
    """|N(u) ∩ N(v)| excluding u and v themselves."""
    n = g.node_count
    if not (0 <= u < n and 0 <= v < n):
        raise GraphError(f"invalid node index ({u}, {v})")
    common = np.intersect1d(g.adjacency[u], g.adjacency[v], assume_unique=True)
    return int(np.sum((common != u) & (common != v)))


def _generate_ba(spec: SyntheticSpec, rng: np.random.Generator):
    m, n = spec.ba_m, spec.n
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    # repeated-node list: each endpoint once per incident edge
    repeated: list[int] = [x for p in pairs for x in p]
    for new in range(m, n):
        chosen: set[int] = set()
        while len(chosen) < m:
            if repeated:
                cand = repeated[int(rng.integers(len(repeated)))]
            else:
                cand = int(rng.integers(new))
            chosen.add(cand)
        for tgt in sorted(chosen):
            pairs.append((tgt, new))
            repeated.append(tgt)
            repeated.append(new)
    return pairs


def _generate_planted(spec: SyntheticSpec, rng: np.random.Generator):
    n, c = spec.n, spec.communities
    base, extra = divmod(n, c)
    sizes = [base + (1 if i < extra else 0) for i in range(c)]
    community = np.repeat(np.arange(c), sizes)
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            p = spec.intra_p if community[i] == community[j] else spec.inter_p
            if rng.random() < p:
                pairs.append((i, j))
    if spec.bridges_per_community:
        members = [np.flatnonzero(community == k) for k in range(c)]
        bridges: list[int] = []
        for k in range(c):
            picked = rng.choice(members[k], size=spec.bridges_per_community, replace=False)
            bridges.extend(int(b) for b in picked)
        bridge_set = set(bridges)
        # bridge nodes carry exactly their one designated inter-community edge
        pairs = [
            (i, j)
            for i, j in pairs
            if community[i] == community[j]
            or (i not in bridge_set and j not in bridge_set)
        ]
        existing = set(pairs)
        for b in bridges:
            others = np.array(
                [v for v in range(n) if community[v] != community[b] and v not in bridge_set],
                dtype=np.int64,
            )
            while True:
                tgt = int(rng.choice(others))
                key = (b, tgt) if b < tgt else (tgt, b)
                if key not in existing:
                    existing.add(key)
                    pairs.append(key)
                    break
    return pairs


def generate(spec: SyntheticSpec) -> Graph:
    """Deterministically generate a synthetic graph from spec (seeded)."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "barabasi_albert":
        pairs = _generate_ba(spec, rng)
    else:
        pairs = _generate_planted(spec, rng)
    labels = [str(i) for i in range(spec.n)]
    g, _ = from_edge_pairs(labels, pairs)
    if spec.require_connected and not is_connected(g):
        raise GraphError("generated graph is disconnected")
    return g


def to_networkx(g: Graph):
    import networkx as nx

    G = nx.Graph()
    G.add_nodes_from(range(g.node_count))
    G.add_edges_from(g.edges())
    return G
