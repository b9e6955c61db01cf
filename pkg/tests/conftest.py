import numpy as np
import pytest

from embedbench.graph import Graph, SyntheticSpec, generate
from embedbench.graph import from_edge_pairs as _from_edge_pairs


def from_edge_pairs(labels, pairs):
    g, _ = _from_edge_pairs(labels, pairs)
    return g


def random_connected_graph(rng: np.random.Generator, n: int) -> Graph:
    """Small connected Erdos-Renyi-ish graph: random spanning tree plus
    Bernoulli extra edges."""
    pairs = []
    for v in range(1, n):
        pairs.append((int(rng.integers(v)), v))
    p = rng.uniform(0.1, 0.6)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                pairs.append((u, v))
    return from_edge_pairs([str(i) for i in range(n)], pairs)


@pytest.fixture(scope="session")
def small_graphs():
    """A pool of seeded connected graphs with n <= 9 for oracle comparisons."""
    rng = np.random.default_rng(20240817)
    return [random_connected_graph(rng, int(rng.integers(3, 10)))
            for _ in range(60)]


@pytest.fixture(scope="session")
def ba_graph():
    return generate(SyntheticSpec(kind="barabasi_albert", n=60, ba_m=2, seed=11))


def star(n_leaves: int) -> Graph:
    return from_edge_pairs([str(i) for i in range(n_leaves + 1)],
                           [(0, i) for i in range(1, n_leaves + 1)])


def path(n: int) -> Graph:
    return from_edge_pairs([str(i) for i in range(n)],
                           [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    return from_edge_pairs([str(i) for i in range(n)],
                           [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return from_edge_pairs([str(i) for i in range(n)],
                           [(u, v) for u in range(n) for v in range(u + 1, n)])


@pytest.fixture(scope="session")
def named_fixtures():
    return {"star": star(6), "path": path(7), "cycle": cycle(8),
            "complete": complete(5)}
