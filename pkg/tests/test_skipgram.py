import numpy as np
import pytest

from embedbench.graph import SyntheticSpec, generate
from embedbench.skipgram import (build_negative_table, init_vectors,
                                 sgns_positive_objective, train_skipgram)
from embedbench.walks import WalkConfig, walks_uniform


@pytest.fixture(scope="module")
def corpus():
    g = generate(SyntheticSpec(kind="barabasi_albert", n=30, ba_m=2, seed=2))
    walks = walks_uniform(g, WalkConfig(walks_per_node=8, walk_length=20, seed=0))
    return g, walks


def test_negative_table_follows_power_law(corpus):
    _, walks = corpus
    table = build_negative_table(walks, 30)
    counts = np.bincount(walks.ravel(), minlength=30).astype(float)
    weights = counts ** 0.75
    expected = weights / weights.sum()
    emp = np.bincount(table, minlength=30) / len(table)
    assert np.allclose(emp, expected, atol=2.0 / np.sqrt(len(table)) + 1e-5)


def test_init_vectors_range_and_determinism():
    syn0, syn1 = init_vectors(40, 16, seed=7)
    assert syn0.shape == (40, 16) and syn1.shape == (40, 16)
    assert np.all(np.abs(syn0) <= 0.5 / 16)
    assert np.all(syn1 == 0)
    again, _ = init_vectors(40, 16, seed=7)
    assert np.array_equal(syn0, again)
    other, _ = init_vectors(40, 16, seed=8)
    assert not np.array_equal(syn0, other)


def test_training_byte_deterministic(corpus):
    _, walks = corpus
    kw = dict(dimension=16, window=4, epochs=2, negatives=3,
              learning_rate=0.025, seed=11, workers=1)
    a0, a1 = train_skipgram(walks, 30, **kw)
    b0, b1 = train_skipgram(walks, 30, **kw)
    assert a0.tobytes() == b0.tobytes()
    assert a1.tobytes() == b1.tobytes()


def test_training_seed_sensitivity(corpus):
    _, walks = corpus
    kw = dict(dimension=16, window=4, epochs=1, negatives=3,
              learning_rate=0.025, workers=1)
    a0, _ = train_skipgram(walks, 30, seed=1, **kw)
    b0, _ = train_skipgram(walks, 30, seed=2, **kw)
    assert not np.array_equal(a0, b0)


def test_training_separates_observed_from_random_pairs(corpus):
    """Observed window pairs must score higher than shuffled (random) pairs;
    absolute scores are offset by the negative-sampling prior, so only the
    contrast is meaningful."""
    _, walks = corpus
    syn0, syn1 = train_skipgram(walks, 30, dimension=32, window=4, epochs=5,
                                negatives=5, learning_rate=0.025, seed=5)
    pairs = []
    for row in walks[:50]:
        for i in range(len(row) - 1):
            pairs.append((int(row[i]), int(row[i + 1])))
    pairs = np.array(pairs)
    rng = np.random.default_rng(0)
    random_pairs = rng.integers(0, 30, size=pairs.shape)
    assert (sgns_positive_objective(syn0, syn1, pairs)
            > sgns_positive_objective(syn0, syn1, random_pairs) + 0.05)


def test_trained_vectors_finite(corpus):
    _, walks = corpus
    syn0, syn1 = train_skipgram(walks, 30, dimension=8, window=3, epochs=3,
                                negatives=5, learning_rate=0.05, seed=0)
    assert np.all(np.isfinite(syn0)) and np.all(np.isfinite(syn1))


def test_neighbors_closer_than_distant_nodes():
    """On two loosely-bridged cliques, within-clique similarity should exceed
    cross-clique similarity on average."""
    from tests.conftest import from_edge_pairs

    edges = [(u, v) for u in range(6) for v in range(u + 1, 6)]
    edges += [(u, v) for u in range(6, 12) for v in range(u + 1, 12)]
    edges.append((0, 6))
    g = from_edge_pairs([str(i) for i in range(12)], edges)
    walks = walks_uniform(g, WalkConfig(walks_per_node=30, walk_length=20, seed=1))
    syn0, _ = train_skipgram(walks, 12, dimension=16, window=4, epochs=10,
                             negatives=5, learning_rate=0.025, seed=1)
    norm = syn0 / np.linalg.norm(syn0, axis=1, keepdims=True)
    sims = norm @ norm.T
    within = np.mean([sims[u, v] for u in range(1, 6) for v in range(1, 6) if u != v])
    across = np.mean([sims[u, v] for u in range(1, 6) for v in range(7, 12)])
    assert within > across + 0.1


def test_empty_corpus_rejected():
    with pytest.raises(ValueError):
        train_skipgram(np.empty((0, 0), dtype=np.int32), 5, dimension=4,
                       window=2, epochs=1, negatives=2, learning_rate=0.025,
                       seed=0)
