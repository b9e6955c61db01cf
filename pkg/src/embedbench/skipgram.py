"""Skip-gram with negative sampling over walk corpora.

Single-worker training is byte-deterministic for a fixed seed: one RNG
stream drives shuffling, window reduction, and negative draws. A hogwild
multi-worker path exists for speed but is run-dependent by construction.
"""
from __future__ import annotations

import numpy as np
from numba import njit, prange

from .walks import _next_float, _next_u64, _stream_seed, _U64

_EXP_TABLE_SIZE = 1000
_MAX_EXP = 6.0
_NEG_TABLE_SIZE = 1 << 20
_MIN_LR_FRACTION = 0.0001


def _exp_table() -> np.ndarray:
    x = (np.arange(_EXP_TABLE_SIZE) / _EXP_TABLE_SIZE * 2.0 - 1.0) * _MAX_EXP
    e = np.exp(x)
    return e / (e + 1.0)


def build_negative_table(walks: np.ndarray, n: int) -> np.ndarray:
    """Unigram table with counts raised to the 0.75 power."""
    counts = np.bincount(walks.ravel(), minlength=n).astype(np.float64)
    weights = counts ** 0.75
    total = weights.sum()
    if total == 0:
        raise ValueError("empty corpus")
    bounds = np.cumsum(weights) / total
    positions = (np.arange(_NEG_TABLE_SIZE) + 0.5) / _NEG_TABLE_SIZE
    return np.searchsorted(bounds, positions).astype(np.int32)


@njit(cache=True)
def _sgns_pair_update(center, context, syn0, syn1, neg_table, negatives,
                      alpha, exp_table, state):
    dim = syn0.shape[1]
    neu1e = np.zeros(dim)
    for k in range(negatives + 1):
        if k == 0:
            target = context
            label = 1.0
        else:
            state, r = _next_u64(state)
            target = np.int64(neg_table[r % _U64(neg_table.shape[0])])
            if target == context:
                continue
            label = 0.0
        f = 0.0
        for d in range(dim):
            f += syn0[center, d] * syn1[target, d]
        if f > _MAX_EXP:
            sig = 1.0
        elif f < -_MAX_EXP:
            sig = 0.0
        else:
            sig = exp_table[np.int64((f + _MAX_EXP) * (_EXP_TABLE_SIZE / (2.0 * _MAX_EXP)))]
        g = (label - sig) * alpha
        for d in range(dim):
            neu1e[d] += g * syn1[target, d]
        for d in range(dim):
            syn1[target, d] += g * syn0[center, d]
    for d in range(dim):
        syn0[center, d] += neu1e[d]
    return state


@njit(cache=True)
def _train_kernel(walks, syn0, syn1, neg_table, window, epochs, negatives,
                  lr0, seed, exp_table):
    num_walks, length = walks.shape
    total_words = np.float64(num_walks) * length * epochs
    state = _stream_seed(seed, 0)
    order = np.arange(num_walks)
    words = 0
    alpha = lr0
    for _ep in range(epochs):
        # seeded Fisher-Yates shuffle of walk order
        for i in range(num_walks - 1, 0, -1):
            state, r = _next_u64(state)
            j = np.int64(r % _U64(i + 1))
            tmp = order[i]
            order[i] = order[j]
            order[j] = tmp
        for oi in range(num_walks):
            widx = order[oi]
            for i in range(length):
                center = np.int64(walks[widx, i])
                words += 1
                if words % 10000 == 0:
                    frac = 1.0 - words / total_words
                    if frac < _MIN_LR_FRACTION:
                        frac = _MIN_LR_FRACTION
                    alpha = lr0 * frac
                state, r = _next_u64(state)
                b = np.int64(r % _U64(window))
                lo = i - window + b
                hi = i + window - b
                if lo < 0:
                    lo = 0
                if hi > length - 1:
                    hi = length - 1
                for j in range(lo, hi + 1):
                    if j == i:
                        continue
                    context = np.int64(walks[widx, j])
                    state = _sgns_pair_update(center, context, syn0, syn1,
                                              neg_table, negatives, alpha,
                                              exp_table, state)


@njit(cache=True, parallel=True)
def _train_kernel_hogwild(walks, syn0, syn1, neg_table, window, epochs,
                          negatives, lr0, seed, exp_table):
    num_walks, length = walks.shape
    total_words = np.float64(num_walks) * length * epochs
    for ep in range(epochs):
        for widx in prange(num_walks):
            state = _stream_seed(seed, ep * num_walks + widx)
            base_words = np.float64(ep) * num_walks * length
            frac = 1.0 - base_words / total_words
            if frac < _MIN_LR_FRACTION:
                frac = _MIN_LR_FRACTION
            alpha = lr0 * frac
            for i in range(length):
                center = np.int64(walks[widx, i])
                state, r = _next_u64(state)
                b = np.int64(r % _U64(window))
                lo = i - window + b
                hi = i + window - b
                if lo < 0:
                    lo = 0
                if hi > length - 1:
                    hi = length - 1
                for j in range(lo, hi + 1):
                    if j == i:
                        continue
                    context = np.int64(walks[widx, j])
                    state = _sgns_pair_update(center, context, syn0, syn1,
                                              neg_table, negatives, alpha,
                                              exp_table, state)


@njit(cache=True)
def _init_kernel(n, dim, seed):
    vals = np.empty(n * dim)
    s = _stream_seed(seed, 1)
    for i in range(n * dim):
        s, f = _next_float(s)
        vals[i] = (f - 0.5) / dim
    return vals


def init_vectors(n: int, dim: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    # word2vec init: input vectors uniform in (-0.5/dim, 0.5/dim), contexts zero
    syn0 = _init_kernel(n, dim, seed).reshape(n, dim)
    syn1 = np.zeros((n, dim))
    return syn0, syn1


def train_skipgram(walks: np.ndarray, n: int, *, dimension: int, window: int,
                   epochs: int, negatives: int, learning_rate: float,
                   seed: int, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Train SGNS on an integer walk corpus; returns (input, context) matrices."""
    if walks.size == 0:
        raise ValueError("empty corpus")
    walks = np.ascontiguousarray(walks, dtype=np.int32)
    neg_table = build_negative_table(walks, n)
    syn0, syn1 = init_vectors(n, dimension, seed)
    exp_table = _exp_table()
    if workers <= 1:
        _train_kernel(walks, syn0, syn1, neg_table, window, epochs, negatives,
                      learning_rate, seed, exp_table)
    else:
        import numba

        numba.set_num_threads(workers)
        _train_kernel_hogwild(walks, syn0, syn1, neg_table, window, epochs,
                              negatives, learning_rate, seed, exp_table)
    if not np.all(np.isfinite(syn0)):
        raise FloatingPointError(
            "non-finite embedding after training "
            f"(lr={learning_rate}, epochs={epochs}, negatives={negatives})"
        )
    return syn0, syn1


def sgns_positive_objective(syn0: np.ndarray, syn1: np.ndarray,
                            pairs: np.ndarray) -> float:
    """Mean log-sigmoid score of (center, context) pairs; higher is better."""
    dots = np.einsum("ij,ij->i", syn0[pairs[:, 0]], syn1[pairs[:, 1]])
    return float(np.mean(-np.log1p(np.exp(-np.clip(dots, -30, 30)))))
