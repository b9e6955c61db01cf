"""Exact (dense) t-SNE with per-iteration snapshots for animated views."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

_ENTROPY_TOL = 1e-5
_P_FLOOR = 1e-12


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iterations: int = 250
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    snapshot_stride: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.perplexity < 2:
            raise ValueError("perplexity must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass(frozen=True)
class Projection2D:
    coords: np.ndarray
    iteration: int
    kl: float


def _conditional_affinities(sq_dists: np.ndarray, perplexity: float) -> np.ndarray:
    """Per-row binary search of the Gaussian bandwidth matching the target
    entropy log2(perplexity) to 1e-5."""
    n = sq_dists.shape[0]
    target = math.log(perplexity)  # nats; equals log2(perplexity) bits
    P = np.zeros((n, n))
    for i in range(n):
        d = np.delete(sq_dists[i], i)
        beta, lo, hi = 1.0, 0.0, math.inf
        for _ in range(200):
            w = np.exp(-d * beta)
            s = w.sum()
            if s <= 0:
                h = 0.0
                p = np.zeros_like(w)
            else:
                p = w / s
                h = float(beta * (d * p).sum() + math.log(s))
            diff = h - target
            if abs(diff) < _ENTROPY_TOL:
                break
            if diff > 0:
                lo = beta
                beta = beta * 2 if hi == math.inf else 0.5 * (beta + hi)
            else:
                hi = beta
                beta = 0.5 * (beta + lo)
        row = np.zeros(n)
        row[np.arange(n) != i] = p
        P[i] = row
    return P


def joint_affinities(x: np.ndarray, perplexity: float) -> np.ndarray:
    sq = np.sum(x * x, axis=1)
    sq_dists = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0)
    cond = _conditional_affinities(sq_dists, perplexity)
    P = (cond + cond.T) / (2.0 * len(x))
    return np.maximum(P, _P_FLOOR)


def _low_dim_affinities(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sq = np.sum(y * y, axis=1)
    num = 1.0 / (1.0 + np.maximum(sq[:, None] + sq[None, :] - 2.0 * (y @ y.T), 0.0))
    np.fill_diagonal(num, 0.0)
    Q = num / num.sum()
    return np.maximum(Q, _P_FLOOR), num


def kl_divergence(P: np.ndarray, Q: np.ndarray) -> float:
    """Sum p log(p/q) with 0 log 0 = 0."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    mask = P > 0
    if np.any(Q[mask] == 0):
        raise ValueError("q = 0 where p > 0")
    return float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))


def tsne(x: np.ndarray, cfg: TsneConfig = TsneConfig(),
         on_snapshot=None) -> Projection2D:
    """Exact t-SNE of the rows of x to 2-D.

    on_snapshot(Projection2D) fires every snapshot_stride iterations and at
    the final iteration.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 points")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input rows")
    perplexity = cfg.perplexity
    limit = (n - 1) / 3.0
    if perplexity >= limit:
        perplexity = max(2.0, limit - 1e-9)
        log.warning("perplexity clamped to %.2f for n=%d", perplexity, n)

    P = joint_affinities(x, perplexity)
    # per-point seeding keeps the output equivariant under row permutation
    y = np.empty((n, 2))
    for i in range(n):
        rng = np.random.default_rng((cfg.seed, hash_row(x[i])))
        y[i] = rng.normal(scale=1e-4, size=2)
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)

    for it in range(1, cfg.iterations + 1):
        exag = cfg.early_exaggeration if it <= cfg.exaggeration_iterations else 1.0
        momentum = (cfg.momentum_early if it <= cfg.exaggeration_iterations
                    else cfg.momentum_late)
        Q, num = _low_dim_affinities(y)
        PQ = (exag * P - Q) * num
        grad = 4.0 * ((np.diag(PQ.sum(axis=1)) - PQ) @ y)
        inc = np.sign(grad) != np.sign(velocity)
        gains = np.where(inc, gains + 0.2, gains * 0.8)
        gains = np.maximum(gains, 0.01)
        velocity = momentum * velocity - cfg.learning_rate * gains * grad
        y = y + velocity
        y = y - y.mean(axis=0)
        if on_snapshot is not None and (it % cfg.snapshot_stride == 0 or it == cfg.iterations):
            Qs, _ = _low_dim_affinities(y)
            on_snapshot(Projection2D(coords=y.copy(), iteration=it,
                                     kl=kl_divergence(P, Qs)))
    Qf, _ = _low_dim_affinities(y)
    return Projection2D(coords=y, iteration=cfg.iterations, kl=kl_divergence(P, Qf))


def hash_row(row: np.ndarray) -> int:
    """Stable per-point seed component from the input row bytes."""
    import hashlib

    h = hashlib.blake2b(np.ascontiguousarray(row).tobytes(), digest_size=8)
    return int.from_bytes(h.digest(), "little")
