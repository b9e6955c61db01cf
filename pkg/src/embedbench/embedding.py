"""Model dispatch, embedding matrices, and the word2vec text file format."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph
from .skipgram import train_skipgram
from .struc import Struc2vecConfig, walks_struc2vec
from .walks import Node2vecParams, WalkConfig, walks_node2vec, walks_uniform

MODEL_IDS = ("deepwalk", "node2vec", "struc2vec")


@dataclass(frozen=True)
class EmbeddingMatrix:
    model_id: str
    config_hash: str
    labels: list[str]
    vectors: np.ndarray  # (node_count, dimension)

    def __post_init__(self):
        if self.vectors.shape[0] != len(self.labels):
            raise ValueError("row count must equal node count")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("embedding has non-finite entries")


def config_hash(model_id: str, cfg: WalkConfig, params=None, extra=None) -> str:
    payload = {"model": model_id, "cfg": asdict(cfg)}
    if params is not None:
        payload["params"] = asdict(params)
    if extra is not None:
        payload["extra"] = extra
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def embed(g: Graph, model_id: str, cfg: WalkConfig, params: Node2vecParams | None = None,
          s2v: Struc2vecConfig | None = None, workers: int = 1) -> EmbeddingMatrix:
    """Generate walks for the named model and train the shared SGNS model."""
    if model_id == "deepwalk":
        if params is not None:
            raise ValueError("deepwalk takes no p/q parameters")
        walks = walks_uniform(g, cfg)
        chash = config_hash(model_id, cfg)
    elif model_id == "node2vec":
        if params is None:
            raise ValueError("node2vec requires p and q")
        walks = walks_node2vec(g, cfg, params)
        chash = config_hash(model_id, cfg, params)
    elif model_id == "struc2vec":
        s2v = s2v or Struc2vecConfig()
        walks = walks_struc2vec(g, cfg, s2v)
        chash = config_hash(model_id, cfg, extra=asdict(s2v))
    else:
        raise ValueError(f"unknown model id {model_id!r}")
    syn0, _ = train_skipgram(
        walks, g.node_count,
        dimension=cfg.dimension, window=cfg.window, epochs=cfg.epochs,
        negatives=cfg.negatives_per_positive,
        learning_rate=cfg.initial_learning_rate, seed=cfg.seed,
        workers=workers,
    )
    return EmbeddingMatrix(model_id=model_id, config_hash=chash,
                           labels=list(g.node_labels), vectors=syn0)


def write_embedding(e: EmbeddingMatrix, path) -> None:
    """word2vec text format: header `<N> <d>`, then label + 9-sig-digit values."""
    n, d = e.vectors.shape
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{n} {d}\n")
        for lab, row in zip(e.labels, e.vectors):
            f.write(lab + " " + " ".join(f"{v:.9g}" for v in row) + "\n")


def read_embedding(path, model_id: str = "external", chash: str = "") -> EmbeddingMatrix:
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: bad embedding header")
        n, d = int(header[0]), int(header[1])
        labels = []
        rows = np.empty((n, d))
        for i in range(n):
            parts = f.readline().split()
            if len(parts) != d + 1:
                raise ValueError(f"{path}: bad row {i}")
            labels.append(parts[0])
            rows[i] = [float(x) for x in parts[1:]]
    return EmbeddingMatrix(model_id=model_id, config_hash=chash,
                           labels=labels, vectors=rows)


def align_to_labels(e: EmbeddingMatrix, labels: list[str]) -> EmbeddingMatrix:
    """Reorder embedding rows to match a graph's label order."""
    pos = {lab: i for i, lab in enumerate(e.labels)}
    missing = [lab for lab in labels if lab not in pos]
    if missing:
        raise KeyError(f"embedding missing labels: {missing[:10]}")
    idx = np.array([pos[lab] for lab in labels])
    return EmbeddingMatrix(model_id=e.model_id, config_hash=e.config_hash,
                           labels=list(labels), vectors=e.vectors[idx])
