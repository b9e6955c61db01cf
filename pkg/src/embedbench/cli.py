"""Headless pipeline driver.

Machine-readable results go to stdout or --out files; human logs go to
stderr. Exit codes: 0 ok, 2 bad arguments, 3 compute failure, 4 data error.
"""
from __future__ import annotations

import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import click
import numpy as np

from . import metrics as metricsmod
from .embedding import (align_to_labels, embed, read_embedding, write_embedding)
from .graph import (GraphError, SyntheticSpec, generate, largest_component,
                    load_edge_list)
from .ranking import (DEFAULT_LIST_LENGTH, ndcg, rank_embedding_space,
                      rank_graph_space, ranking_payload)
from .regression import (analyze, rank_features, write_importance_csv,
                         write_report_json)
from .struc import Struc2vecConfig
from .structural import structure_summary, write_structure_json
from .tsne import TsneConfig, tsne
from .walks import Node2vecParams, WalkConfig

EXIT_COMPUTE = 3
EXIT_DATA = 4

logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                    format="%(levelname)s %(name)s: %(message)s")
log = logging.getLogger("embedbench")


def _load_graph(dataset: str):
    try:
        if dataset.startswith("synthetic:"):
            spec = SyntheticSpec(**json.loads(dataset.split(":", 1)[1]))
            g = generate(spec)
        else:
            g = load_edge_list(dataset)
    except (OSError, GraphError, json.JSONDecodeError) as exc:
        log.error("cannot load dataset: %s", exc)
        sys.exit(EXIT_DATA)
    sub, _ = largest_component(g)
    if sub.node_count != g.node_count:
        log.info("reduced to largest component: %d of %d nodes",
                 sub.node_count, g.node_count)
    return sub


def _walk_config(dim, walks, length, window, epochs, lr, seed):
    return WalkConfig(walks_per_node=walks, walk_length=length, window=window,
                      dimension=dim, epochs=epochs, initial_learning_rate=lr,
                      seed=seed)


@click.group()
def main():
    """Network-embedding comparison workbench."""


@main.command("embed")
@click.option("--dataset", required=True, help="Edge-list path or synthetic:{json spec}.")
@click.option("--model", required=True,
              type=click.Choice(["deepwalk", "node2vec", "struc2vec"]))
@click.option("--p", type=float, default=None, help="node2vec return bias.")
@click.option("--q", type=float, default=None, help="node2vec in/out bias.")
@click.option("--dim", default=128, show_default=True)
@click.option("--walks", default=10, show_default=True)
@click.option("--length", default=80, show_default=True)
@click.option("--window", default=10, show_default=True)
@click.option("--epochs", default=5, show_default=True)
@click.option("--lr", default=0.025, show_default=True)
@click.option("--layers", default=3, show_default=True, help="struc2vec hierarchy depth.")
@click.option("--candidate-window", default=None, type=int,
              help="struc2vec degree-order comparison window (default 2*log2 n).")
@click.option("--seed", default=0, show_default=True)
@click.option("--workers", default=1, show_default=True,
              help="1 = deterministic single worker.")
@click.option("--out", required=True, type=click.Path())
def embed_cmd(dataset, model, p, q, dim, walks, length, window, epochs, lr,
              layers, candidate_window, seed, workers, out):
    """Train one embedding and write it in word2vec text format."""
    if model == "node2vec" and (p is None or q is None):
        raise click.UsageError("node2vec requires --p and --q")
    g = _load_graph(dataset)
    cfg = _walk_config(dim, walks, length, window, epochs, lr, seed)
    try:
        params = Node2vecParams(p, q) if model == "node2vec" else None
        s2v = (Struc2vecConfig(layers=layers, candidate_window=candidate_window)
               if model == "struc2vec" else None)
        e = embed(g, model, cfg, params=params, s2v=s2v, workers=workers)
        write_embedding(e, out)
    except (ValueError, FloatingPointError) as exc:
        log.error("embedding failed: %s", exc)
        sys.exit(EXIT_COMPUTE)
    log.info("wrote %s (%d x %d)", out, *e.vectors.shape)


@main.command("metrics")
@click.option("--dataset", required=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
def metrics_cmd(dataset, seed, out):
    """Compute the 11-metric table and write it as CSV."""
    g = _load_graph(dataset)
    try:
        table = metricsmod.compute_metrics(g, metricsmod.detect_communities(g, seed=seed))
        metricsmod.write_metrics_csv(table, out)
    except GraphError as exc:
        log.error("metrics failed: %s", exc)
        sys.exit(EXIT_COMPUTE)
    log.info("wrote %s", out)


def _read_aligned_embedding(path, labels):
    try:
        e = read_embedding(path, model_id=Path(path).stem)
        return align_to_labels(e, labels)
    except KeyError as exc:
        log.error("label mismatch for %s: %s", path, exc)
        sys.exit(EXIT_DATA)
    except (OSError, ValueError) as exc:
        log.error("cannot read embedding %s: %s", path, exc)
        sys.exit(EXIT_DATA)


@main.command("regress")
@click.option("--dataset", required=True)
@click.option("--embeddings", required=True,
              help="Comma-separated embedding file paths.")
@click.option("--max-pairs", default=100000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(),
              help="Report JSON path; a Table-style CSV lands beside it.")
def regress_cmd(dataset, embeddings, max_pairs, seed, out):
    """Fit tree/OLS/lasso per embedding; emit report JSON + importance CSV."""
    g = _load_graph(dataset)
    table = metricsmod.compute_metrics(g, metricsmod.detect_communities(g, seed=seed))
    reports = []
    for path in embeddings.split(","):
        e = _read_aligned_embedding(path, g.node_labels)
        try:
            reports.append(analyze(table, e, dataset=dataset,
                                   max_pairs=max_pairs, seed=seed))
        except ValueError as exc:
            log.error("regression failed for %s: %s", path, exc)
            sys.exit(EXIT_COMPUTE)
    write_report_json(reports, out)
    imp_table, ranked, unranked = rank_features(reports)
    csv_path = str(Path(out).with_suffix(".csv"))
    write_importance_csv(imp_table, ranked, csv_path)
    if unranked:
        log.info("unranked models (R2 gate): %s", ", ".join(unranked))
    log.info("wrote %s and %s", out, csv_path)


@main.command("project")
@click.option("--dataset", required=True)
@click.option("--embedding", default=None, type=click.Path(),
              help="Project this embedding; omit for graph-space V1 projection.")
@click.option("--perplexity", default=30.0, show_default=True)
@click.option("--iterations", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
def project_cmd(dataset, embedding, perplexity, iterations, seed, out):
    """t-SNE 2-D projection of graph-space metrics or an embedding."""
    g = _load_graph(dataset)
    if embedding is None:
        table = metricsmod.compute_metrics(g, metricsmod.detect_communities(g, seed=seed))
        x = metricsmod.normalize_metrics(table)
        space = "graph"
    else:
        x = _read_aligned_embedding(embedding, g.node_labels).vectors
        space = Path(embedding).stem
    try:
        proj = tsne(x, TsneConfig(perplexity=perplexity, iterations=iterations,
                                  seed=seed))
    except ValueError as exc:
        log.error("projection failed: %s", exc)
        sys.exit(EXIT_COMPUTE)
    payload = {"space_id": space, "iteration": proj.iteration, "kl": proj.kl,
               "coords": [[float(a), float(b)] for a, b in proj.coords]}
    Path(out).write_text(json.dumps(payload))
    log.info("wrote %s", out)


@main.command("structure")
@click.option("--dataset", required=True)
@click.option("--embeddings", required=True)
@click.option("--k", default=3, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
def structure_cmd(dataset, embeddings, k, seed, out):
    """Cluster ego features and emit per-cluster average distance vectors."""
    g = _load_graph(dataset)
    embs = [_read_aligned_embedding(p, g.node_labels) for p in embeddings.split(",")]
    try:
        summary = structure_summary(g, embs, k, seed=seed)
    except ValueError as exc:
        log.error("structure failed: %s", exc)
        sys.exit(EXIT_COMPUTE)
    write_structure_json(summary, out)
    log.info("wrote %s", out)


@main.command("rank")
@click.option("--dataset", required=True)
@click.option("--anchor", required=True, type=int)
@click.option("--space", required=True, type=click.Path(),
              help="Embedding file to rank in.")
@click.option("--measure", default="euclidean", show_default=True,
              type=click.Choice(["cosine", "euclidean"]))
@click.option("--k", default=DEFAULT_LIST_LENGTH, show_default=True)
@click.option("--order-by", default="adjacency_shared_friends", show_default=True)
@click.option("--seed", default=0, show_default=True)
def rank_cmd(dataset, anchor, space, measure, k, order_by, seed):
    """Print a ranking-list JSON (with NDCG) for one anchor node."""
    g = _load_graph(dataset)
    if not (0 <= anchor < g.node_count):
        log.error("anchor %d out of range", anchor)
        sys.exit(EXIT_DATA)
    e = _read_aligned_embedding(space, g.node_labels)
    table = metricsmod.compute_metrics(g, metricsmod.detect_communities(g, seed=seed))
    try:
        ideal = rank_graph_space(g, table, anchor, k, order_by=order_by)
        lst = rank_embedding_space(e, anchor, measure, k)
    except ValueError as exc:
        log.error("ranking failed: %s", exc)
        sys.exit(EXIT_COMPUTE)
    payload = ranking_payload(g, table, anchor, lst, ideal, other_lists=[lst])
    click.echo(json.dumps(payload, sort_keys=True))


@main.command("serve")
@click.option("--data-dir", default=".", show_default=True, type=click.Path())
@click.option("--port", default=8789, show_default=True)
@click.option("--workers", default=None, type=int)
def serve_cmd(data_dir, port, workers):
    """Boot the HTTP workbench service."""
    import socket

    import uvicorn

    from .service import create_app

    app = create_app(data_dir=data_dir, workers=workers)
    if port == 0:
        sock = socket.socket()
        sock.bind(("127.0.0.1", 0))
        port = sock.getsockname()[1]
        sock.close()
    click.echo(f"listening on port {port}", err=True)
    click.echo(f"ready port={port}")
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


@main.command("pipeline")
@click.argument("action", type=click.Choice(["run"]))
@click.argument("config_path", type=click.Path(exists=True))
def pipeline_cmd(action, config_path):
    """Run a declarative multi-stage pipeline from a TOML config."""
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib

    with open(config_path, "rb") as f:
        cfg = tomllib.load(f)
    known = {"dataset", "output_dir", "seed", "models", "regression", "structure"}
    unknown = set(cfg) - known
    if unknown:
        raise click.UsageError(f"unknown config keys: {sorted(unknown)}")
    outdir = Path(cfg.get("output_dir", "pipeline-out"))
    outdir.mkdir(parents=True, exist_ok=True)
    seed = int(cfg.get("seed", 0))
    g = _load_graph(cfg["dataset"])
    table = metricsmod.compute_metrics(g, metricsmod.detect_communities(g, seed=seed))
    metricsmod.write_metrics_csv(table, outdir / "metrics.csv")
    reports = []
    emb_paths = []
    for model_cfg in cfg.get("models", []):
        model = model_cfg["model"]
        wc = _walk_config(model_cfg.get("dim", 128), model_cfg.get("walks", 10),
                          model_cfg.get("length", 80), model_cfg.get("window", 10),
                          model_cfg.get("epochs", 5), model_cfg.get("lr", 0.025),
                          model_cfg.get("seed", seed))
        params = (Node2vecParams(model_cfg["p"], model_cfg["q"])
                  if model == "node2vec" else None)
        s2v = (Struc2vecConfig(layers=model_cfg.get("layers", 3),
                               candidate_window=model_cfg.get("candidate_window"))
               if model == "struc2vec" else None)
        e = embed(g, model, wc, params=params, s2v=s2v)
        name = model_cfg.get("name", model)
        path = outdir / f"{name}.emb"
        write_embedding(e, path)
        emb_paths.append(path)
        reg = cfg.get("regression", {})
        reports.append(analyze(table, e, dataset=cfg["dataset"],
                               max_pairs=reg.get("max_pairs", 100000), seed=seed))
    write_report_json(reports, outdir / "regression.json")
    imp_table, ranked, _ = rank_features(reports)
    write_importance_csv(imp_table, ranked, outdir / "importance.csv")
    st = cfg.get("structure", {})
    if st and emb_paths:
        embs = [read_embedding(p, model_id=p.stem) for p in emb_paths]
        summary = structure_summary(g, embs, st.get("k", 3), seed=seed)
        write_structure_json(summary, outdir / "structure.json")
    log.info("pipeline artifacts in %s", outdir)


if __name__ == "__main__":
    main()
