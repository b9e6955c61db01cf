"""HTTP facade: datasets, background jobs, disk artifact cache, and a
server-sent-event stream of projection snapshots.

Long computations run on a bounded worker pool; request handlers only read
job state and cached artifacts. Identical job requests (same dataset, kind,
config hash) are idempotent.
"""
from __future__ import annotations

import json
import hashlib
import os
import tempfile
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, StreamingResponse

from . import graph as graphmod
from . import metrics as metricsmod
from .embedding import (EmbeddingMatrix, config_hash, embed, read_embedding,
                        write_embedding)
from .graph import Graph, SyntheticSpec, generate, largest_component, load_edge_list
from .ranking import (DEFAULT_LIST_LENGTH, rank_embedding_space,
                      rank_graph_space, ranking_payload)
from .regression import analyze, rank_features, write_report_json
from .struc import Struc2vecConfig
from .structural import structure_summary
from .tsne import Projection2D, TsneConfig, tsne
from .walks import Node2vecParams, WalkConfig

DEFAULT_PORT = 8789
JOB_KINDS = ("embed", "project", "regress", "structure", "metrics")
MAX_COMPARED_SPACES = 3


@dataclass
class JobRecord:
    job_id: str
    kind: str
    dataset: str
    config_hash: str
    status: str = "queued"  # queued -> running -> done | failed
    progress: float = 0.0
    error_message: str | None = None
    artifact: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


class ProjectionStream:
    """Buffered snapshot sequence with blocking reads for SSE consumers."""

    def __init__(self):
        self.snapshots: list[dict] = []
        self.done = False
        self.error: str | None = None
        self.cond = threading.Condition()

    def push(self, snap: dict) -> None:
        with self.cond:
            self.snapshots.append(snap)
            self.cond.notify_all()

    def finish(self, error: str | None = None) -> None:
        with self.cond:
            self.done = True
            self.error = error
            self.cond.notify_all()

    def read_from(self, start: int):
        i = start
        while True:
            with self.cond:
                while i >= len(self.snapshots) and not self.done:
                    self.cond.wait(timeout=1.0)
                if i < len(self.snapshots):
                    snap = self.snapshots[i]
                else:
                    return
            yield snap
            i += 1


class Workbench:
    """Shared state behind the HTTP app: datasets, jobs, artifact cache."""

    def __init__(self, data_dir, cache_dir=None, workers: int | None = None):
        self.data_dir = Path(data_dir)
        self.cache_dir = Path(cache_dir) if cache_dir else self.data_dir / "cache"
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        if workers is None:
            workers = max(1, (os.cpu_count() or 2) - 1)
        self.pool = ThreadPoolExecutor(max_workers=workers)
        self.lock = threading.Lock()
        self.jobs: dict[str, JobRecord] = {}
        self.jobs_by_key: dict[tuple, JobRecord] = {}
        self.streams: dict[str, ProjectionStream] = {}
        self.synthetic: dict[str, SyntheticSpec] = {}
        self._graphs: dict[str, Graph] = {}
        self.computations = 0  # incremented per executed job body (cache test hook)

    # -- datasets ---------------------------------------------------------
    def dataset_ids(self) -> list[str]:
        ids = sorted(p.stem for p in self.data_dir.glob("*.edgelist"))
        ids += sorted(self.synthetic)
        return ids

    def get_graph(self, dataset: str) -> Graph:
        with self.lock:
            if dataset in self._graphs:
                return self._graphs[dataset]
        if dataset in self.synthetic:
            g = generate(self.synthetic[dataset])
        else:
            path = self.data_dir / f"{dataset}.edgelist"
            if not path.exists():
                raise KeyError(dataset)
            g = load_edge_list(path)
        g, _ = largest_component(g)
        with self.lock:
            self._graphs[dataset] = g
        return g

    def dataset_info(self, dataset: str) -> dict:
        g = self.get_graph(dataset)
        source = "synthetic" if dataset in self.synthetic else "file"
        return {"id": dataset, "nodes": g.node_count, "edges": g.edge_count,
                "source": source}

    # -- cache ------------------------------------------------------------
    def artifact_path(self, dataset: str, kind: str, chash: str, ext: str) -> Path:
        d = self.cache_dir / dataset
        d.mkdir(parents=True, exist_ok=True)
        return d / f"{kind}-{chash}{ext}"

    @staticmethod
    def atomic_write(path: Path, writer) -> None:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        os.close(fd)
        try:
            writer(tmp)
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)

    # -- jobs -------------------------------------------------------------
    def submit(self, dataset: str, kind: str, params: dict) -> JobRecord:
        if kind not in JOB_KINDS:
            raise ValueError(f"unknown job kind {kind!r}")
        chash = hashlib.sha256(
            json.dumps({"kind": kind, "dataset": dataset, "params": params},
                       sort_keys=True).encode()).hexdigest()[:16]
        key = (dataset, kind, chash)
        with self.lock:
            existing = self.jobs_by_key.get(key)
            if existing is not None and existing.status != "failed":
                return existing
            job = JobRecord(job_id=uuid.uuid4().hex[:12], kind=kind,
                            dataset=dataset, config_hash=chash)
            self.jobs[job.job_id] = job
            self.jobs_by_key[key] = job
            if kind == "project":
                self.streams[job.job_id] = ProjectionStream()
        self.pool.submit(self._run_job, job, params)
        return job

    def _run_job(self, job: JobRecord, params: dict) -> None:
        stream = self.streams.get(job.job_id)
        try:
            job.status = "running"
            artifact = self._execute(job, params)
            job.artifact = str(artifact)
            job.progress = 1.0
            job.status = "done"
            if stream is not None:
                stream.finish()
        except Exception as exc:  # surfaced via job record / stream
            job.error_message = f"{type(exc).__name__}: {exc}"
            job.status = "failed"
            if stream is not None:
                stream.finish(error=job.error_message)

    def _execute(self, job: JobRecord, params: dict) -> Path:
        dataset, kind, chash = job.dataset, job.kind, job.config_hash
        ext = {"embed": ".emb", "metrics": ".csv", "project": ".json",
               "regress": ".json", "structure": ".json"}[kind]
        path = self.artifact_path(dataset, kind, chash, ext)
        if path.exists() and kind != "project":
            return path
        self.computations += 1
        g = self.get_graph(dataset)
        if kind == "embed":
            e = self._embed_from_params(g, params)
            self.atomic_write(path, lambda tmp: write_embedding(e, tmp))
        elif kind == "metrics":
            seed = int(params.get("seed", 0))
            table = metricsmod.compute_metrics(
                g, metricsmod.detect_communities(g, seed=seed))
            self.atomic_write(path, lambda tmp: metricsmod.write_metrics_csv(table, tmp))
        elif kind == "project":
            path = self._run_projection(job, g, params, path)
        elif kind == "regress":
            path = self._run_regression(job, g, params, path)
        elif kind == "structure":
            embeddings = [self._load_embedding(dataset, h)
                          for h in params.get("embeddings", [])]
            summary = structure_summary(g, embeddings, int(params.get("k", 3)),
                                        seed=int(params.get("seed", 0)))
            self.atomic_write(path, lambda tmp: Path(tmp).write_text(
                json.dumps(summary, sort_keys=True)))
        return path

    _WALK_KEYS = ("walks_per_node", "walk_length", "window", "dimension",
                  "epochs", "negatives_per_positive", "initial_learning_rate",
                  "seed")
    _STRUC_KEYS = ("layers", "stay_probability", "candidate_window")

    def _embed_from_params(self, g: Graph, params: dict) -> EmbeddingMatrix:
        model = params.get("model")
        cfg = WalkConfig(**{k: params[k] for k in self._WALK_KEYS if k in params})
        workers = int(params.get("workers", 1))
        if model == "node2vec":
            if "p" not in params or "q" not in params:
                raise ValueError("node2vec requires p and q")
            return embed(g, model, cfg,
                         Node2vecParams(float(params["p"]), float(params["q"])),
                         workers=workers)
        if model == "struc2vec":
            s2v = Struc2vecConfig(**{k: params[k] for k in self._STRUC_KEYS
                                     if k in params})
            return embed(g, model, cfg, s2v=s2v, workers=workers)
        if model == "deepwalk":
            return embed(g, model, cfg, workers=workers)
        raise ValueError(f"unknown model {model!r}")

    def _load_embedding(self, dataset: str, chash: str) -> EmbeddingMatrix:
        path = self.artifact_path(dataset, "embed", chash, ".emb")
        if not path.exists():
            raise FileNotFoundError(f"embedding {chash} not computed for {dataset}")
        return read_embedding(path, model_id=chash, chash=chash)

    def _run_projection(self, job: JobRecord, g: Graph, params: dict, path: Path) -> Path:
        space = params.get("space", "graph")
        if space == "graph":
            table = metricsmod.compute_metrics(
                g, metricsmod.detect_communities(g, seed=int(params.get("seed", 0))))
            x = metricsmod.normalize_metrics(table)
        else:
            x = self._load_embedding(job.dataset, space).vectors
        tsne_keys = ("perplexity", "iterations", "learning_rate",
                     "early_exaggeration", "exaggeration_iterations",
                     "momentum_early", "momentum_late", "snapshot_stride", "seed")
        cfg = TsneConfig(**{k: params[k] for k in tsne_keys if k in params})
        stream = self.streams[job.job_id]
        total = cfg.iterations

        def on_snapshot(p: Projection2D):
            job.progress = p.iteration / total
            stream.push({"space_id": space, "iteration": p.iteration, "kl": p.kl,
                         "coords": [[float(a), float(b)] for a, b in p.coords]})

        final = tsne(x, cfg, on_snapshot=on_snapshot)
        payload = {"space_id": space, "iteration": final.iteration,
                   "kl": final.kl,
                   "coords": [[float(a), float(b)] for a, b in final.coords]}
        self.atomic_write(path, lambda tmp: Path(tmp).write_text(json.dumps(payload)))
        return path

    def _run_regression(self, job: JobRecord, g: Graph, params: dict, path: Path) -> Path:
        seed = int(params.get("seed", 0))
        table = metricsmod.compute_metrics(g, metricsmod.detect_communities(g, seed=seed))
        reports = []
        for chash in params.get("embeddings", []):
            e = self._load_embedding(job.dataset, chash)
            reports.append(analyze(table, e, dataset=job.dataset,
                                   max_pairs=params.get("max_pairs", 100_000),
                                   seed=seed))
        self.atomic_write(path, lambda tmp: write_report_json(reports, tmp))
        return path


def create_app(data_dir=None, cache_dir=None, workers: int | None = None) -> FastAPI:
    data_dir = data_dir or os.environ.get("WORKBENCH_DATA_DIR", ".")
    workers = workers or int(os.environ.get("WORKBENCH_WORKERS", "0")) or None
    bench = Workbench(data_dir, cache_dir=cache_dir, workers=workers)
    app = FastAPI(title="embedbench")
    app.state.bench = bench

    def _dataset_or_404(dataset: str) -> Graph:
        try:
            return bench.get_graph(dataset)
        except (KeyError, FileNotFoundError):
            raise HTTPException(404, f"unknown dataset {dataset!r}")

    def _artifact_or_409(dataset: str, kind: str, pattern: str = "*"):
        d = bench.cache_dir / dataset
        hits = sorted(d.glob(f"{kind}-{pattern}")) if d.exists() else []
        if not hits:
            raise HTTPException(409, f"{kind} not computed for {dataset!r}")
        return hits

    @app.get("/api/datasets")
    def list_datasets():
        return [bench.dataset_info(d) for d in bench.dataset_ids()]

    @app.post("/api/datasets")
    def add_dataset(body: dict):
        name = body.get("id")
        spec = body.get("spec")
        if not name or not isinstance(spec, dict):
            raise HTTPException(400, "need id and spec")
        try:
            bench.synthetic[name] = SyntheticSpec(**spec)
        except (TypeError, graphmod.GraphError) as exc:
            raise HTTPException(400, str(exc))
        return bench.dataset_info(name)

    @app.post("/api/jobs")
    def post_job(body: dict):
        dataset = body.get("dataset")
        kind = body.get("kind")
        if kind not in JOB_KINDS:
            raise HTTPException(400, f"kind must be one of {JOB_KINDS}")
        _dataset_or_404(dataset)
        params = {k: v for k, v in body.items()
                  if k not in ("dataset", "kind", "params")}
        nested = body.get("params")
        if nested is not None:
            if not isinstance(nested, dict):
                raise HTTPException(400, "params must be an object")
            params.update(nested)
        if kind == "embed" and params.get("model") == "node2vec":
            if "p" not in params or "q" not in params:
                raise HTTPException(400, "node2vec requires p and q")
        if kind in ("regress", "structure", "project"):
            for chash in params.get("embeddings", []) or (
                    [params["space"]] if kind == "project" and params.get("space", "graph") != "graph" else []):
                if not bench.artifact_path(dataset, "embed", chash, ".emb").exists():
                    raise HTTPException(409, f"embedding {chash} not computed yet")
            if len(params.get("embeddings", [])) > MAX_COMPARED_SPACES:
                raise HTTPException(400,
                                    f"at most {MAX_COMPARED_SPACES} embedding spaces per comparison")
        try:
            job = bench.submit(dataset, kind, params)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        return job.to_dict()

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        job = bench.jobs.get(job_id)
        if job is None:
            raise HTTPException(404, "unknown job")
        return job.to_dict()

    @app.get("/api/graph/{dataset}")
    def get_graph(dataset: str):
        g = _dataset_or_404(dataset)
        return {"id": dataset, "nodes": g.node_count, "edges": list(g.edges()),
                "labels": g.node_labels}

    @app.get("/api/metrics/{dataset}")
    def get_metrics(dataset: str):
        _dataset_or_404(dataset)
        hits = _artifact_or_409(dataset, "metrics", "*.csv")
        path = hits[-1]
        table = metricsmod.read_metrics_csv(path)
        chash = path.stem.split("-", 1)[1]
        return {"dataset": dataset, "config_hash": chash,
                "metrics": list(metricsmod.METRIC_NAMES),
                "labels": table.labels,
                "values": table.as_matrix().tolist(),
                "normalized": metricsmod.normalize_metrics(table).tolist()}

    @app.get("/api/regression/{dataset}")
    def get_regression(dataset: str):
        _dataset_or_404(dataset)
        hits = _artifact_or_409(dataset, "regress", "*.json")
        payload = json.loads(Path(hits[-1]).read_text())
        return {"dataset": dataset,
                "config_hash": hits[-1].stem.split("-", 1)[1],
                "reports": payload}

    @app.get("/api/structure/{dataset}")
    def get_structure(dataset: str, k: int = Query(default=3)):
        _dataset_or_404(dataset)
        hits = _artifact_or_409(dataset, "structure", "*.json")
        for path in reversed(hits):
            payload = json.loads(Path(path).read_text())
            if payload.get("k") == k:
                return {"dataset": dataset,
                        "config_hash": path.stem.split("-", 1)[1], **payload}
        raise HTTPException(409, f"structure with k={k} not computed")

    @app.get("/api/rankings/{dataset}")
    def get_rankings(dataset: str, anchor: int, space: str,
                     measure: str = "euclidean", k: int = DEFAULT_LIST_LENGTH,
                     order_by: str = "adjacency_shared_friends", seed: int = 0):
        g = _dataset_or_404(dataset)
        if not (0 <= anchor < g.node_count):
            raise HTTPException(404, f"unknown anchor {anchor}")
        mhits = _artifact_or_409(dataset, "metrics", "*.csv")
        table = metricsmod.read_metrics_csv(mhits[-1])
        ideal = rank_graph_space(g, table, anchor, k, order_by=order_by)
        if space == "graph":
            lst = ideal
        else:
            try:
                e = bench._load_embedding(dataset, space)
            except FileNotFoundError as exc:
                raise HTTPException(409, str(exc))
            if measure not in ("cosine", "euclidean"):
                raise HTTPException(400, "measure must be cosine or euclidean")
            lst = rank_embedding_space(e, anchor, measure, k)
        payload = ranking_payload(g, table, anchor, lst, ideal, other_lists=[lst])
        payload["dataset"] = dataset
        return payload

    @app.get("/api/stream/projection/{job_id}")
    def stream_projection(job_id: str, request: Request, start: int = 0):
        stream = bench.streams.get(job_id)
        job = bench.jobs.get(job_id)
        if stream is None or job is None:
            raise HTTPException(404, "unknown projection job")
        last_seen = request.headers.get("last-event-id")
        if last_seen is not None:
            start = int(last_seen)

        def gen():
            count = 0
            for snap in stream.read_from(start):
                count += 1
                yield (f"id: {start + count}\nevent: snapshot\n"
                       f"data: {json.dumps(snap)}\n\n")
            if stream.error:
                yield f"event: error\ndata: {json.dumps({'message': stream.error})}\n\n"
            else:
                yield "event: done\ndata: {}\n\n"

        return StreamingResponse(gen(), media_type="text/event-stream")

    return app
