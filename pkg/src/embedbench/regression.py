"""Pairwise regression of embedding distance on metric distances.

Features are absolute differences of min-max-normalized metrics; the target
is the Euclidean distance between embedding rows. The decision tree is a
from-scratch CART with impurity-decrease feature importances; OLS and lasso
serve as linear baselines.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .embedding import EmbeddingMatrix
from .metrics import METRIC_NAMES, MetricsTable, normalize_metrics

R2_GATE = 0.70
DEFAULT_MAX_PAIRS = 500_000
TREE_DEFAULTS = {"max_depth": 10, "min_leaf": 20}


@dataclass(frozen=True)
class PairwiseDataset:
    features: np.ndarray   # (P, 11) abs metric differences
    target: np.ndarray     # (P,) embedding Euclidean distances
    pair_index: np.ndarray  # (P, 2)

    def __post_init__(self):
        if not (np.all(np.isfinite(self.features)) and np.all(np.isfinite(self.target))):
            raise ValueError("non-finite values in pairwise dataset")


@dataclass
class RegressorResult:
    regressor: str
    r2_train: float
    r2_test: float
    importances: np.ndarray | None = None  # decision tree only
    coefficients: np.ndarray | None = None  # linear models

    @property
    def selected(self) -> bool:
        return self.r2_test > R2_GATE

    def weighted_importances(self) -> np.ndarray | None:
        if self.importances is None:
            return None
        return self.importances * max(self.r2_test, 0.0)


@dataclass
class RegressionReport:
    model_id: str
    dataset: str
    results: dict[str, RegressorResult] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {"model_id": self.model_id, "dataset": self.dataset, "regressors": {}}
        for name, res in self.results.items():
            entry = {"r2_train": res.r2_train, "r2_test": res.r2_test,
                     "selected": res.selected}
            if res.importances is not None:
                entry["importances"] = dict(zip(METRIC_NAMES, map(float, res.importances)))
                entry["weighted"] = dict(zip(METRIC_NAMES, map(float, res.weighted_importances())))
            if res.coefficients is not None:
                entry["coefficients"] = dict(zip(METRIC_NAMES, map(float, res.coefficients)))
            out["regressors"][name] = entry
        return out


def _all_pairs(n: int) -> np.ndarray:
    iu = np.triu_indices(n, k=1)
    return np.column_stack(iu).astype(np.int64)


def sample_pairs(n: int, max_pairs: int, seed: int) -> np.ndarray:
    """Seeded uniform sample of distinct unordered pairs."""
    total = n * (n - 1) // 2
    if max_pairs >= total:
        return _all_pairs(n)
    rng = np.random.default_rng(seed)
    flat = rng.choice(total, size=max_pairs, replace=False)
    # unrank: flat index k -> (u, v) in the upper triangle
    u = (n - 2 - np.floor(np.sqrt(-8 * flat + 4 * n * (n - 1) - 7) / 2.0 - 0.5)).astype(np.int64)
    v = (flat + u + 1 - u * (2 * n - u - 1) // 2).astype(np.int64)
    return np.column_stack([u, v])


def build_pairwise_dataset(table: MetricsTable, e: EmbeddingMatrix,
                           max_pairs: int | None = None, seed: int = 0) -> PairwiseDataset:
    """Per-pair |normalized metric difference| features and embedding distance."""
    if table.labels != e.labels:
        raise ValueError("metrics table and embedding are not aligned")
    n = len(table.labels)
    if n < 2:
        raise ValueError("need at least 2 nodes")
    norm = normalize_metrics(table)
    pairs = (_all_pairs(n) if max_pairs is None
             else sample_pairs(n, max_pairs, seed))
    feats = np.abs(norm[pairs[:, 0]] - norm[pairs[:, 1]])
    diff = e.vectors[pairs[:, 0]] - e.vectors[pairs[:, 1]]
    target = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return PairwiseDataset(features=feats, target=target, pair_index=pairs)


def train_test_split(p: PairwiseDataset, split: float = 0.8, seed: int = 0):
    rng = np.random.default_rng(seed)
    idx = rng.permutation(len(p.target))
    cut = int(round(split * len(idx)))
    return idx[:cut], idx[cut:]


def r2_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        return 0.0  # zero-variance convention
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    return 1.0 - ss_res / ss_tot


class DecisionTreeRegressor:
    """CART with greedy variance-reduction splits.

    Ties break on the lowest feature index, then the lowest threshold.
    Importance of a feature is its total impurity decrease, normalized.
    """

    def __init__(self, max_depth: int = 10, min_leaf: int = 20):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.feature_importances_: np.ndarray | None = None
        self._nodes: list[tuple] = []  # (feature, threshold, left, right) or (-1, value, -1, -1)

    def _best_split(self, X, y, idx):
        best = None  # (sse_total, feature, threshold, mask)
        y_sub = y[idx]
        n = len(idx)
        base_sse = float(np.sum((y_sub - y_sub.mean()) ** 2))
        if base_sse <= 0:
            return None, base_sse
        for f in range(X.shape[1]):
            v = X[idx, f]
            order = np.argsort(v, kind="stable")
            vs = v[order]
            ys = y_sub[order]
            csum = np.cumsum(ys)
            csq = np.cumsum(ys * ys)
            total_sum = csum[-1]
            total_sq = csq[-1]
            i = np.arange(1, n)
            valid = (vs[1:] > vs[:-1]) & (i >= self.min_leaf) & (n - i >= self.min_leaf)
            if not valid.any():
                continue
            left_n = i[valid]
            ls = csum[:-1][valid]
            lq = csq[:-1][valid]
            rs = total_sum - ls
            rq = total_sq - lq
            rn = n - left_n
            sse = (lq - ls * ls / left_n) + (rq - rs * rs / rn)
            j = int(np.argmin(sse))  # first minimum -> lowest threshold
            if best is None or sse[j] < best[0] - 1e-12:
                pos = left_n[j]
                thr = 0.5 * (vs[pos - 1] + vs[pos])
                if thr >= vs[pos]:  # midpoint rounded up between adjacent floats
                    thr = vs[pos - 1]
                best = (float(sse[j]), f, thr)
        return best, base_sse

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        importances = np.zeros(X.shape[1])
        self._nodes = []

        def grow(idx, depth):
            node_id = len(self._nodes)
            self._nodes.append(None)
            y_sub = y[idx]
            if depth >= self.max_depth or len(idx) < 2 * self.min_leaf:
                self._nodes[node_id] = (-1, float(y_sub.mean()), -1, -1)
                return node_id
            best, base_sse = self._best_split(X, y, idx)
            if best is None or best[0] >= base_sse:
                self._nodes[node_id] = (-1, float(y_sub.mean()), -1, -1)
                return node_id
            sse, f, thr = best
            importances[f] += base_sse - sse
            mask = X[idx, f] <= thr
            left = grow(idx[mask], depth + 1)
            right = grow(idx[~mask], depth + 1)
            self._nodes[node_id] = (f, thr, left, right)
            return node_id

        import sys
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, 10000))
        try:
            grow(np.arange(len(y)), 0)
        finally:
            sys.setrecursionlimit(old_limit)
        total = importances.sum()
        self.feature_importances_ = (importances / total if total > 0
                                     else np.zeros_like(importances))
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X))
        for i, row in enumerate(X):
            node = 0
            while True:
                f, val, left, right = self._nodes[node]
                if f < 0:
                    out[i] = val
                    break
                node = left if row[f] <= val else right
        return out


def fit_decision_tree(p: PairwiseDataset, split: float = 0.8, seed: int = 0,
                      max_depth: int | None = None, min_leaf: int | None = None) -> RegressorResult:
    tr, te = train_test_split(p, split, seed)
    if np.var(p.target[tr]) == 0:
        return RegressorResult("decision_tree", 0.0, 0.0,
                               importances=np.zeros(p.features.shape[1]))
    tree = DecisionTreeRegressor(
        max_depth=max_depth if max_depth is not None else TREE_DEFAULTS["max_depth"],
        min_leaf=min_leaf if min_leaf is not None else TREE_DEFAULTS["min_leaf"],
    )
    tree.fit(p.features[tr], p.target[tr])
    return RegressorResult(
        "decision_tree",
        r2_train=r2_score(p.target[tr], tree.predict(p.features[tr])),
        r2_test=r2_score(p.target[te], tree.predict(p.features[te])),
        importances=tree.feature_importances_,
    )


def _ols_fit(X, y, jitter: float = 1e-10):
    Xb = np.column_stack([np.ones(len(X)), X])
    A = Xb.T @ Xb + jitter * np.eye(Xb.shape[1])
    return np.linalg.solve(A, Xb.T @ y)


def _lasso_cd(X, y, lam: float, tol: float = 1e-8, max_iter: int = 10000):
    # cyclic coordinate descent on centered data; lam scales the l1 penalty
    n, k = X.shape
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    beta = np.zeros(k)
    col_sq = np.einsum("ij,ij->j", Xc, Xc)
    resid = yc.copy()
    for _ in range(max_iter):
        max_delta = 0.0
        for j in range(k):
            if col_sq[j] == 0:
                continue
            rho = Xc[:, j] @ resid + col_sq[j] * beta[j]
            new = np.sign(rho) * max(abs(rho) - lam * n, 0.0) / col_sq[j]
            delta = new - beta[j]
            if delta != 0.0:
                resid -= delta * Xc[:, j]
                beta[j] = new
                max_delta = max(max_delta, abs(delta))
        if max_delta < tol:
            break
    intercept = y_mean - x_mean @ beta
    return np.concatenate([[intercept], beta])


def fit_linear(p: PairwiseDataset, kind: str = "ols", lam: float = 1e-4,
               split: float = 0.8, seed: int = 0) -> RegressorResult:
    tr, te = train_test_split(p, split, seed)
    if np.var(p.target[tr]) == 0:
        return RegressorResult(kind, 0.0, 0.0, coefficients=np.zeros(p.features.shape[1]))
    if kind == "ols":
        w = _ols_fit(p.features[tr], p.target[tr])
    elif kind == "lasso":
        w = _lasso_cd(p.features[tr], p.target[tr], lam)
    else:
        raise ValueError(f"unknown linear regressor {kind!r}")

    def predict(X):
        return w[0] + X @ w[1:]

    return RegressorResult(
        kind,
        r2_train=r2_score(p.target[tr], predict(p.features[tr])),
        r2_test=r2_score(p.target[te], predict(p.features[te])),
        coefficients=w[1:],
    )


def analyze(table: MetricsTable, e: EmbeddingMatrix, dataset: str = "dataset",
            max_pairs: int | None = DEFAULT_MAX_PAIRS, seed: int = 0,
            tree_kwargs: dict | None = None) -> RegressionReport:
    """Fit all three regressors on one (metrics, embedding) pair."""
    p = build_pairwise_dataset(table, e, max_pairs=max_pairs, seed=seed)
    report = RegressionReport(model_id=e.model_id, dataset=dataset)
    report.results["decision_tree"] = fit_decision_tree(p, seed=seed, **(tree_kwargs or {}))
    report.results["ols"] = fit_linear(p, "ols", seed=seed)
    report.results["lasso"] = fit_linear(p, "lasso", seed=seed)
    return report


def rank_features(reports: list[RegressionReport]):
    """Average R2-weighted tree importances per model; drop gated-out reports.

    Returns (table, ranked_metrics) where table maps model -> metric ->
    percentage, and ranked_metrics are the metrics above the 50th percentile
    of the pooled ranking.
    """
    per_model: dict[str, list[np.ndarray]] = {}
    unranked = set()
    for rep in reports:
        res = rep.results.get("decision_tree")
        if res is None or res.importances is None:
            continue
        if not res.selected:
            unranked.add(rep.model_id)
            continue
        per_model.setdefault(rep.model_id, []).append(res.weighted_importances())
    table: dict[str, dict[str, float]] = {}
    for model, rows in per_model.items():
        avg = np.mean(rows, axis=0) * 100.0
        table[model] = dict(zip(METRIC_NAMES, map(float, avg)))
        unranked.discard(model)
    # pooled metric scores decide which rows survive the 50th-percentile cut
    if table:
        pooled = {m: np.mean([table[mod][m] for mod in table]) for m in METRIC_NAMES}
        cut = float(np.percentile(list(pooled.values()), 50))
        ranked = sorted((m for m in METRIC_NAMES if pooled[m] > cut),
                        key=lambda m: -pooled[m])
    else:
        ranked = []
    return table, ranked, sorted(unranked)


def write_report_json(reports: list[RegressionReport], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump([r.to_json_dict() for r in reports], f, indent=2, sort_keys=True)


def write_importance_csv(table: dict[str, dict[str, float]], ranked: list[str], path) -> None:
    """Table-1-shaped matrix: rows = retained metrics, columns = models."""
    models = sorted(table)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("metric," + ",".join(models) + "\n")
        for m in ranked:
            f.write(m + "," + ",".join(f"{table[mod][m]:.2f}%" for mod in models) + "\n")
