"""Bridge-node recall under node2vec exploration settings.

On a planted-partition graph with designated bridge nodes, measures how often
a bridge node's cross-community neighbor appears in its top-50 nearest
embedding neighbors, sweeping the in/out parameter q at fixed p. Large q keeps
walks local and misses the far side of the bridge; small q explores across
communities and recovers it.

Example:
    python3 scripts/bridge_recall.py --seeds 2 --q 256 0.004
"""
import argparse
import sys
import time

import numpy as np

from embedbench.embedding import embed
from embedbench.graph import SyntheticSpec, generate
from embedbench.walks import Node2vecParams, WalkConfig


def community_labels(g):
    """Per-node community ids; with inter_p=0 the only inter-community edges
    are the generator's designated bridges."""
    from embedbench.metrics import detect_communities
    return detect_communities(g, seed=0).community_of


def mean_bridge_recall(g, vectors, comm, k=50):
    recalls = []
    for u in range(g.node_count):
        nb = [int(x) for x in g.adjacency[u] if comm[int(x)] != comm[u]]
        if not nb:
            continue
        d = np.linalg.norm(vectors - vectors[u], axis=1)
        d[u] = np.inf
        top = set(np.argsort(d)[:k].tolist())
        recalls.append(sum(1 for x in nb if x in top) / len(nb))
    return float(np.mean(recalls))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=450)
    ap.add_argument("--communities", type=int, default=3)
    ap.add_argument("--intra-p", type=float, default=0.1)
    ap.add_argument("--bridges", type=int, default=3)
    ap.add_argument("--graph-seed", type=int, default=7)
    ap.add_argument("--p", type=float, default=256.0)
    ap.add_argument("--q", type=float, nargs="+", default=[256.0, 1.0, 0.004])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--top-k", type=int, default=50)
    args = ap.parse_args()

    g = generate(SyntheticSpec(kind="planted_partition", n=args.n,
                               communities=args.communities,
                               intra_p=args.intra_p, inter_p=0.0,
                               bridges_per_community=args.bridges,
                               seed=args.graph_seed))
    comm = community_labels(g)
    inter = sum(1 for a, b in g.edges() if comm[a] != comm[b])
    print(f"# n={g.node_count} edges={g.edge_count} bridge edges={inter}",
          file=sys.stderr)
    print("q,mean_recall")
    for q in args.q:
        t0 = time.time()
        per_seed = []
        for seed in range(args.seeds):
            cfg = WalkConfig(walks_per_node=10, walk_length=80, window=10,
                             dimension=64, epochs=5, seed=seed)
            e = embed(g, "node2vec", cfg, params=Node2vecParams(args.p, q))
            per_seed.append(mean_bridge_recall(g, e.vectors, comm,
                                               k=args.top_k))
        print(f"{q},{np.mean(per_seed):.4f}")
        print(f"#   per-seed: {['%.3f' % r for r in per_seed]} "
              f"({time.time() - t0:.0f}s)", file=sys.stderr)


if __name__ == "__main__":
    main()
