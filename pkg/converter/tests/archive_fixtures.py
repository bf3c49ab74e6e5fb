import pickle

import numpy as np
import scipy.sparse as sp


def sample_edges(rng, n_nodes, n_edges):
    """Exactly n_edges distinct undirected pairs (u < v)."""
    edges = set()
    while len(edges) < n_edges:
        need = n_edges - len(edges)
        us = rng.integers(0, n_nodes, size=2 * need + 16)
        vs = rng.integers(0, n_nodes, size=2 * need + 16)
        for u, v in zip(us, vs):
            if u != v:
                edges.add((int(min(u, v)), int(max(u, v))))
                if len(edges) == n_edges:
                    break
    return sorted(edges)


def make_archive(src_dir, name, n_nodes, n_edges, n_features, n_classes,
                 n_train, n_test, seed=0, test_gaps=0,
                 extra_edge_mentions=0, raw_self_loops=0):
    """Write a synthetic archive in the pickled citation layout.

    test_gaps > 0 reproduces releases whose test range has holes: the full
    test range spans n_test + test_gaps ids but only n_test appear in
    test.index (and in tx/ty).
    """
    src_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    full_test = n_test + test_gaps
    n_allx = n_nodes - full_test

    # test.index keeps the range endpoints so min/max recover the full range
    candidates = np.arange(n_allx + 1, n_nodes - 1)
    dropped = set(rng.choice(candidates, size=test_gaps, replace=False).tolist()) \
        if test_gaps else set()
    test_ids = np.array([i for i in range(n_allx, n_nodes) if i not in dropped])
    assert test_ids.size == n_test
    shuffled = test_ids[rng.permutation(n_test)]

    feats = sp.random(n_nodes, n_features, density=min(0.02, 500 / n_features / 10 + 0.005),
                      random_state=np.random.RandomState(seed), format="lil")
    feats[rng.integers(0, n_nodes, 5), rng.integers(0, n_features, 5)] = 1.0
    feats = feats.tocsr()

    labels = rng.integers(0, n_classes, n_nodes)
    onehot = np.zeros((n_nodes, n_classes))
    onehot[np.arange(n_nodes), labels] = 1.0

    edges = sample_edges(rng, n_nodes, n_edges)
    adjacency = {i: [] for i in range(n_nodes)}
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    for _ in range(extra_edge_mentions):
        u, v = edges[int(rng.integers(0, len(edges)))]
        adjacency[u].append(v)
    for _ in range(raw_self_loops):
        w = int(rng.integers(0, n_nodes))
        adjacency[w].append(w)

    def dump(obj, suffix):
        with open(src_dir / f"ind.{name}.{suffix}", "wb") as fh:
            pickle.dump(obj, fh)

    x = feats[:n_train]
    allx = feats[:n_allx]
    tx = feats[shuffled]
    dump(x, "x")
    dump(allx, "allx")
    dump(tx, "tx")
    dump(onehot[:n_train], "y")
    dump(onehot[:n_allx], "ally")
    dump(onehot[shuffled], "ty")
    dump(adjacency, "graph")
    (src_dir / f"ind.{name}.test.index").write_text(
        "\n".join(str(i) for i in shuffled) + "\n")
    return labels, edges


SHAPES = {
    # name: nodes, edges, features, classes, train, test, gaps
    "cora": (2708, 5429, 1433, 7, 140, 1000, 0),
    "citeseer": (3327, 4732, 3703, 6, 120, 1000, 15),
    "pubmed": (19717, 44338, 500, 3, 60, 1000, 0),
}


