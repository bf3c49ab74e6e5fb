import numpy as np

from sgcn import build_graph
from sgcn.data_io import Dataset


def random_graph(rng: np.random.Generator, n: int, avg_degree: float = 3.0):
    """Random undirected test graph; isolated nodes get self-loops at build."""
    m = max(1, int(n * avg_degree / 2))
    edges = set()
    tries = 0
    while len(edges) < m and tries < 50 * m:
        u, v = rng.integers(0, n, 2)
        tries += 1
        if u != v:
            edges.add((min(int(u), int(v)), max(int(u), int(v))))
    weights = rng.uniform(0.5, 2.0, size=len(edges))
    return build_graph(n, [(u, v, w) for (u, v), w in zip(sorted(edges), weights)])


def two_clique_dataset():
    """Separable-by-construction toy: two 10-node cliques, one bridge edge,
    one-hot features, clique membership as the label."""
    edges = []
    for base in (0, 10):
        for i in range(10):
            for j in range(i + 1, 10):
                edges.append((base + i, base + j, 1.0))
    edges.append((0, 10, 1.0))
    g = build_graph(20, edges)
    return Dataset(
        graph=g,
        features=np.eye(20),
        labels=np.array([0] * 10 + [1] * 10),
        masks={
            "train": np.array([1, 2, 11, 12]),
            "val": np.array([0, 3, 10, 13]),  # includes both bridge nodes
            "test": np.array([4, 5, 6, 7, 8, 9, 14, 15, 16, 17, 18, 19]),
        },
    )


