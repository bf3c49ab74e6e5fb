"""Undirected weighted graphs in CSR form plus the synthetic families
(cycles, regular bipartite, chained cycles) used throughout the toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "build_graph",
    "make_cyclic",
    "make_bipartite_regular",
    "make_chained_cycles",
]


@dataclass(frozen=True, eq=False)
class Graph:
    """Symmetric CSR adjacency: both directions of every undirected edge stored.

    Invariants enforced at construction: strictly positive weights, sorted
    column ids without duplicates, exact symmetry, and degree > 0 for every
    node (isolated nodes get a unit self-loop at build time).
    """

    n: int
    row_offsets: np.ndarray  # int64, length n+1
    col_ids: np.ndarray      # int64, length nnz
    weights: np.ndarray      # float64, length nnz
    degrees: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "degrees", _row_sums(self))
        _check_invariants(self)

    @property
    def nnz(self) -> int:
        return int(self.col_ids.shape[0])

    def num_undirected_edges(self, count_self_loops: bool = True) -> int:
        """Number of undirected edges; self-loops count once."""
        diag = int(np.sum(self.col_ids == _row_index(self)))
        off = (self.nnz - diag) // 2
        return off + (diag if count_self_loops else 0)

    def neighbors(self, u: int) -> np.ndarray:
        return self.col_ids[self.row_offsets[u]:self.row_offsets[u + 1]]

    def adjacency(self) -> sp.csr_matrix:
        """Weight matrix W as a scipy CSR matrix (shared buffers, do not mutate)."""
        return sp.csr_matrix(
            (self.weights, self.col_ids, self.row_offsets), shape=(self.n, self.n)
        )

    def dense_adjacency(self) -> np.ndarray:
        return self.adjacency().toarray()


def _row_index(g: Graph) -> np.ndarray:
    return np.repeat(np.arange(g.n), np.diff(g.row_offsets))


def _row_sums(g: Graph) -> np.ndarray:
    out = np.zeros(g.n)
    np.add.at(out, _row_index(g), g.weights)
    return out


def _check_invariants(g: Graph) -> None:
    if g.row_offsets.shape != (g.n + 1,):
        raise ValueError("row_offsets must have length n+1")
    if g.col_ids.shape != g.weights.shape:
        raise ValueError("col_ids and weights must have equal length")
    if g.nnz and (g.col_ids.min() < 0 or g.col_ids.max() >= g.n):
        raise ValueError("column index out of range")
    if not np.all(np.isfinite(g.weights)) or np.any(g.weights <= 0):
        raise ValueError("edge weights must be finite and strictly positive")
    if g.nnz > 1:
        # strictly increasing inside each row; jumps across row boundaries are free
        increasing = np.diff(g.col_ids) > 0
        boundary = np.zeros(g.nnz - 1, dtype=bool)
        b = g.row_offsets[1:-1]
        boundary[b[(b > 0) & (b < g.nnz)] - 1] = True
        if not np.all(increasing | boundary):
            bad = int(np.nonzero(~(increasing | boundary))[0][0])
            u = int(np.searchsorted(g.row_offsets, bad, side="right")) - 1
            raise ValueError(f"row {u}: column ids not sorted / duplicated")
    if np.any(g.degrees <= 0):
        bad = int(np.argmin(g.degrees))
        raise ValueError(f"node {bad} has zero degree after construction")
    a = g.adjacency()
    asym = abs(a - a.T)
    if asym.nnz and asym.max() > 0:
        raise ValueError("adjacency is not symmetric")


def build_graph(n: int, edges) -> Graph:
    """Build a symmetric CSR graph from undirected edges given once each.

    Args:
        n: node count.
        edges: iterable of (u, v, weight) or (u, v) tuples (weight defaults
            to 1); 0-based endpoints, u != v, weight > 0.

    Isolated nodes receive a unit self-loop so that degree-normalized
    operators are defined everywhere.

    Raises:
        ValueError: on out-of-range endpoints, self-loops, non-positive or
            non-finite weights, or a duplicate undirected edge (the offending
            pair is named).
    """
    if n <= 0:
        raise ValueError("node count must be positive")
    seen = set()
    us, vs, ws = [], [], []
    for e in edges:
        if len(e) == 2:
            u, v = e
            w = 1.0
        else:
            u, v, w = e
        u, v, w = int(u), int(v), float(w)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) endpoint out of range for n={n}")
        if u == v:
            raise ValueError(f"self-loop ({u},{v}) not allowed in edge input")
        if not np.isfinite(w) or w <= 0:
            raise ValueError(f"edge ({u},{v}) has invalid weight {w!r}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValueError(f"duplicate edge ({u},{v})")
        seen.add(key)
        us.append(u)
        vs.append(v)
        ws.append(w)

    touched = np.zeros(n, dtype=bool)
    if us:
        touched[np.asarray(us)] = True
        touched[np.asarray(vs)] = True
    lonely = np.nonzero(~touched)[0]

    src = np.concatenate([us, vs, lonely]).astype(np.int64)
    dst = np.concatenate([vs, us, lonely]).astype(np.int64)
    val = np.concatenate([ws, ws, np.ones(lonely.size)]).astype(np.float64)
    return from_arrays(n, src, dst, val)


def from_arrays(n: int, src: np.ndarray, dst: np.ndarray, val: np.ndarray) -> Graph:
    """CSR assembly from directed entry arrays (both directions present)."""
    order = np.lexsort((dst, src))
    src, dst, val = src[order], dst[order], val[order]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.add.at(offsets, src + 1, 1)
    offsets = np.cumsum(offsets)
    return Graph(n=n, row_offsets=offsets, col_ids=dst, weights=val)


def make_cyclic(m: int) -> Graph:
    """Unweighted cycle v_0 ~ v_1 ~ ... ~ v_{m-1} ~ v_0; all degrees 2."""
    if m < 3:
        raise ValueError(f"cycle needs at least 3 nodes, got {m}")
    return build_graph(m, [(i, (i + 1) % m, 1.0) for i in range(m)])


def make_bipartite_regular(part_size: int, beta: int) -> Graph:
    """Circulant beta-regular bipartite graph on 2*part_size nodes.

    Part A is nodes 0..part_size-1, part B the rest; A_i connects to
    B_{(i+j) mod part_size} for j = 0..beta-1.
    """
    if not (1 <= beta <= part_size):
        raise ValueError(f"need 1 <= beta <= part_size, got beta={beta}, part_size={part_size}")
    edges = [
        (i, part_size + (i + j) % part_size, 1.0)
        for i in range(part_size)
        for j in range(beta)
    ]
    return build_graph(2 * part_size, edges)


def make_chained_cycles(lengths, close_chain: bool = False) -> Graph:
    """Cycles in index order, consecutive ones joined by a single bottleneck edge.

    Each cycle occupies a consecutive index block, ring-wired in order. The
    bottleneck leaving cycle i departs from its node at ring position
    floor(len_i / 2) and arrives at ring position 0 of cycle i+1, so interior
    cycles carry their two degree-3 nodes at maximal shortest-path distance
    (for odd lengths the lower-index candidate is used). With close_chain the
    last cycle is also joined back to the first.
    """
    lengths = [int(m) for m in lengths]
    if len(lengths) < 2:
        raise ValueError("need at least 2 cycles")
    if any(m < 3 for m in lengths):
        raise ValueError(f"every cycle length must be >= 3, got {lengths}")

    edges = []
    starts = np.concatenate([[0], np.cumsum(lengths)])
    for c, m in enumerate(lengths):
        base = int(starts[c])
        edges.extend((base + i, base + (i + 1) % m, 1.0) for i in range(m))
    n_cycles = len(lengths)
    links = n_cycles if close_chain else n_cycles - 1
    for c in range(links):
        exit_node = int(starts[c]) + lengths[c] // 2
        entry_node = int(starts[(c + 1) % n_cycles])
        edges.append((exit_node, entry_node, 1.0))
    return build_graph(int(starts[-1]), edges)


def chained_cycle_blocks(lengths) -> list[np.ndarray]:
    """Node-index blocks per cycle for a graph built by make_chained_cycles."""
    starts = np.concatenate([[0], np.cumsum([int(m) for m in lengths])])
    return [np.arange(starts[c], starts[c + 1]) for c in range(len(lengths))]


def two_coloring_bfs(g: Graph) -> np.ndarray | None:
    """Proper 2-coloring by BFS, or None if the graph is not bipartite.

    Self-loops make a graph non-bipartite.
    """
    color = np.full(g.n, -1, dtype=np.int64)
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = [s]
        while queue:
            u = queue.pop()
            for v in g.neighbors(u):
                v = int(v)
                if v == u:
                    return None
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return None
    return color


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Unweighted shortest-path distances from source (-1 where unreachable)."""
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.neighbors(u):
                v = int(v)
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist
