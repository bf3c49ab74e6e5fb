import numpy as np
import pytest

from sgcn.graphs import (
    bfs_distances,
    build_graph,
    chained_cycle_blocks,
    make_bipartite_regular,
    make_chained_cycles,
    make_cyclic,
    two_coloring_bfs,
)

from shared_fixtures import random_graph


def test_build_single_edge_degrees():
    g = build_graph(2, [(0, 1, 1.0)])
    assert g.degrees.tolist() == [1.0, 1.0]
    assert g.num_undirected_edges() == 1


def test_isolated_node_gets_self_loop():
    g = build_graph(3, [(0, 1, 1.0)])
    assert g.degrees.tolist() == [1.0, 1.0, 1.0]
    assert 2 in g.neighbors(2)


def test_duplicate_edge_rejected_with_pair():
    with pytest.raises(ValueError, match=r"duplicate edge \(1,0\)"):
        build_graph(3, [(0, 1, 1.0), (1, 0, 1.0)])


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_bad_weight_rejected(bad):
    with pytest.raises(ValueError, match="invalid weight"):
        build_graph(2, [(0, 1, bad)])


def test_self_loop_input_rejected():
    with pytest.raises(ValueError, match="self-loop"):
        build_graph(2, [(1, 1, 1.0)])


def test_out_of_range_rejected():
    with pytest.raises(ValueError, match="out of range"):
        build_graph(2, [(0, 2, 1.0)])


def test_cyclic_basic():
    g = make_cyclic(4)
    assert np.all(g.degrees == 2)
    assert g.num_undirected_edges() == 4
    with pytest.raises(ValueError):
        make_cyclic(2)


def test_cyclic_matches_chained_cycle_layout():
    # first six nodes of the two-cycle graph ring-wired in index order
    g6 = make_cyclic(6)
    chained = make_chained_cycles([6, 8])
    for u in range(6):
        ring = set(g6.neighbors(u).tolist())
        sub = set(v for v in chained.neighbors(u).tolist() if v < 6)
        assert ring == sub


def test_bipartite_complete_case():
    g = make_bipartite_regular(3, 3)
    assert np.all(g.degrees == 3)
    assert g.num_undirected_edges() == 9
    colors = two_coloring_bfs(g)
    assert colors is not None
    assert len(set(colors[:3])) == 1 and len(set(colors[3:])) == 1


def test_bipartite_beta2_is_cycle():
    # circulant with beta=2 is one cycle through all 2n nodes
    g = make_bipartite_regular(4, 2)
    assert np.all(g.degrees == 2)
    dist = bfs_distances(g, 0)
    assert dist.max() == 4 and np.all(dist >= 0)  # C_8 diameter


@pytest.mark.parametrize("part_size,beta", [(5, 3), (8, 5), (6, 2), (4, 4)])
def test_bipartite_regular_properties(part_size, beta):
    g = make_bipartite_regular(part_size, beta)
    assert np.all(g.degrees == beta)
    colors = two_coloring_bfs(g)
    assert colors is not None
    assert np.all(colors[:part_size] != colors[part_size:])


def test_bipartite_beta_out_of_range():
    with pytest.raises(ValueError):
        make_bipartite_regular(3, 4)
    with pytest.raises(ValueError):
        make_bipartite_regular(3, 0)


def test_chained_cycles_edge_count():
    g = make_chained_cycles([4, 4])
    assert g.n == 8
    assert g.num_undirected_edges() == 9  # 4 + 4 ring edges + 1 bottleneck


def test_chained_cycles_fig_layout():
    g = make_chained_cycles([6, 8])
    assert g.n == 14
    deg = g.degrees
    assert deg[3] == 3 and deg[6] == 3  # the two bottleneck endpoints
    assert int(np.sum(deg == 3)) == 2
    assert 6 in g.neighbors(3)


def test_chained_cycles_degree_multiset():
    lengths = [5, 7, 9, 6]
    g = make_chained_cycles(lengths)
    hubs = int(np.sum(g.degrees == 3))
    assert hubs == 2 * (len(lengths) - 1)
    assert int(np.sum(g.degrees == 2)) == g.n - hubs


def test_chained_cycles_interior_hub_distance():
    # interior cycle of length 7: hubs sit at maximal in-cycle distance 3
    lengths = [7, 7, 7]
    g = make_chained_cycles(lengths)
    blocks = chained_cycle_blocks(lengths)
    mid = blocks[1]
    hub_nodes = [int(u) for u in mid if g.degrees[u] == 3]
    assert len(hub_nodes) == 2
    ring = make_cyclic(7)
    a, b = (int(u - mid[0]) for u in hub_nodes)
    assert bfs_distances(ring, a)[b] == 3


def test_chained_cycles_closed_chain_flag():
    g = make_chained_cycles([7, 7, 7], close_chain=True)
    assert int(np.sum(g.degrees == 3)) == 6  # every cycle now has two hubs
    assert g.num_undirected_edges() == 21 + 3


def test_chained_cycles_rejections():
    with pytest.raises(ValueError):
        make_chained_cycles([6])
    with pytest.raises(ValueError):
        make_chained_cycles([6, 2])


def test_row_sums_match_degrees_and_symmetry(rng):
    for n in (5, 17, 40):
        g = random_graph(rng, n)
        w = g.dense_adjacency()
        assert np.abs(w - w.T).max() == 0.0
        assert np.allclose(w.sum(axis=1), g.degrees)
        assert np.all(g.degrees > 0)
