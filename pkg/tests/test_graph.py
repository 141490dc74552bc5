import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sgembed.graph import (
    ADDED_EDGE_LABEL,
    Graphlet,
    GraphError,
    build_graph,
    components,
    degree_sequence,
    induced_edge_subgraph,
    is_connected,
    perturb_edges,
)

from oracles import connected_graphs, cycle_graph, labelled_graphs, path_graph


def test_build_triangle():
    g = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert g.n == 3 and g.edges == ((0, 1), (0, 2), (1, 2))
    assert degree_sequence(g) == [2, 2, 2]


def test_build_single_edge():
    g = build_graph(2, [(1, 0)])
    assert g.edges == ((0, 1),)
    assert g.has_edge(1, 0)


@pytest.mark.parametrize(
    "n, edges, msg",
    [
        (3, [(0, 0)], "self-loop"),
        (3, [(0, 1), (1, 0)], "duplicate"),
        (3, [(0, 3)], "out of range"),
        (-1, [], "negative"),
    ],
)
def test_build_rejects(n, edges, msg):
    with pytest.raises(GraphError, match=msg):
        build_graph(n, edges)


def test_label_validation():
    with pytest.raises(GraphError):
        build_graph(2, [(0, 1)], node_labels=[1])
    with pytest.raises(GraphError):
        build_graph(2, [(0, 1)], edge_labels=[1, 2])
    with pytest.raises(GraphError):
        build_graph(3, [(0, 1)], node_labels={0: 1, 1: 2})


def test_edge_labels_follow_their_edge():
    g = build_graph(3, [(2, 1), (0, 1)], edge_labels=[7, 8])
    assert g.edge_label(1, 2) == 7 and g.edge_label(0, 1) == 8
    g2 = build_graph(3, [(2, 1), (0, 1)], edge_labels={(1, 2): 7, (1, 0): 8})
    assert g == g2


def test_is_connected_examples():
    assert is_connected(build_graph(3, [(0, 1), (1, 2), (0, 2)]))
    assert not is_connected(build_graph(4, [(0, 1), (2, 3)]))
    assert is_connected(build_graph(1, []))
    assert is_connected(build_graph(0, []))


def test_degree_sequence_path():
    assert degree_sequence(path_graph(3)) == [1, 1, 2]


def test_graphlet_views():
    g = cycle_graph(5)
    gl = Graphlet(g, frozenset({0, 1}))
    assert gl.num_edges == 2
    assert set(gl.nodes) == {x for i in gl.edge_ids for x in g.edges[i]}
    assert is_connected(gl)
    assert Graphlet(g, frozenset(), root=3).nodes == (3,)


def test_induced_edge_subgraph_keeps_labels():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)], node_labels=[5, 6, 7, 8], edge_labels=[1, 2, 3])
    sub = induced_edge_subgraph(g, [1, 2])
    assert sub.n == 3 and sub.node_labels == (6, 7, 8) and sub.edge_labels == (2, 3)


def test_components():
    g = build_graph(5, [(0, 1), (3, 4)])
    assert components(g) == [[0, 1], [2], [3, 4]]


@given(connected_graphs(max_nodes=9))
def test_degree_sum(g):
    assert sum(degree_sequence(g)) == 2 * g.num_edges
    assert degree_sequence(g) == sorted(degree_sequence(g))


@given(labelled_graphs(), st.randoms(use_true_random=False))
def test_relabel_roundtrip(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = g.relabel(perm)
    inv = [0] * g.n
    for i, p in enumerate(perm):
        inv[p] = i
    assert h.relabel(inv) == g
    assert degree_sequence(h) == degree_sequence(g)


def _ten_edge_graph():
    return build_graph(8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 0), (0, 4), (2, 6)])


def test_perturb_identity():
    g = _ten_edge_graph()
    assert perturb_edges(g, 1.0, 3) == g


def test_perturb_delete():
    g = _ten_edge_graph()
    h = perturb_edges(g, 0.8, 0)
    assert h.num_edges == 8 and set(h.edges) <= set(g.edges)


def test_perturb_add():
    g = _ten_edge_graph()
    h = perturb_edges(g, 1.4, 0)
    assert h.num_edges == 14 and set(g.edges) <= set(h.edges)


def test_perturb_half_rounds_up():
    g = build_graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])
    # (1 - 0.9) * 5 = 0.5 -> one edge removed
    assert perturb_edges(g, 0.9, 0).num_edges == 4


def test_perturb_not_enough_room():
    g = build_graph(3, [(0, 1), (1, 2)])
    with pytest.raises(GraphError):
        perturb_edges(g, 2.0, 0)
    with pytest.raises(GraphError):
        perturb_edges(g, 0.0, 0)


def test_perturb_labels():
    g = build_graph(5, [(0, 1), (1, 2)], node_labels=[1, 2, 3, 4, 5], edge_labels=[9, 9])
    h = perturb_edges(g, 2.0, 1)
    assert h.node_labels == g.node_labels
    added = [lab for e, lab in zip(h.edges, h.edge_labels) if e not in g.edges]
    assert added == [ADDED_EDGE_LABEL, ADDED_EDGE_LABEL]


@given(connected_graphs(max_nodes=9, min_nodes=3), st.sampled_from([0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4]), st.integers(0, 2**32))
def test_perturb_properties(g, tau, seed):
    m = g.num_edges
    target = int(np.floor(tau * m + 0.5 + 1e-9))
    free = g.n * (g.n - 1) // 2 - m
    if target - m > free:
        with pytest.raises(GraphError):
            perturb_edges(g, tau, seed)
        return
    h = perturb_edges(g, tau, seed)
    assert h.num_edges == target
    if tau <= 1:
        assert set(h.edges) <= set(g.edges)
    else:
        assert set(g.edges) <= set(h.edges)
    assert perturb_edges(g, tau, seed) == h
