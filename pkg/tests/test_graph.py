import numpy as np
import pytest

from irgcouple.graph import (EmptyAverage, GraphError, OutOfRangeVertex, SelfLoop, add_edge,
                             add_isolated_vertices, average_distance, complete_graph,
                             connected_components, cycle_graph, degree_sequence, empty_graph,
                             format_edge_list, induced_subgraph, is_edge_subgraph, new_graph,
                             parse_edge_list, path_graph, petersen_graph, read_edge_list,
                             vertex_subset, write_edge_list)


def test_construction_normalizes():
    g = new_graph(4, [(3, 1), (1, 3), (2, 4), (1, 2)])
    assert g.edges == [(1, 2), (1, 3), (2, 4)]
    assert g.m == 3
    assert g.has_edge(3, 1) and not g.has_edge(3, 4)
    assert g.neighbors(1) == [2, 3]


@pytest.mark.parametrize("edges,exc", [([(1, 5)], OutOfRangeVertex), ([(0, 1)], OutOfRangeVertex),
                                       ([(2, 2)], SelfLoop)])
def test_construction_errors(edges, exc):
    with pytest.raises(exc):
        new_graph(4, edges)


def test_named_graphs():
    p = petersen_graph()
    assert (p.n, p.m) == (10, 15)
    assert set(degree_sequence(p)) == {3}
    assert complete_graph(5).m == 10
    assert cycle_graph(6).m == 6
    assert path_graph(1).m == 0
    assert empty_graph(3).m == 0


def test_partial_order():
    g = path_graph(4)
    h = add_edge(g, 1, 4)
    assert is_edge_subgraph(g, h)
    assert not is_edge_subgraph(h, g)
    assert is_edge_subgraph(g, g)
    assert is_edge_subgraph(empty_graph(4), g)
    assert not is_edge_subgraph(g, complete_graph(5))  # vertex sets differ
    assert not is_edge_subgraph(new_graph(4, [(1, 3)]), g)


def test_add_isolated_and_induced():
    g = add_isolated_vertices(complete_graph(3), 2)
    assert (g.n, g.m) == (5, 3)
    assert connected_components(g) == [(1, 2, 3), (4,), (5,)]
    sub = induced_subgraph(petersen_graph(), [1, 2, 3, 6])
    assert sub.n == 4 and sub.edges == [(1, 2), (1, 4), (2, 3)]
    assert vertex_subset([3, 1, 3], 4) == (1, 3)
    with pytest.raises(OutOfRangeVertex):
        vertex_subset([5], 4)
    with pytest.raises(GraphError):
        add_isolated_vertices(g, -1)


def test_average_distance():
    assert average_distance(path_graph(3)) == pytest.approx(4 / 3)
    assert average_distance(complete_graph(4)) == 1.0
    # pairs in different components are ignored
    assert average_distance(new_graph(4, [(1, 2), (3, 4)])) == 1.0
    # the Petersen graph has diameter 2: 15 pairs at distance 1, 30 at 2
    assert average_distance(petersen_graph()) == pytest.approx(75 / 45)
    with pytest.raises(EmptyAverage):
        average_distance(empty_graph(5))


def test_edge_list_round_trip(tmp_path):
    g = petersen_graph()
    path = tmp_path / "g.el"
    write_edge_list(g, path)
    assert read_edge_list(path) == g
    assert path.read_bytes().count(b"\r") == 0
    assert format_edge_list(empty_graph(3)) == "3 0\n"
    assert parse_edge_list("3 0\n") == empty_graph(3)


@pytest.mark.parametrize("text", ["", "3\n", "3 2\n1 2\n", "3 1\n1 2 3\n", "3 1\n1 4\n"])
def test_edge_list_errors(text):
    with pytest.raises(GraphError):
        parse_edge_list(text)


def test_hash_and_eq():
    a = new_graph(3, [(1, 2)])
    b = new_graph(3, [(2, 1)])
    assert a == b and hash(a) == hash(b)
    assert a != new_graph(4, [(1, 2)])
    assert np.array_equal(a.edge_array, [[1, 2]])
