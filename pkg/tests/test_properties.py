import random

import networkx as nx
import pytest

from irgcouple.graph import (add_isolated_vertices, complete_graph, cycle_graph, empty_graph,
                             new_graph, path_graph, petersen_graph)
from irgcouple.properties import (SolveBudget, chromatic_number_exact, dsatur_coloring,
                                  greedy_clique, is_clique, is_proper_coloring, is_quasi_clique,
                                  k_colorable, maximum_clique, quasi_clique_number_exact)
from irgcouple.properties.chromatic import chromatic_lower_clique
from irgcouple.properties.quasi_clique import greedy_quasi_clique, induced_edge_count, threshold
from irgcouple.rng import UniformStream
from irgcouple.samplers import sample_er
from conftest import random_graph
from oracles import chromatic_brute, quasi_clique_brute


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(1, g.n + 1))
    h.add_edges_from(g.edges)
    return h


@pytest.mark.parametrize("g,chi,omega", [
    (empty_graph(4), 1, 1),
    (complete_graph(6), 6, 6),
    (path_graph(5), 2, 2),
    (cycle_graph(5), 3, 2),
    (cycle_graph(6), 2, 2),
    (petersen_graph(), 3, 2),
])
def test_named_values(g, chi, omega):
    res = chromatic_number_exact(g)
    assert res.exact and res.value == chi
    assert is_proper_coloring(g, res.certificate) and max(res.certificate) + 1 == chi
    cl = maximum_clique(g)
    assert cl.value == omega and is_clique(g, cl.certificate) and len(cl.certificate) == omega


def test_max_clique_against_networkx(backend):
    rng = random.Random(4)
    for _ in range(40):
        n = rng.randint(1, 40)
        g = random_graph(rng, n, rng.random())
        ref = max(len(c) for c in nx.find_cliques(to_nx(g)))
        res = maximum_clique(g, backend=backend)
        assert res.value == ref
        assert is_clique(g, res.certificate) and len(res.certificate) == ref


def test_max_clique_backends_same_search():
    for t in range(3):
        g = sample_er(120, 0.5, UniformStream(6, t))
        a = maximum_clique(g, backend="numba")
        b = maximum_clique(g, backend="numpy")
        assert (a.value, a.nodes, a.certificate) == (b.value, b.nodes, b.certificate)


def test_max_clique_budget_bracket():
    g = sample_er(300, 0.5, UniformStream(1))
    res = maximum_clique(g, SolveBudget(node_limit=50))
    assert res.outcome == "lower_upper_only"
    assert res.lower <= maximum_clique(g).value <= res.upper
    assert is_clique(g, res.certificate) and len(res.certificate) == res.lower
    assert "bracket" in res.record() and "value" not in res.record()


def test_chromatic_against_brute_force():
    rng = random.Random(7)
    for _ in range(80):
        g = random_graph(rng, rng.randint(1, 8), rng.random())
        res = chromatic_number_exact(g)
        assert res.value == chromatic_brute(g)
        assert is_proper_coloring(g, res.certificate)


def test_chromatic_sparse_medium():
    # sparse ER at n = 300 with average degree ~ 4 solves quickly via peeling
    g = sample_er(300, 4 / 299, UniformStream(3))
    res = chromatic_number_exact(g)
    assert res.exact and is_proper_coloring(g, res.certificate)
    assert chromatic_lower_clique(g) <= res.value <= max(dsatur_coloring(g)) + 1


def test_chromatic_budget_bracket():
    g = sample_er(70, 0.5, UniformStream(2))
    res = chromatic_number_exact(g, SolveBudget(node_limit=200))
    assert res.outcome == "lower_upper_only" and res.lower < res.upper
    assert is_proper_coloring(g, res.certificate) and max(res.certificate) + 1 == res.upper


def test_bracket_soundness():
    rng = random.Random(11)
    for _ in range(60):
        g = random_graph(rng, rng.randint(2, 12), rng.random())
        chi = chromatic_number_exact(g).value
        greedy = dsatur_coloring(g)
        assert is_proper_coloring(g, greedy)
        assert chromatic_lower_clique(g) <= chi <= max(greedy) + 1


def test_k_colorable():
    assert k_colorable(petersen_graph(), 2) is None
    col = k_colorable(petersen_graph(), 3)
    assert is_proper_coloring(petersen_graph(), col)
    assert k_colorable(empty_graph(0), 1) == []


def test_dsatur_tie_breaking_is_deterministic():
    # vertex index ascending breaks full ties: vertex 1 gets colour 0 first
    col = dsatur_coloring(cycle_graph(4))
    assert col == [0, 1, 0, 1]


@pytest.mark.parametrize("gamma", [0.5, 0.6, 0.75, 0.9, 1.0])
def test_quasi_clique_against_enumeration(gamma):
    rng = random.Random(int(gamma * 100))
    for _ in range(25):
        g = random_graph(rng, rng.randint(1, 10), rng.random())
        res = quasi_clique_number_exact(g, gamma)
        assert res.value == quasi_clique_brute(g, gamma)
        assert len(res.certificate) == res.value and is_quasi_clique(g, res.certificate, gamma)


def test_quasi_clique_real_threshold():
    # the threshold is gamma * C(s, 2) as a real number, no ceiling:
    # a path on 3 vertices has 2 >= 0.6 * 3 = 1.8 edges
    assert threshold(0.6, 3) == pytest.approx(1.8)
    assert is_quasi_clique(path_graph(3), [1, 2, 3], 0.6)
    assert not is_quasi_clique(path_graph(3), [1, 2, 3], 0.7)
    assert induced_edge_count(petersen_graph(), range(1, 6)) == 5


def test_quasi_clique_isolated_vertex_witness():
    tri = complete_graph(3)
    assert quasi_clique_number_exact(tri, 0.5).value == 3
    res = quasi_clique_number_exact(add_isolated_vertices(tri, 1), 0.5)
    assert res.value == 4 and res.certificate == [1, 2, 3, 4]


def test_quasi_clique_greedy_and_budget():
    g = sample_er(30, 0.5, UniformStream(9))
    greedy = greedy_quasi_clique(g, 0.75)
    assert is_quasi_clique(g, greedy, 0.75)
    exact = quasi_clique_number_exact(g, 0.75)
    assert exact.exact and exact.value >= len(greedy)
    cut = quasi_clique_number_exact(g, 0.75, SolveBudget(node_limit=5))
    assert cut.outcome == "lower_upper_only"
    assert cut.lower <= exact.value <= cut.upper
    assert is_quasi_clique(g, cut.certificate, 0.75)


def test_quasi_clique_gamma_one_is_clique():
    g = sample_er(60, 0.5, UniformStream(5))
    assert quasi_clique_number_exact(g, 1.0).value == maximum_clique(g).value
    with pytest.raises(ValueError):
        quasi_clique_number_exact(g, 0.0)


def test_greedy_clique():
    g = new_graph(5, [(1, 2), (2, 3), (1, 3), (3, 4)])
    assert greedy_clique(g) == [1, 2, 3]
