"""Metric graphs: condition counting, spectra, flux balance, and JSON IO.

Two exact identities anchor the discretization: the Dirichlet interval
reproduces the closed-form tridiagonal spectrum, and a path with a
degree-2 Kirchhoff vertex assembles the very same operator as the merged
interval (transparency), so their eigenvalues agree to roundoff.
"""

import numpy as np
import pytest

from branchedq import (Edge, FluxBalanceError, GraphLayout, HalfLine,
                       MetricGraph, VertexCondition, box_graph, compton_graph,
                       count_conditions, dump_graph, graph_hamiltonian,
                       load_graph, node_flux, solve_eigensystem, star_graph,
                       star_secular_spectrum)
from branchedq.graphs import graph_from_mapping, graph_to_mapping


def _interval(length=np.pi):
    return MetricGraph(
        ["a", "b"], [Edge("a", "b", length)],
        conditions={"a": VertexCondition("dirichlet"),
                    "b": VertexCondition("dirichlet")})


def test_condition_counting_frozen():
    assert count_conditions(compton_graph()) == (6, 4, 10, 10)
    assert count_conditions(box_graph()) == (12, 4, 16, 16)
    assert count_conditions(_interval()) == (2, 0, 2, 2)
    assert count_conditions(star_graph(3, 1.0)) == (6, 0, 6, 6)
    assert count_conditions(MetricGraph([], free_lines=1)) == (0, 2, 2, 2)


def test_counting_matches_constants_on_random_graphs():
    rng = np.random.default_rng(20260814)
    for _ in range(50):
        nv = int(rng.integers(1, 7))
        ids = list(range(nv))
        edges = []
        if nv >= 2:
            for _ in range(int(rng.integers(0, 8))):
                u, v = rng.choice(nv, size=2, replace=False)
                edges.append(Edge(int(u), int(v), float(rng.uniform(0.5, 2.0))))
        half = [HalfLine(int(rng.integers(0, nv)))
                for _ in range(int(rng.integers(0, 4)))]
        g = MetricGraph(ids, edges, half, free_lines=int(rng.integers(0, 3)))
        node, infinity, total, constants = count_conditions(g)
        assert total == node + infinity
        assert total == constants


def test_interval_spectrum_closed_form():
    n = 40
    op = graph_hamiltonian(_interval(np.pi), n)
    assert op.matrix.dtype == np.float64
    res = solve_eigensystem(op)
    h = np.pi / n
    m = np.arange(1, n)
    exact = (2.0 - 2.0 * np.cos(m * np.pi / n)) / h**2
    assert np.max(np.abs(res.eigenvalues - exact)) < 1e-10 * exact[-1]


def test_degree_two_kirchhoff_is_transparent():
    path = MetricGraph(
        ["a", "m", "b"],
        [Edge("a", "m", 0.5), Edge("m", "b", 0.5)],
        conditions={"a": VertexCondition("dirichlet"),
                    "b": VertexCondition("dirichlet")})
    merged = _interval(1.0)
    ep = solve_eigensystem(graph_hamiltonian(path, 30)).eigenvalues
    em = solve_eigensystem(graph_hamiltonian(merged, 60)).eigenvalues
    assert ep.size == em.size
    assert np.max(np.abs(ep - em)) < 1e-9 * max(1.0, np.max(np.abs(em)))


def test_star_spectrum_against_secular_oracle():
    graph = star_graph(3, 1.0)
    op = graph_hamiltonian(graph, 300)
    res = solve_eigensystem(op, k=6)
    ks = star_secular_spectrum(3, 1.0, 7.0)
    # pi/2, pi, pi, 3pi/2, 2pi, 2pi with the sin modes doubly degenerate
    assert np.allclose(ks, [np.pi / 2, np.pi, np.pi,
                            1.5 * np.pi, 2 * np.pi, 2 * np.pi], atol=1e-9)
    exact = np.square(ks)
    assert np.max(np.abs(res.eigenvalues - exact)) < 5e-3 * exact[-1]
    # discrete symmetry keeps the degenerate pairs exactly paired
    assert abs(res.eigenvalues[1] - res.eigenvalues[2]) < 1e-9
    assert abs(res.eigenvalues[4] - res.eigenvalues[5]) < 1e-9


def test_node_flux_vanishes_on_eigenstates():
    graph = star_graph(3, 1.0)
    op = graph_hamiltonian(graph, 200)
    res = solve_eigensystem(op, k=4)
    for i in range(4):
        psi = res.eigenvectors[:, i]
        scale = np.sqrt(res.eigenvalues[i])
        assert abs(node_flux(psi, "c", op)) < 1e-5 * max(scale, 1.0)


def test_half_line_graphs_need_truncation():
    with pytest.raises(ValueError):
        graph_hamiltonian(compton_graph(), 20)
    op = graph_hamiltonian(compton_graph(), 20, truncation=6.0)
    H = op.matrix
    assert np.max(np.abs(H - H.conj().T)) < 1e-12 * np.max(np.abs(H))


def test_drift_requires_flux_balance():
    lop = MetricGraph(
        ["a", "c", "b"],
        [Edge("a", "c", 1.0, 1.0, 0.7), Edge("c", "b", 1.0, 1.0, -0.7)],
        conditions={"a": VertexCondition("dirichlet"),
                    "b": VertexCondition("dirichlet")})
    op = graph_hamiltonian(lop, 40)
    assert op.matrix.dtype == complex
    H = op.matrix
    assert np.max(np.abs(H - H.conj().T)) < 1e-13 * np.max(np.abs(H))

    with pytest.raises(FluxBalanceError):
        graph_hamiltonian(star_graph(3, 1.0, beta=0.5), 40)


def test_weighted_matching_with_balanced_drift():
    """beta = (1, 1, -1) with kappa = (1, 1, sqrt(2)) balances exactly."""
    kappa = (1.0, 1.0, np.sqrt(2.0))
    graph = MetricGraph(
        ["c", "t0", "t1", "t2"],
        [Edge("c", f"t{i}", 1.0, 1.0, b) for i, b in enumerate((1.0, 1.0, -1.0))],
        conditions={"c": VertexCondition("weighted", kappa),
                    "t0": VertexCondition("dirichlet"),
                    "t1": VertexCondition("dirichlet"),
                    "t2": VertexCondition("dirichlet")})
    op = graph_hamiltonian(graph, 60)
    H = op.matrix
    assert np.max(np.abs(H - H.conj().T)) < 1e-12 * np.max(np.abs(H))


def test_vertex_condition_validation():
    with pytest.raises(ValueError):
        VertexCondition("weighted")          # needs kappa
    with pytest.raises(ValueError):
        VertexCondition("kirchhoff", kappa=(1.0, 2.0))
    with pytest.raises(ValueError):
        MetricGraph(["a", "a"])
    with pytest.raises(ValueError):
        MetricGraph(["a"], [Edge("a", "zzz", 1.0)])
    with pytest.raises(ValueError):
        MetricGraph(["a"], [Edge("a", "a", 1.0)])
    with pytest.raises(ValueError):
        MetricGraph(["a", "b"], [Edge("a", "b", -1.0)])


def test_layout_rejects_free_lines_and_low_resolution():
    with pytest.raises(ValueError):
        GraphLayout(MetricGraph([], free_lines=1), 20)
    with pytest.raises(ValueError):
        GraphLayout(_interval(), 4)


def test_json_round_trip(tmp_path):
    graph = compton_graph(1.5)
    doc = graph_to_mapping(graph)
    back = graph_from_mapping(doc)
    assert count_conditions(back) == count_conditions(graph)
    assert [e.length for e in back.edges] == [1.5]
    path = tmp_path / "graph.json"
    dump_graph(graph, path)
    again = load_graph(path)
    assert count_conditions(again) == count_conditions(graph)


def test_json_schema_rejects_malformed_documents():
    import jsonschema
    with pytest.raises(jsonschema.ValidationError):
        graph_from_mapping({"version": 1, "vertices": "oops"})


def test_secular_star_needs_two_edges():
    with pytest.raises(ValueError):
        star_secular_spectrum(1, 1.0, 5.0)
