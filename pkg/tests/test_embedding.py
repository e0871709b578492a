import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rydqubo.embedding import (UnitDiskGraph, Vertex, distance_matrix, edges, embed,
                               intended_conflict_graph, stress_layout, vertex_weights)
from rydqubo.qubo import QuboMatrix, decompose, random_instance

R = 7.5


def graph(points, r=1.0, weights=None):
    weights = weights or [1.0] * len(points)
    return UnitDiskGraph([Vertex(i, x, y, w) for i, ((x, y), w) in enumerate(zip(points, weights))], r)


@pytest.mark.parametrize("J, expected", [
    ([[0, 5], [5, 0]], {(0, 1)}),
    ([[0, 0], [0, 0]], set()),
    ([[0, -3], [-3, 0]], set()),
])
def test_conflict_graph_examples(J, expected):
    assert intended_conflict_graph(decompose(QuboMatrix(J)), theta=1.0) == expected


def test_conflict_graph_needs_positive_theta():
    with pytest.raises(ValueError):
        intended_conflict_graph(decompose(QuboMatrix([[0, 1], [1, 0]])), 0.0)


def test_edges_inclusive_at_radius():
    assert edges(graph([(0, 0), (1.0, 0)])) == {(0, 1)}
    assert edges(graph([(0, 0), (1.001, 0)])) == set()


def test_edges_collinear():
    assert edges(graph([(0, 0), (0.9, 0), (1.8, 0)])) == {(0, 1), (1, 2)}


def test_edges_use_vertex_ids():
    g = UnitDiskGraph([Vertex(10, 0, 0, 1), Vertex(3, 0.5, 0, 1)], 1.0)
    assert edges(g) == {(3, 10)}


def test_vertex_rejects_nonpositive_weight():
    with pytest.raises(ValueError):
        Vertex(0, 0, 0, 0.0)


def test_duplicate_ids_rejected():
    with pytest.raises(ValueError):
        UnitDiskGraph([Vertex(1, 0, 0, 1), Vertex(1, 5, 5, 1)], 1.0)


def test_embed_single_variable():
    g, rep = embed(QuboMatrix([[-3.0]]), R, theta=1.0, seed=0)
    v = g.vertices[0]
    assert (v.x, v.y) == (0.0, 0.0)
    assert v.weight > 0
    assert rep.edge_fidelity == 1.0


def test_embed_conflicting_pair():
    g, rep = embed(QuboMatrix([[-1, 5], [5, -2]]), R, theta=1.0, seed=0)
    assert distance_matrix(g.coords)[0, 1] <= R
    assert g.vertices[1].weight > g.vertices[0].weight
    assert (rep.intended_edges, rep.realized_edges, rep.spurious_edges) == (1, 1, 0)


@pytest.mark.parametrize("seed", range(5))
def test_embed_uncoupled_pair_is_separated(seed):
    g, _ = embed(QuboMatrix([[-1, 0], [0, -2]]), R, theta=1.0, seed=seed)
    assert distance_matrix(g.coords)[0, 1] > R


@given(st.lists(st.integers(-2000, 2000), min_size=1, max_size=12))
def test_weights_positive_and_order_reversing(ticks):
    h = np.array(ticks) / 40.0
    w = vertex_weights(h)
    assert np.all(w > 0)
    for i in range(h.size):
        for j in range(h.size):
            if h[i] < h[j]:
                assert w[i] > w[j]


def conflict_qubo(n, pairs):
    Q = -np.eye(n)
    for a, b in pairs:
        Q[a, b] = Q[b, a] = 1.0
    return QuboMatrix(Q)


@pytest.mark.parametrize("pairs, n", [
    ([(i, i + 1) for i in range(5)], 6),               # path
    ([(i, (i + 1) % 6) for i in range(6)], 6),         # hexagon
    ([(0, 1), (1, 2), (2, 3), (3, 0)], 4),             # square
    ([(0, 1), (1, 2), (2, 0)], 3),                     # triangle
])
def test_realizable_conflict_graphs_embed_exactly(pairs, n):
    reports = [embed(conflict_qubo(n, pairs), R, theta=0.5, seed=s)[1] for s in range(10)]
    assert any(r.edge_fidelity == 1.0 and r.spurious_edges == 0 for r in reports)


def test_report_consistency():
    for seed in range(5):
        q = random_instance(12, 0.4, seed)
        g, rep = embed(q, R, seed=seed)
        conflicts = intended_conflict_graph(decompose(q), 0.1 * np.abs(decompose(q).J).max())
        assert rep.intended_edges == len(conflicts)
        assert rep.realized_edges == len(conflicts & edges(g))
        assert rep.spurious_edges == len(edges(g) - conflicts)
        assert rep.edge_fidelity == rep.realized_edges / max(rep.intended_edges, 1)


def test_embed_deterministic():
    q = random_instance(9, 0.5, 4)
    a, ra = embed(q, R, seed=3)
    b, rb = embed(q, R, seed=3)
    assert np.array_equal(a.coords, b.coords) and ra == rb


def test_stress_layout_recovers_equilateral_triangle():
    D = np.full((3, 3), 2.0)
    np.fill_diagonal(D, 0)
    d = distance_matrix(stress_layout(D, seed=1))
    assert np.allclose(d[np.triu_indices(3, 1)], 2.0, atol=1e-4)


def test_stress_layout_recovers_planar_distances(rng):
    pts = rng.uniform(0, 10, (8, 2))
    d = distance_matrix(stress_layout(distance_matrix(pts), seed=0))
    assert np.allclose(d, distance_matrix(pts), atol=1e-3)


def test_text_round_trip(tmp_path):
    g, _ = embed(random_instance(5, 0.5, 1), R, seed=2)
    g.save(tmp_path / "g.txt")
    first = (tmp_path / "g.txt").read_text().splitlines()[0].split()
    assert first == ["5", repr(R)]
    h = UnitDiskGraph.load(tmp_path / "g.txt")
    assert np.array_equal(h.coords, g.coords) and np.array_equal(h.weights, g.weights)
