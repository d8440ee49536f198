import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abmbench.network import (BASELINE_EDGES, EdgeListError, Graph, GraphError, ModelManifest,
                              betweenness_centrality, closeness_centrality, clustering_coefficient,
                              degree_centrality, dream_baseline, dream_expand, dream_footprint,
                              eccentricity_centrality, generate_qudg, matching_index, mean_clustering,
                              read_edge_list, unit_disk_graph, write_edge_list)

import oracles


def path3():
    return Graph.from_edges([("A", "B"), ("B", "C")])


def k3():
    return Graph.from_edges([("A", "B"), ("B", "C"), ("A", "C")])


def test_graph_rejects_self_loops_and_parallel_edges():
    g = Graph()
    with pytest.raises(GraphError):
        g.add_edge("a", "a")
    assert g.add_edge("a", "b") is True
    assert g.add_edge("b", "a") is False
    assert g.number_of_edges() == 1


def test_degree_examples():
    assert degree_centrality(k3(), "A") == 2
    g = Graph()
    g.add_node("z")
    assert degree_centrality(g, "z") == 0
    d = Graph.from_edges([("a", "b"), ("c", "b"), ("b", "d")], directed=True)
    assert degree_centrality(d, "b") == (2, 1)
    with pytest.raises(Exception):
        degree_centrality(k3(), "nope")


def test_clustering_examples():
    assert clustering_coefficient(k3(), "A") == 1
    assert clustering_coefficient(path3(), "B") == 0
    assert clustering_coefficient(path3(), "A") == 0
    assert mean_clustering(k3()) == 1


def test_matching_examples():
    assert matching_index(k3(), "A", "B") == 1
    g = Graph.from_edges([("u", "a"), ("v", "b")])
    assert matching_index(g, "u", "v") == 0
    with pytest.raises(ValueError):
        matching_index(k3(), "A", "A")


def test_eccentricity_and_closeness_examples():
    g = path3()
    assert eccentricity_centrality(g, "B") == 1
    assert eccentricity_centrality(g, "A") == 0.5
    assert closeness_centrality(g, "B") == 2
    assert closeness_centrality(g, "A") == 1.5
    lone = Graph()
    lone.add_node("x")
    assert eccentricity_centrality(lone, "x") == 0


def test_betweenness_examples():
    assert betweenness_centrality(path3()) == {"A": 0, "B": 1, "C": 0}
    assert set(betweenness_centrality(k3()).values()) == {0}


def random_graph(rng, n, p):
    nodes = list(range(n))
    edges = [(i, j) for i, j in itertools.combinations(nodes, 2) if rng.random() < p]
    g = Graph()
    for v in nodes:
        g.add_node(v)
    for e in edges:
        g.add_edge(*e)
    return g, nodes, edges


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 10), st.floats(0.1, 0.9))
def test_measures_match_oracles_property(seed, n, p):
    rng = np.random.default_rng(seed)
    g, nodes, edges = random_graph(rng, n, p)
    idx, d = oracles.floyd(nodes, edges)
    bc = betweenness_centrality(g)
    ref_bc = oracles.betweenness(nodes, edges)
    for v in nodes:
        row = [x for x in d[idx[v]] if x not in (0, math.inf)]
        assert degree_centrality(g, v) == sum(1 for x in d[idx[v]] if x == 1)
        assert clustering_coefficient(g, v) == pytest.approx(float(oracles.clustering(nodes, edges, v)), abs=1e-12)
        assert eccentricity_centrality(g, v) == (1 / max(row) if row else 0)
        assert closeness_centrality(g, v) == pytest.approx(sum(1 / x for x in row), abs=1e-12)
        assert bc[v] == pytest.approx(float(ref_bc[v]), abs=1e-9)
    for u, v in itertools.combinations(nodes, 2):
        assert matching_index(g, u, v) == pytest.approx(float(oracles.matching(nodes, edges, u, v)), abs=1e-12)


def test_qudg_extremes():
    rng = np.random.default_rng(5)
    pts = rng.uniform(0, 4, (40, 2))
    udg = set(unit_disk_graph(pts).edges)
    assert set(generate_qudg(pts, 1.0, 0.3, np.random.default_rng(1)).edges) == udg
    assert set(generate_qudg(pts, 0.6, 1.0, np.random.default_rng(1)).edges) == udg
    sure = set(generate_qudg(pts, 0.6, 0.0, np.random.default_rng(1)).edges)
    for i, j in sure:
        assert np.hypot(*(pts[i] - pts[j])) <= 0.6
    mixed = generate_qudg(pts, 0.6, 0.5, np.random.default_rng(1))
    for i, j in mixed.edges:
        assert np.hypot(*(pts[i] - pts[j])) <= 1.0
    assert sure <= set(mixed.edges) <= udg


def test_qudg_pair_examples():
    g = generate_qudg([(0, 0), (0.5, 0), (2.2, 0)], 0.6, 0.0, np.random.default_rng(0))
    assert g.has_edge(0, 1) and not g.has_edge(1, 2) and not g.has_edge(0, 2)
    with pytest.raises(ValueError):
        generate_qudg([(0, 0)], 0.0, 0.5, np.random.default_rng(0))
    with pytest.raises(ValueError):
        generate_qudg([(0, 0)], 1.5, 0.5, np.random.default_rng(0))


def test_edge_list_round_trip_and_errors():
    text = "".join(f"{u}\t{v}\n" for u, v in BASELINE_EDGES)
    g = read_edge_list(text)
    assert write_edge_list(read_edge_list(write_edge_list(g))) == write_edge_list(g)
    assert len(g) == 18 and g.number_of_edges() == 17
    two = read_edge_list("A\tB\n")
    assert len(two) == 2 and two.number_of_edges() == 1
    dup = read_edge_list("A\tB\nB\tA\n# comment\n\nC\tA\t2.5\n")
    assert dup.number_of_edges() == 2 and dup.weight("A", "C") == 2.5
    with pytest.raises(EdgeListError) as exc:
        read_edge_list("A\tB\njunk line\n")
    assert exc.value.line == 2


def test_dream_baseline_is_tree():
    g = dream_baseline()
    assert len(g) == 18 and g.number_of_edges() == 17 and g.is_connected()
    assert degree_centrality(g, "ABM") == 6


def test_dream_expand_single_breed_and_validation():
    g = dream_expand(ModelManifest(agent_breeds={"Boid": []}))
    assert len(g) == 19 and g.has_edge("Agent-Breeds", "Boid")
    with pytest.raises(ValueError):
        dream_expand(ModelManifest(procedures={"go": "sometimes"}))
    assert len(dream_expand(ModelManifest())) == 18


def test_footprint_columns():
    from abmbench.flocksense import flocksense_manifest
    fp = dream_footprint(flocksense_manifest(), "flocksense")
    assert len(fp.rows) == 46
    assert all(min(r[1:]) >= 0 for r in fp.rows)
    assert fp.argmax("degree") == "Procedures"
    assert fp.argmax("betweenness") == "Procedures"
    assert fp.to_csv().splitlines()[0] == "node,eccentricity_pct,betweenness_pct,degree_pct"
