import pytest
from hypothesis import given, settings, strategies as st

from hamcongest.graph import (
    GraphError,
    RkShape,
    bfs_distances,
    classify,
    format_graph,
    from_edge_list,
    gen_ore_non_dirac,
    gen_random_dirac,
    gen_rk_non_ore,
    gen_two_cliques_matching,
    parse_graph,
)


def complete(n):
    return from_edge_list(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@st.composite
def small_graphs(draw, min_n=2, max_n=9):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return from_edge_list(n, [e for e, k in zip(pairs, keep) if k])


def test_k4_is_in_every_class():
    rep = classify(complete(4))
    assert rep.is_dirac and rep.is_ore and rep.is_rk
    assert rep.diameter == 1 and rep.witness is None


def test_path_graph_is_rk_only():
    # P4: 0-1-2-3, pair (0,3) has 1+1+3 = 5 = n+1
    rep = classify(from_edge_list(4, [(0, 1), (1, 2), (2, 3)]))
    assert rep.is_rk and not rep.is_ore
    assert rep.witness is not None


def test_disconnected_reports_witness():
    rep = classify(from_edge_list(4, [(0, 1), (2, 3)]))
    assert not rep.is_rk
    assert rep.witness_reason == "disconnected"
    assert rep.diameter is None


def test_bad_edges_rejected():
    with pytest.raises(GraphError):
        from_edge_list(3, [(0, 0)])
    with pytest.raises(GraphError):
        from_edge_list(3, [(0, 5)])


@settings(max_examples=150, deadline=None)
@given(small_graphs())
def test_class_containment(g):
    rep = classify(g)
    assert not rep.is_dirac or rep.is_ore or g.n < 2
    if rep.is_ore and all(d >= 0 for d in bfs_distances(g, 0)):
        assert rep.is_rk


@settings(max_examples=100, deadline=None)
@given(small_graphs(min_n=3), st.data())
def test_adding_an_edge_keeps_classes(g, data):
    missing = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if not g.has_edge(u, v)]
    if not missing:
        return
    u, v = data.draw(st.sampled_from(missing))
    before, after = classify(g), classify(g.with_edge(u, v))
    assert after.is_dirac >= before.is_dirac
    assert after.is_ore >= before.is_ore
    assert after.is_rk >= before.is_rk


@settings(max_examples=50, deadline=None)
@given(small_graphs())
def test_text_roundtrip(g):
    back = parse_graph(format_graph(g))
    assert back.n == g.n and back.edges() == g.edges()


def test_two_cliques():
    g = gen_two_cliques_matching(8)
    assert g.min_degree() == 4 and classify(g).is_dirac
    with pytest.raises(GraphError):
        gen_two_cliques_matching(7)


@pytest.mark.parametrize("n", [4, 7, 16, 33])
def test_random_dirac_is_dirac(n):
    for seed in range(3):
        g = gen_random_dirac(n, 0.0, seed)
        assert 2 * g.min_degree() >= n


@pytest.mark.parametrize("n", [6, 9, 20])
def test_ore_generator(n):
    rep = classify(gen_ore_non_dirac(n, 1))
    assert rep.is_ore and not rep.is_dirac


def test_rk_generator_small_shape():
    g = gen_rk_non_ore(RkShape(2, 3, 2), 0)
    rep = classify(g)
    assert g.n == 8 and rep.is_rk and not rep.is_ore


def test_rk_generator_reaches_distance_four():
    g = gen_rk_non_ore(RkShape(3, 1, 2, 1), 0)
    assert max(max(bfs_distances(g, s)) for s in range(g.n)) == 4

