import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hamcongest.graph import from_edge_list, gen_random_dirac, gen_two_cliques_matching
from hamcongest.oracle import (
    OracleError,
    PathCoverView,
    brute_force_hamiltonian,
    good_paths,
    in_a_set,
    is_cycled_ref,
    is_sociable_ref,
    merge_lower_bound,
    merge_count,
    merge_pair_count,
    verify_cover,
    verify_hamiltonian,
)
from hamcongest.sampling import random_cover, random_path


def complete(n):
    return from_edge_list(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


C4 = from_edge_list(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


def test_brute_force_small_cases():
    cyc = brute_force_hamiltonian(complete(4), True)
    assert verify_hamiltonian(complete(4), cyc, True)[0]
    star = from_edge_list(4, [(0, 1), (0, 2), (0, 3)])
    assert brute_force_hamiltonian(star, False) is None
    with pytest.raises(OracleError):
        brute_force_hamiltonian(complete(13), True)


def test_predicate_examples():
    g = from_edge_list(3, [(0, 1), (1, 2)])
    assert is_cycled_ref(g, [0, 1]) and not is_sociable_ref(g, [0, 1])
    assert not is_cycled_ref(C4, [0, 1, 2]) and is_sociable_ref(C4, [0, 1, 2])
    with pytest.raises(OracleError):
        is_cycled_ref(C4, [0, 2])


def test_merge_count_example():
    # P=(0,1), Q=(2,3) with edges {0,2},{1,3}: elementary via {2,3} plus both ends of Q
    g = from_edge_list(4, [(0, 1), (2, 3), (0, 2), (1, 3)])
    assert merge_pair_count(g, [0, 1], [2, 3]) == 3
    mc = merge_count(g, [[0, 1], [2, 3]])
    assert mc.per_path[0] == mc.pair[(0, 1)]


def test_merge_count_zero_without_crossing_edges():
    g = from_edge_list(4, [(0, 1), (2, 3)])
    assert merge_pair_count(g, [0, 1], [2, 3]) == 0
    assert merge_lower_bound(g, [0, 1], [2, 3]) <= 0
    assert in_a_set(g, [[0, 1], [2, 3]], 0)


def test_verifiers_report_violations():
    g = complete(4)
    assert verify_hamiltonian(g, [0, 1, 2, 3], True) == (True, "")
    assert not verify_hamiltonian(g, [0, 1, 1, 3], False)[0]
    assert not verify_hamiltonian(C4, [0, 2, 1, 3], False)[0]
    assert verify_cover(C4, PathCoverView([(0, 1), (2, 3)]))[0]
    assert not verify_cover(C4, [[0, 1], [1, 2, 3]])[0]


@st.composite
def dirac_instance(draw, lo=4, hi=12):
    n = draw(st.integers(lo, hi))
    return gen_random_dirac(n, draw(st.floats(0, 0.4)), draw(st.integers(0, 10**6))), draw(st.integers(0, 10**6))


@settings(max_examples=200, deadline=None)
@given(dirac_instance())
def test_not_cycled_implies_sociable(inst):
    g, seed = inst
    p = random_path(g, np.random.default_rng(seed))
    if not is_cycled_ref(g, p):
        assert is_sociable_ref(g, p)


@settings(max_examples=200, deadline=None)
@given(dirac_instance())
def test_merge_count_lower_bound(inst):
    g, seed = inst
    cover = random_cover(g, np.random.default_rng(seed), min_size=2)
    for i, p in enumerate(cover):
        for j, q in enumerate(cover):
            if i != j:
                assert merge_pair_count(g, p, q) >= merge_lower_bound(g, p, q)


@settings(max_examples=150, deadline=None)
@given(dirac_instance())
def test_good_paths_have_many_merges(inst):
    g, seed = inst
    cover = random_cover(g, np.random.default_rng(seed), min_size=2)
    if len(cover) < 2 or sum(map(len, cover)) != g.n:
        return
    mc = merge_count(g, cover)
    for i in good_paths(g, cover):
        assert mc.per_path[i] >= len(cover)


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 8), st.integers(0, 10**6))
def test_brute_force_independent_of_search_order(n, seed):
    g = gen_random_dirac(n, 0.0, seed)
    order = list(np.random.default_rng(seed).permutation(n))
    a = brute_force_hamiltonian(g, True)
    b = brute_force_hamiltonian(g, True, start_order=order)
    assert (a is None) == (b is None)
    assert a is not None and verify_hamiltonian(g, b, True)[0]


def test_two_cliques_brute_force():
    g = gen_two_cliques_matching(8)
    assert verify_hamiltonian(g, brute_force_hamiltonian(g, True), True)[0]
