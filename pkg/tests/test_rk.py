import pytest
from hypothesis import given, settings, strategies as st

from hamcongest.graph import (
    RkShape,
    from_edge_list,
    gen_ore_non_dirac,
    gen_random_dirac,
    gen_rk_non_ore,
)
from hamcongest.harness import rk_shape_for
from hamcongest.oracle import verify_hamiltonian
from hamcongest.rk import (
    RkStructureError,
    check_rk_invariants,
    classify_rk,
    endgame_case,
    run_rk,
    solve_d_nonempty,
)

D_SHAPES = [RkShape(3, 1, 2, 1), RkShape(5, 1, 3, 2), RkShape(10, 1, 10, 5), RkShape(25, 1, 25, 12)]


def test_dirac_has_no_light_vertex():
    cls = classify_rk(gen_random_dirac(12, 0.0, 0))
    assert cls.v_star is None


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 30), st.integers(0, 10**4))
def test_classification_invariants(n, seed):
    g = gen_rk_non_ore(rk_shape_for(n), seed)
    cls = classify_rk(g)
    assert cls.v_star == min(v for v in range(n) if 2 * g.degree(v) < n)
    assert all(0 <= layer <= 4 for layer in cls.layer)
    assert all(2 * g.degree(b) >= n - 1 for b in cls.members("B"))


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 40), st.integers(0, 10**4))
def test_ore_inputs_give_cycles(n, seed):
    g = gen_ore_non_dirac(n, seed)
    res = run_rk(g, seed)
    assert res.graph_class == "ore"
    assert res.cycle is not None and verify_hamiltonian(g, res.cycle, True)[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 40), st.integers(0, 10**4))
def test_rk_inputs_give_paths(n, seed):
    g = gen_rk_non_ore(rk_shape_for(n), seed)
    res = run_rk(g, seed)
    assert res.success, res.failure
    assert verify_hamiltonian(g, res.path, False)[0]
    if res.cycle is not None:
        assert verify_hamiltonian(g, res.cycle, True)[0]


@pytest.mark.parametrize("shape", D_SHAPES)
def test_d_nonempty_rounds_constant(shape):
    rounds = set()
    for seed in range(6):
        g = gen_rk_non_ore(shape, seed)
        cls = classify_rk(g)
        if not cls.d_nonempty:
            continue
        path, _ = solve_d_nonempty(g, seed)
        assert verify_hamiltonian(g, path, False)[0]
        res = run_rk(g, seed)
        assert res.d_nonempty and res.success
        rounds.add(res.congest_rounds)
    assert len(rounds) <= 1


def test_solve_d_nonempty_requires_d():
    g = gen_ore_non_dirac(9, 0)
    with pytest.raises(ValueError):
        solve_d_nonempty(g)


def test_invariant_violation_is_reported():
    # a path on 6 vertices is not RK; the light end sees a 5-hop layer
    g = from_edge_list(6, [(i, i + 1) for i in range(5)])
    with pytest.raises(RkStructureError):
        check_rk_invariants(g, classify_rk(g))


def test_run_rk_rejects_non_rk():
    with pytest.raises(ValueError):
        run_rk(from_edge_list(6, [(i, i + 1) for i in range(5)]))


def test_dirac_routed_through_run_rk():
    g = gen_random_dirac(20, 0.0, 3)
    res = run_rk(g, 3)
    assert res.graph_class == "dirac" and verify_hamiltonian(g, res.cycle, True)[0]


def test_endgame_cases():
    k4 = from_edge_list(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)])
    assert endgame_case(k4, (0, 1), (2, 3)) == "concatenation"
    # ends of P see the two ends of a Q edge but no Q endpoint
    g = from_edge_list(6, [(0, 1), (2, 3), (3, 4), (4, 5), (0, 3), (1, 4)])
    assert endgame_case(g, (0, 1), (2, 3, 4, 5)) == "elementary"
    with pytest.raises(RkStructureError):
        endgame_case(from_edge_list(4, [(0, 1), (2, 3)]), (0, 1), (2, 3))


@pytest.mark.parametrize("n", [16, 31, 48])
def test_drain_leaves_at_most_two_light_paths(n):
    from hamcongest.rk import RkProtocolRun, _classify_on

    for seed in range(3):
        g = gen_rk_non_ore(rk_shape_for(n), seed)
        pr = RkProtocolRun(g, seed)
        _classify_on(pr.engine)
        pr.setup()
        pr.drain()
        light = [p for p in pr.view().paths
                 if not (pr.states[p[0]].heavy and pr.states[p[-1]].heavy)]
        assert len(light) <= 2
