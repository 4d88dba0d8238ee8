"""Distributed Hamiltonian cycles in dense graphs, on a simulated CONGEST network."""

from .congest import RoundEngine, bit_budget, derive_randomness, run_rounds
from .graph import (
    Graph,
    classify,
    from_edge_list,
    gen_ore_non_dirac,
    gen_random_dirac,
    gen_rk_non_ore,
    gen_two_cliques_matching,
    RkShape,
)
from .oracle import PathCoverView, brute_force_hamiltonian, verify_hamiltonian
from .pathcover import HamResult, run
from .rk import classify_rk, run_rk, solve_d_nonempty

__all__ = [
    "Graph",
    "HamResult",
    "PathCoverView",
    "RkShape",
    "RoundEngine",
    "bit_budget",
    "brute_force_hamiltonian",
    "classify",
    "classify_rk",
    "derive_randomness",
    "from_edge_list",
    "gen_ore_non_dirac",
    "gen_random_dirac",
    "gen_rk_non_ore",
    "gen_two_cliques_matching",
    "run",
    "run_rk",
    "run_rounds",
    "solve_d_nonempty",
    "verify_hamiltonian",
]
