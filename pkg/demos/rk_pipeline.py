"""Sparser inputs: an Ore graph gets a cycle, an RK graph gets a path."""

from hamcongest import classify, classify_rk, gen_ore_non_dirac, gen_rk_non_ore, run_rk, verify_hamiltonian
from hamcongest.graph import RkShape

g = gen_ore_non_dirac(30, 1)
rep = classify(g)
print(f"ore graph: dirac={rep.is_dirac} ore={rep.is_ore} min degree {rep.min_degree}")
res = run_rk(g, 1)
print("  cycle valid:", verify_hamiltonian(g, res.cycle, True)[0], "iterations", res.iterations)

g = gen_rk_non_ore(RkShape(10, 4, 11), 2)
cls = classify_rk(g)
print("rk graph: light root", cls.v_star, "layer sizes",
      {k: len(cls.members(k)) for k in "ABCD"})
res = run_rk(g, 2)
print("  path valid:", verify_hamiltonian(g, res.path, False)[0],
      "closed into a cycle:", res.cycle is not None,
      "paths drained:", res.drained_paths)

# far layer present: a fixed number of rounds whatever n is
for shape in (RkShape(3, 1, 2, 1), RkShape(12, 1, 11, 7)):
    for seed in range(40):
        g = gen_rk_non_ore(shape, seed)
        if classify_rk(g).d_nonempty:
            res = run_rk(g, seed)
            print(f"n={g.n}: far layer present, path in {res.congest_rounds} rounds")
            break
