"""Walk through one protocol run on a random dense graph.

Run with ``python3 demos/dirac_cycle.py``.
"""

from hamcongest import gen_random_dirac, run, verify_hamiltonian
from hamcongest.congest import bit_budget

n, seed = 96, 3
g = gen_random_dirac(n, 0.0, seed)
print(f"graph: n={n}, m={g.m}, min degree {g.min_degree()} (needs >= {n / 2})")

res = run(g, seed, instrument=True)

# the initial cover comes from two maximal matchings, so paths are short
print("initial path sizes:", sorted(set(res.initial_path_sizes)))
print("paths after each iteration:", res.cover_sizes)

for i, s in enumerate(res.samples):
    print(f"  iteration {i}: {s['before']} paths, {s['good']} good, "
          f"{s['good_hit']} of them reserved, {s['picked']} picked -> {s['after']}")

ok, why = verify_hamiltonian(g, res.cycle, True)
print(f"cycle valid: {ok} {why}")
print(f"CONGEST rounds {res.congest_rounds}, messages {res.total_messages}, "
      f"peak {res.peak_message_bits} bits of {bit_budget(n)} allowed")
