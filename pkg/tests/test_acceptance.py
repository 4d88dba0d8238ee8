"""Acceptance criteria, one printed PASS/FAIL line each.

The criterion-1 grid (20 seeds, n up to 512, two generators) dominates the
runtime; it is computed once and shared by criteria 1-4 and 10.
"""

import statistics

import numpy as np
import pytest

from hamcongest.congest import bit_budget
from hamcongest.graph import RkShape, gen_ore_non_dirac, gen_random_dirac, gen_rk_non_ore
from hamcongest.harness import dumps, make_graph, rk_shape_for, stats_record, validate_lemmas, verified
from hamcongest.oracle import (
    brute_force_hamiltonian,
    good_paths,
    is_cycled_ref,
    is_sociable_ref,
    merge_lower_bound,
    merge_count,
    merge_pair_count,
    verify_hamiltonian,
)
from hamcongest.pathcover import run
from hamcongest.rk import classify_rk, run_rk
from hamcongest.sampling import random_cover, random_path
from hamcongest.verdicts import distributed_verdicts

SIZES = [16, 32, 64, 128, 256, 512]
SEEDS = 20
GENS = ["random_dirac", "two_cliques"]


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}")
        return ok

    return emit


@pytest.fixture(scope="module")
def grid():
    out = {}
    for gen in GENS:
        for n in SIZES:
            g = make_graph(gen, n, 0)
            for s in range(SEEDS):
                if gen == "random_dirac":
                    g = make_graph(gen, n, s)
                res = run(g, s)
                out[(gen, n, s)] = (res, verified(g, res))
    return out


def test_c1_correctness(grid, report):
    bad = [k for k, (res, ok) in grid.items() if not ok]
    assert report(1, not bad, f"{len(grid) - len(bad)}/{len(grid)} runs gave oracle-verified cycles"), bad


def _fit(xs, ys):
    slope, icpt = np.polyfit(xs, ys, 1)
    pred = slope * np.asarray(xs) + icpt
    ss_res = float(((np.asarray(ys) - pred) ** 2).sum())
    ss_tot = float(((np.asarray(ys) - np.mean(ys)) ** 2).sum())
    return slope, (1 - ss_res / ss_tot) if ss_tot else 1.0


def test_c2_scaling(grid, report):
    logs = [np.log2(n) for n in SIZES]
    lines, ok = [], True
    for gen in GENS:
        med = [statistics.median(grid[(gen, n, s)][0].iterations for s in range(SEEDS)) for n in SIZES]
        slope, r2 = _fit(logs, med)
        ratio_ok = med[-1] / med[0] <= 2 * (logs[-1] / logs[0]) + 1
        ok &= slope >= 0 and r2 >= 0.8 and ratio_ok
        lines.append(f"{gen} medians {med} slope {slope:.2f} R2 {r2:.3f}")
    assert report(2, ok, "; ".join(lines))


def test_c3_initial_cover(grid, report):
    sizes = {s for res, _ in grid.values() for s in res.initial_path_sizes}
    assert report(3, sizes <= {2, 3, 4}, f"initial path sizes seen {sorted(sizes)}")


def test_c4_congest(grid, report):
    worst = max(res.peak_message_bits - bit_budget(res.n) for res, _ in grid.values())
    # edge-direction and budget violations abort a run, so completion means zero violations
    assert report(4, worst <= 0, f"max peak minus budget {worst} bits, no aborted run")


def test_c5_trees(report):
    per_edge = depth = 0
    for n in (32, 64):
        for s in range(5):
            res = run(gen_random_dirac(n, 0.0, s), s, check_trees=True)
            assert res.success
            per_edge = max([per_edge] + [c["max_trees_per_edge"] for c in res.tree_checks])
            depth = max([depth] + [c["max_depth"] for c in res.tree_checks])
    ok = per_edge <= 2 and depth <= 2
    assert report(5, ok, f"max trees per edge {per_edge}, max depth {depth}")


def _small_dirac(rng):
    n = int(rng.integers(4, 13))
    return gen_random_dirac(n, float(rng.random() * 0.4), int(rng.integers(2**31)))


def test_c6_property_suites(report):
    rng = np.random.default_rng(2024)
    bad_pair = bad_good = bad_soc = 0
    for _ in range(10_000):
        g = _small_dirac(rng)
        cover = random_cover(g, rng, min_size=2)
        if len(cover) >= 2:
            p, q = cover[0], cover[1]
            bad_pair += merge_pair_count(g, p, q) < merge_lower_bound(g, p, q)
        p = random_path(g, rng)
        bad_soc += not is_cycled_ref(g, p) and not is_sociable_ref(g, p)
    checked_good = 0
    while checked_good < 10_000:
        g = _small_dirac(rng)
        cover = random_cover(g, rng, min_size=2)
        if len(cover) < 2 or sum(map(len, cover)) != g.n:
            continue
        checked_good += 1
        mc = merge_count(g, cover)
        bad_good += sum(mc.per_path[i] < len(cover) for i in good_paths(g, cover))
    ok = bad_pair == bad_good == bad_soc == 0
    assert report(6, ok, f"counterexamples: pair bound {bad_pair}, good-path bound {bad_good}, cycled/sociable {bad_soc} (1e4 each)")


def test_c7_statistics(report):
    rep = validate_lemmas(1000)
    est = {k: round(v, 4) for k, v in rep.estimates.items()}
    ok = rep.complete and all(rep.verdicts.values())
    assert report(7, ok, f"{rep.samples} samples, estimates {est}")


def test_c8_oracle(report):
    rng = np.random.default_rng(8)
    bad = 0
    for i in range(200):
        n = int(rng.integers(4, 9))
        g = gen_random_dirac(n, float(rng.random() * 0.4), i)
        res = run(g, i)
        bad += not (res.success and verify_hamiltonian(g, res.cycle, True)[0])
        bad += brute_force_hamiltonian(g, True) is None
    checked = mism = 0
    k = 0
    while checked < 500:
        g = _small_dirac(rng)
        cover = random_cover(g, rng)
        for p, (cyc, soc) in zip(cover, distributed_verdicts(g, cover, k)):
            checked += 1
            mism += cyc != is_cycled_ref(g, p) or soc != is_sociable_ref(g, p)
        k += 1
    ok = bad == 0 and mism == 0
    assert report(8, ok, f"200 graphs: {bad} failures; {checked} paths: {mism} verdict mismatches")


D_SHAPES = {8: RkShape(3, 1, 2, 1), 16: RkShape(6, 1, 5, 3), 32: RkShape(12, 1, 11, 7), 64: RkShape(25, 1, 24, 13)}


def test_c9_rk(report):
    ore_ok = rk_ok = 0
    for i in range(20):
        n = 8 + 3 * i
        g = gen_ore_non_dirac(n, i)
        res = run_rk(g, i)
        ore_ok += res.cycle is not None and verify_hamiltonian(g, res.cycle, True)[0]
        g = gen_rk_non_ore(rk_shape_for(n), i)
        res = run_rk(g, i)
        rk_ok += res.path is not None and verify_hamiltonian(g, res.path, False)[0]
    rounds = {}
    for n, shape in D_SHAPES.items():
        for s in range(40):
            g = gen_rk_non_ore(shape, s)
            if classify_rk(g).d_nonempty:
                res = run_rk(g, s)
                if res.success and verify_hamiltonian(g, res.path, False)[0]:
                    rounds[n] = res.congest_rounds
                break
    ok = ore_ok == 20 and rk_ok == 20 and len(rounds) == len(D_SHAPES) and len(set(rounds.values())) == 1
    assert report(9, ok, f"Ore cycles {ore_ok}/20, RK paths {rk_ok}/20, D-nonempty rounds by n {rounds}")


def test_c10_determinism(grid, report):
    same = 0
    keys = [(gen, n, s) for gen in GENS for n in (16, 64, 256) for s in (0, 7)]
    for gen, n, s in keys:
        g = make_graph(gen, n, s if gen == "random_dirac" else 0)
        res = run(g, s)
        first, ok = grid[(gen, n, s)]
        same += dumps(stats_record(res, gen, verified(g, res))) == dumps(stats_record(first, gen, ok))
    assert report(10, same == len(keys), f"{same}/{len(keys)} re-runs byte-identical")
