"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one PASS/FAIL line (also collected in the terminal summary).
The extended n = 8 Ramsey scan runs only with ANYDIM_SLOW=1.
"""
import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from anydim import definetti as D
from anydim import graphs as G
from anydim import optimize as Opt
from anydim import settings as S
from anydim.combinat import Partition, aut_count_partition, partitions_up_to, refinement_count
from anydim.parsing import resolve_cost, to_polynomial
from anydim.symfunc import Basis, SymPoly, dualize_symfunc, m_to_s, s_to_m

from conftest import rand_q, report, slow_enabled

F = Fraction


def cost(name):
    return to_polynomial(resolve_cost(name)[1])


def graph_sweep(name, ns, allow_large=False):
    return Opt.bound_sweep("graph-density", cost(name), lambda n: Opt.BinarySimpleGraphs(n, allow_large), ns,
                           solver="exhaustive")


def test_criterion_1_goodman_closed_form():
    t0 = time.perf_counter()
    rows = graph_sweep("goodman", range(4, 8))
    elapsed = time.perf_counter() - t0
    closed = {n: F(-n, 2 * (n * n - 4 * n + 3)) if n % 2 == 0 else F(-(n + 1), 2 * (n * n - 2 * n)) for n in range(4, 8)}
    got = {r.n: r.lower.value for r in rows}
    ok = got == closed and all(r.lower.kind == "exact" for r in rows) and elapsed < 60
    assert report("1", ok, f"Goodman l_n = {[str(got[n]) for n in range(4, 8)]} vs closed form "
                           f"{[str(closed[n]) for n in range(4, 8)]}, {elapsed:.1f}s (< 60s)")


def test_criterion_2_ramsey_multiplicity():
    t0 = time.perf_counter()
    rows = graph_sweep("ramsey", range(4, 7))
    t7 = time.perf_counter()
    (row7,) = graph_sweep("ramsey", [7])
    elapsed7 = time.perf_counter() - t7
    small = [r.lower.value for r in rows]
    v7 = float(row7.lower.value)
    ok = all(v == 0 for v in small) and abs(v7 - 0.0286) <= 5e-4 and elapsed7 < 120
    assert report("2", ok, f"Ramsey l_4..l_6 = {[str(v) for v in small]}, l_7 = {row7.lower.value} = {v7:.5f} "
                           f"(target 0.0286 +- 5e-4), n = 7 scan {elapsed7:.1f}s (< 120s); "
                           f"total {time.perf_counter() - t0:.1f}s")


@pytest.mark.slow
@pytest.mark.skipif(not slow_enabled(), reason="extended n = 8 scan; set ANYDIM_SLOW=1")
def test_criterion_2_extended_n8():
    t0 = time.perf_counter()
    (row8,) = graph_sweep("ramsey", [8], allow_large=True)
    v8 = float(row8.lower.value)
    ok = abs(v8 - 0.0286) <= 5e-4
    assert report("2 (n = 8 extended)", ok, f"l_8 = {row8.lower.value} = {v8:.5f}, {time.perf_counter() - t0:.0f}s")


def test_criterion_3_bad_quartic():
    target = {4: -0.8403, 5: -0.4023, 6: -0.2541, 7: -0.1817, 8: -0.1396}
    cfg = Opt.SolverConfig(restarts=256, seed=0)
    t0 = time.perf_counter()
    rows = Opt.bound_sweep("symfunc", cost("bad-quartic"), lambda n: Opt.L1Ball(1.0, (n,)), range(4, 9), cfg)
    elapsed = time.perf_counter() - t0
    got = {r.n: r.lower.value for r in rows}
    worst = max(abs(got[n] - target[n]) for n in target)
    ok = worst <= 1e-2 and elapsed < 300 and all(r.lower.kind == "heuristic_upper" for r in rows)
    assert report("3", ok, f"bad quartic l_n estimates {[round(got[n], 4) for n in target]}, "
                           f"max deviation {worst:.2e} (<= 1e-2), 256 restarts seed 0, {elapsed:.1f}s (< 300s)")


def test_criterion_4_quadratic_simplex():
    p = SymPoly.single(Basis.POWER_SUM, Partition.of(2))
    cfg = Opt.SolverConfig(restarts=32, seed=0)
    rows = Opt.bound_sweep("symfunc", p, lambda n: Opt.VecSimplex(n), range(2, 11), cfg)
    u_err = max(abs(r.upper.value - 1 / r.n) for r in rows)
    l_err = max(abs(r.lower.value) for r in rows)
    coeffs_ok = all(m_to_s(dualize_symfunc(p, n)).coeffs == {Partition.of(2): F(n, n - 1), Partition.of(1, 1): F(-1, n - 1)}
                    for n in range(2, 11))
    ok = u_err <= 1e-8 and l_err <= 1e-8 and coeffs_ok
    assert report("4", ok, f"quadratic on the simplex, n = 2..10: max |u_n - 1/n| = {u_err:.1e}, "
                           f"max |l_n| = {l_err:.1e} (<= 1e-8); dual = n/(n-1) s[2] - 1/(n-1) s[1,1] exactly: {coeffs_ok}")


def test_criterion_5_graph_numbers():
    u_target = [-2.00, -2.00, -2.67, -2.67, -3.00, -3.00]
    l_target = [(-26.67, -26.67), (-13.21, -12.50), (-11.20, -11.20), (-9.33, -8.71), (-8.23, -8.23), (-7.50, -7.23)]
    cfg = Opt.SolverConfig(restarts=64, seed=0)
    t0 = time.perf_counter()
    rows = Opt.bound_sweep("graph-numbers", cost("graph-numbers"), lambda n: Opt.MatrixSimplex(n, 2.0), range(4, 10), cfg)
    u = [r.upper.value for r in rows]
    l = [r.lower.value for r in rows]
    u_dev = max(abs(a - b) for a, b in zip(u, u_target))
    l_dev = max(max(lo - v, v - hi, 0.0) for v, (lo, hi) in zip(l, l_target))
    ok = u_dev <= 1e-2 and l_dev <= 1e-2
    assert report("5", ok, f"graph numbers n = 4..9: u_n = {[round(v, 4) for v in u]} (max dev {u_dev:.1e}), "
                           f"l_n = {[round(v, 4) for v in l]} (max distance to target {l_dev:.1e}), "
                           f"{time.perf_counter() - t0:.1f}s")


def test_criterion_6_representation_identity():
    rng = np.random.default_rng(2024)
    combos = [(k, n) for k in (1, 2, 3) for n in range(1, 6)]
    failures, checked = [], 0
    for setting in S.SETTINGS:
        for trial in range(20):
            k, n = combos[trial % len(combos)]
            p = S.default_identity_cost(setting, k)
            x = S.random_point(setting, n, rng)
            lhs, rhs = S.identity_sides(setting, p, k, x)
            checked += 1
            if Fraction(lhs) - Fraction(rhs) != 0:
                failures.append((setting, k, n, trial))
    ok = not failures
    assert report("6", ok, f"p_n(x) = E[q_k(L x)] exactly in {checked - len(failures)}/{checked} trials "
                           f"(4 settings x 20, k <= 3, n <= 5); failures: {failures}")


def test_criterion_7_tv_rate():
    rng = np.random.default_rng(7)
    cases, violations = 0, []
    for n in range(2, 9):
        bases = [[1] + [0] * (n - 1), [1] * (n // 2) + [0] * (n - n // 2), list(range(n)),
                 [int(v) for v in rng.integers(0, 3, size=n)]]
        for m in (2, 3):
            if m > n:
                continue
            for base in bases:
                tv, bound = D.tv_rate_experiment(n, m, base)
                cases += 1
                if tv > bound:
                    violations.append((n, m, base, tv))
    tight = {n: D.bernoulli_tightness_tv(n) for n in range(2, 9)}
    tight_ok = all(tight[n] == F(2, n) for n in tight)
    ok = not violations and tight_ok
    assert report("7", ok, f"TV <= m(m-1)/n in {cases - len(violations)}/{cases} cases (n <= 8, m in {{2,3}}); "
                           f"Bernoulli tightness TV = {[str(tight[n]) for n in tight]} for n = 2..8, "
                           f"required exactly 2/n: {tight_ok}")


def test_criterion_8_w1_rate():
    rows = []
    ok = True
    for n in (2, 4, 8, 16, 32):
        w1, bound = D.w1_rate_experiment(n)
        direct = D.binomial_mean_abs_deviation(n)
        ok &= w1 == direct and float(w1) <= bound
        rows.append(f"n={n}: {float(w1):.4f} <= {bound:.4f}")
    ratio = float(D.w1_rate_experiment(32)[0]) * math.sqrt(math.pi * 32)
    ok &= 0.85 <= ratio <= 1.15
    assert report("8", ok, f"W1 = E|B-n|/n exactly; {'; '.join(rows)}; W1 sqrt(pi n) at n = 32 is {ratio:.4f} "
                           f"(in [0.85, 1.15])")


def test_criterion_9_mfg_sweep():
    cfg = Opt.SolverConfig(restarts=64, seed=0)
    rows = Opt.bound_sweep("means", cost("mfg"), lambda n: Opt.Box(-1.0, 1.0, (n,)), range(3, 13), cfg,
                           gap_k=3, gap_norm=10.0)
    l = [r.lower.value for r in rows]
    u = [r.upper.value for r in rows]
    mono = all(b >= a - 1e-6 for a, b in zip(l, l[1:]))
    sandwich = all(uu >= ll - 1e-6 for uu, ll in zip(u, l))
    gaps = {r.n: (r.upper.value - r.lower.value, r.gap_bound) for r in rows if r.n % 3 == 0}
    gap_ok = all(g <= 60 / n + 1e-3 and abs(b - 60 / n) < 1e-12 for n, (g, b) in gaps.items())
    ok = mono and sandwich and gap_ok
    assert report("9", ok, f"MFG n = 3..12: l_n = {[round(v, 3) for v in l]} nondecreasing: {mono}; "
                           f"u_n >= l_n: {sandwich}; u_3j - l_3j = {[round(g, 3) for g, _ in gaps.values()]} "
                           f"<= 60/(3j): {gap_ok}")


def brute_refinement(lam, mu):
    count = 0
    for f in itertools.product(range(len(mu)), repeat=len(lam)):
        if set(f) == set(range(len(mu))):
            sums = [0] * len(mu)
            for j, i in enumerate(f):
                sums[i] += lam[j]
            count += sums == list(mu)
    return count


def test_criterion_10_transition_oracles():
    P = Partition.of
    named = {((1, 1), (2,)): 1, ((1, 1, 1), (2, 1)): 3}
    named_ok = all(refinement_count(P(*a), P(*b)) == v == brute_refinement(a, b) for (a, b), v in named.items())
    diag_ok = all(refinement_count(lam, lam) == aut_count_partition(lam) == brute_refinement(lam.parts, lam.parts)
                  == math.prod(math.factorial(lam.parts.count(v)) for v in set(lam.parts))
                  for lam in partitions_up_to(6) if lam.parts)
    chain = [G.named_graph(s) for s in ("3K2", "K2uP3", "P4", "K3")]
    counts = [G.graph_refinement_count(a, b) for a, b in zip(chain, chain[1:])] + [G.graph_refinement_count(chain[3], chain[3])]
    chain_ok = counts == [48, 8, 6, 6]
    rng = np.random.default_rng(10)
    trips = 0
    for d in range(1, 5):
        atoms = [p for p in partitions_up_to(d) if p.parts]
        for _ in range(100):
            p = SymPoly(Basis.POWER_SUM, {a: rand_q(rng) for a in atoms if rng.random() < 0.7})
            q = SymPoly(Basis.MONOMIAL_SUM, {a: rand_q(rng) for a in atoms if rng.random() < 0.7})
            trips += m_to_s(s_to_m(p)) == p and s_to_m(m_to_s(q)) == q
    trips_ok = trips == 400
    ok = named_ok and diag_ok and chain_ok and trips_ok
    assert report("10", ok, f"R_(1,1),(2) = 1 and R_(1,1,1),(2,1) = 3 vs surjection oracle: {named_ok}; "
                            f"R_lam,lam = prod mult! (weight <= 6): {diag_ok}; K3 chain counts {counts}; "
                            f"exact s<->m round trips {trips}/400")
