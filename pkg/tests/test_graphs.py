import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anydim import graphs as G
from anydim.combinat import Partition, partitions_up_to, refinement_count
from anydim.symfunc import sym_matrix_entry

from conftest import rand_q

F = Fraction
NG = G.named_graph


def brute_upper_min(A):
    n = len(A)
    best = None
    for perm in itertools.permutations(range(n)):
        seq = tuple(A[perm[i]][perm[j]] for i in range(n) for j in range(i, n))
        best = seq if best is None or seq < best else best
    return best


def brute_aut(A):
    n = len(A)
    return sum(all(A[p[i]][p[j]] == A[i][j] for i in range(n) for j in range(n))
               for p in itertools.permutations(range(n)))


def brute_hom(H, X, injective=False):
    A = H.rep.to_array()
    k, n = len(A), len(X)
    total = 0
    maps = itertools.permutations(range(n), k) if injective else itertools.product(range(n), repeat=k)
    for f in maps:
        term = 1
        for i in range(k):
            for j in range(i, k):
                if A[i][j]:
                    term *= X[f[i]][f[j]] ** int(A[i][j])
        total += term
    return total


def brute_refinement_count(Gc, Hc):
    """Surjections V(G) -> V(H) whose edge-count contraction equals H's representative."""
    a, b = Gc.rep.n_vertices, Hc.rep.n_vertices
    target = Hc.rep.to_array()
    count = 0
    for f in itertools.product(range(b), repeat=a):
        if len(set(f)) == b and np.array_equal(G.contract(Gc.rep, f, b).to_array(), target):
            count += 1
    return count


def random_multigraph(rng, n, max_w=2, loops=True):
    A = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(i if loops else i + 1, n):
            A[i, j] = A[j, i] = rng.integers(0, max_w + 1) if rng.random() < 0.5 else 0
    return G.MultiGraph.from_array(A)


def rand_sym(rng, n, lo=-3, hi=3):
    X = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            X[i][j] = X[j][i] = rand_q(rng, lo, hi)
    return X


def simple_graph(rng, n):
    bits = int(rng.integers(0, 2 ** (n * (n - 1) // 2)))
    return G.graph_from_bits(n, bits).astype(int).tolist()


# canonical form


def test_canonical_isolated_vertex():
    g = G.MultiGraph.from_edges([(1, 2), (2, 3), (1, 3)], n=4, one_based=True)
    assert G.canonical_form(g) == NG("K3")


def test_canonical_relabel_p3():
    a = G.MultiGraph.from_edges([(1, 2), (2, 3)], one_based=True)
    b = G.MultiGraph.from_edges([(2, 3), (1, 3)], one_based=True)
    assert G.canonical_form(a) == G.canonical_form(b)


@pytest.mark.parametrize("name,aut", [("K3", 6), ("P3", 2), ("K3pendant", 2), ("K2", 2), ("C4", 8)])
def test_aut_counts(name, aut):
    H = NG(name)
    assert H.aut_count == aut == brute_aut(H.rep.to_array().tolist())


def test_canonical_is_brute_force_lexmin(rng):
    for _ in range(60):
        g = random_multigraph(rng, int(rng.integers(1, 7)))
        c = G.canonical_form(g)
        if c.rep.n_vertices == 0:
            continue
        A = c.rep.to_array().tolist()
        assert tuple(A[i][j] for i in range(len(A)) for j in range(i, len(A))) == brute_upper_min(A)
        assert c.aut_count == brute_aut(A)


def test_canonical_invariance_and_idempotence(rng):
    for _ in range(40):
        n = int(rng.integers(2, 7))
        g = random_multigraph(rng, n)
        c = G.canonical_form(g)
        perm = list(rng.permutation(n))
        assert G.canonical_form(g.relabel(perm)) == c
        assert G.canonical_form(c.rep) == c


def test_canonical_size_limit():
    with pytest.raises(ValueError, match="canonicalization size limit"):
        G.canonical_form(G.MultiGraph.from_edges([(i, i + 1) for i in range(10)]))


# counting


def test_hom_examples():
    K3 = NG("K3").rep.to_array().tolist()
    X = [[1, 2], [2, 5]]
    assert G.hom_number(NG("K2"), X) == 10
    assert G.hom_number(NG("K3"), K3) == 6
    assert G.hom_number(NG("K1"), X) == 1


def test_inj_examples():
    K3 = NG("K3").rep.to_array().tolist()
    assert G.inj_number(NG("K3"), K3) == 6
    assert G.inj_number(NG("P3"), K3) == 6
    assert G.m_graph_sum(NG("P3"), K3) == 3
    assert G.inj_number(NG("K3"), [[0, 1], [1, 0]]) == 0


def test_counts_match_brute_force(rng):
    atoms = [NG(s) for s in ("K2", "P3", "K3", "K2uK2", "loop", "K3pendant")]
    atoms.append(G.canonical_form(G.MultiGraph.from_edges([(0, 0), (0, 1), (0, 1)])))
    for _ in range(10):
        X = rand_sym(rng, int(rng.integers(1, 5)))
        for H in atoms:
            assert G.hom_number(H, X) == brute_hom(H, X)
            assert G.inj_number(H, X) == brute_hom(H, X, injective=True)


def test_t_density_examples():
    for n in range(2, 7):
        Kn = (np.ones((n, n), dtype=int) - np.eye(n, dtype=int)).tolist()
        assert G.t_density(NG("K2"), Kn) == 1 - F(1, n)
    with pytest.raises(ZeroDivisionError):
        G.t_inj_density(NG("K3"), [[0, 1], [1, 0]])


def test_t_duplication_invariance(rng):
    for _ in range(10):
        X = simple_graph(rng, int(rng.integers(2, 5)))
        k = int(rng.integers(2, 4))
        big = np.kron(np.array(X), np.ones((k, k), dtype=int)).tolist()
        for H in (NG("K2"), NG("P3"), NG("K3")):
            assert G.t_density(H, X) == G.t_density(H, big)


def test_t_inj_is_permutation_average(rng):
    for _ in range(8):
        n = int(rng.integers(3, 6))
        X = rand_sym(rng, n)
        for H in (NG("K2"), NG("P3"), NG("K3")):
            A = H.rep.to_array()
            v = len(A)
            total = F(0)
            for g in itertools.permutations(range(n)):
                term = F(1)
                for i in range(v):
                    for j in range(i, v):
                        if A[i][j]:
                            term *= X[g[i]][g[j]] ** int(A[i][j])
                total += term
            assert G.t_inj_density(H, X) == total / math.factorial(n)


def test_m_sum_of_self():
    for name in ("K3", "P3", "C4"):
        H = NG(name)
        assert G.m_graph_sum(H, H.rep.to_array().tolist()) == 1


def test_m_k2_counts_edges(rng):
    X = rand_sym(rng, 4)
    assert G.m_graph_sum(NG("K2"), X) == sum(X[i][j] for i in range(4) for j in range(i + 1, 4))


# quotient and contraction


def test_quotient_p3():
    P3 = G.MultiGraph.from_edges([(0, 1), (1, 2)])
    Q = G.quotient(P3, [0, 1, 0], 2).to_array()
    assert Q.tolist() == [[0, 2], [2, 0]]
    assert G.contract(P3, [0, 1, 0], 2).to_array().tolist() == [[0, 2], [2, 0]]


def test_quotient_identity_and_conservation(rng):
    for _ in range(20):
        n = int(rng.integers(2, 6))
        X = rand_sym(rng, n)
        assert G.quotient(X, list(range(n)), n) == X
        m = int(rng.integers(1, n + 1))
        f = [int(t) for t in rng.integers(0, m, size=n)]
        Q = G.quotient(X, f, m)
        assert sum(map(sum, Q)) == sum(map(sum, X))
        assert all(Q[i][j] == Q[j][i] for i in range(m) for j in range(m))


def test_quotient_composition(rng):
    for _ in range(20):
        n, m, l = 5, 3, 2
        X = rand_sym(rng, n)
        f = [int(t) for t in rng.integers(0, m, size=n)]
        g = [int(t) for t in rng.integers(0, l, size=m)]
        gf = [g[t] for t in f]
        assert G.quotient(G.quotient(X, f, m), g, l) == G.quotient(X, gf, l)


def test_contract_conserves_edge_count(rng):
    for _ in range(20):
        g = random_multigraph(rng, 5)
        f = [int(t) for t in rng.integers(0, 3, size=5)]
        assert G.contract(g, f, 3).total_weight() == g.total_weight()


# refinement poset


def test_k3_chain_counts():
    chain = [NG(s) for s in ("3K2", "K2uP3", "P4", "K3")]
    assert [G.graph_refinement_count(a, b) for a, b in zip(chain, chain[1:])] == [48, 8, 6]
    assert G.graph_refinement_count(chain[-1], chain[-1]) == 6


def test_k3_chain_is_not_multiplicative():
    # the direct counts to K3; the product 48 * 8 * 6 / 6^2 ... does not reproduce them
    K3 = NG("K3")
    assert G.graph_refinement_count(NG("3K2"), K3) == 48
    assert G.graph_refinement_count(NG("K2uP3"), K3) == 12
    assert G.graph_refinement_count(NG("P4"), K3) == 6


@pytest.mark.parametrize("name", ["K2", "P3", "K3", "C4"])
def test_self_refinement_is_aut(name):
    H = NG(name)
    assert G.graph_refinement_count(H, H) == H.aut_count


def test_refinement_direction():
    assert G.graph_refinement_count(NG("K3"), NG("P4")) == 0


def test_refinement_count_matches_oracle():
    atoms = [NG(s) for s in ("K2", "P3", "K3", "P4", "K2uK2", "K2uP3", "3K2", "loop", "C4")]
    atoms += G.graph_refinements(G.canonical_form(G.MultiGraph.from_edges([(0, 0), (0, 1)])))
    for a in atoms:
        for b in atoms:
            if a.n_active_vertices <= 6 and b.n_active_vertices <= 4:
                assert G.graph_refinement_count(a, b) == brute_refinement_count(a, b), (a.name(), b.name())


def test_refinement_count_representative_invariance(rng):
    H = NG("K3")
    for name in ("3K2", "K2uP3", "P4"):
        Gc = NG(name)
        for _ in range(5):
            perm = list(rng.permutation(Gc.rep.n_vertices))
            relabeled = Gc.rep.relabel(perm)
            assert G.graph_refinement_count(relabeled, H) == G.graph_refinement_count(Gc, H)


def test_refinements_of_k3():
    assert set(G.graph_refinements(NG("K3"))) == {NG(s) for s in ("K3", "P4", "K2uP3", "3K2")}


def test_refinements_of_k2():
    assert G.graph_refinements(NG("K2")) == [NG("K2")]


def loop_graph(parts):
    return G.canonical_form(G.MultiGraph.from_array(np.diag(parts)))


def test_loop_graphs_match_partitions():
    ps = [p for p in partitions_up_to(4) if p.parts]
    for lam in ps:
        for mu in ps:
            assert G.graph_refinement_count(loop_graph(lam.parts), loop_graph(mu.parts)) == refinement_count(lam, mu)
            for k in (4, 7):
                assert G.graph_matrix_entry(k, loop_graph(lam.parts), loop_graph(mu.parts)) == sym_matrix_entry(k, lam, mu)


# basis changes and de Finetti matrix


def test_hom_to_m_k2():
    q = G.hom_to_m(G.GraphPoly("hom", {NG("K2"): 1}))
    assert q.coeffs == {NG("K2"): 2, NG("loop"): 1}
    assert G.hom_to_m(G.GraphPoly("inj", {NG("K3"): 1})).coeffs == {NG("K3"): 6}


def test_hom_to_m_pointwise(rng):
    atoms = [NG("K3"), NG("P3"), NG("K2"), NG("K2uK2"), NG("loop")]
    for _ in range(20):
        X = rand_sym(rng, int(rng.integers(1, 6)))
        for H in atoms:
            p = G.GraphPoly("hom", {H: 1})
            assert G.hom_to_m(p)(X) == p(X)


def test_k3_row():
    K3 = NG("K3")
    for k in (6, 7, 10):
        pre = F(k * (k - 1) * (k - 2), k ** 3)
        assert G.graph_matrix_entry(k, K3, K3) == pre
        assert G.graph_matrix_entry(k, K3, NG("P4")) == pre / k
        assert G.graph_matrix_entry(k, K3, NG("K2uP3")) == pre * 2 / k ** 2
        assert G.graph_matrix_entry(k, K3, NG("3K2")) == pre * 8 / k ** 3
        assert G.graph_matrix_entry(k, NG("K2"), NG("K2")) == F(k * (k - 1), k * k)


def test_graph_basis_element_is_its_expectation(rng):
    # p^(k,[H])(X) = k^-n sum over f: [n] -> [k] of m^[H](X / P_f)
    from anydim.definetti import all_maps
    for H in (NG("K2"), NG("P3"), NG("loop")):
        k = 4
        elem = G.definetti_graph_basis_element(k, H)
        for n in (1, 2, 3):
            X = rand_sym(rng, n, 0, 3)
            total = sum(G.m_graph_sum(H, G.quotient(X, f.targets, k)) for f in all_maps(n, k))
            assert elem(X) == total / F(k ** n)


def test_graph_matrix_triangular():
    atoms = G.refinement_closure([NG("K3"), NG("P3"), NG("K2uK2"), NG("K2")])
    for k in range(6, 12):
        M = G.definetti_graph_matrix(k, atoms)
        assert M.is_upper_triangular()
        assert all(d > 0 for d in M.diagonal())


def test_graph_matrix_requires_closure():
    with pytest.raises(ValueError, match="not refinement-closed"):
        G.definetti_graph_matrix(8, [NG("K3")])


def test_dualize_density():
    p = G.GraphPoly("t", {NG("K3"): 1, NG("K2uK2"): -2, NG("K2"): 1})
    q = G.dualize_graph_density(p)
    assert q.basis is G.GraphBasis.TINJ and q.coeffs == p.coeffs
    r = G.GraphPoly("t", {NG("K3pendant"): 1}, {NG("K3pendant"): 1})
    assert G.dualize_graph_density(r).complement_coeffs == r.complement_coeffs


@pytest.mark.parametrize("n", range(4, 10))
def test_graph_numbers_dual_closed_form(n):
    p = G.GraphPoly("inj", {NG("P3"): 1, NG("K2uK2"): -1})
    q = G.m_to_inj(G.dualize_graph_numbers(p, n))
    pre = F(n ** 3, n * (n - 1) * (n - 2))
    assert q.coeffs == {NG("P3"): pre, NG("K2uK2"): -pre * F(n + 1, n - 3)}


def test_graph_numbers_loop_matches_symfunc(rng):
    # on diagonal matrices only loop-only atoms survive, and they carry the symfunc dual
    from anydim.symfunc import Basis, SymPoly, dualize_symfunc
    for d in (2, 3):
        g = G.dualize_graph_numbers(G.GraphPoly("hom", {loop_graph((d,)): 1}), 6)
        s = dualize_symfunc(SymPoly.single(Basis.POWER_SUM, Partition.of(d)), 6)
        loops_only = {a: c for a, c in g.coeffs.items() if a.loop_weight == a.edge_count}
        assert loops_only == {loop_graph(lam.parts): c for lam, c in s.coeffs.items()}
        for n in (3, 6):
            x = [rand_q(rng) for _ in range(n)]
            X = [[x[i] if i == j else F(0) for j in range(n)] for i in range(n)]
            assert g(X) == s(x)


def test_dualize_zero():
    assert G.dualize_graph_numbers(G.GraphPoly("hom", {}), 5).is_zero()


# enumeration


def test_enumeration_counts():
    assert sum(1 for _ in G.enumerate_simple_graphs(3)) == 8
    graphs = list(G.enumerate_simple_graphs(4))
    assert len(graphs) == 64
    assert len({G.canonical_form(G.MultiGraph.from_array(a)) for a in graphs}) == 11
    with pytest.raises(ValueError):
        next(iter(G.enumerate_simple_graphs(9, allow_large=True)))


def test_bits_round_trip():
    for bits in range(64):
        assert G.bits_from_graph(G.graph_from_bits(4, bits)) == bits


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=6))
def test_edge_string_round_trip(edges):
    g = G.MultiGraph.from_edges(edges)
    c = G.canonical_form(g)
    assert G.canonical_form(G.parse_edge_list(c.rep.edge_string()[2:-1])) == c
