"""The four problem settings: which atoms they use, which domains they accept,
how their costs are dualized, and how the representation identity is checked.

=============  ===============  =========================  ==============
setting        cost atoms       lower-bound atoms          domains
=============  ===============  =========================  ==============
means          sbar             mbar                       box
symfunc        s (or m)         m, basis built at k        l1ball, simplex
graph-density  t (+ complement) tinj (+ complement)        graphs
graph-numbers  hom / inj / m    m, basis built at k        matrix-simplex
=============  ===============  =========================  ==============
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import graphs as G
from . import objectives as O
from .definetti import act_matrix, act_vec, coact_matrix, coact_vec, expect_over_maps
from .combinat import MultiIndexList, Partition
from .symfunc import Basis, SymPoly, dualize_means, dualize_symfunc

SETTINGS = ("means", "symfunc", "graph-density", "graph-numbers")

ALLOWED_DOMAINS = {
    "means": ("box",),
    "symfunc": ("l1ball", "simplex"),
    "graph-density": ("graphs",),
    "graph-numbers": ("matrix-simplex",),
}

_COMPAT_REASON = {
    "means": "duplicating coordinates must keep points feasible, which holds for products of a set",
    "symfunc": "zero-padding and fiber sums must keep points feasible, which holds for l1 balls and simplices",
    "graph-density": "the densities are taken over simple graphs, closed under vertex duplication",
    "graph-numbers": "fiber sums must keep matrices feasible, which holds for X >= 0 with fixed total weight",
}


def check_setting(setting: str) -> str:
    if setting not in SETTINGS:
        raise ValueError(f"unknown setting {setting!r}; expected one of {', '.join(SETTINGS)}")
    return setting


def check_compatible(setting: str, domain_kind: str) -> None:
    check_setting(setting)
    allowed = ALLOWED_DOMAINS[setting]
    if domain_kind not in allowed:
        raise ValueError(
            f"domain {domain_kind!r} is not compatible with setting {setting!r}: "
            f"{_COMPAT_REASON[setting]} (allowed: {', '.join(allowed)})")


def setting_of(p) -> str:
    """Infer the setting from the basis of a cost polynomial."""
    if isinstance(p, SymPoly):
        return "means" if p.basis.is_mean else "symfunc"
    if isinstance(p, G.GraphPoly):
        return "graph-density" if p.basis.is_density else "graph-numbers"
    raise TypeError(f"not a cost polynomial: {p!r}")


def check_cost(setting: str, p) -> None:
    if setting_of(p) != setting:
        raise ValueError(f"cost atoms belong to setting {setting_of(p)!r}, not {setting!r}")


def dualize(setting: str, p, n: int, k: int | None = None):
    """Dual cost whose n-dimensional symmetrization gives the lower bound at n."""
    check_cost(setting, p)
    if setting == "means":
        if p.basis is not Basis.POWER_MEAN:
            raise ValueError("means costs are written in power means (sbar)")
        return dualize_means(p)
    if setting == "symfunc":
        if p.basis is Basis.MONOMIAL_SUM:
            raise ValueError("symfunc costs are written in power sums (s)")
        return dualize_symfunc(p, n, k)
    if setting == "graph-density":
        if p.basis is not G.GraphBasis.T:
            raise ValueError("graph-density costs are written in t")
        return G.dualize_graph_density(p)
    return G.dualize_graph_numbers(p, n, k)


def min_dimension(setting: str, p) -> int:
    """Smallest n at which the dual cost is defined."""
    if setting in ("means",):
        return max(p.max_length(), 1)
    if setting == "symfunc":
        return max(p.degree(), 1)
    if setting == "graph-density":
        return max(p.max_vertices(), 1)
    a = G.hom_to_m(p).coeffs
    return max((g.n_active_vertices for g in G.refinement_closure(a)), default=1)


def build_objective(setting: str, poly, n: int):
    """Fast evaluator of ``poly`` on the n-dimensional domain of the setting."""
    if setting in ("means", "symfunc"):
        return O.sympoly_objective(poly, n)
    if setting == "graph-density":
        return O.compile_binary_objective(poly, n)
    return O.graphpoly_objective(poly, n)


# ---------------------------------------------------------------------------
# representation identity p_n(x) = E[q_k(L x)]


def identity_sides(setting: str, p, k: int, x, mode: str = "exact", samples: int = 10_000, seed: int = 0):
    """(p_n(x), E_f[q_k(L_f x)]) with the map orientation of the setting.

    Sampling settings (means, graph-density) draw f: [k] -> [n] and read
    coordinates; fiber-sum settings (symfunc, graph-numbers) draw f: [n] -> [k].
    """
    check_cost(setting, p)
    if setting == "means":
        n = np.shape(x)[-1] if isinstance(x, np.ndarray) else len(x[0] if isinstance(x[0], (list, tuple)) else x)
        q = dualize_means(p)
        rhs = expect_over_maps(k, n, lambda f: q(act_vec(f, x)), mode, samples, seed)
    elif setting == "symfunc":
        n = len(x)
        q = dualize_symfunc(p, max(n, p.degree()), k)
        rhs = expect_over_maps(n, k, lambda f: q(coact_vec(f, x)), mode, samples, seed)
    elif setting == "graph-density":
        n = len(x)
        q = G.dualize_graph_density(p)
        rhs = expect_over_maps(k, n, lambda f: q(act_matrix(f, x)), mode, samples, seed)
    else:
        n = len(x)
        q = G.dualize_graph_numbers(p, max(n, k), k)
        rhs = expect_over_maps(n, k, lambda f: q(coact_matrix(f, x)), mode, samples, seed)
    return p(x), rhs.value


def random_rational(rng: np.random.Generator, lo: int = -4, hi: int = 4, den: int = 4) -> Fraction:
    return Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, den + 1)))


def random_point(setting: str, n: int, rng: np.random.Generator, ambient_dim: int = 1):
    """Random exact input for the identity check."""
    if setting == "means":
        rows = [[random_rational(rng) for _ in range(n)] for _ in range(ambient_dim)]
        return rows[0] if ambient_dim == 1 else rows
    if setting == "symfunc":
        return [random_rational(rng) for _ in range(n)]
    if setting == "graph-density":
        X = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                X[i][j] = X[j][i] = int(rng.integers(0, 2))
        return X
    X = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            X[i][j] = X[j][i] = random_rational(rng, 0, 4)
    return X


def default_identity_cost(setting: str, k: int):
    """A cost whose identity is exercised at the given k (atoms fit in k vertices or parts)."""
    if setting == "means":
        M = MultiIndexList
        atoms = {M.of(1): -1, M.of(1, 1): 5, M.of(2, 1): -4} if k >= 2 else {M.of(1): -1, M.of(2): 3}
        return SymPoly(Basis.POWER_MEAN, atoms)
    if setting == "symfunc":
        P = Partition
        if k >= 3:
            return SymPoly(Basis.POWER_SUM, {P.of(3): 2, P.of(2, 1): -1, P.of(1, 1, 1): Fraction(1, 3), P.of(2): 1})
        if k == 2:
            return SymPoly(Basis.POWER_SUM, {P.of(2): 1, P.of(1, 1): -3, P.of(1): 2})
        return SymPoly(Basis.POWER_SUM, {P.of(1): 2})
    if setting == "graph-density":
        if k >= 4:
            return G.GraphPoly("t", {G.named_graph("K3"): 1, G.named_graph("K2uK2"): -2, G.named_graph("K2"): 1})
        if k == 3:
            return G.GraphPoly("t", {G.named_graph("K3"): 1, G.named_graph("P3"): -2, G.named_graph("K2"): 1})
        if k == 2:
            return G.GraphPoly("t", {G.named_graph("K2"): 3})
        return G.GraphPoly("t", {G.named_graph("K1"): 3})
    if k >= 4:
        return G.GraphPoly("inj", {G.named_graph("P3"): 1, G.named_graph("K2uK2"): -1})
    if k >= 2:
        return G.GraphPoly("hom", {G.named_graph("K2"): 2, G.named_graph("loop"): -1})
    return G.GraphPoly("hom", {G.named_graph("K1"): 3})
