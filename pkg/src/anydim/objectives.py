"""Fast evaluators built from exact polynomials.

Continuous domains get float objectives with analytic gradients.  Binary
simple graphs get an integer-weighted subgraph-count objective that the scan
kernels evaluate exactly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import graphs as G
from .combinat import MultiIndexList, Partition, falling_factorial, mobius_weight, set_partitions
from .symfunc import Basis, SymPoly, m_to_s


class Objective:
    """Minimal interface: value(x) and optionally grad(x)."""

    has_grad = False

    def value(self, x) -> float:
        raise NotImplementedError

    def grad(self, x):
        return None

    def __call__(self, x) -> float:
        return self.value(x)


class CallableObjective(Objective):
    def __init__(self, fn, grad=None):
        self.fn = fn
        self._grad = grad
        self.has_grad = grad is not None

    def value(self, x):
        return float(self.fn(x))

    def grad(self, x):
        return None if self._grad is None else self._grad(x)


# ---------------------------------------------------------------------------
# products of power sums


class PowerSumObjective(Objective):
    """sum_t c_t prod_{alpha in A_t} S_alpha(x), S_alpha(x) = sum_i prod_r x_{r,i}^{alpha_r}.

    x is a length-n vector when d_g = 1, else a d_g x n array.
    """

    has_grad = True

    def __init__(self, terms, ambient_dim: int = 1):
        merged: dict[tuple, float] = {}
        for c, alphas in terms:
            key = tuple(sorted(tuple(a) for a in alphas))
            merged[key] = merged.get(key, 0.0) + float(c)
        self.terms = [(c, list(k)) for k, c in merged.items() if c != 0.0]
        self.ambient_dim = ambient_dim
        self.alphas = sorted({a for _, al in self.terms for a in al})
        self._index = {a: i for i, a in enumerate(self.alphas)}
        self._term_idx = [(c, [self._index[a] for a in al]) for c, al in self.terms]
        self._scalar = ambient_dim == 1
        if self._scalar:
            self._powers = np.array([a[0] for a in self.alphas], dtype=int)
            self._top = int(self._powers.max(initial=0))

    def _rows(self, x):
        x = np.asarray(x, dtype=float)
        return x.reshape(1, -1) if x.ndim == 1 else x

    def _power_table(self, x):
        pw = np.empty((self._top + 1, x.shape[-1]))
        pw[0] = 1.0
        for a in range(1, self._top + 1):
            pw[a] = pw[a - 1] * x
        return pw

    def _sums(self, X):
        if self._scalar:
            return self._power_table(X[0]).sum(axis=1)[self._powers]
        mono = np.empty((len(self.alphas), X.shape[1]))
        for i, a in enumerate(self.alphas):
            mono[i] = np.prod(X ** np.array(a)[:, None], axis=0)
        return mono.sum(axis=1)

    def value(self, x) -> float:
        X = self._rows(x)
        S = self._sums(X)
        return float(sum(c * math.prod(S[i] for i in idx) for c, idx in self._term_idx))

    def grad(self, x):
        x_arr = np.asarray(x, dtype=float)
        X = self._rows(x_arr)
        S = self._sums(X)
        coef = np.zeros(len(self.alphas))
        for c, idx in self._term_idx:
            for t, i in enumerate(idx):
                coef[i] += c * math.prod(S[j] for s, j in enumerate(idx) if s != t)
        if self._scalar:
            pw = self._power_table(X[0])
            out = np.zeros(X.shape[1])
            for i, a in enumerate(self._powers):
                if a and coef[i] != 0.0:
                    out += coef[i] * a * pw[a - 1]
            return out.reshape(x_arr.shape)
        out = np.zeros_like(X)
        for i, a in enumerate(self.alphas):
            if coef[i] == 0.0:
                continue
            a_arr = np.array(a)
            for r in range(X.shape[0]):
                if a[r] == 0:
                    continue
                e = a_arr.copy()
                e[r] -= 1
                out[r] += coef[i] * a[r] * np.prod(X ** e[:, None], axis=0)
        return out.reshape(x_arr.shape)


def _mbar_terms(lam: MultiIndexList, c: Fraction, n: int):
    """Monomial mean as power sums: injective sum via Moebius inversion over set partitions."""
    count = falling_factorial(n, len(lam))
    if count == 0:
        raise ValueError("dimension too small for atom")
    out = []
    for blocks in set_partitions(list(range(len(lam)))):
        alphas = [tuple(map(sum, zip(*(lam.entries[j] for j in B)))) for B in blocks]
        out.append((c * mobius_weight(blocks) / count, alphas))
    return out


def sympoly_objective(p: SymPoly, n: int) -> PowerSumObjective:
    """Float objective for p on R^n (or R^{d_g x n} for means)."""
    terms = []
    if p.basis is Basis.MONOMIAL_SUM:
        if n < p.max_length():
            raise ValueError("dimension too small for atom")
        p = m_to_s(p)
    if p.basis is Basis.POWER_SUM:
        for lam, c in p.coeffs.items():
            terms.append((c, [(a,) for a in lam.parts]))
        return PowerSumObjective(terms, 1)
    for lam, c in p.coeffs.items():
        if p.basis is Basis.POWER_MEAN:
            terms.append((c / Fraction(n) ** len(lam), list(lam.entries)))
        else:
            terms.extend(_mbar_terms(lam, c, n))
    return PowerSumObjective(terms, p.ambient_dim)


# ---------------------------------------------------------------------------
# homomorphism numbers on weighted graphs

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class _Component:
    """hom of one connected multigraph component, by einsum, with its matrix gradient."""

    def __init__(self, cls: G.GraphClass):
        self.cls = cls
        self.factors = []  # (kind, letters, weight)
        for i, j, w in cls.rep.edges():
            if i == j:
                self.factors.append(("diag", _LETTERS[i], w))
            else:
                self.factors.append(("mat", _LETTERS[i] + _LETTERS[j], w))
        self._path = {}

    def _operands(self, X, d):
        return [(d if kind == "diag" else X) ** w for kind, _, w in self.factors]

    def _einsum(self, spec, ops, tag):
        if tag not in self._path:
            self._path[tag] = np.einsum_path(spec, *ops, optimize="greedy")[0]
        return np.einsum(spec, *ops, optimize=self._path[tag])

    def value(self, X, d) -> float:
        ops = self._operands(X, d)
        spec = ",".join(s for _, s, _ in self.factors) + "->"
        return float(self._einsum(spec, ops, ("v", X.shape[0])))

    def grad(self, X, d):
        ops = self._operands(X, d)
        n = X.shape[0]
        out = np.zeros_like(X)
        for t, (kind, sub, w) in enumerate(self.factors):
            rest = [s for u, (_, s, _) in enumerate(self.factors) if u != t]
            rest_ops = [o for u, o in enumerate(ops) if u != t]
            if rest:
                spec = ",".join(rest) + "->" + sub
                # letters of sub that do not appear in the other factors are free sums
                missing = [ch for ch in sub if not any(ch in s for s in rest)]
                if missing:
                    spec = ",".join(rest + [ch for ch in dict.fromkeys(missing)]) + "->" + sub
                    rest_ops = rest_ops + [np.ones(n)] * len(dict.fromkeys(missing))
                G_t = self._einsum(spec, rest_ops, ("g", t, n))
            else:
                G_t = np.ones((n, n)) if kind == "mat" else np.ones(n)
            base = d if kind == "diag" else X
            local = w * base ** (w - 1) * G_t
            if kind == "diag":
                out[np.diag_indices(n)] += local
            else:
                out += local
        return out


@lru_cache(maxsize=None)
def _component(cls: G.GraphClass) -> _Component:
    return _Component(cls)


def _components(H: G.GraphClass) -> tuple[G.GraphClass, ...]:
    comps = []
    for verts in H.rep.connected_components():
        sub = G.MultiGraph(tuple(tuple(H.rep.adjacency[i][j] for j in verts) for i in verts))
        comps.append(G.canonical_form(sub))
    return tuple(sorted(comps))


def _inj_as_hom(H: G.GraphClass) -> dict[G.GraphClass, Fraction]:
    """inj(H) = sum over set partitions pi of mu(pi) hom(H / pi)."""
    out: dict[G.GraphClass, Fraction] = {}
    verts = list(range(H.n_active_vertices))
    for blocks in set_partitions(verts):
        targets = [0] * len(verts)
        for b, B in enumerate(blocks):
            for v in B:
                targets[v] = b
        Q = G.canonical_form(G.contract(H.rep, targets, len(blocks)))
        out[Q] = out.get(Q, Fraction(0)) + mobius_weight(blocks)
    return out


class GraphHomObjective(Objective):
    """sum_t c_t prod_{components} hom(C; X) on symmetric matrices."""

    has_grad = True

    def __init__(self, hom_coeffs: dict):
        self.terms = []
        self.constant = 0.0
        for H, c in hom_coeffs.items():
            comps = _components(H)
            if not comps:
                self.constant += float(c)
            else:
                self.terms.append((float(c), [_component(C) for C in comps]))

    def value(self, X) -> float:
        X = np.asarray(X, dtype=float)
        d = np.diag(X).copy()
        cache: dict[int, float] = {}
        total = self.constant
        for c, comps in self.terms:
            v = c
            for comp in comps:
                key = id(comp)
                if key not in cache:
                    cache[key] = comp.value(X, d)
                v *= cache[key]
            total += v
        return total

    def grad(self, X):
        X = np.asarray(X, dtype=float)
        d = np.diag(X).copy()
        vals: dict[int, float] = {}
        grads: dict[int, np.ndarray] = {}
        out = np.zeros_like(X)
        for c, comps in self.terms:
            for comp in comps:
                if id(comp) not in vals:
                    vals[id(comp)] = comp.value(X, d)
            for t, comp in enumerate(comps):
                others = math.prod(vals[id(o)] for u, o in enumerate(comps) if u != t)
                if others == 0.0:
                    continue
                if id(comp) not in grads:
                    grads[id(comp)] = comp.grad(X, d)
                out += c * others * grads[id(comp)]
        return 0.5 * (out + out.T)


def graph_hom_coeffs(p: G.GraphPoly, n: int | None = None) -> dict[G.GraphClass, Fraction]:
    """Rewrite p (no complement terms) as a combination of hom numbers."""
    if p.complement_coeffs:
        raise ValueError("complement terms need the binary-graph compiler")
    out: dict[G.GraphClass, Fraction] = {}

    def add(H, c):
        out[H] = out.get(H, Fraction(0)) + c

    for H, c in p.coeffs.items():
        if p.basis is G.GraphBasis.HOM:
            add(H, c)
        elif p.basis is G.GraphBasis.T:
            add(H, c / Fraction(n) ** H.n_active_vertices)
        else:
            scale = {G.GraphBasis.INJ: Fraction(1), G.GraphBasis.MSUM: Fraction(1, H.aut_count)}
            if p.basis is G.GraphBasis.TINJ:
                cnt = falling_factorial(n, H.n_active_vertices)
                if cnt == 0:
                    raise ValueError("dimension too small for atom")
                s = Fraction(1, cnt)
            else:
                s = scale[p.basis]
            for Q, mu in _inj_as_hom(H).items():
                add(Q, c * s * mu)
    return {H: c for H, c in out.items() if c}


def graphpoly_objective(p: G.GraphPoly, n: int) -> GraphHomObjective:
    return GraphHomObjective(graph_hom_coeffs(p, n))


# ---------------------------------------------------------------------------
# binary simple graphs


@dataclass
class BinaryGraphObjective:
    """Exact objective on n-vertex simple graphs:

        value(g) = (constant + sum_F w_F copies_F(g) + sum_F w'_F copies_F(~g)) / denominator

    with integer weights, F simple graphs without isolated vertices and ~g the complement.
    """

    n: int
    denominator: int
    constant: int
    terms: list = field(default_factory=list)  # (weight, pattern class, complement flag)

    def __post_init__(self):
        self.pairs = G.upper_pairs(self.n)
        self._pair_index = {p: b for b, p in enumerate(self.pairs)}
        self.placements = [self._placements(F) for _, F, _ in self.terms]

    @property
    def n_edges(self) -> int:
        return len(self.pairs)

    def _placements(self, F: G.GraphClass) -> list[int]:
        """Edge masks of all copies of F inside K_n."""
        masks = set()
        edges = [(i, j) for i, j, _ in F.rep.edges()]
        for img in itertools.permutations(range(self.n), F.n_active_vertices):
            m = 0
            for i, j in edges:
                a, b = sorted((img[i], img[j]))
                m |= 1 << self._pair_index[(a, b)]
            masks.add(m)
        return sorted(masks)

    def integer_value(self, bits: int) -> int:
        full = (1 << self.n_edges) - 1
        total = self.constant
        for (w, _, comp), masks in zip(self.terms, self.placements):
            g = (full ^ bits) if comp else bits
            total += w * sum(1 for m in masks if g & m == m)
        return total

    def value(self, bits: int) -> Fraction:
        return Fraction(self.integer_value(bits), self.denominator)

    def flat_arrays(self):
        """Arrays consumed by the scan kernels."""
        full_mask, full_w, full_c = [], [], []
        per_edge: list[list[tuple[int, int, int]]] = [[] for _ in range(self.n_edges)]
        for (w, _, comp), masks in zip(self.terms, self.placements):
            for m in masks:
                full_mask.append(m)
                full_w.append(w)
                full_c.append(int(comp))
                for e in range(self.n_edges):
                    if m >> e & 1:
                        per_edge[e].append((m & ~(1 << e), w, int(comp)))
        ptr = [0]
        rest, rw, rc = [], [], []
        for lst in per_edge:
            for r, w, c in lst:
                rest.append(r)
                rw.append(w)
                rc.append(c)
            ptr.append(len(rest))
        i64 = np.int64
        return dict(
            full_mask=np.array(full_mask, dtype=i64), full_w=np.array(full_w, dtype=i64),
            full_c=np.array(full_c, dtype=np.uint8), ptr=np.array(ptr, dtype=i64),
            rest=np.array(rest, dtype=i64), rest_w=np.array(rw, dtype=i64),
            rest_c=np.array(rc, dtype=np.uint8), constant=int(self.constant),
        )


def _to_msum_at(p_coeffs: dict, basis: G.GraphBasis, n: int) -> dict:
    """Graph monomial-sum coefficients of one block of terms at fixed n."""
    out: dict[G.GraphClass, Fraction] = {}
    for H, c in p_coeffs.items():
        V = H.n_active_vertices
        if basis is G.GraphBasis.T:
            sub = G.hom_to_m(G.GraphPoly(G.GraphBasis.HOM, {H: 1})).coeffs
            scale = Fraction(1, n ** V)
        elif basis is G.GraphBasis.TINJ:
            cnt = falling_factorial(n, V)
            if cnt == 0:
                raise ValueError("dimension too small for atom")
            sub, scale = {H: Fraction(H.aut_count)}, Fraction(1, cnt)
        else:
            sub = G.hom_to_m(G.GraphPoly(basis, {H: 1})).coeffs
            scale = Fraction(1)
        for Q, v in sub.items():
            out[Q] = out.get(Q, Fraction(0)) + c * scale * v
    return out


def _flatten_atom(Q: G.GraphClass, n: int, unit_diagonal: bool):
    """m^{[Q]} on a 0/1 matrix with constant diagonal, as (factor, simple core class).

    Multi-edges collapse (x^w = x on {0,1}); loops vanish on a zero diagonal and
    are 1 on a unit diagonal, where the vertices they leave isolated are counted
    by a falling factorial.
    """
    A = Q.rep.adjacency
    V = Q.n_active_vertices
    if Q.loop_weight and not unit_diagonal:
        return Fraction(0), None
    flat = [[1 if (i != j and A[i][j]) else 0 for j in range(V)] for i in range(V)]
    core = G.canonical_form(G.MultiGraph(tuple(map(tuple, flat))))
    iso = V - core.n_active_vertices
    factor = Fraction(core.aut_count * falling_factorial(n - core.n_active_vertices, iso), Q.aut_count)
    return factor, core


def compile_binary_objective(p: G.GraphPoly, n: int) -> BinaryGraphObjective:
    """Exact integer-weight objective for p on n-vertex simple graphs (zero diagonal)."""
    weights: dict[tuple[G.GraphClass, bool], Fraction] = {}
    constant = Fraction(0)
    blocks = [(p.coeffs, False)]
    if p.complement_coeffs:
        blocks.append((p.complement_coeffs, True))
    for coeffs, comp in blocks:
        for Q, c in _to_msum_at(coeffs, p.basis, n).items():
            factor, core = _flatten_atom(Q, n, unit_diagonal=comp)
            if not factor:
                continue
            if core.n_active_vertices == 0:
                constant += c * factor
                continue
            if core.n_active_vertices > n:
                continue
            key = (core, comp)
            weights[key] = weights.get(key, Fraction(0)) + c * factor
    weights = {k: v for k, v in weights.items() if v}
    den = math.lcm(constant.denominator, *(v.denominator for v in weights.values()))
    terms = [(int(v * den), F, comp) for (F, comp), v in sorted(weights.items(), key=lambda kv: (kv[0][1], kv[0][0]))]
    obj = BinaryGraphObjective(n, den, int(constant * den), terms)
    bound = abs(obj.constant) + sum(abs(w) * len(m) for (w, _, _), m in zip(obj.terms, obj.placements))
    if bound >= 2**62:
        raise OverflowError("objective weights exceed 64-bit range")
    return obj
