"""Multigraph algebra: homomorphism numbers and densities, quotients, the graph
refinement order, and the graph de Finetti basis used by the dual costs.

Two different vertex-identification operations appear here and are easy to mix up:

* :func:`quotient` is the linear action on symmetric matrices, ``P^T X P`` for the
  fiber indicator ``P``.  Edges inside a fiber land on the diagonal twice, so
  ``1^T X 1`` is conserved.  This is what the de Finetti map does to a point.
* :func:`contract` identifies vertices of a multigraph counting every edge once,
  so the edge count ``|H|`` is conserved.  The refinement order and the counts
  ``R_{[G],[H]}`` are defined through it.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .combinat import falling_factorial, set_partitions
from .symfunc import TransitionMatrix

CANON_LIMIT = 9
REFINE_COUNT_LIMIT = 8
REFINE_WEIGHT_LIMIT = 5


@dataclass(frozen=True)
class MultiGraph:
    """Symmetric adjacency of nonnegative integers; the diagonal holds loop counts."""

    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        adj = tuple(tuple(int(v) for v in row) for row in self.adjacency)
        n = len(adj)
        for i, row in enumerate(adj):
            if len(row) != n:
                raise ValueError("adjacency must be square")
            for j, v in enumerate(row):
                if v < 0:
                    raise ValueError("multigraph entries must be nonnegative")
                if v != adj[j][i]:
                    raise ValueError("adjacency must be symmetric")
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], n: int | None = None, one_based: bool = False):
        edges = [(a - one_based, b - one_based) for a, b in edges]
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
        adj = [[0] * n for _ in range(n)]
        for a, b in edges:
            if a == b:
                adj[a][a] += 1
            else:
                adj[a][b] += 1
                adj[b][a] += 1
        return cls(tuple(map(tuple, adj)))

    @classmethod
    def from_array(cls, a) -> "MultiGraph":
        return cls(tuple(tuple(int(v) for v in row) for row in np.asarray(a).tolist()))

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    def total_weight(self) -> int:
        """|H| = sum over i <= j of H_ij."""
        A = self.adjacency
        return sum(A[i][j] for i in range(len(A)) for j in range(i, len(A)))

    def loop_weight(self) -> int:
        return sum(self.adjacency[i][i] for i in range(self.n_vertices))

    def factorial(self) -> int:
        """H! = prod over i <= j of H_ij!"""
        A = self.adjacency
        return math.prod(math.factorial(A[i][j]) for i in range(len(A)) for j in range(i, len(A)))

    def edges(self) -> list[tuple[int, int, int]]:
        """(i, j, multiplicity) for i <= j with nonzero multiplicity."""
        A = self.adjacency
        return [(i, j, A[i][j]) for i in range(len(A)) for j in range(i, len(A)) if A[i][j]]

    def active_vertices(self) -> list[int]:
        return [i for i, row in enumerate(self.adjacency) if any(row)]

    def without_isolated(self) -> "MultiGraph":
        keep = self.active_vertices()
        return MultiGraph(tuple(tuple(self.adjacency[i][j] for j in keep) for i in keep))

    def relabel(self, perm: Sequence[int]) -> "MultiGraph":
        """Graph whose vertex ``t`` is old vertex ``perm[t]``."""
        A = self.adjacency
        return MultiGraph(tuple(tuple(A[perm[i]][perm[j]] for j in range(len(perm))) for i in range(len(perm))))

    def to_array(self) -> np.ndarray:
        return np.array(self.adjacency, dtype=np.int64).reshape(self.n_vertices, self.n_vertices)

    def is_simple(self) -> bool:
        return all(v <= 1 for row in self.adjacency for v in row) and self.loop_weight() == 0

    def connected_components(self) -> list[list[int]]:
        seen: set[int] = set()
        comps = []
        for s in self.active_vertices():
            if s in seen:
                continue
            stack, comp = [s], []
            seen.add(s)
            while stack:
                v = stack.pop()
                comp.append(v)
                for u, w in enumerate(self.adjacency[v]):
                    if w and u not in seen:
                        seen.add(u)
                        stack.append(u)
            comps.append(sorted(comp))
        return comps

    def edge_string(self) -> str:
        parts = []
        for i, j, w in self.edges():
            parts.extend([f"{i + 1}-{j + 1}"] * w)
        return "H{" + ",".join(parts) + "}"

    def __str__(self) -> str:
        return self.edge_string()


def contract(G: MultiGraph, targets: Sequence[int], m: int | None = None) -> MultiGraph:
    """Identify vertices along ``targets`` counting each edge once (|G| is conserved)."""
    if len(targets) != G.n_vertices:
        raise ValueError("map must be total on the vertex set")
    m = (max(targets) + 1 if targets else 0) if m is None else m
    C = [[0] * m for _ in range(m)]
    for i, j, w in G.edges():
        a, b = targets[i], targets[j]
        if a == b:
            C[a][a] += w
        else:
            C[a][b] += w
            C[b][a] += w
    return MultiGraph(tuple(map(tuple, C)))


def quotient(X, targets: Sequence[int], m: int | None = None):
    """Fiber-sum action ``P^T X P``; conserves ``1^T X 1``.  MultiGraph in, MultiGraph out."""
    is_graph = isinstance(X, MultiGraph)
    is_point = isinstance(X, WeightedGraphPoint)
    A = X.to_array() if is_graph else (X.X if is_point else X)
    targets = list(targets)
    m = (max(targets) + 1 if targets else 0) if m is None else m
    if isinstance(A, np.ndarray) and A.dtype != object:
        if A.shape != (len(targets), len(targets)):
            raise ValueError("map must be total on the vertex set")
        P = np.zeros((len(targets), m), dtype=A.dtype)
        P[np.arange(len(targets)), targets] = 1
        out = P.T @ A @ P
    else:
        rows = [list(r) for r in A]
        if len(rows) != len(targets):
            raise ValueError("map must be total on the vertex set")
        out = [[0] * m for _ in range(m)]
        for i, a in enumerate(targets):
            for j, b in enumerate(targets):
                out[a][b] = out[a][b] + rows[i][j]
    if is_graph:
        return MultiGraph.from_array(out)
    if is_point:
        return WeightedGraphPoint(out)
    return out


# ---------------------------------------------------------------------------
# canonical forms


def _upper_sequence(A, perm) -> tuple[int, ...]:
    n = len(perm)
    return tuple(A[perm[i]][perm[j]] for i in range(n) for j in range(i, n))


def _lexmin_labeling(A: tuple[tuple[int, ...], ...]) -> list[int]:
    """Permutation minimising the row-major upper-triangular sequence.

    Exact search over ordered partitions: position i must be filled from the
    first cell, and the rest of its row is minimised by sorting every later
    cell by adjacency to the chosen vertex, which splits cells further.
    Ties branch; everything else is pruned.
    """
    n = len(A)
    best_seq: list[int] | None = None
    best_perm: list[int] = list(range(n))

    def rec(cells: list[list[int]], placed: list[int], prefix: list[int]):
        nonlocal best_seq, best_perm
        if not cells:
            if best_seq is None or prefix < best_seq:
                best_seq, best_perm = list(prefix), list(placed)
            return
        options = []
        first = cells[0]
        for v in first:
            row = [A[v][v]]
            new_cells = []
            rest = [u for u in first if u != v]
            for cell in ([rest] if rest else []) + cells[1:]:
                groups: dict[int, list[int]] = {}
                for u in cell:
                    groups.setdefault(A[v][u], []).append(u)
                for val in sorted(groups):
                    g = groups[val]
                    row.extend([val] * len(g))
                    new_cells.append(g)
            options.append((row, v, new_cells))
        min_row = min(o[0] for o in options)
        if best_seq is not None:
            cand = prefix + min_row
            if cand > best_seq[: len(cand)]:
                return
        for row, v, new_cells in options:
            if row == min_row:
                rec(new_cells, placed + [v], prefix + row)

    rec([list(range(n))] if n else [], [], [])
    return best_perm


@dataclass(frozen=True, eq=False)
class GraphClass:
    """Isomorphism class of a multigraph with isolated vertices removed."""

    rep: MultiGraph
    key: tuple = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, GraphClass) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def n_active_vertices(self) -> int:
        return self.rep.n_vertices

    @property
    def edge_count(self) -> int:
        return self.rep.total_weight()

    @property
    def loop_weight(self) -> int:
        return self.rep.loop_weight()

    @cached_property
    def aut_count(self) -> int:
        return graph_refinement_count(self, self)

    @property
    def factorial(self) -> int:
        return self.rep.factorial()

    def is_simple(self) -> bool:
        return self.rep.is_simple()

    def sort_key(self):
        # coarser classes first: refinements keep |H| and gain vertices
        return (self.edge_count, self.n_active_vertices, self.key)

    def __lt__(self, other: "GraphClass") -> bool:
        return self.sort_key() < other.sort_key()

    def name(self) -> str:
        return NAMED_BY_CLASS().get(self, self.rep.edge_string())

    def __str__(self) -> str:
        return self.name()

    def __repr__(self) -> str:
        return f"GraphClass({self.rep.edge_string()})"


@lru_cache(maxsize=100_000)
def _canonical_cached(adj: tuple) -> GraphClass:
    g = MultiGraph(adj).without_isolated()
    if g.n_vertices > CANON_LIMIT:
        raise ValueError("canonicalization size limit")
    perm = _lexmin_labeling(g.adjacency)
    rep = g.relabel(perm)
    return GraphClass(rep, (rep.n_vertices, _upper_sequence(rep.adjacency, list(range(rep.n_vertices)))))


def canonical_form(g) -> GraphClass:
    """Canonical class of a multigraph (isolated vertices dropped, lex-min relabeling)."""
    if isinstance(g, GraphClass):
        return g
    if not isinstance(g, MultiGraph):
        g = MultiGraph.from_array(g)
    return _canonical_cached(g.adjacency)


# ---------------------------------------------------------------------------
# counting polynomials


@dataclass
class WeightedGraphPoint:
    """Symmetric n x n real (or rational) matrix."""

    X: object

    def __post_init__(self):
        X = self.X
        if isinstance(X, np.ndarray) and X.dtype != object:
            if X.ndim != 2 or X.shape[0] != X.shape[1]:
                raise ValueError("point must be a square matrix")
            if not np.allclose(X, X.T):
                raise ValueError("point must be symmetric")
        else:
            rows = [list(r) for r in X]
            if any(len(r) != len(rows) for r in rows):
                raise ValueError("point must be a square matrix")
            if any(rows[i][j] != rows[j][i] for i in range(len(rows)) for j in range(len(rows))):
                raise ValueError("point must be symmetric")
            self.X = rows

    @property
    def n(self) -> int:
        return len(self.X)


def _rows(X):
    if isinstance(X, WeightedGraphPoint):
        X = X.X
    if isinstance(X, np.ndarray):
        return X.tolist()
    return [list(r) for r in X]


def _as_class(H) -> GraphClass:
    return H if isinstance(H, GraphClass) else canonical_form(H)


def _monomial_over_map(edges, rows, f):
    term = 1
    for i, j, w in edges:
        term = term * rows[f[i]][f[j]] ** w
    return term


def hom_number(H, X):
    """sum over all maps f: V(H) -> [n] of prod X_{f(i) f(j)}^{H_ij}; hom(K1; X) = 1."""
    H = _as_class(H)
    rows = _rows(X)
    edges = H.rep.edges()
    total = 0
    for f in itertools.product(range(len(rows)), repeat=H.n_active_vertices):
        total = total + _monomial_over_map(edges, rows, f)
    return total


def inj_number(H, X):
    """Same sum restricted to injective maps; zero when n < |V(H)|."""
    H = _as_class(H)
    rows = _rows(X)
    edges = H.rep.edges()
    total = 0
    for f in itertools.permutations(range(len(rows)), H.n_active_vertices):
        total = total + _monomial_over_map(edges, rows, f)
    return total


def _divide(v, d):
    if isinstance(v, float):
        return v / d
    return Fraction(v) / d


def t_density(H, X):
    H = _as_class(H)
    n = len(_rows(X))
    return _divide(hom_number(H, X), n ** H.n_active_vertices)


def t_inj_density(H, X):
    H = _as_class(H)
    n = len(_rows(X))
    count = falling_factorial(n, H.n_active_vertices)
    if count == 0:
        raise ZeroDivisionError("t_inj undefined: fewer vertices than the pattern")
    return _divide(inj_number(H, X), count)


def m_graph_sum(H, X):
    """Number of copies of H in X up to relabeling: inj(H; X) / |Aut(H)|."""
    H = _as_class(H)
    return _divide(inj_number(H, X), H.aut_count)


def complement(X):
    """J - X with J the all-ones matrix."""
    rows = _rows(X)
    return [[1 - v for v in r] for r in rows]


# ---------------------------------------------------------------------------
# refinement order


def graph_refinement_count(G, H) -> int:
    """Number of surjections f: V(G) -> V(H) with contract(G, f) equal to H's representative."""
    G, H = _as_class(G), _as_class(H)
    if G.n_active_vertices > REFINE_COUNT_LIMIT or H.n_active_vertices > REFINE_COUNT_LIMIT:
        raise ValueError("refinement count size limit")
    return _refinement_count_cached(G.rep.adjacency, H.rep.adjacency)


@lru_cache(maxsize=None)
def _refinement_count_cached(gadj, hadj) -> int:
    G, H = MultiGraph(gadj), MultiGraph(hadj)
    if G.total_weight() != H.total_weight() or G.n_vertices < H.n_vertices:
        return 0
    if G.n_vertices == 0:
        return 1
    n, m = G.n_vertices, H.n_vertices
    A, B = G.adjacency, H.adjacency
    # BFS order keeps many edges between already-placed vertices, so pruning bites early
    order: list[int] = []
    for comp in G.connected_components():
        start = comp[0]
        seen, queue = {start}, [start]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for u in range(n):
                if A[v][u] and u not in seen:
                    seen.add(u)
                    queue.append(u)
    C = [[0] * m for _ in range(m)]
    f = [-1] * n
    hits = [0] * m
    count = 0

    def rec(t: int, covered: int) -> None:
        nonlocal count
        if t == n:
            if covered == m and all(C[i][j] == B[i][j] for i in range(m) for j in range(i, m)):
                count += 1
            return
        if m - covered > n - t:
            return
        a = order[t]
        for i in range(m):
            touched = []
            ok = True
            if A[a][a]:
                C[i][i] += A[a][a]
                touched.append((i, i, A[a][a]))
                ok = C[i][i] <= B[i][i]
            if ok:
                for s in range(t):
                    b = order[s]
                    w = A[a][b]
                    if not w:
                        continue
                    j = f[b]
                    x, y = (i, j) if i <= j else (j, i)
                    C[x][y] += w
                    touched.append((x, y, w))
                    if C[x][y] > B[x][y]:
                        ok = False
                        break
            if ok:
                f[a] = i
                hits[i] += 1
                rec(t + 1, covered + (hits[i] == 1))
                hits[i] -= 1
                f[a] = -1
            for x, y, w in touched:
                C[x][y] -= w

    rec(0, 0)
    return count


def graph_refines(G, H) -> bool:
    return graph_refinement_count(G, H) > 0


def _elementary_splits(g: MultiGraph) -> Iterator[MultiGraph]:
    """All graphs obtained by splitting one vertex into two non-isolated vertices."""
    n = g.n_vertices
    A = g.adjacency
    for v in range(n):
        nbrs = [(u, A[v][u]) for u in range(n) if u != v and A[v][u]]
        loop = A[v][v]
        # per neighbour: how much of the weight goes to the new vertex
        nbr_choices = [range(w + 1) for _, w in nbrs]
        # loop weight splits into (loops at v, loops at new, edges v-new)
        loop_choices = [(a, b, loop - a - b) for a in range(loop + 1) for b in range(loop + 1 - a)]
        for split in itertools.product(*nbr_choices):
            for la, lb, lab in loop_choices:
                B = [list(r) + [0] for r in A] + [[0] * (n + 1)]
                for (u, w), s in zip(nbrs, split):
                    B[v][u] = B[u][v] = w - s
                    B[n][u] = B[u][n] = s
                B[v][v], B[n][n] = la, lb
                B[v][n] = B[n][v] = lab
                if any(B[v]) and any(B[n]):
                    yield MultiGraph(tuple(map(tuple, B)))


@lru_cache(maxsize=None)
def _refinements_cached(H: GraphClass) -> tuple[GraphClass, ...]:
    found = {H}
    frontier = [H]
    while frontier:
        nxt = []
        for cls in frontier:
            for g in _elementary_splits(cls.rep):
                c = canonical_form(g)
                if c not in found:
                    found.add(c)
                    nxt.append(c)
        frontier = nxt
    return tuple(sorted(found))


def graph_refinements(H) -> list[GraphClass]:
    """All classes G with [G] <=_R [H], H included."""
    H = _as_class(H)
    if H.edge_count > REFINE_WEIGHT_LIMIT:
        raise ValueError("refinement enumeration size limit")
    return list(_refinements_cached(H))


@lru_cache(maxsize=None)
def _coarsenings_cached(H: GraphClass) -> tuple[tuple[GraphClass, int], ...]:
    counts: dict[GraphClass, int] = {}
    verts = list(range(H.n_active_vertices))
    for blocks in set_partitions(verts):
        targets = [0] * len(verts)
        for b, block in enumerate(blocks):
            for v in block:
                targets[v] = b
        c = canonical_form(contract(H.rep, targets, len(blocks)))
        counts[c] = counts.get(c, 0) + 1
    return tuple(sorted(counts.items()))


def graph_coarsenings(H) -> dict[GraphClass, int]:
    """Map [G] -> R_{[H],[G]} over all [G] with [H] <=_R [G]."""
    H = _as_class(H)
    return {G: npart * G.aut_count for G, npart in _coarsenings_cached(H)}


def refinement_closure(atoms: Iterable) -> list[GraphClass]:
    out: set[GraphClass] = set()
    for a in atoms:
        out.update(graph_refinements(a))
    return sorted(out)


# ---------------------------------------------------------------------------
# graph polynomials


class GraphBasis(str, Enum):
    HOM = "hom"
    INJ = "inj"
    T = "t"
    TINJ = "tinj"
    MSUM = "m"

    @property
    def is_density(self) -> bool:
        return self in (GraphBasis.T, GraphBasis.TINJ)


@dataclass
class GraphPoly:
    """Exact linear combination of graph-class atoms in one basis.

    ``complement_coeffs`` hold terms evaluated at ``J - X``; they are only
    meaningful for the density bases.
    """

    basis: GraphBasis
    coeffs: dict = field(default_factory=dict)
    complement_coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        self.basis = GraphBasis(self.basis)
        self.coeffs = _clean(self.coeffs)
        self.complement_coeffs = _clean(self.complement_coeffs)
        if self.complement_coeffs and not self.basis.is_density:
            raise ValueError("complement terms are only supported for density bases")

    def degree(self) -> int:
        atoms = list(self.coeffs) + list(self.complement_coeffs)
        return max((a.edge_count for a in atoms), default=0)

    def max_vertices(self) -> int:
        atoms = list(self.coeffs) + list(self.complement_coeffs)
        return max((a.n_active_vertices for a in atoms), default=0)

    def atoms(self) -> list[GraphClass]:
        return sorted(set(self.coeffs) | set(self.complement_coeffs))

    def is_zero(self) -> bool:
        return not self.coeffs and not self.complement_coeffs

    def scale(self, c) -> "GraphPoly":
        c = Fraction(c)
        return GraphPoly(self.basis, {a: c * v for a, v in self.coeffs.items()},
                         {a: c * v for a, v in self.complement_coeffs.items()})

    def __add__(self, other: "GraphPoly") -> "GraphPoly":
        if self.basis != other.basis:
            raise ValueError("basis mismatch")
        return GraphPoly(self.basis, _merge(self.coeffs, other.coeffs),
                         _merge(self.complement_coeffs, other.complement_coeffs))

    def __sub__(self, other: "GraphPoly") -> "GraphPoly":
        return self + other.scale(-1)

    def evaluate(self, X):
        fn = {
            GraphBasis.HOM: hom_number,
            GraphBasis.INJ: inj_number,
            GraphBasis.T: t_density,
            GraphBasis.TINJ: t_inj_density,
            GraphBasis.MSUM: m_graph_sum,
        }[self.basis]
        total = 0
        for atom, c in self.coeffs.items():
            v = fn(atom, X)
            total = total + (float(c) if isinstance(v, float) else c) * v
        if self.complement_coeffs:
            Xc = complement(X)
            for atom, c in self.complement_coeffs.items():
                v = fn(atom, Xc)
                total = total + (float(c) if isinstance(v, float) else c) * v
        return total

    def __call__(self, X):
        return self.evaluate(X)

    def to_rows(self) -> list[tuple[str, str, int, int]]:
        rows = [(self.basis.value, a.rep.edge_string(), c.numerator, c.denominator)
                for a, c in self.coeffs.items()]
        rows += [(self.basis.value + "c", a.rep.edge_string(), c.numerator, c.denominator)
                 for a, c in self.complement_coeffs.items()]
        return rows

    def __str__(self) -> str:
        terms = [f"{c}*{self.basis.value}[{a.name()}]" for a, c in self.coeffs.items()]
        terms += [f"{c}*{self.basis.value}c[{a.name()}]" for a, c in self.complement_coeffs.items()]
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def _clean(coeffs: Mapping) -> dict:
    out: dict[GraphClass, Fraction] = {}
    for a, c in coeffs.items():
        a = _as_class(a)
        out[a] = out.get(a, Fraction(0)) + Fraction(c)
    return {a: c for a, c in sorted(out.items()) if c}


def _merge(a: Mapping, b: Mapping) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + v
    return out


def hom_to_m(p: GraphPoly, d: int | None = None) -> GraphPoly:
    """Rewrite a Hom/Inj polynomial in graph monomial sums."""
    if p.basis not in (GraphBasis.HOM, GraphBasis.INJ, GraphBasis.MSUM):
        raise ValueError("hom_to_m expects a Hom, Inj or monomial-sum polynomial")
    if d is not None and p.degree() > d:
        raise ValueError("atom degree exceeds the bound")
    if p.degree() > REFINE_WEIGHT_LIMIT:
        raise ValueError("size limit")
    out: dict[GraphClass, Fraction] = {}
    for H, c in p.coeffs.items():
        if p.basis is GraphBasis.HOM:
            for G, r in graph_coarsenings(H).items():
                out[G] = out.get(G, Fraction(0)) + c * r
        elif p.basis is GraphBasis.INJ:
            out[H] = out.get(H, Fraction(0)) + c * H.aut_count
        else:
            out[H] = out.get(H, Fraction(0)) + c
    return GraphPoly(GraphBasis.MSUM, out)


def m_to_inj(p: GraphPoly) -> GraphPoly:
    if p.basis is not GraphBasis.MSUM:
        raise ValueError("m_to_inj expects a monomial-sum polynomial")
    return GraphPoly(GraphBasis.INJ, {H: c / H.aut_count for H, c in p.coeffs.items()})


def graph_matrix_entry(k: int, H: GraphClass, G: GraphClass) -> Fraction:
    """Coefficient of m^{[G]} in E[m_k^{[H]}(L X)].

    (H!/G!) * 2^{loops(H) - loops(G)} * (k)_{|V(H)|} / k^{|V(G)|} * R_{[G],[H]} / R_{[H],[H]}.
    The power of two accounts for off-diagonal edges of G that fall inside a fiber:
    the diagonal of P^T X P counts them twice.
    """
    r = graph_refinement_count(G, H)
    if r == 0:
        return Fraction(0)
    return (Fraction(H.factorial, G.factorial)
            * 2 ** (H.loop_weight - G.loop_weight)
            * Fraction(falling_factorial(k, H.n_active_vertices), k ** G.n_active_vertices)
            * Fraction(r, H.aut_count))


def definetti_graph_matrix(k: int, atoms: Iterable) -> TransitionMatrix:
    """Graph de Finetti matrix over a refinement-closed atom set, coarsest first."""
    atoms = sorted({_as_class(a) for a in atoms})
    atom_set = set(atoms)
    for a in atoms:
        if not set(graph_refinements(a)) <= atom_set:
            raise ValueError("atom set not refinement-closed")
    if k < max((a.n_active_vertices for a in atoms), default=0):
        raise ValueError("basis incomplete: k below the largest atom's vertex count")
    entries = [[graph_matrix_entry(k, H, G) for G in atoms] for H in atoms]
    return TransitionMatrix(atoms, entries)


def definetti_graph_basis_element(k: int, H) -> GraphPoly:
    H = _as_class(H)
    return GraphPoly(GraphBasis.MSUM, {G: graph_matrix_entry(k, H, G) for G in graph_refinements(H)})


def dualize_graph_density(p: GraphPoly) -> GraphPoly:
    """t-basis cost to its dual: the same coefficients on injective densities."""
    if p.basis is not GraphBasis.T:
        raise ValueError("dualize_graph_density expects a t-basis polynomial")
    return GraphPoly(GraphBasis.TINJ, dict(p.coeffs), dict(p.complement_coeffs))


def dualize_graph_numbers(p: GraphPoly, n: int, k: int | None = None) -> GraphPoly:
    """Dual cost of a Hom/Inj polynomial as graph monomial sums, basis built at k (default n)."""
    k = n if k is None else k
    a = hom_to_m(p).coeffs
    closure = refinement_closure(a)
    need = max((g.n_active_vertices for g in closure), default=0)
    if n < need or k < need:
        raise ValueError(f"target dimension below {need}, the largest refinement's vertex count")
    M = definetti_graph_matrix(k, closure)
    return GraphPoly(GraphBasis.MSUM, M.solve_transposed(a))


# ---------------------------------------------------------------------------
# simple graph stream


def upper_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def graph_from_bits(n: int, bits: int) -> np.ndarray:
    X = np.zeros((n, n), dtype=np.int64)
    for b, (i, j) in enumerate(upper_pairs(n)):
        if bits >> b & 1:
            X[i, j] = X[j, i] = 1
    return X


def bits_from_graph(X) -> int:
    X = np.asarray(X)
    return sum(1 << b for b, (i, j) in enumerate(upper_pairs(len(X))) if X[i, j])


def enumerate_simple_graphs(n: int, allow_large: bool = False) -> Iterator[np.ndarray]:
    """Every labeled simple graph on n vertices once, in order of the upper-triangle bit string."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > 8 or (n == 8 and not allow_large):
        raise ValueError("size limit")
    for bits in range(1 << (n * (n - 1) // 2)):
        yield graph_from_bits(n, bits)


# ---------------------------------------------------------------------------
# names and parsing


_NAMED_EDGES = {
    "K1": ([], 1),
    "K2": ([(1, 2)], None),
    "K3": ([(1, 2), (2, 3), (1, 3)], None),
    "K4": ([(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)], None),
    "P3": ([(1, 2), (2, 3)], None),
    "P4": ([(1, 2), (2, 3), (3, 4)], None),
    "C4": ([(1, 2), (2, 3), (3, 4), (1, 4)], None),
    "K2uK2": ([(1, 2), (3, 4)], None),
    "K2uP3": ([(1, 2), (3, 4), (4, 5)], None),
    "3K2": ([(1, 2), (3, 4), (5, 6)], None),
    "K3pendant": ([(1, 2), (2, 3), (2, 4), (3, 4)], None),
    "loop": ([(1, 1)], None),
}


def named_graph(name: str) -> GraphClass:
    try:
        edges, n = _NAMED_EDGES[name]
    except KeyError:
        raise ValueError(f"unknown graph shortcut {name!r}") from None
    return canonical_form(MultiGraph.from_edges(edges, n, one_based=True))


@lru_cache(maxsize=1)
def NAMED_BY_CLASS() -> dict[GraphClass, str]:
    return {named_graph(k): k for k in _NAMED_EDGES}


def parse_edge_list(text: str) -> MultiGraph:
    """Parse "1-2,2-3,1-1" (one-based, repeated pairs are multi-edges)."""
    edges = []
    body = text.strip()
    if body:
        for tok in body.split(","):
            a, sep, b = tok.strip().partition("-")
            if not sep:
                raise ValueError(f"bad edge {tok!r}")
            edges.append((int(a), int(b)))
    if any(min(e) < 1 for e in edges):
        raise ValueError("vertices are numbered from 1")
    return MultiGraph.from_edges(edges, one_based=True)
