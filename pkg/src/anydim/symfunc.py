"""Symmetric-function algebra: power sums, monomial sums, means, and their dual costs.

All basis changes are carried out in exact rationals.  Evaluation works with
whatever scalar type the input holds: ``Fraction`` entries give exact results,
floats give floating results.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .combinat import (
    MultiIndexList,
    Partition,
    aut_count_partition,
    falling_factorial,
    partitions_of,
    partitions_up_to,
    refinement_count,
)


class Basis(str, Enum):
    POWER_SUM = "s"
    MONOMIAL_SUM = "m"
    POWER_MEAN = "sbar"
    MONOMIAL_MEAN = "mbar"

    @property
    def is_mean(self) -> bool:
        return self in (Basis.POWER_MEAN, Basis.MONOMIAL_MEAN)


@dataclass
class SymPoly:
    """Exact linear combination of basis atoms tagged with a single basis family."""

    basis: Basis
    coeffs: dict = field(default_factory=dict)
    ambient_dim: int = 1

    def __post_init__(self):
        self.basis = Basis(self.basis)
        atom_type = MultiIndexList if self.basis.is_mean else Partition
        clean = {}
        for atom, c in self.coeffs.items():
            if not isinstance(atom, atom_type):
                raise TypeError(f"{self.basis.value}-basis atoms must be {atom_type.__name__}, got {atom!r}")
            if self.basis.is_mean and atom.entries and atom.ambient_dim != self.ambient_dim:
                raise ValueError("atom ambient dimension does not match polynomial")
            c = Fraction(c)
            if c:
                clean[atom] = clean.get(atom, Fraction(0)) + c
        self.coeffs = {a: c for a, c in sorted(clean.items(), key=lambda kv: kv[0].sort_key()) if c}

    @classmethod
    def single(cls, basis: Basis, atom, coeff=1, ambient_dim: int = 1) -> "SymPoly":
        return cls(basis, {atom: Fraction(coeff)}, ambient_dim)

    def degree(self) -> int:
        return max((a.weight() for a in self.coeffs), default=0)

    def max_length(self) -> int:
        return max((len(a) for a in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "SymPoly") -> "SymPoly":
        self._check_compatible(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, Fraction(0)) + c
        return SymPoly(self.basis, out, self.ambient_dim)

    def __sub__(self, other: "SymPoly") -> "SymPoly":
        return self + other.scale(-1)

    def scale(self, c) -> "SymPoly":
        c = Fraction(c)
        return SymPoly(self.basis, {a: c * v for a, v in self.coeffs.items()}, self.ambient_dim)

    def _check_compatible(self, other: "SymPoly"):
        if self.basis != other.basis:
            raise ValueError(f"basis mismatch: {self.basis.value} vs {other.basis.value}")

    def evaluate(self, x):
        """Evaluate at a point: a vector for sums, a d_g x n matrix (or vector when d_g = 1) for means."""
        total = 0
        for atom, c in self.coeffs.items():
            if self.basis is Basis.POWER_SUM:
                v = eval_power_sum_product(atom, x)
            elif self.basis is Basis.MONOMIAL_SUM:
                # an orbit sum over fewer variables than parts is empty
                v = eval_monomial_sum(atom, x) if len(atom) <= len(_tolist(x)) else 0
            elif self.basis is Basis.POWER_MEAN:
                v = eval_mean_atom(atom, "power-mean", x)
            else:
                v = eval_mean_atom(atom, "monomial-mean", x)
            total = total + _scalar(c, v) * v
        return total

    def __call__(self, x):
        return self.evaluate(x)

    def to_rows(self) -> list[tuple[str, str, int, int]]:
        """CSV-ready rows (basis_tag, atom, numerator, denominator)."""
        return [(self.basis.value, str(a), c.numerator, c.denominator) for a, c in self.coeffs.items()]

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], ambient_dim: int | None = None) -> "SymPoly":
        rows = list(rows)
        if not rows:
            raise ValueError("cannot infer basis from zero rows")
        basis = Basis(rows[0][0])
        coeffs = {}
        for tag, atom, num, den in rows:
            if Basis(tag) != basis:
                raise ValueError("rows mix bases")
            a = MultiIndexList.parse(atom, ambient_dim) if basis.is_mean else Partition.parse(atom)
            coeffs[a] = Fraction(int(num), int(den))
        dim = ambient_dim or next((a.ambient_dim for a in coeffs if basis.is_mean and a.entries), 1)
        return cls(basis, coeffs, dim)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for a, c in self.coeffs.items():
            terms.append(f"{c}*{self.basis.value}{a}")
        return " + ".join(terms).replace("+ -", "- ")


def _scalar(c: Fraction, v):
    # keep floats as floats, exact inputs exact
    return float(c) if isinstance(v, float) else c


# ---------------------------------------------------------------------------
# evaluation


def _column(x, j):
    return [row[j] for row in x]


def _as_matrix(x) -> list[list]:
    """Normalise a means argument into a list of d_g rows."""
    if hasattr(x, "ndim"):
        if x.ndim == 1:
            return [list(x.tolist())]
        return [list(r) for r in x.tolist()]
    if x and isinstance(x[0], (list, tuple)):
        return [list(r) for r in x]
    return [list(x)]


def _tolist(x) -> list:
    return x.tolist() if hasattr(x, "tolist") else list(x)


def eval_power_sum_product(lam: Partition, x):
    """prod_i sum_j x_j^{lam_i}; the empty partition gives 1."""
    xs = _tolist(x)
    if not xs:
        raise ValueError("need n >= 1")
    out = 1
    for p in lam.parts:
        out = out * sum(xi ** p for xi in xs)
    return out


def injective_sum(exponents: Sequence, xs: Sequence[Sequence], power: Callable) -> object:
    """sum over injective index tuples (i_1..i_l) of prod_t power(column i_t, exponents[t])."""
    n = len(xs)
    total = 0
    for idx in itertools.permutations(range(n), len(exponents)):
        term = 1
        for e, i in zip(exponents, idx):
            term = term * power(xs[i], e)
        total = total + term
    return total


def eval_monomial_sum(lam: Partition, x):
    """Orbit sum of the zero-padded monomial x^lam, by injective enumeration."""
    xs = _tolist(x)
    if len(xs) < len(lam):
        raise ValueError("dimension too small for atom")
    total = injective_sum(lam.parts, xs, lambda xi, e: xi ** e)
    aut = aut_count_partition(lam)
    if isinstance(total, float):
        return total / aut
    return Fraction(total) / aut if not isinstance(total, int) else Fraction(total, aut)


def _mono(col: Sequence, alpha: Sequence[int]):
    out = 1
    for v, a in zip(col, alpha):
        if a:
            out = out * v ** a
    return out


def eval_mean_atom(lam: MultiIndexList, kind: str, x):
    """Power mean or monomial mean of a multi-index list at x in R^{d_g x n}."""
    rows = _as_matrix(x)
    if len(rows) != lam.ambient_dim and lam.entries:
        raise ValueError(f"dimension mismatch: atom needs d_g={lam.ambient_dim}, got {len(rows)} rows")
    n = len(rows[0])
    cols = [_column(rows, j) for j in range(n)]
    if kind == "power-mean":
        if n < 1:
            raise ValueError("need n >= 1")
        out = 1
        for alpha in lam.entries:
            s = sum(_mono(c, alpha) for c in cols)
            out = out * (s / n if isinstance(s, float) else Fraction(s) / n)
        return out
    if kind == "monomial-mean":
        if n < len(lam):
            raise ValueError("dimension too small for atom")
        total = injective_sum(lam.entries, cols, _mono)
        count = falling_factorial(n, len(lam))
        return total / count if isinstance(total, float) else Fraction(total) / count
    raise ValueError(f"unknown mean kind {kind!r}")


# ---------------------------------------------------------------------------
# basis changes


def coarsenings(lam: Partition) -> list[Partition]:
    """All mu with lam <=_R mu (lam refines mu)."""
    return [Partition(mu) for mu in partitions_of(lam.weight()) if len(mu) <= len(lam)
            and refinement_count(lam, Partition(mu)) > 0]


def refinements(lam: Partition) -> list[Partition]:
    """All mu with mu <=_R lam."""
    return [Partition(mu) for mu in partitions_of(lam.weight()) if len(mu) >= len(lam)
            and refinement_count(Partition(mu), lam) > 0]


def s_to_m(p: SymPoly) -> SymPoly:
    """Rewrite a power-sum polynomial in monomial sums: s^lam = sum_mu R_{lam,mu} m^mu."""
    if p.basis is not Basis.POWER_SUM:
        raise ValueError("s_to_m expects a power-sum polynomial")
    out: dict[Partition, Fraction] = {}
    for lam, c in p.coeffs.items():
        for mu in coarsenings(lam):
            out[mu] = out.get(mu, Fraction(0)) + c * refinement_count(lam, mu)
    return SymPoly(Basis.MONOMIAL_SUM, out)


@lru_cache(maxsize=None)
def _m_in_s(parts: tuple[int, ...]) -> tuple[tuple[Partition, Fraction], ...]:
    mu = Partition(parts)
    acc: dict[Partition, Fraction] = {mu: Fraction(1)}
    for nu in coarsenings(mu):
        if nu == mu:
            continue
        r = refinement_count(mu, nu)
        for a, c in _m_in_s(nu.parts):
            acc[a] = acc.get(a, Fraction(0)) - r * c
    denom = refinement_count(mu, mu)
    return tuple((a, c / denom) for a, c in acc.items() if c)


def m_to_s(p: SymPoly) -> SymPoly:
    """Inverse of :func:`s_to_m` by triangular back substitution."""
    if p.basis is not Basis.MONOMIAL_SUM:
        raise ValueError("m_to_s expects a monomial-sum polynomial")
    out: dict[Partition, Fraction] = {}
    for mu, c in p.coeffs.items():
        for a, v in _m_in_s(mu.parts):
            out[a] = out.get(a, Fraction(0)) + c * v
    return SymPoly(Basis.POWER_SUM, out)


@dataclass
class TransitionMatrix:
    """Dense exact matrix indexed by basis atoms.

    Atoms are listed coarsest-first, so the de Finetti matrices are upper
    triangular in this order.
    """

    atoms: list
    entries: list[list[Fraction]]

    def __post_init__(self):
        self._index = {a: i for i, a in enumerate(self.atoms)}
        if len(self.entries) != len(self.atoms) or any(len(r) != len(self.atoms) for r in self.entries):
            raise ValueError("transition matrix must be square over its atoms")

    def __getitem__(self, key) -> Fraction:
        r, c = key
        return self.entries[self._index[r]][self._index[c]]

    def row(self, atom) -> dict:
        i = self._index[atom]
        return {a: v for a, v in zip(self.atoms, self.entries[i]) if v}

    def diagonal(self) -> list[Fraction]:
        return [self.entries[i][i] for i in range(len(self.atoms))]

    def is_upper_triangular(self) -> bool:
        return all(self.entries[i][j] == 0 for i in range(len(self.atoms)) for j in range(i))

    def solve_transposed(self, rhs: Mapping) -> dict:
        """Solve M^T c = rhs by forward substitution (M upper triangular)."""
        if not self.is_upper_triangular():
            raise ValueError("matrix is not upper triangular in its atom order")
        unknown = set(rhs) - set(self.atoms)
        if unknown:
            raise ValueError(f"right-hand side has atoms outside the matrix: {sorted(map(str, unknown))}")
        c: list[Fraction] = []
        for j, atom in enumerate(self.atoms):
            acc = Fraction(rhs.get(atom, 0))
            for i in range(j):
                if c[i] and self.entries[i][j]:
                    acc -= c[i] * self.entries[i][j]
            d = self.entries[j][j]
            if d == 0:
                raise ZeroDivisionError(f"zero pivot at atom {atom}")
            c.append(acc / d)
        return {a: v for a, v in zip(self.atoms, c) if v}


def sym_matrix_entry(k: int, lam: Partition, mu: Partition) -> Fraction:
    """(lam!/mu!) * ((k)_{len lam} / k^{len mu}) * (R_{mu,lam} / R_{lam,lam})."""
    r = refinement_count(mu, lam)
    if r == 0:
        return Fraction(0)
    return (Fraction(lam.factorial(), mu.factorial())
            * Fraction(falling_factorial(k, len(lam)), k ** len(mu))
            * Fraction(r, aut_count_partition(lam)))


def definetti_sym_matrix(k: int, d: int) -> TransitionMatrix:
    """Matrix M with p^{(k,lam)} = sum_mu M[lam, mu] m^{mu} over partitions of weight <= d."""
    if k < 1:
        raise ValueError("k must be positive")
    if k < d:
        raise ValueError("basis incomplete below degree")
    atoms = partitions_up_to(d)
    entries = [[sym_matrix_entry(k, lam, mu) for mu in atoms] for lam in atoms]
    return TransitionMatrix(atoms, entries)


def dualize_symfunc(p: SymPoly, n: int, k: int | None = None) -> SymPoly:
    """Dual cost q for a power-sum cost p, expressed in monomial sums.

    With ``k`` omitted the basis is built at k = n, which is what the lower
    bound at dimension n uses.
    """
    if p.basis is not Basis.POWER_SUM:
        raise ValueError("dualize_symfunc expects a power-sum polynomial")
    d = p.degree()
    if n < d:
        raise ValueError("target dimension below degree")
    k = n if k is None else k
    a = s_to_m(p).coeffs
    M = definetti_sym_matrix(k, d)
    return SymPoly(Basis.MONOMIAL_SUM, M.solve_transposed(a))


def definetti_sym_basis_element(k: int, lam: Partition) -> SymPoly:
    """p^{(k,lam)} written in monomial sums (one row of the de Finetti matrix)."""
    if k < len(lam):
        raise ValueError("k must be at least len(lam)")
    return SymPoly(Basis.MONOMIAL_SUM, {mu: sym_matrix_entry(k, lam, mu) for mu in refinements(lam)})


def dualize_means(p: SymPoly) -> SymPoly:
    """Power means map to monomial means with the same coefficients."""
    if p.basis is not Basis.POWER_MEAN:
        raise ValueError("dualize_means expects a power-mean polynomial")
    return SymPoly(Basis.MONOMIAL_MEAN, dict(p.coeffs), p.ambient_dim)
