"""Exact integer combinatorics: partitions, multi-index lists, refinement counts."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

Rational = Fraction


@dataclass(frozen=True)
class Partition:
    """A weakly decreasing tuple of positive integers.

    The empty partition is allowed; it indexes the constant atom.
    """

    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(sorted(parts, reverse=True)))

    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def factorial(self) -> int:
        """lambda! = prod of lambda_i!"""
        return math.prod(math.factorial(p) for p in self.parts)

    def sort_key(self):
        # weight ascending, then reverse-lex: (2) before (1,1)
        return (self.weight(), tuple(-p for p in self.parts))

    def __lt__(self, other: "Partition") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.parts)) + "]"

    def __repr__(self) -> str:
        return f"Partition{self.parts}"

    @classmethod
    def parse(cls, text: str) -> "Partition":
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"partition must be bracketed: {text!r}")
        body = body[1:-1].strip()
        if not body:
            return cls(())
        return cls.of(*(int(tok) for tok in body.split(",")))


MultiIndex = tuple[int, ...]


@dataclass(frozen=True)
class MultiIndexList:
    """A lexicographically descending list of nonzero multi-indices in N^d."""

    entries: tuple[MultiIndex, ...]
    ambient_dim: int = 1

    def __post_init__(self):
        entries = tuple(tuple(int(a) for a in e) for e in self.entries)
        if self.ambient_dim < 1:
            raise ValueError("ambient_dim must be >= 1")
        for e in entries:
            if len(e) != self.ambient_dim:
                raise ValueError(f"multi-index {e} does not have length {self.ambient_dim}")
            if any(a < 0 for a in e) or not any(e):
                raise ValueError(f"multi-indices must be nonzero and nonnegative: {e}")
        if list(entries) != sorted(entries, reverse=True):
            raise ValueError(f"multi-indices must be sorted descending: {entries}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, *entries, ambient_dim: int | None = None) -> "MultiIndexList":
        norm = [tuple(e) if isinstance(e, (tuple, list)) else (int(e),) for e in entries]
        if ambient_dim is None:
            ambient_dim = len(norm[0]) if norm else 1
        return cls(tuple(sorted(norm, reverse=True)), ambient_dim)

    def weight(self) -> int:
        return sum(sum(e) for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def sort_key(self):
        return (self.weight(), tuple(tuple(-a for a in e) for e in self.entries))

    def __lt__(self, other: "MultiIndexList") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return "[" + ";".join("(" + ",".join(map(str, e)) + ")" for e in self.entries) + "]"

    def __repr__(self) -> str:
        return f"MultiIndexList({self.entries}, d={self.ambient_dim})"

    @classmethod
    def parse(cls, text: str, ambient_dim: int | None = None) -> "MultiIndexList":
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"multi-index list must be bracketed: {text!r}")
        body = body[1:-1].strip()
        if not body:
            return cls((), ambient_dim or 1)
        if "(" not in body:
            # shorthand for d_g = 1: "[2,1]"
            return cls.of(*((int(t),) for t in body.split(",")), ambient_dim=1)
        entries = []
        for tok in body.split(";"):
            tok = tok.strip()
            if not (tok.startswith("(") and tok.endswith(")")):
                raise ValueError(f"bad multi-index {tok!r}")
            entries.append(tuple(int(a) for a in tok[1:-1].split(",")))
        return cls.of(*entries, ambient_dim=ambient_dim)


def partitions_of(w: int, max_part: int | None = None):
    """Yield partitions of exactly ``w`` in reverse-lex order."""
    if max_part is None:
        max_part = w
    if w == 0:
        yield ()
        return
    for first in range(min(w, max_part), 0, -1):
        for rest in partitions_of(w - first, first):
            yield (first,) + rest


def partitions_up_to(d: int) -> list[Partition]:
    """All partitions of weight <= d, ordered by weight then reverse-lex."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    return [Partition(p) for w in range(d + 1) for p in partitions_of(w)]


def multi_index_lists_up_to(d: int, ambient_dim: int) -> list[MultiIndexList]:
    """All multi-index lists of total weight <= d over N^ambient_dim."""
    nonzero = [a for a in itertools.product(range(d + 1), repeat=ambient_dim) if 0 < sum(a) <= d]
    out: set[MultiIndexList] = set()

    def extend(current: tuple, remaining: int, bound):
        out.add(MultiIndexList(current, ambient_dim))
        for a in nonzero:
            if sum(a) <= remaining and (bound is None or a <= bound):
                extend(current + (a,), remaining - sum(a), a)

    extend((), d, None)
    return sorted(out, key=MultiIndexList.sort_key)


def surjections(m: int, n: int):
    """Yield all surjections [m] -> [n] as tuples of 0-based targets."""
    if n == 0:
        if m == 0:
            yield ()
        return
    for f in itertools.product(range(n), repeat=m):
        if len(set(f)) == n:
            yield f


@lru_cache(maxsize=None)
def _refinement_count(lam: tuple[int, ...], mu: tuple[int, ...]) -> int:
    if sum(lam) != sum(mu) or len(lam) < len(mu):
        return 0
    count = 0
    for f in surjections(len(lam), len(mu)):
        sums = [0] * len(mu)
        for j, i in enumerate(f):
            sums[i] += lam[j]
        if all(s == t for s, t in zip(sums, mu)):
            count += 1
    return count


def refinement_count(lam: Partition, mu: Partition) -> int:
    """Number of surjections f: [len lam] -> [len mu] whose fiber sums of lam equal mu."""
    return _refinement_count(tuple(lam.parts), tuple(mu.parts))


def refines(lam: Partition, mu: Partition) -> bool:
    return refinement_count(lam, mu) > 0


def aut_count_partition(lam: Partition) -> int:
    """prod over values v of (multiplicity of v)!, which equals refinement_count(lam, lam)."""
    return math.prod(math.factorial(c) for c in Counter(lam.parts).values())


def falling_factorial(k: int, l: int) -> int:
    """(k)_l = k (k-1) ... (k-l+1); zero when l > k."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    if l > k:
        return 0
    return math.perm(k, l)


def set_partitions(items: list):
    """Yield all set partitions of ``items`` as lists of blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def mobius_weight(blocks) -> int:
    """Moebius function mu(0, pi) of the set-partition lattice."""
    return math.prod((-1) ** (len(b) - 1) * math.factorial(len(b) - 1) for b in blocks)
