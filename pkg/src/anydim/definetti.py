"""Maps between finite sets, their two actions, expectations over uniform maps,
and the exact distance diagnostics (total variation, W1 to a point mass).

Orientation: ``act_*`` samples coordinates (output i reads input f(i)), while
``coact_*`` sums fibers (output i collects every j with f(j) = i).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import graphs

EXACT_BUDGET = 10**8


@dataclass(frozen=True)
class FiniteMap:
    """f: [source] -> [target], stored as 0-based target indices."""

    targets: tuple[int, ...]
    target: int

    def __post_init__(self):
        t = tuple(int(v) for v in self.targets)
        object.__setattr__(self, "targets", t)
        if self.target < 0 or any(not 0 <= v < self.target for v in t):
            raise ValueError("map entries out of range")

    @property
    def source(self) -> int:
        return len(self.targets)

    def __call__(self, i: int) -> int:
        return self.targets[i]

    def compose(self, inner: "FiniteMap") -> "FiniteMap":
        """self o inner."""
        if inner.target != self.source:
            raise ValueError("maps do not compose")
        return FiniteMap(tuple(self.targets[j] for j in inner.targets), self.target)

    def fibers(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.target)]
        for j, i in enumerate(self.targets):
            out[i].append(j)
        return out

    def is_injective(self) -> bool:
        return len(set(self.targets)) == self.source

    def is_surjective(self) -> bool:
        return len(set(self.targets)) == self.target

    @classmethod
    def inclusion(cls, n: int, N: int) -> "FiniteMap":
        """iota_{N,n}: [n] -> [N], identity on [n]."""
        if n > N:
            raise ValueError("inclusion needs n <= N")
        return cls(tuple(range(n)), N)

    @classmethod
    def equipartition(cls, n: int, k: int) -> "FiniteMap":
        """d_{n,nk}: [nk] -> [n], sending block i (k consecutive points) to i."""
        return cls(tuple(t // k for t in range(n * k)), n)

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "FiniteMap":
        if sorted(perm) != list(range(len(perm))):
            raise ValueError("not a permutation")
        return cls(tuple(perm), len(perm))

    @classmethod
    def identity(cls, n: int) -> "FiniteMap":
        return cls(tuple(range(n)), n)

    @classmethod
    def random(cls, source: int, target: int, seed: int | np.random.Generator | None = None) -> "FiniteMap":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        return cls(tuple(rng.integers(0, target, size=source).tolist()), target)


def all_maps(source: int, target: int) -> Iterable[FiniteMap]:
    for t in itertools.product(range(target), repeat=source):
        yield FiniteMap(t, target)


def factorization(f: FiniteMap) -> tuple[FiniteMap, FiniteMap, FiniteMap]:
    """Write f = d_{n,nk} o g o iota_{nk,m} with g a permutation and k the largest fiber.

    The j-th point of fiber i goes to slot k*i + j of block i; unused slots
    are filled in increasing order.
    """
    m, n = f.source, f.target
    k = max((len(F) for F in f.fibers()), default=0) or 1
    used = [0] * n
    g = [-1] * (n * k)
    for j, i in enumerate(f.targets):
        g[j] = k * i + used[i]
        used[i] += 1
    taken = set(g[:m])
    free = iter(v for v in range(n * k) if v not in taken)
    for j in range(m, n * k):
        g[j] = next(free)
    return FiniteMap.equipartition(n, k), FiniteMap.permutation(g), FiniteMap.inclusion(m, n * k)


# ---------------------------------------------------------------------------
# actions


def _is_exact(x) -> bool:
    return not (isinstance(x, np.ndarray) and x.dtype != object)


def act_vec(f: FiniteMap, x):
    """Column i of the output is column f(i) of x; x is d_g x n or a length-n vector."""
    if isinstance(x, np.ndarray):
        if x.shape[-1] != f.target:
            raise ValueError("shape mismatch")
        return x[..., list(f.targets)]
    rows = x if x and isinstance(x[0], (list, tuple)) else None
    if rows is None:
        if len(x) != f.target:
            raise ValueError("shape mismatch")
        return [x[i] for i in f.targets]
    if any(len(r) != f.target for r in rows):
        raise ValueError("shape mismatch")
    return [[r[i] for i in f.targets] for r in rows]


def act_matrix(f: FiniteMap, X):
    """(act X)_{ij} = X_{f(i) f(j)}."""
    if isinstance(X, np.ndarray):
        if X.shape != (f.target, f.target):
            raise ValueError("shape mismatch")
        idx = list(f.targets)
        return X[np.ix_(idx, idx)]
    if len(X) != f.target:
        raise ValueError("shape mismatch")
    return [[X[a][b] for b in f.targets] for a in f.targets]


def coact_vec(f: FiniteMap, x):
    """Fiber sums: output i = sum of x_j over f(j) = i (applied per row for d_g x n input)."""
    if isinstance(x, np.ndarray) and x.dtype != object:
        if x.shape[-1] != f.source:
            raise ValueError("shape mismatch")
        out = np.zeros(x.shape[:-1] + (f.target,), dtype=np.result_type(x.dtype, float))
        np.add.at(out, (..., list(f.targets)), x)
        return out
    if x is not None and len(x) and isinstance(x[0], (list, tuple)):
        return [coact_vec(f, list(r)) for r in x]
    if len(x) != f.source:
        raise ValueError("shape mismatch")
    out = [0] * f.target
    for j, i in enumerate(f.targets):
        out[i] = out[i] + x[j]
    return out


def coact_matrix(f: FiniteMap, X):
    """P^T X P with P the fiber indicator of f."""
    return graphs.quotient(X, f.targets, f.target)


# ---------------------------------------------------------------------------
# expectations


@dataclass
class Expectation:
    value: object
    stderr: float = 0.0
    samples: int = 0
    exact: bool = True

    def __float__(self):
        return float(self.value)


def expect_over_maps(source: int, target: int, evaluator: Callable[[FiniteMap], object],
                     mode: str = "exact", samples: int = 10_000, seed: int = 0) -> Expectation:
    """E over a uniform map f: [source] -> [target] of evaluator(f).

    Exact mode sums over all target**source maps (capped at 1e8 evaluations) and
    keeps rational values rational.  Monte Carlo draws map i from its own
    substream ``default_rng([seed, i])`` so results do not depend on chunking.
    """
    count = target ** source
    if mode == "exact":
        if count > EXACT_BUDGET:
            raise ValueError("exact enumeration budget exceeded; use monte_carlo")
        total = 0
        for f in all_maps(source, target):
            total = total + evaluator(f)
        value = total / count if isinstance(total, float) else Fraction(total) / count
        return Expectation(value, 0.0, count, True)
    if mode in ("monte_carlo", "mc"):
        vals = np.empty(samples)
        for i in range(samples):
            rng = np.random.default_rng([seed, i])
            vals[i] = float(evaluator(FiniteMap.random(source, target, rng)))
        se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("inf")
        return Expectation(float(vals.mean()), se, samples, False)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# laws and distances


def _key(point) -> Hashable:
    if isinstance(point, np.ndarray):
        return tuple(np.asarray(point).ravel().tolist())
    if isinstance(point, (list, tuple)):
        return tuple(_key(p) if isinstance(p, (list, tuple, np.ndarray)) else p for p in point)
    return point


class FiniteLaw:
    """Finitely supported law with exact rational probabilities."""

    def __init__(self, weights: Mapping | Iterable[tuple[object, object]]):
        items = weights.items() if isinstance(weights, Mapping) else weights
        probs: dict[Hashable, Fraction] = {}
        for point, p in items:
            p = Fraction(p)
            if p < 0:
                raise ValueError("probabilities must be nonnegative")
            k = _key(point)
            probs[k] = probs.get(k, Fraction(0)) + p
        if sum(probs.values()) != 1:
            raise ValueError("probabilities must sum to exactly 1")
        self.probs = {k: v for k, v in probs.items() if v}

    @property
    def support(self) -> list:
        return list(self.probs)

    def __getitem__(self, point) -> Fraction:
        return self.probs.get(_key(point), Fraction(0))

    def __len__(self) -> int:
        return len(self.probs)

    def map(self, fn: Callable) -> "FiniteLaw":
        """Push-forward."""
        return FiniteLaw([(fn(x), p) for x, p in self.probs.items()])

    @classmethod
    def dirac(cls, point) -> "FiniteLaw":
        return cls({_key(point): 1})

    @classmethod
    def uniform(cls, points: Iterable) -> "FiniteLaw":
        points = [_key(p) for p in points]
        return cls([(p, Fraction(1, len(points))) for p in points])


def tv_exact(law1: FiniteLaw, law2: FiniteLaw) -> Fraction:
    """sum |p1 - p2| over the joint support (no factor 1/2)."""
    keys = set(law1.probs) | set(law2.probs)
    return sum((abs(law1.probs.get(k, 0) - law2.probs.get(k, 0)) for k in keys), Fraction(0))


def w1_to_dirac(law: FiniteLaw, c) -> Fraction:
    """W1 to a point mass in l1: E ||X - c||_1."""
    c = _key(c)
    c = c if isinstance(c, tuple) else (c,)
    total = Fraction(0)
    for x, p in law.probs.items():
        xs = x if isinstance(x, tuple) else (x,)
        if len(xs) != len(c):
            raise ValueError("dimension mismatch")
        total += p * sum(abs(Fraction(a) - Fraction(b)) for a, b in zip(xs, c))
    return total


def first_coords_law(law: FiniteLaw, m: int) -> FiniteLaw:
    """Law of the first m coordinates (the adjoint of zero-padding)."""
    return law.map(lambda x: x[:m])


def sampled_coords_law(law: FiniteLaw, m: int) -> FiniteLaw:
    """Law of (X_{F(1)}, ..., X_{F(m)}) with F: [m] -> [n] uniform and independent of X."""
    # the sampled law of a point depends only on its multiset of values
    by_multiset: dict[tuple, Fraction] = {}
    for x, p in law.probs.items():
        key = tuple(sorted(x, key=repr))
        by_multiset[key] = by_multiset.get(key, Fraction(0)) + p
    out: list[tuple[tuple, Fraction]] = []
    for x, p in by_multiset.items():
        n = len(x)
        w = p / n ** m
        for idx in itertools.product(range(n), repeat=m):
            out.append((tuple(x[i] for i in idx), w))
    return FiniteLaw(out)


def permutation_law(base: Sequence) -> FiniteLaw:
    """Uniform law over the coordinate permutations of ``base``."""
    n = len(base)
    if n > 8:
        raise ValueError("size limit")
    perms = list(itertools.permutations(range(n)))
    return FiniteLaw([(tuple(base[i] for i in perm), Fraction(1, len(perms))) for perm in perms])


def tv_rate_experiment(n: int, m: int, base_vector: Sequence | None = None) -> tuple[Fraction, Fraction]:
    """Exact TV between m coordinates drawn without and with replacement from a permuted base vector."""
    if n > 8 or m > 3 or m > n:
        raise ValueError("size limit")
    base = list(base_vector) if base_vector is not None else [1] + [0] * (n - 1)
    if len(base) != n:
        raise ValueError("base vector must have length n")
    law = permutation_law(base)
    tv = tv_exact(first_coords_law(law, m), sampled_coords_law(law, m))
    return tv, Fraction(m * (m - 1), n)


def bernoulli_product_law(n: int) -> FiniteLaw:
    return FiniteLaw([(x, Fraction(1, 2 ** n)) for x in itertools.product((0, 1), repeat=n)])


def bernoulli_tightness_tv(n: int) -> Fraction:
    """TV between two distinct and two sampled coordinates of X ~ Ber(1/2)^n."""
    if n > 12:
        raise ValueError("size limit")
    law = bernoulli_product_law(n)
    return tv_exact(first_coords_law(law, 2), sampled_coords_law(law, 2))


def w1_tightness_law(n: int) -> FiniteLaw:
    """Law of (B/2n, 1 - B/2n) with B ~ Bin(2n, 1/2)."""
    N = 2 * n
    return FiniteLaw([((Fraction(b, N), 1 - Fraction(b, N)), Fraction(math.comb(N, b), 2 ** N))
                      for b in range(N + 1)])


def w1_rate_experiment(n: int) -> tuple[Fraction, float]:
    """Exact W1 of the tightness law to (1/2, 1/2), with the rate bound 4/sqrt(n)."""
    w1 = w1_to_dirac(w1_tightness_law(n), (Fraction(1, 2), Fraction(1, 2)))
    return w1, 4 / math.sqrt(n)


def binomial_mean_abs_deviation(n: int) -> Fraction:
    """E|B - n| / n for B ~ Bin(2n, 1/2), computed directly."""
    N = 2 * n
    return Fraction(sum(math.comb(N, b) * abs(b - n) for b in range(N + 1)), 2 ** N * n)


# ---------------------------------------------------------------------------
# convergence-rate bounds


@dataclass(frozen=True)
class SettingDescriptor:
    """Which side of the pair carries the costs being bounded.

    ``upper`` is "D" when the original problem lives on the duplication sequence
    (lower bounds then come from sampling, case I) and "Z" when it lives on the
    zero-padding sequence (lower bounds from fiber sums, case II).  ``degree``
    is 1 for vectors and 2 for symmetric matrices.
    """

    name: str
    upper: str
    degree: int


SETTINGS = {
    "means": SettingDescriptor("means", "D", 1),
    "graph-density": SettingDescriptor("graph-density", "D", 2),
    "symfunc": SettingDescriptor("symfunc", "Z", 1),
    "graph-numbers": SettingDescriptor("graph-numbers", "Z", 2),
}


def gap_bound(setting: SettingDescriptor | str, k: int, n: int, norm: float, radius: float = 1.0) -> float:
    """Bound on u_n - l_n.

    Case I (upper = "D"): k(k-1)/n * ||q_k|| with the sup norm over Omega_k.
    Case II (upper = "Z"): 2 D sqrt(k(k-1)/(n/k)) * ||q_k'|| * max ||x||_1, needs k | n.
    """
    s = SETTINGS[setting] if isinstance(setting, str) else setting
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    if s.upper == "D":
        return k * (k - 1) / n * norm
    if n % k:
        raise ValueError("bound requires k | n")
    return 2 * s.degree * math.sqrt(k * (k - 1) / (n / k)) * norm * radius
