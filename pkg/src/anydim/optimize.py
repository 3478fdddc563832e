"""Domains, projections and the two minimizers, plus the bound sweep.

Exhaustive search over simple graphs is exact.  Multistart projected gradient
on continuous domains only ever gives an upper estimate of the true minimum,
and its records are tagged ``heuristic_upper`` to say so.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import graphs as G
from . import kernels
from . import settings as S
from .definetti import SETTINGS as RATE_SETTINGS
from .definetti import gap_bound
from .objectives import BinaryGraphObjective, CallableObjective, Objective, compile_binary_objective

# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Box:
    lo: float
    hi: float
    shape: tuple[int, ...]
    kind = "box"

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty box")

    @property
    def n(self) -> int:
        return self.shape[-1]

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=object if _exact(x) else float)
        return x.shape == tuple(self.shape) and all(self.lo - tol <= v <= self.hi + tol for v in x.ravel())

    def bounding_box(self):
        return self.lo, self.hi


@dataclass(frozen=True)
class L1Ball:
    radius: float
    shape: tuple[int, ...]
    kind = "l1ball"

    @property
    def n(self) -> int:
        return self.shape[-1]

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=object if _exact(x) else float)
        return x.shape == tuple(self.shape) and sum(abs(v) for v in x.ravel()) <= self.radius + tol

    def bounding_box(self):
        return -self.radius, self.radius


@dataclass(frozen=True)
class VecSimplex:
    n: int
    kind = "simplex"

    @property
    def shape(self):
        return (self.n,)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=object if _exact(x) else float)
        return x.shape == (self.n,) and all(v >= -tol for v in x) and abs(sum(x) - 1) <= tol

    def bounding_box(self):
        return 0.0, 1.0


@dataclass(frozen=True)
class MatrixSimplex:
    """Symmetric X >= 0 entrywise with 1^T X 1 = weight."""

    n: int
    weight: float = 2.0
    kind = "matrix-simplex"

    @property
    def shape(self):
        return (self.n, self.n)

    def contains(self, X, tol: float = 0.0) -> bool:
        X = np.asarray(X, dtype=object if _exact(X) else float)
        if X.shape != (self.n, self.n):
            return False
        sym = all(abs(X[i, j] - X[j, i]) <= tol for i in range(self.n) for j in range(self.n))
        return sym and all(v >= -tol for v in X.ravel()) and abs(X.sum() - self.weight) <= tol

    def bounding_box(self):
        return 0.0, float(self.weight) / 2


@dataclass(frozen=True)
class BinarySimpleGraphs:
    n: int
    allow_large: bool = False
    kind = "graphs"

    @property
    def shape(self):
        return (self.n, self.n)

    def contains(self, X, tol: float = 0.0) -> bool:
        X = np.asarray(X)
        return (X.shape == (self.n, self.n) and bool(np.all((X == 0) | (X == 1)))
                and bool(np.all(X == X.T)) and not bool(np.any(np.diag(X))))


Domain = Box | L1Ball | VecSimplex | MatrixSimplex | BinarySimpleGraphs


def _exact(x) -> bool:
    if isinstance(x, np.ndarray):
        return x.dtype == object
    flat = np.asarray(x, dtype=object).ravel()
    return any(isinstance(v, Fraction) for v in flat)


def project_simplex(y: np.ndarray, total: float = 1.0, weights: np.ndarray | None = None) -> np.ndarray:
    """argmin sum w (z - y)^2 over z >= 0, sum w z = total; the solution is max(y - tau, 0)."""
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    order = np.argsort(-y, kind="stable")
    ys, ws = y[order], w[order]
    cw = np.cumsum(ws)
    cwy = np.cumsum(ws * ys)
    taus = (cwy - total) / cw
    active = np.nonzero(ys - taus > 0)[0]
    tau = taus[active[-1]] if len(active) else (cwy[-1] - total) / cw[-1]
    return np.maximum(y - tau, 0.0)


def project(dom, y) -> np.ndarray:
    """Exact Euclidean projection onto a continuous domain."""
    y = np.asarray(y, dtype=float)
    if isinstance(dom, Box):
        return np.clip(y, dom.lo, dom.hi)
    if isinstance(dom, VecSimplex):
        return project_simplex(y, 1.0)
    if isinstance(dom, L1Ball):
        if np.abs(y).sum() <= dom.radius:
            return y.copy()
        return np.sign(y) * project_simplex(np.abs(y).ravel(), dom.radius).reshape(y.shape)
    if isinstance(dom, MatrixSimplex):
        n = dom.n
        Y = 0.5 * (y + y.T)
        iu = np.triu_indices(n)
        w = np.where(iu[0] == iu[1], 1.0, 2.0)
        z = project_simplex(Y[iu], float(dom.weight), w)
        Z = np.zeros((n, n))
        Z[iu] = z
        return Z + np.triu(Z, 1).T
    raise ValueError("no projection onto a discrete domain")


# ---------------------------------------------------------------------------
# records and config


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 256
    max_iters: int = 2000
    initial_step: float = 1.0
    shrink: float = 0.5
    armijo: float = 1e-4
    tol: float = 1e-10
    ftol: float = 1e-15
    stall: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1 or self.initial_step <= 0 or self.tol <= 0:
            raise ValueError("solver settings must be positive")
        if not 0 < self.shrink < 1 or not 0 < self.armijo < 1:
            raise ValueError("shrink and armijo factors must lie in (0, 1)")


@dataclass
class BoundRecord:
    n: int
    value: object
    point: object
    kind: str
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("exact", "heuristic_upper"):
            raise ValueError(f"unknown record kind {self.kind!r}")

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------------------
# minimizers


def _as_binary(obj, n: int) -> BinaryGraphObjective:
    if isinstance(obj, BinaryGraphObjective):
        return obj
    if isinstance(obj, G.GraphPoly):
        return compile_binary_objective(obj, n)
    raise TypeError("exhaustive search needs a compiled graph objective or a graph polynomial")


def minimize_exhaustive(obj, dom: BinarySimpleGraphs, backend: str | None = None) -> BoundRecord:
    """Exact minimum over every labeled simple graph on n vertices."""
    if not isinstance(dom, BinarySimpleGraphs):
        raise ValueError("exhaustive search runs over simple graphs only")
    n = dom.n
    if n > 8 or (n == 8 and not dom.allow_large):
        raise ValueError("size limit: n <= 7 (n = 8 needs allow_large)")
    obj = _as_binary(obj, n)
    if obj.n != n:
        raise ValueError("objective compiled for a different n")
    arrays = obj.flat_arrays()
    val, bits = kernels.scan(arrays, obj.n_edges, backend=backend)
    return BoundRecord(n, Fraction(val, obj.denominator), G.graph_from_bits(n, bits), "exact",
                       {"bits": bits, "graphs": 1 << obj.n_edges, "backend": backend or kernels.BACKEND})


def finite_difference_grad(f: Callable, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    g = np.zeros_like(x, dtype=float)
    flat = x.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + h
        fp = f(x)
        flat[i] = old - h
        fm = f(x)
        flat[i] = old
        gf[i] = (fp - fm) / (2 * h)
    return g


def _as_objective(obj, grad) -> Objective:
    if isinstance(obj, Objective):
        if grad is not None:
            return CallableObjective(obj.value, grad)
        return obj
    return CallableObjective(obj, grad)


def _descend(obj: Objective, dom, x: np.ndarray, cfg: SolverConfig):
    """Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking."""
    grad = obj.grad if obj.has_grad else (lambda z: finite_difference_grad(obj.value, z))
    fx = obj.value(x)
    g = grad(x)
    step = cfg.initial_step
    converged = False
    stalled = 0
    it = 0
    for it in range(1, cfg.max_iters + 1):
        t = step
        while True:
            x_new = project(dom, x - t * g)
            d = x_new - x
            f_new = obj.value(x_new)
            if f_new <= fx - cfg.armijo / t * float(np.vdot(d, d)) or t < 1e-16:
                break
            t *= cfg.shrink
        dn = float(np.linalg.norm(d))
        if not np.isfinite(f_new):
            break
        g_new = grad(x_new)
        yv = g_new - g
        sy = float(np.vdot(d, yv))
        step = float(np.vdot(d, d)) / sy if sy > 1e-300 else cfg.initial_step
        step = min(max(step, 1e-10), 1e10)
        # degenerate stationary points (flat quartic saddles) shrink the step only sublinearly
        stalled = stalled + 1 if fx - f_new <= cfg.ftol * max(1.0, abs(fx)) else 0
        x, fx, g = x_new, f_new, g_new
        if dn < cfg.tol or stalled >= cfg.stall:
            converged = True
            break
    return x, fx, it, converged


def minimize_multistart(obj, grad, dom, cfg: SolverConfig = SolverConfig()) -> BoundRecord:
    """Best local minimum over seeded restarts; an upper estimate of the true minimum."""
    if isinstance(dom, BinarySimpleGraphs):
        raise ValueError("multistart needs a continuous domain")
    obj = _as_objective(obj, grad)
    lo, hi = dom.bounding_box()
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best = (math.inf, None, -1)
    values = []
    iters = converged = 0
    for r, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        x0 = project(dom, rng.uniform(lo, hi, size=dom.shape))
        x, fx, it, ok = _descend(obj, dom, x0, cfg)
        values.append(fx)
        iters += it
        converged += ok
        if fx < best[0]:
            best = (fx, x, r)
    vals = np.array(values)
    hits = int(np.sum(vals <= best[0] + 1e-9 * max(1.0, abs(best[0]))))
    stats = {"restarts": cfg.restarts, "restarts_hit": hits, "best_restart": best[2],
             "iterations": iters, "converged": converged, "seed": cfg.seed}
    return BoundRecord(dom.n, float(best[0]), best[1], "heuristic_upper", stats)


def sup_norm_estimate(q, dom, cfg: SolverConfig = SolverConfig()) -> float:
    """Heuristic lower estimate of sup |q| over the domain (exact on small graph domains)."""
    if isinstance(dom, BinarySimpleGraphs):
        obj = _as_binary(q, dom.n)
        neg = BinaryGraphObjective(obj.n, obj.denominator, -obj.constant,
                                   [(-w, F, c) for w, F, c in obj.terms])
        lo = minimize_exhaustive(obj, dom).value
        hi = -minimize_exhaustive(neg, dom).value
        return float(max(abs(lo), abs(hi)))
    obj = _as_objective(q, None)
    neg = CallableObjective(lambda x: -obj.value(x), (lambda x: -obj.grad(x)) if obj.has_grad else None)
    lo = minimize_multistart(obj, None, dom, cfg).value
    hi = -minimize_multistart(neg, None, dom, cfg).value
    return float(max(abs(lo), abs(hi)))


# ---------------------------------------------------------------------------
# sweeps


def make_domain(kind: str, n: int, radius: float = 1.0, weight: float = 2.0, lo: float = -1.0,
                hi: float = 1.0, ambient_dim: int = 1, allow_large: bool = False):
    if kind == "box":
        return Box(lo, hi, (n,) if ambient_dim == 1 else (ambient_dim, n))
    if kind == "l1ball":
        return L1Ball(radius, (n,))
    if kind == "simplex":
        return VecSimplex(n)
    if kind == "matrix-simplex":
        return MatrixSimplex(n, weight)
    if kind == "graphs":
        return BinarySimpleGraphs(n, allow_large)
    raise ValueError(f"unknown domain {kind!r}")


@dataclass
class SweepRow:
    setting: str
    n: int
    lower: BoundRecord
    upper: BoundRecord
    gap_bound: float | None
    seed: int
    restarts: int


def minimize(setting: str, poly, dom, cfg: SolverConfig, solver: str | None = None) -> BoundRecord:
    solver = solver or ("exhaustive" if isinstance(dom, BinarySimpleGraphs) else "multistart")
    obj = S.build_objective(setting, poly, dom.n)
    if solver == "exhaustive":
        return minimize_exhaustive(obj, dom)
    if isinstance(dom, BinarySimpleGraphs):
        raise ValueError("simple-graph domains are searched exhaustively")
    return minimize_multistart(obj, None, dom, cfg)


def bound_sweep(setting: str, p, domain_factory: Callable[[int], object], n_range: Sequence[int],
                cfg: SolverConfig = SolverConfig(), solver: str | None = None,
                gap_k: int | None = None, gap_norm: float | None = None, gap_radius: float = 1.0) -> list[SweepRow]:
    """Per n: u_n from p on the domain, l_n from the dual cost built at n, and the rate bound.

    The gap column is filled when ``gap_k`` is given, using ``gap_norm`` for the
    norm of q_k (estimated with :func:`sup_norm_estimate` when omitted).
    """
    S.check_setting(setting)
    S.check_cost(setting, p)
    floor = S.min_dimension(setting, p)
    rows = []
    for n in sorted(n_range):
        if n < floor:
            raise ValueError(f"dimension floor violated: n = {n} < {floor}")
        dom = domain_factory(n)
        S.check_compatible(setting, dom.kind)
        q = S.dualize(setting, p, n)
        lower = minimize(setting, q, dom, cfg, solver)
        upper = minimize(setting, p, dom, cfg, solver)
        gap = None
        if gap_k is not None:
            norm = gap_norm
            if norm is None:
                qk = S.dualize(setting, p, gap_k)
                norm = sup_norm_estimate(S.build_objective(setting, qk, gap_k), domain_factory(gap_k), cfg)
            try:
                gap = gap_bound(RATE_SETTINGS[setting], gap_k, n, norm, gap_radius)
            except ValueError:
                gap = None
        rows.append(SweepRow(setting, n, lower, upper, gap, cfg.seed, cfg.restarts))
    return rows
