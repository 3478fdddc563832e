"""Command line entry point: ``anydim <command> ...``.

Commands
  dualize   print the dual cost of a cost expression at a given n
  bound     sweep u_n and l_n over a range of n and write CSV
  verify    identity | tv | w1 checks, one CSV row per case
  definetti tv-check | w1-check (aliases of verify tv / verify w1)
  goodman   exhaustive Goodman lower bounds
  ramsey    exhaustive Ramsey-multiplicity lower bounds

Every flag can also come from ``--config FILE`` holding ``key = value`` lines
(keys are flag names without the leading dashes); flags on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import definetti as D
from . import graphs as G
from . import optimize as Opt
from . import parsing as P
from . import settings as S
from .symfunc import SymPoly

CSV_HEADER = ["setting", "n", "l_n", "l_kind", "u_n", "u_kind", "gap_bound", "seed", "restarts"]

DEFAULT_DOMAIN = {"means": "box", "symfunc": "l1ball", "graph-density": "graphs", "graph-numbers": "matrix-simplex"}


# ---------------------------------------------------------------------------
# CSV


@dataclass(frozen=True)
class BoundRow:
    setting: str
    n: int
    l_n: object
    l_kind: str
    u_n: object
    u_kind: str
    gap_bound: float | None
    seed: int
    restarts: int

    @classmethod
    def from_sweep(cls, row: Opt.SweepRow) -> "BoundRow":
        return cls(row.setting, row.n, row.lower.value, row.lower.kind, row.upper.value, row.upper.kind,
                   row.gap_bound, row.seed, row.restarts)


def _fmt(v, exact: bool = True) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return str(v) if exact else repr(float(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _unfmt(s: str):
    if s == "":
        return None
    if "/" in s or s.lstrip("-").isdigit():
        return Fraction(s)
    return float(s)


def emit_csv(records: Iterable[BoundRow], out: str | TextIO, exact: bool = True) -> None:
    """Header plus one row per record, ascending in n."""
    rows = sorted(records, key=lambda r: (r.n, r.setting))
    own = isinstance(out, str)
    fh = open(out, "w", encoding="utf-8", newline="") if own else out
    try:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r.setting, r.n, _fmt(r.l_n, exact), r.l_kind, _fmt(r.u_n, exact), r.u_kind,
                        _fmt(r.gap_bound), r.seed, r.restarts])
    finally:
        if own:
            fh.close()


def read_csv(src: str | TextIO) -> list[BoundRow]:
    own = isinstance(src, str)
    fh = open(src, encoding="utf-8", newline="") if own else src
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        out = []
        for row in reader:
            s, n, l, lk, u, uk, gap, seed, restarts = row
            g = _unfmt(gap)
            out.append(BoundRow(s, int(n), _unfmt(l), lk, _unfmt(u), uk, None if g is None else float(g),
                                int(seed), int(restarts)))
        return out
    finally:
        if own:
            fh.close()


def _write_rows(header: Sequence[str], rows: Iterable[Sequence], out: str | None) -> None:
    fh = open(out, "w", encoding="utf-8", newline="") if out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\r\n" if out else "\n")
        w.writerow(header)
        for r in rows:
            w.writerow(r)
    finally:
        if out:
            fh.close()


# ---------------------------------------------------------------------------
# experiments


def parse_n_range(text: str) -> list[int]:
    """"4..7" (inclusive), "4,6,8" or "5"."""
    text = str(text).strip()
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if lo > hi:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return sorted({int(t) for t in text.split(",") if t.strip()})


@dataclass
class ExperimentSpec:
    setting: str
    cost: P.CostExpr
    domain: str
    n_range: list[int]
    solver_config: Opt.SolverConfig = field(default_factory=Opt.SolverConfig)
    solver: str | None = None
    output: str | None = None
    radius: float = 1.0
    weight: float = 2.0
    lo: float = -1.0
    hi: float = 1.0
    allow_large: bool = False
    gap_k: int | None = None
    gap_norm: float | None = None
    exact_rational: bool = True

    def __post_init__(self):
        S.check_setting(self.setting)
        if self.cost.family != self.setting:
            raise ValueError(f"cost atoms belong to setting {self.cost.family!r}, not {self.setting!r}")
        S.check_compatible(self.setting, self.domain)
        if self.solver == "exhaustive" and self.domain != "graphs":
            raise ValueError("the exhaustive solver runs over simple graphs only")
        if self.solver == "multistart" and self.domain == "graphs":
            raise ValueError("simple-graph domains are searched exhaustively")

    def domain_factory(self):
        p = self.polynomial()
        dim = p.ambient_dim if isinstance(p, SymPoly) else 1
        return lambda n: Opt.make_domain(self.domain, n, self.radius, self.weight, self.lo, self.hi, dim,
                                         self.allow_large)

    def polynomial(self):
        return P.to_polynomial(self.cost)


def run(spec: ExperimentSpec, out: TextIO | None = None) -> tuple[int, list[BoundRow]]:
    """Run a bound sweep; write CSV to the spec's output path (or ``out``, or stdout)."""
    rows = Opt.bound_sweep(spec.setting, spec.polynomial(), spec.domain_factory(), spec.n_range,
                           spec.solver_config, spec.solver, spec.gap_k, spec.gap_norm, spec.radius)
    records = [BoundRow.from_sweep(r) for r in rows]
    emit_csv(records, spec.output or out or sys.stdout, spec.exact_rational)
    status = 0
    for r in records:
        if r.l_kind == "exact" and r.u_kind == "exact" and r.l_n > r.u_n:
            print(f"invariant failure: l_n > u_n at n = {r.n}", file=sys.stderr)
            status = 1
    return status, records


# ---------------------------------------------------------------------------
# argument handling


def _resolve(args) -> tuple[str, P.CostExpr]:
    default_setting, expr = P.resolve_cost(args.cost)
    setting = args.setting or default_setting or expr.family
    return setting, expr


def _config(args) -> Opt.SolverConfig:
    return Opt.SolverConfig(restarts=args.restarts, max_iters=args.max_iters, seed=args.seed)


def cmd_dualize(args) -> int:
    setting, expr = _resolve(args)
    if expr.family != setting:
        raise ValueError(f"cost atoms belong to setting {expr.family!r}, not {setting!r}")
    p = P.to_polynomial(expr)
    rows = []
    for n in parse_n_range(args.n):
        q = S.dualize(setting, p, n, args.k)
        for tag, atom, num, den in q.to_rows():
            value = str(Fraction(num, den)) if args.exact_rational else repr(num / den)
            rows.append((n, tag, atom, num, den, value))
    _write_rows(["n", "basis", "atom", "numerator", "denominator", "coefficient"], rows, args.out)
    return 0


def _spec_from_args(args, setting: str, expr: P.CostExpr) -> ExperimentSpec:
    return ExperimentSpec(
        setting=setting, cost=expr, domain=args.domain or DEFAULT_DOMAIN[setting],
        n_range=parse_n_range(args.n), solver_config=_config(args), solver=args.solver, output=args.out,
        radius=args.radius, weight=args.weight, lo=args.lo, hi=args.hi, allow_large=args.allow_large,
        gap_k=args.gap_k, gap_norm=args.gap_norm, exact_rational=args.exact_rational or args.solver != "multistart",
    )


def cmd_bound(args) -> int:
    setting, expr = _resolve(args)
    status, _ = run(_spec_from_args(args, setting, expr))
    return status


def cmd_named(name: str):
    def go(args) -> int:
        args.cost = name
        args.setting = "graph-density"
        args.solver = "exhaustive"
        args.domain = "graphs"
        status, _ = run(_spec_from_args(args, *_resolve(args)))
        return status
    return go


def cmd_identity(args) -> int:
    setting = args.setting or "graph-density"
    S.check_setting(setting)
    k = args.k
    if args.cost:
        _, expr = P.resolve_cost(args.cost)
        p = P.to_polynomial(expr)
    else:
        p = S.default_identity_cost(setting, k)
    rng = np.random.default_rng(args.seed)
    rows, ok_all = [], True
    for n in parse_n_range(args.n):
        for trial in range(args.trials):
            x = S.random_point(setting, n, rng)
            lhs, rhs = S.identity_sides(setting, p, k, x)
            err = abs(Fraction(lhs) - Fraction(rhs))
            ok = err == 0
            ok_all &= ok
            rows.append((setting, n, k, trial, str(err), 0, "pass" if ok else "fail"))
    _write_rows(["setting", "n", "k", "trial", "statistic", "bound", "pass"], rows, args.out)
    return 0 if ok_all else 1


def cmd_tv(args) -> int:
    rows, ok_all = [], True
    for n in parse_n_range(args.n):
        for m in parse_n_range(args.m):
            if m > n:
                continue
            base = [int(t) for t in args.base.split(",")] if args.base else None
            if base is not None and len(base) != n:
                base = (base * n)[:n]
            tv, bound = D.tv_rate_experiment(n, m, base)
            ok = tv <= bound
            ok_all &= ok
            rows.append((n, m, str(tv), str(bound), "pass" if ok else "fail"))
    _write_rows(["n", "m", "statistic", "bound", "pass"], rows, args.out)
    return 0 if ok_all else 1


def cmd_w1(args) -> int:
    rows, ok_all = [], True
    for n in parse_n_range(args.n):
        w1, bound = D.w1_rate_experiment(n)
        ok = float(w1) <= bound
        ok_all &= ok
        rows.append((n, 2, repr(float(w1)), repr(bound), "pass" if ok else "fail"))
    _write_rows(["n", "m", "statistic", "bound", "pass"], rows, args.out)
    return 0 if ok_all else 1


def _common(p: argparse.ArgumentParser, n_default: str | None = None) -> None:
    p.add_argument("--n", "--n-range", dest="n", default=n_default, required=n_default is None,
                   help='dimension(s): "5", "4..7" or "4,6,8"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("--config", default=None, help="flat key=value file with default flag values")


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", choices=["box", "l1ball", "simplex", "matrix-simplex", "graphs"])
    p.add_argument("--radius", type=float, default=1.0, help="l1 ball radius")
    p.add_argument("--weight", type=float, default=2.0, help="total weight 1^T X 1 of the matrix simplex")
    p.add_argument("--lo", type=float, default=-1.0, help="box lower bound")
    p.add_argument("--hi", type=float, default=1.0, help="box upper bound")
    p.add_argument("--solver", choices=["exhaustive", "multistart"])
    p.add_argument("--restarts", type=int, default=256)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--allow-large", action="store_true", help="permit the n = 8 exhaustive scan")
    p.add_argument("--gap-k", type=int, default=None)
    p.add_argument("--gap-norm", type=float, default=None)
    p.add_argument("--exact-rational", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="anydim", description="Lower bounds for any-dimensional polynomial problems.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dualize", help="print the dual cost")
    p.add_argument("--setting", choices=S.SETTINGS)
    p.add_argument("--cost", required=True)
    p.add_argument("--k", type=int, default=None, help="basis dimension (default n)")
    p.add_argument("--exact-rational", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_dualize)

    p = sub.add_parser("bound", help="sweep u_n and l_n")
    p.add_argument("--setting", choices=S.SETTINGS)
    p.add_argument("--cost", required=True)
    _solver_flags(p)
    _common(p)
    p.set_defaults(func=cmd_bound)

    for name in ("goodman", "ramsey"):
        p = sub.add_parser(name, help=f"exhaustive {name} lower bounds")
        _solver_flags(p)
        _common(p, "4..7")
        p.set_defaults(func=cmd_named(name))

    def add_checks(parent, names: dict):
        checks = parent.add_subparsers(dest="check", required=True)
        q = checks.add_parser(names["identity"], help="p_n(x) = E[q_k(L x)] by exact enumeration") if "identity" in names else None
        if q is not None:
            q.add_argument("--setting", choices=S.SETTINGS)
            q.add_argument("--cost", default=None)
            q.add_argument("--k", type=int, default=3)
            q.add_argument("--trials", type=int, default=20)
            _common(q, "5")
            q.set_defaults(func=cmd_identity)
        q = checks.add_parser(names["tv"], help="exact TV between sampling with and without replacement")
        q.add_argument("--m", default="2,3")
        q.add_argument("--base", default=None, help="comma-separated base vector")
        _common(q, "2..8")
        q.set_defaults(func=cmd_tv)
        q = checks.add_parser(names["w1"], help="exact W1 of the binomial tightness law")
        _common(q, "2,4,8,16,32")
        q.set_defaults(func=cmd_w1)

    add_checks(sub.add_parser("verify", help="identity, TV and W1 checks"), {"identity": "identity", "tv": "tv", "w1": "w1"})
    add_checks(sub.add_parser("definetti", help="TV and W1 checks"), {"tv": "tv-check", "w1": "w1-check"})
    return ap


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Turn config entries into leading flags so that later command-line flags override them."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    cfg = read_config(known.config)
    # flags go after the subcommand words, which are the leading non-option tokens
    head = []
    for tok in argv:
        if tok.startswith("-"):
            break
        head.append(tok)
    extra = []
    for key, value in cfg.items():
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            extra.append(flag)
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            extra.extend([flag, value])
    return head + extra + argv[len(head):]


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return int(args.func(args) or 0)
    except (ValueError, OverflowError, OSError, ZeroDivisionError) as e:
        print(f"anydim: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
