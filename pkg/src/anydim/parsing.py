"""Cost expressions: a small grammar, canonical printing, and conversion to polynomials.

    expr     := term (('+' | '-') term)*        (a leading sign is allowed)
    term     := [rational ['*']] atom
    rational := int ['/' int]
    atom     := ident '[' body ']' | ident '(' body ')' | ident '{' edges '}' | shortcut

Identifiers: ``s m`` (partitions), ``sbar mbar`` (multi-index lists),
``hom inj t tinj`` and ``m`` with a graph body, ``tc tinjc`` for densities of
the complement ``J - X``.  A bare graph shortcut such as ``K3`` means ``t[K3]``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import graphs as G
from .combinat import MultiIndexList, Partition
from .symfunc import Basis, SymPoly, m_to_s

MAX_DEGREE = 6

SYM_IDENTS = {"s": "symfunc", "m": "symfunc", "sbar": "means", "mbar": "means"}
GRAPH_IDENTS = {"hom": "graph-numbers", "inj": "graph-numbers", "m": "graph-numbers",
                "t": "graph-density", "tinj": "graph-density", "tc": "graph-density", "tinjc": "graph-density"}


class CostParseError(ValueError):
    def __init__(self, offset: int, message: str):
        self.offset = offset
        super().__init__(f"parse error at offset {offset}: {message}")


@dataclass(frozen=True)
class Atom:
    ident: str
    key: object  # Partition | MultiIndexList | GraphClass

    @property
    def family(self) -> str:
        if isinstance(self.key, G.GraphClass):
            return GRAPH_IDENTS[self.ident]
        return SYM_IDENTS[self.ident]

    @property
    def degree(self) -> int:
        return self.key.edge_count if isinstance(self.key, G.GraphClass) else self.key.weight()

    def sort_key(self):
        return (self.ident, self.key.sort_key())

    def __str__(self) -> str:
        if isinstance(self.key, G.GraphClass):
            name = G.NAMED_BY_CLASS().get(self.key)
            if name is not None:
                return f"{self.ident}[{name}]"
            return self.ident + self.key.rep.edge_string()[1:]
        return f"{self.ident}{self.key}"


@dataclass(frozen=True)
class CostExpr:
    terms: tuple[tuple[Fraction, Atom], ...]

    def canonical(self) -> "CostExpr":
        acc: dict[Atom, Fraction] = {}
        for c, a in self.terms:
            acc[a] = acc.get(a, Fraction(0)) + c
        return CostExpr(tuple((c, a) for a, c in sorted(acc.items(), key=lambda kv: kv[0].sort_key()) if c))

    @property
    def family(self) -> str:
        fams = {a.family for _, a in self.terms}
        if len(fams) != 1:
            raise ValueError("mixed-family atoms" if fams else "empty cost")
        return fams.pop()

    def degree(self) -> int:
        return max((a.degree for _, a in self.terms), default=0)

    def __str__(self) -> str:
        return format_cost(self)


def format_cost(expr: CostExpr) -> str:
    out = []
    for i, (c, a) in enumerate(expr.terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = str(a) if mag == 1 else f"{mag}*{a}"
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out) if out else "0"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def offset(self, i: int | None = None) -> int:
        # byte offset of a character index
        i = self.i if i is None else i
        return len(self.text[:i].encode("utf-8"))

    def fail(self, message: str, i: int | None = None):
        raise CostParseError(self.offset(i), message)

    def ws(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.ws()
        return self.text[self.i] if self.i < len(self.text) else ""

    def integer(self) -> int:
        self.ws()
        m = re.compile(r"\d+").match(self.text, self.i)
        if not m:
            self.fail("expected an integer")
        self.i = m.end()
        return int(m.group())

    def ident(self) -> str:
        self.ws()
        m = re.compile(r"[A-Za-z][A-Za-z0-9_]*").match(self.text, self.i)
        if not m:
            self.fail("expected an atom")
        self.i = m.end()
        return m.group()

    def parse(self) -> CostExpr:
        terms = []
        sign = 1
        if self.peek() and self.peek() in "+-":
            sign = -1 if self.peek() == "-" else 1
            self.i += 1
        terms.append(self.term(sign))
        while True:
            ch = self.peek()
            if not ch:
                break
            if ch not in "+-":
                self.fail(f"unexpected {ch!r}")
            self.i += 1
            terms.append(self.term(-1 if ch == "-" else 1))
        expr = CostExpr(tuple(terms))
        expr.family  # raises on mixed families
        if expr.degree() > MAX_DEGREE:
            raise CostParseError(0, f"degree above {MAX_DEGREE}")
        return expr

    def term(self, sign: int) -> tuple[Fraction, Atom]:
        coef = Fraction(1)
        if self.peek().isdigit():
            num = self.integer()
            den = 1
            if self.peek() == "/":
                self.i += 1
                den = self.integer()
                if den == 0:
                    self.fail("zero denominator")
            coef = Fraction(num, den)
            if self.peek() == "*":
                self.i += 1
        return sign * coef, self.atom()

    def atom(self) -> Atom:
        self.ws()
        start = self.i
        name = self.ident()
        ch = self.text[self.i] if self.i < len(self.text) else ""
        if ch and ch in "[(":
            close = "]" if ch == "[" else ")"
            self.i += 1
            body_start = self.i
            end = self.text.find(close, self.i)
            if end < 0:
                self.fail(f"unterminated atom, expected {close!r}", len(self.text))
            body = self.text[body_start:end]
            self.i = end + 1
            return self.bracket_atom(name, body.strip(), body_start)
        if ch == "{":
            self.i += 1
            body_start = self.i
            end = self.text.find("}", self.i)
            if end < 0:
                self.fail("unterminated edge list, expected '}'", len(self.text))
            self.i = end + 1
            if name not in GRAPH_IDENTS:
                self.fail(f"{name!r} does not take an edge list", start)
            try:
                g = G.parse_edge_list(self.text[body_start:end])
            except ValueError as e:
                self.fail(str(e), body_start)
            return Atom(name, G.canonical_form(g))
        try:
            return Atom("t", G.named_graph(name))
        except ValueError:
            self.fail(f"unknown shortcut {name!r}", start)

    def bracket_atom(self, name: str, body: str, at: int) -> Atom:
        if not body:
            self.fail("empty atom body", at)
        numeric = body[0].isdigit() or body[0] == "("
        try:
            if numeric and name in ("s", "m"):
                return Atom(name, Partition.parse(f"[{body}]"))
            if numeric and name in ("sbar", "mbar"):
                return Atom(name, MultiIndexList.parse(f"[{body}]"))
            if not numeric and name in GRAPH_IDENTS:
                return Atom(name, G.named_graph(body))
        except ValueError as e:
            self.fail(str(e), at)
        self.fail(f"atom {name!r} does not accept body {body!r}", at)


def parse_cost(text: str) -> CostExpr:
    return _Parser(text).parse().canonical()


def to_polynomial(expr: CostExpr):
    """SymPoly or GraphPoly for a single-family expression."""
    fam = expr.family
    idents = {a.ident for _, a in expr.terms}
    if fam == "means":
        if len(idents) > 1:
            raise ValueError("cannot mix power means and monomial means")
        dims = {a.key.ambient_dim for _, a in expr.terms if a.key.entries}
        if len(dims) > 1:
            raise ValueError("atoms disagree on the ambient dimension")
        return SymPoly(Basis(idents.pop()), {a.key: c for c, a in expr.terms}, dims.pop() if dims else 1)
    if fam == "symfunc":
        s = SymPoly(Basis.POWER_SUM, {a.key: c for c, a in expr.terms if a.ident == "s"})
        m = SymPoly(Basis.MONOMIAL_SUM, {a.key: c for c, a in expr.terms if a.ident == "m"})
        return s + m_to_s(m) if m.coeffs else s
    if fam == "graph-density":
        plain = {i.rstrip("c") for i in idents}
        if len(plain) > 1:
            raise ValueError("cannot mix t and tinj")
        basis = plain.pop()
        return G.GraphPoly(basis, {a.key: c for c, a in expr.terms if not a.ident.endswith("c")},
                           {a.key: c for c, a in expr.terms if a.ident.endswith("c")})
    basis_of = {"hom": G.GraphBasis.HOM, "inj": G.GraphBasis.INJ, "m": G.GraphBasis.MSUM}
    if len(idents) == 1:
        ident = idents.pop()
        return G.GraphPoly(basis_of[ident], {a.key: c for c, a in expr.terms})
    total = G.GraphPoly(G.GraphBasis.MSUM, {})
    for c, a in expr.terms:
        total = total + G.hom_to_m(G.GraphPoly(basis_of[a.ident], {a.key: c}))
    return total


NAMED_COSTS = {
    "goodman": ("graph-density", "t[K3] - 2*t[K2uK2] + t[K2]"),
    "ramsey": ("graph-density", "t[K3pendant] + tc[K3pendant]"),
    "bad-quartic": ("symfunc", "4*s[4] - 139/20*s[3,1] + 4*s[2,2] - 5*s[2,1,1] + 4*s[1,1,1,1]"),
    "quadratic": ("symfunc", "s[2]"),
    "mfg": ("means", "5*sbar[1,1] - 4*sbar[2,1] - sbar[1]"),
    "graph-numbers": ("graph-numbers", "inj[P3] - inj[K2uK2]"),
}


def resolve_cost(text: str) -> tuple[str | None, CostExpr]:
    """Named cost or expression; returns (default setting or None, expression)."""
    key = text.strip()
    if key in NAMED_COSTS:
        setting, body = NAMED_COSTS[key]
        return setting, parse_cost(body)
    return None, parse_cost(text)
