"""Clause representation, parser and printer for constrained Horn clauses.

A program is a sequence of clauses ``H :- c, A1, ..., An.`` where ``c`` is a
conjunction of linear (in)equalities over rational or integer variables and
the ``Ai`` are atoms whose arguments are linear terms.  The head is either an
atom or ``false``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import networkx as nx

FALSE_PRED = "false"

# relations accepted in the surface syntax, mapped to the internal symbols
REL_SYNTAX = {"=": "=", "=<": "<=", "<": "<", ">=": ">=", ">": ">", "=\\=": "!="}
REL_PRINT = {"=": "=", "<=": "=<", "<": "<", ">=": ">=", ">": ">", "!=": "=\\="}


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line = line
        self.col = col


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def fmt_num(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class LinearTerm:
    """Sum of rational multiples of variables plus a constant."""

    coeffs: tuple[tuple[str, Fraction], ...] = ()
    const: Fraction = Fraction(0)

    @staticmethod
    def of(coeffs: Mapping[str, object] | Iterable[tuple[str, object]] = (), const=0) -> "LinearTerm":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[str, Fraction] = {}
        for v, k in items:
            acc[v] = acc.get(v, Fraction(0)) + _frac(k)
        return LinearTerm(tuple(sorted((v, k) for v, k in acc.items() if k != 0)), _frac(const))

    @staticmethod
    def var(name: str) -> "LinearTerm":
        return LinearTerm(((name, Fraction(1)),), Fraction(0))

    @staticmethod
    def num(k) -> "LinearTerm":
        return LinearTerm((), _frac(k))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def vars(self) -> list[str]:
        return [v for v, _ in self.coeffs]

    def coeff(self, v: str) -> Fraction:
        for w, k in self.coeffs:
            if w == v:
                return k
        return Fraction(0)

    @property
    def is_const(self) -> bool:
        return not self.coeffs

    def as_var(self) -> Optional[str]:
        if len(self.coeffs) == 1 and self.coeffs[0][1] == 1 and self.const == 0:
            return self.coeffs[0][0]
        return None

    def __add__(self, other: "LinearTerm") -> "LinearTerm":
        return LinearTerm.of(list(self.coeffs) + list(other.coeffs), self.const + other.const)

    def __neg__(self) -> "LinearTerm":
        return LinearTerm(tuple((v, -k) for v, k in self.coeffs), -self.const)

    def __sub__(self, other: "LinearTerm") -> "LinearTerm":
        return self + (-other)

    def scale(self, k) -> "LinearTerm":
        k = _frac(k)
        if k == 0:
            return LinearTerm()
        return LinearTerm(tuple((v, c * k) for v, c in self.coeffs), self.const * k)

    def subst(self, s: Mapping[str, "LinearTerm"]) -> "LinearTerm":
        if not any(v in s for v, _ in self.coeffs):
            return self
        out = LinearTerm.num(self.const)
        for v, k in self.coeffs:
            out = out + (s[v].scale(k) if v in s else LinearTerm(((v, k),)))
        return out

    def rename(self, r: Mapping[str, str]) -> "LinearTerm":
        return self.subst({v: LinearTerm.var(w) for v, w in r.items()})

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        return self.const + sum((k * point.get(v, Fraction(0)) for v, k in self.coeffs), Fraction(0))

    def __str__(self) -> str:
        parts: list[str] = []
        for v, k in self.coeffs:
            mag = abs(k)
            body = v if mag == 1 else f"{fmt_num(mag)}*{v}"
            parts.append(("-" if k < 0 else "+") + body)
        if self.const != 0 or not parts:
            c = self.const
            parts.append(("-" if c < 0 else "+") + fmt_num(abs(c)))
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s


# ----------------------------------------------------------- constraints


def _primitive(t: LinearTerm) -> LinearTerm:
    """Scale ``t`` by a positive factor so all coefficients are coprime integers."""
    nums = [k for _, k in t.coeffs] + ([t.const] if t.const else [])
    if not nums:
        return t
    den = lcm(*(k.denominator for k in nums))
    ints = [int(k * den) for k in nums]
    g = 0
    for i in ints:
        g = gcd(g, abs(i))
    return t.scale(Fraction(den, g))


@dataclass(frozen=True, eq=False)
class AtomicConstraint:
    """``lhs rel rhs`` with rel one of ``= <= < >= > !=``.

    Equality and hashing go through the normal form ``term rel 0`` with
    rel in ``= <= < !=`` (``>=`` and ``>`` flipped), so two constraints that
    differ only by layout or positive scaling compare equal.
    """

    lhs: LinearTerm
    rel: str
    rhs: LinearTerm = LinearTerm()

    def __post_init__(self):
        if self.rel not in REL_PRINT:
            raise ValueError(f"unknown relation {self.rel!r}")

    @property
    def normal(self) -> tuple[str, LinearTerm]:
        rel = self.rel
        t = self.lhs - self.rhs
        if rel == ">=":
            rel, t = "<=", -t
        elif rel == ">":
            rel, t = "<", -t
        t = _primitive(t)
        if rel in ("=", "!=") and t.coeffs and t.coeffs[0][1] < 0:
            t = -t
        elif rel in ("=", "!=") and not t.coeffs and t.const < 0:
            t = -t
        return rel, t

    @staticmethod
    def from_normal(rel: str, t: LinearTerm) -> "AtomicConstraint":
        """Build a readable constraint from ``t rel 0``."""
        pos = LinearTerm(tuple((v, k) for v, k in t.coeffs if k > 0))
        neg = LinearTerm(tuple((v, -k) for v, k in t.coeffs if k < 0))
        k = LinearTerm.num(t.const)
        if pos.coeffs or rel in ("=", "!="):
            if not pos.coeffs:
                return AtomicConstraint(neg, rel, k)
            return AtomicConstraint(pos, rel, neg - k)
        # -neg + k rel 0  <=>  neg flip(rel) k
        flip = {"<=": ">=", "<": ">"}[rel]
        return AtomicConstraint(neg, flip, k)

    def canonical(self) -> "AtomicConstraint":
        return AtomicConstraint.from_normal(*self.normal)

    def __eq__(self, other) -> bool:
        return isinstance(other, AtomicConstraint) and self.normal == other.normal

    def __hash__(self) -> int:
        return hash(self.normal)

    def vars(self) -> list[str]:
        seen: dict[str, None] = {}
        for v in self.lhs.vars() + self.rhs.vars():
            seen.setdefault(v)
        return list(seen)

    def subst(self, s: Mapping[str, LinearTerm]) -> "AtomicConstraint":
        return AtomicConstraint(self.lhs.subst(s), self.rel, self.rhs.subst(s))

    def rename(self, r: Mapping[str, str]) -> "AtomicConstraint":
        return AtomicConstraint(self.lhs.rename(r), self.rel, self.rhs.rename(r))

    def ground_value(self) -> Optional[bool]:
        """Truth value when the constraint mentions no variable, else None."""
        rel, t = self.normal
        if t.coeffs:
            return None
        c = t.const
        return {"=": c == 0, "<=": c <= 0, "<": c < 0, "!=": c != 0}[rel]

    def holds(self, point: Mapping[str, Fraction]) -> bool:
        rel, t = self.normal
        c = t.evaluate(point)
        return {"=": c == 0, "<=": c <= 0, "<": c < 0, "!=": c != 0}[rel]

    def __str__(self) -> str:
        a = self if self.lhs.coeffs else self.canonical()
        return f"{a.lhs}{REL_PRINT[a.rel]}{a.rhs}"


def eq(a: LinearTerm, b: LinearTerm) -> AtomicConstraint:
    return AtomicConstraint(a, "=", b)


@dataclass(frozen=True)
class Constraint:
    """Conjunction of atomic constraints.  The empty conjunction is ``true``.

    ``unsat`` marks the designated false constraint; its conjunct list is
    empty and ignored.
    """

    conjuncts: tuple[AtomicConstraint, ...] = ()
    unsat: bool = False

    @staticmethod
    def of(items: Iterable[AtomicConstraint]) -> "Constraint":
        out: list[AtomicConstraint] = []
        seen: set[AtomicConstraint] = set()
        for a in items:
            g = a.ground_value()
            if g is True:
                continue
            if g is False:
                return FALSE
            if a not in seen:
                seen.add(a)
                out.append(a)
        return Constraint(tuple(out))

    @property
    def is_true(self) -> bool:
        return not self.unsat and not self.conjuncts

    def __and__(self, other: "Constraint") -> "Constraint":
        if self.unsat or other.unsat:
            return FALSE
        return Constraint.of(self.conjuncts + other.conjuncts)

    def add(self, *items: AtomicConstraint) -> "Constraint":
        return self & Constraint.of(items)

    def vars(self) -> list[str]:
        seen: dict[str, None] = {}
        for a in self.conjuncts:
            for v in a.vars():
                seen.setdefault(v)
        return list(seen)

    def subst(self, s: Mapping[str, LinearTerm]) -> "Constraint":
        if self.unsat:
            return self
        return Constraint.of(a.subst(s) for a in self.conjuncts)

    def rename(self, r: Mapping[str, str]) -> "Constraint":
        if self.unsat:
            return self
        return Constraint.of(a.rename(r) for a in self.conjuncts)

    def holds(self, point: Mapping[str, Fraction]) -> bool:
        return not self.unsat and all(a.holds(point) for a in self.conjuncts)

    def key(self) -> frozenset:
        return frozenset(["#false"]) if self.unsat else frozenset(self.conjuncts)

    def __iter__(self) -> Iterator[AtomicConstraint]:
        return iter(self.conjuncts)

    def __len__(self) -> int:
        return len(self.conjuncts)

    def __str__(self) -> str:
        if self.unsat:
            return "1=0"
        if not self.conjuncts:
            return "true"
        return ", ".join(str(a) for a in self.conjuncts)


TRUE = Constraint()
FALSE = Constraint((), True)


def parse_constraint(text: str) -> Constraint:
    """Parse a comma separated conjunction such as ``X>=0, Y=X+1``."""
    p = _Parser(text)
    items = p.body(allow_atoms=False)
    p.expect_end()
    return Constraint.of(items)


# ---------------------------------------------------------------- clauses


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[LinearTerm, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def sig(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    def vars(self) -> list[str]:
        seen: dict[str, None] = {}
        for t in self.args:
            for v in t.vars():
                seen.setdefault(v)
        return list(seen)

    def subst(self, s: Mapping[str, LinearTerm]) -> "Atom":
        return Atom(self.pred, tuple(t.subst(s) for t in self.args))

    def rename(self, r: Mapping[str, str]) -> "Atom":
        return Atom(self.pred, tuple(t.rename(r) for t in self.args))

    def with_pred(self, pred: str) -> "Atom":
        return Atom(pred, self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(str(t) for t in self.args)})"


def atom(pred: str, *args) -> Atom:
    """Convenience constructor: string args are variables, numbers are constants."""
    conv = []
    for a in args:
        if isinstance(a, LinearTerm):
            conv.append(a)
        elif isinstance(a, str):
            conv.append(LinearTerm.var(a))
        else:
            conv.append(LinearTerm.num(a))
    return Atom(pred, tuple(conv))


@dataclass(frozen=True)
class Clause:
    """``head :- constraint, atoms``; ``head`` is None for goals."""

    head: Optional[Atom]
    constraint: Constraint = TRUE
    atoms: tuple[Atom, ...] = ()

    @property
    def is_goal(self) -> bool:
        return self.head is None

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.atoms

    @property
    def is_linear(self) -> bool:
        return len(self.atoms) <= 1

    @property
    def head_pred(self) -> str:
        return FALSE_PRED if self.head is None else self.head.pred

    def vars(self) -> list[str]:
        seen: dict[str, None] = {}
        parts: list[list[str]] = []
        if self.head is not None:
            parts.append(self.head.vars())
        parts.append(self.constraint.vars())
        parts.extend(a.vars() for a in self.atoms)
        for vs in parts:
            for v in vs:
                seen.setdefault(v)
        return list(seen)

    def subst(self, s: Mapping[str, LinearTerm]) -> "Clause":
        return Clause(
            None if self.head is None else self.head.subst(s),
            self.constraint.subst(s),
            tuple(a.subst(s) for a in self.atoms),
        )

    def rename(self, r: Mapping[str, str]) -> "Clause":
        return Clause(
            None if self.head is None else self.head.rename(r),
            self.constraint.rename(r),
            tuple(a.rename(r) for a in self.atoms),
        )

    def with_constraint(self, c: Constraint) -> "Clause":
        return Clause(self.head, c, self.atoms)

    def __str__(self) -> str:
        head = FALSE_PRED if self.head is None else str(self.head)
        items: list[str] = []
        if self.constraint.unsat or self.constraint.conjuncts:
            items.append(str(self.constraint))
        items.extend(str(a) for a in self.atoms)
        if not items:
            items = ["true"]
        return f"{head} :- {', '.join(items)}."


@dataclass(frozen=True)
class Program:
    clauses: tuple[Clause, ...] = ()
    mode: str = "rat"

    def __post_init__(self):
        if self.mode not in ("rat", "int"):
            raise ValueError(f"mode must be 'rat' or 'int', got {self.mode!r}")

    @property
    def goals(self) -> list[Clause]:
        return [c for c in self.clauses if c.is_goal]

    @property
    def definite(self) -> list[Clause]:
        return [c for c in self.clauses if not c.is_goal]

    def defining(self, pred: str) -> list[Clause]:
        return [c for c in self.clauses if c.head is not None and c.head.pred == pred]

    def predicates(self) -> dict[str, int]:
        """Predicate name to arity, in order of first occurrence."""
        out: dict[str, int] = {}
        for c in self.clauses:
            for a in ([c.head] if c.head is not None else []) + list(c.atoms):
                out.setdefault(a.pred, a.arity)
        return out

    def with_clauses(self, clauses: Iterable[Clause]) -> "Program":
        return Program(tuple(clauses), self.mode)

    def __len__(self) -> int:
        return len(self.clauses)

    def __str__(self) -> str:
        return print_program(self)


# ---------------------------------------------------------------- renaming

_TRAILING_DIGITS = re.compile(r"^(.*?)(\d*)$")


def fresh_name(base: str, taken: set[str]) -> str:
    """First name ``base``, ``base1``, ``base2``... not in ``taken``."""
    if base not in taken:
        return base
    stem = _TRAILING_DIGITS.match(base).group(1) or base
    i = 1
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


def rename_apart(c: Clause, avoid: Iterable[str]) -> Clause:
    """Rename the variables of ``c`` that clash with ``avoid``."""
    avoid = set(avoid)
    own = c.vars()
    if not avoid.intersection(own):
        return c
    taken = avoid | set(own)
    r: dict[str, str] = {}
    for v in own:
        if v in avoid:
            w = fresh_name(v, taken)
            taken.add(w)
            r[v] = w
    return c.rename(r)


def dependency_relation(p: Program) -> set[tuple[str, str]]:
    """Transitive closure of the immediately-depends-on relation.

    Goals contribute edges from the pseudo predicate ``false``.
    """
    g = nx.DiGraph()
    for c in p.clauses:
        for a in c.atoms:
            g.add_edge(c.head_pred, a.pred)
    closure = nx.transitive_closure(g, reflexive=False)
    return set(closure.edges())


def depends_on(p: Program, pred: str) -> set[str]:
    return {b for a, b in dependency_relation(p) if a == pred}


def call_graph(p: Program) -> nx.DiGraph:
    g = nx.DiGraph()
    for c in p.clauses:
        g.add_node(c.head_pred)
        for a in c.atoms:
            g.add_edge(c.head_pred, a.pred)
    return g


# ----------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|%[^\n]*)
  | (?P<nl>\n)
  | (?P<neck>:-)
  | (?P<rel>=\\=|=<|>=|=|<|>)
  | (?P<num>\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<punct>[(),.+\-*/])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    out: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            out.append(_Tok(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def take(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, text: Optional[str] = None) -> _Tok:
        if not self.at(kind, text):
            want = text or kind
            got = self.tok.text or "end of input"
            self.error(f"expected {want!r}, found {got!r}")
        return self.take()

    def expect_end(self):
        if not self.at("eof"):
            self.error(f"unexpected {self.tok.text!r}")

    # lin := ['+'|'-'] product (('+'|'-') product)*
    def lin(self) -> LinearTerm:
        sign = 1
        if self.at("punct", "-") or self.at("punct", "+"):
            sign = -1 if self.take().text == "-" else 1
        acc = self.product().scale(sign)
        while self.at("punct", "+") or self.at("punct", "-"):
            s = -1 if self.take().text == "-" else 1
            acc = acc + self.product().scale(s)
        return acc

    def product(self) -> LinearTerm:
        start = self.tok
        acc = self.factor()
        while self.at("punct", "*") or self.at("punct", "/"):
            op = self.take().text
            rhs = self.factor()
            if op == "*":
                if not acc.is_const and not rhs.is_const:
                    self.error("non-linear term: product of two variables", start)
                acc = acc.scale(rhs.const) if rhs.is_const else rhs.scale(acc.const)
            else:
                if not rhs.is_const:
                    self.error("non-linear term: division by a variable", start)
                if rhs.const == 0:
                    self.error("division by zero", start)
                acc = acc.scale(1 / rhs.const)
        return acc

    def factor(self) -> LinearTerm:
        t = self.tok
        if t.kind == "num":
            self.take()
            return LinearTerm.num(int(t.text))
        if t.kind == "var":
            self.take()
            return LinearTerm.var(t.text)
        if t.kind == "punct" and t.text == "(":
            self.take()
            inner = self.lin()
            self.expect("punct", ")")
            return inner
        if t.kind == "punct" and t.text == "-":
            self.take()
            return -self.factor()
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def atom(self) -> Atom:
        name = self.expect("name")
        args: list[LinearTerm] = []
        if self.at("punct", "("):
            self.take()
            args.append(self.lin())
            while self.at("punct", ","):
                self.take()
                args.append(self.lin())
            self.expect("punct", ")")
        return Atom(name.text, tuple(args))

    def constraint(self) -> AtomicConstraint:
        lhs = self.lin()
        if not self.at("rel"):
            self.error(f"expected a relation, found {self.tok.text or 'end of input'!r}")
        rel = REL_SYNTAX[self.take().text]
        rhs = self.lin()
        return AtomicConstraint(lhs, rel, rhs)

    def body(self, allow_atoms: bool = True):
        items: list = []
        while True:
            t = self.tok
            if t.kind == "name" and t.text == "true":
                self.take()
            elif t.kind == "name" and t.text == FALSE_PRED:
                self.error("false may only appear as a clause head")
            elif t.kind == "name":
                if not allow_atoms:
                    self.error("atoms are not allowed here")
                items.append((t, self.atom()))
            else:
                items.append(self.constraint())
            if not self.at("punct", ","):
                return items
            self.take()


def parse_program(text: str, mode: Optional[str] = None) -> Program:
    """Parse clause syntax.  A ``:- mode(int).`` directive selects integers.

    An explicit ``mode`` argument overrides the directive.
    """
    p = _Parser(text)
    clauses: list[Clause] = []
    arity: dict[str, int] = {}
    declared = "rat"

    def check(a: Atom, tok: _Tok):
        known = arity.setdefault(a.pred, a.arity)
        if known != a.arity:
            raise ParseError(
                f"predicate {a.pred} used with arity {a.arity}, previously {known}", tok.line, tok.col
            )

    while not p.at("eof"):
        start = p.tok
        if p.at("neck"):
            p.take()
            if not p.at("name", "mode"):
                p.error("unknown directive", start)
            p.take()
            p.expect("punct", "(")
            m = p.expect("name")
            if m.text not in ("int", "rat"):
                p.error(f"unknown mode {m.text!r}", m)
            declared = m.text
            p.expect("punct", ")")
            p.expect("punct", ".")
            continue
        if p.at("name", FALSE_PRED):
            p.take()
            head = None
        else:
            head = p.atom()
            check(head, start)
        cons: list[AtomicConstraint] = []
        atoms: list[Atom] = []
        if p.at("neck"):
            p.take()
            for item in p.body():
                if isinstance(item, tuple):
                    tok, a = item
                    check(a, tok)
                    atoms.append(a)
                else:
                    cons.append(item)
        p.expect("punct", ".")
        clauses.append(Clause(head, Constraint.of(cons), tuple(atoms)))
    return Program(tuple(clauses), mode or declared)


def print_program(p: Program) -> str:
    lines = []
    if p.mode == "int":
        lines.append(":- mode(int).")
    lines.extend(str(c) for c in p.clauses)
    return "\n".join(lines) + ("\n" if lines else "")


def print_clauses(clauses: Sequence[Clause]) -> str:
    return "".join(str(c) + "\n" for c in clauses)
