"""A small C-like language and its translation into verification conditions.

Two translations are offered:

* big-step: one predicate per function (parameters plus result) and per
  loop (live inputs plus the outputs the rest of the function needs); the
  goal conjoins the negated postcondition, the precondition and the entry
  calls;
* reachability: calls are inlined, there is one predicate per cut point
  (entry and loop heads) over the variables live there, the base case sits
  at the exit with the negated postcondition and the goal at the entry with
  the precondition.  Every clause is linear.

The specification comes from comment pragmas::

    // pre: m >= 0
    // post: sum >= m
    // entry: sum = sum_upto(m);
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

from . import linarith as la
from .core import (
    Atom,
    AtomicConstraint,
    Clause,
    Constraint,
    LinearTerm,
    ParseError,
    Program,
    fresh_name,
)

# ------------------------------------------------------------------ AST


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    line: int = 0


Expr = Union[Num, Var, Bin, Neg, Call]


@dataclass(frozen=True)
class Cmp:
    op: str  # == != <= < >= >
    left: Expr
    right: Expr


Cond = tuple  # conjunction of Cmp


@dataclass(eq=False)
class Assign:
    var: str
    expr: Optional[Expr]  # None: declared without a value
    decl: bool = False


@dataclass(eq=False)
class If:
    cond: Cond
    then: list
    els: list


@dataclass(eq=False)
class While:
    cond: Cond
    body: list


@dataclass(eq=False)
class Return:
    expr: Optional[Expr]


@dataclass(eq=False)
class ExprStmt:
    call: Call


Stmt = Union[Assign, If, While, Return, ExprStmt]


@dataclass
class Function:
    name: str
    params: list[str]
    returns: bool
    body: list
    locals: list[str] = field(default_factory=list)
    uses_globals: bool = False


@dataclass
class ImpProgram:
    functions: dict[str, Function]
    globals: list[str] = field(default_factory=list)


@dataclass
class TripleSpec:
    pre: Cond = ()
    post: Cond = ()
    entries: list = field(default_factory=list)


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>//[^\n]*|/\*.*?\*/)"
    r"|(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\+\+|--|\+=|-=|==|!=|<=|>=|&&|\|\||[-+*/(){},;<>=!])",
    re.S,
)

_KEYWORDS = {"int", "void", "if", "else", "while", "return"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str, line0: int = 1) -> list[_Tok]:
    out = []
    pos, line, start = 0, line0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind == "comment":
            line += m.group().count("\n")
        elif kind != "ws":
            out.append(_Tok(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, toks: list[_Tok], pragma: bool = False):
        self.toks = toks
        self.i = 0
        self.pragma = pragma

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def err(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def at(self, *texts: str) -> bool:
        return self.tok.text in texts and self.tok.kind in ("op", "id")

    def take(self, text: Optional[str] = None, kind: Optional[str] = None) -> _Tok:
        t = self.tok
        if text is not None and t.text != text:
            self.err(f"expected '{text}', found '{t.text or 'end of input'}'")
        if kind is not None and t.kind != kind:
            self.err(f"expected {kind}, found '{t.text or 'end of input'}'")
        self.i += 1
        return t

    def ident(self) -> str:
        t = self.take(kind="id")
        if t.text in _KEYWORDS:
            self.err(f"unexpected keyword '{t.text}'", t)
        return t.text

    # ------------------------------------------------------ expressions

    def expr(self) -> Expr:
        e = self.term()
        while self.at("+", "-"):
            op = self.take().text
            e = Bin(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.at("*"):
            self.take()
            e = Bin("*", e, self.unary())
        if self.at("/"):
            self.err("division is not supported")
        return e

    def unary(self) -> Expr:
        if self.at("-"):
            self.take()
            return Neg(self.unary())
        if self.at("+"):
            self.take()
            return self.unary()
        t = self.tok
        if t.kind == "num":
            self.take()
            return Num(int(t.text))
        if self.at("("):
            self.take()
            e = self.expr()
            self.take(")")
            return e
        name = self.ident()
        if self.at("("):
            self.take()
            args = []
            if not self.at(")"):
                args.append(self.expr())
                while self.at(","):
                    self.take()
                    args.append(self.expr())
            self.take(")")
            return Call(name, tuple(args), t.line)
        return Var(name)

    def cmp(self) -> Cmp:
        left = self.expr()
        ops = ("==", "!=", "<=", "<", ">=", ">") + (("=",) if self.pragma else ())
        if not self.at(*ops):
            self.err("expected a comparison")
        op = self.take().text
        return Cmp("==" if op == "=" else op, left, self.expr())

    def cond(self) -> Cond:
        if self.pragma and self.at("true"):
            self.take()
            return ()
        parts = [self.cmp()]
        seps = ("&&", ",") if self.pragma else ("&&",)
        while self.at(*seps):
            self.take()
            parts.append(self.cmp())
        if self.at("||"):
            self.err("disjunctive conditions are not supported")
        return tuple(parts)

    # ------------------------------------------------------- statements

    def block(self) -> list:
        self.take("{")
        out = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.err("unterminated block")
            out.extend(self.stmt())
        self.take("}")
        return out

    def body(self) -> list:
        return self.block() if self.at("{") else self.stmt()

    def stmt(self) -> list:
        t = self.tok
        if self.at("{"):
            return self.block()
        if self.at("int"):
            self.take()
            out = []
            while True:
                name = self.ident()
                out.append(Assign(name, self.expr() if self._eq() else None, True))
                if not self.at(","):
                    break
                self.take()
            self.take(";")
            return out
        if self.at("if"):
            self.take()
            self.take("(")
            c = self.cond()
            self.take(")")
            then = self.body()
            els: list = []
            if self.at("else"):
                self.take()
                els = self.body()
            return [If(c, then, els)]
        if self.at("while"):
            self.take()
            self.take("(")
            c = self.cond()
            self.take(")")
            return [While(c, self.body())]
        if self.at("return"):
            self.take()
            e = None if self.at(";") else self.expr()
            self.take(";")
            return [Return(e)]
        if t.kind == "id" and self.toks[self.i + 1].text == "(":
            e = self.unary()
            self.take(";")
            return [ExprStmt(e)]
        name = self.ident()
        if self.at("++", "--"):
            op = self.take().text
            s = Assign(name, Bin(op[0], Var(name), Num(1)))
        elif self.at("+=", "-="):
            op = self.take().text
            s = Assign(name, Bin(op[0], Var(name), self.expr()))
        else:
            self.take("=")
            s = Assign(name, self.expr())
        if not (self.pragma and self.tok.kind == "eof"):
            self.take(";")
        return [s]

    def _eq(self) -> bool:
        if self.at("="):
            self.take()
            return True
        return False

    # -------------------------------------------------------- functions

    def program(self) -> ImpProgram:
        funcs: dict[str, Function] = {}
        glob: list[str] = []
        while self.tok.kind != "eof":
            if not self.at("int", "void"):
                self.err("expected a declaration")
            returns = self.take().text == "int"
            name_tok = self.tok
            name = self.ident()
            if self.at("("):
                self.take()
                params = []
                if not self.at(")"):
                    while True:
                        self.take("int")
                        params.append(self.ident())
                        if not self.at(","):
                            break
                        self.take()
                self.take(")")
                body = self.block()
                if name in funcs:
                    self.err(f"function {name} defined twice", name_tok)
                funcs[name] = Function(name, params, returns, body)
            else:
                if not returns:
                    self.err("variables must have type int", name_tok)
                glob.append(name)
                while self.at(","):
                    self.take()
                    glob.append(self.ident())
                if self.at("="):
                    self.err("global initialisers are not supported")
                self.take(";")
        return ImpProgram(funcs, glob)


# ------------------------------------------------------------ validation


def _expr_vars(e: Expr) -> Iterator[str]:
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, Bin):
        yield from _expr_vars(e.left)
        yield from _expr_vars(e.right)
    elif isinstance(e, Neg):
        yield from _expr_vars(e.arg)
    elif isinstance(e, Call):
        for a in e.args:
            yield from _expr_vars(a)


def _calls(e: Expr) -> Iterator[Call]:
    if isinstance(e, Call):
        for a in e.args:
            yield from _calls(a)
        yield e
    elif isinstance(e, Bin):
        yield from _calls(e.left)
        yield from _calls(e.right)
    elif isinstance(e, Neg):
        yield from _calls(e.arg)


def _cond_vars(c: Cond) -> Iterator[str]:
    for k in c:
        yield from _expr_vars(k.left)
        yield from _expr_vars(k.right)


def _cond_calls(c: Cond) -> list[Call]:
    return [x for k in c for e in (k.left, k.right) for x in _calls(e)]


def _check_function(p: ImpProgram, f: Function) -> None:
    scope = set(f.params)
    if len(scope) != len(f.params):
        raise ParseError(f"repeated parameter in {f.name}", 0, 0)
    glob = set(p.globals)

    def use(names: Iterable[str]):
        for n in names:
            if n not in scope:
                if n not in glob:
                    raise ParseError(f"unknown identifier '{n}' in function {f.name}", 0, 0)
                f.uses_globals = True

    def calls(es: Iterable[Call]):
        for c in es:
            g = p.functions.get(c.func)
            if g is None:
                raise ParseError(f"unknown function '{c.func}'", c.line, 0)
            if len(c.args) != len(g.params):
                raise ParseError(f"{c.func} expects {len(g.params)} arguments", c.line, 0)

    def walk(stmts: list, top: bool):
        for i, s in enumerate(stmts):
            if isinstance(s, Assign):
                if s.expr is not None:
                    use(_expr_vars(s.expr))
                    calls(_calls(s.expr))
                if s.var not in scope and not s.decl and s.var in glob:
                    f.uses_globals = True
                elif s.var not in scope:
                    if not s.decl:
                        raise ParseError(f"unknown identifier '{s.var}' in function {f.name}", 0, 0)
                    scope.add(s.var)
                    f.locals.append(s.var)
            elif isinstance(s, If):
                use(_cond_vars(s.cond))
                if _cond_calls(s.cond):
                    raise ParseError("calls in conditions are not supported", _cond_calls(s.cond)[0].line, 0)
                walk(s.then, False)
                walk(s.els, False)
            elif isinstance(s, While):
                use(_cond_vars(s.cond))
                if _cond_calls(s.cond):
                    raise ParseError("calls in loop conditions are not supported", _cond_calls(s.cond)[0].line, 0)
                walk(s.body, False)
            elif isinstance(s, ExprStmt):
                use(_expr_vars(s.call))
                calls(_calls(s.call))
            elif isinstance(s, Return):
                if not top or i != len(stmts) - 1:
                    raise ParseError(f"function {f.name} must have a single return at its end", 0, 0)
                if (s.expr is None) == f.returns:
                    raise ParseError(f"return does not match the type of {f.name}", 0, 0)
                if s.expr is not None:
                    use(_expr_vars(s.expr))
                    calls(_calls(s.expr))

    walk(f.body, True)
    if f.returns and not (f.body and isinstance(f.body[-1], Return)):
        raise ParseError(f"function {f.name} must end with a return", 0, 0)


_PRAGMA = re.compile(r"^\s*//\s*(pre|post|entry)\s*:(.*)$")


def parse_imp(text: str) -> tuple[ImpProgram, TripleSpec]:
    """Parse source text and its ``pre``/``post``/``entry`` pragmas."""
    spec = TripleSpec()
    pre = post = None
    for no, line in enumerate(text.splitlines(), 1):
        m = _PRAGMA.match(line)
        if not m:
            continue
        kind, body = m.group(1), m.group(2)
        ps = _Parser(_lex(body, no), pragma=True)
        if kind == "entry":
            stmts = ps.stmt()
            for s in stmts:
                if not (isinstance(s, ExprStmt) or (isinstance(s, Assign) and isinstance(s.expr, Call))):
                    raise ParseError("an entry must be a call, possibly assigned to a variable", no, 1)
            spec.entries.extend(stmts)
        else:
            c = ps.cond()
            if ps.tok.kind != "eof":
                ps.err("trailing text in pragma")
            if kind == "pre":
                pre = (pre or ()) + c
            else:
                post = (post or ()) + c
    spec.pre = pre or ()
    spec.post = post or ()
    prog = _Parser(_lex(text)).program()
    for f in prog.functions.values():
        _check_function(prog, f)
    for s in spec.entries:
        call = s.call if isinstance(s, ExprStmt) else s.expr
        g = prog.functions.get(call.func)
        if g is None:
            raise ParseError(f"unknown function '{call.func}' in entry", call.line, 0)
        if len(call.args) != len(g.params):
            raise ParseError(f"{call.func} expects {len(g.params)} arguments", call.line, 0)
        if isinstance(s, Assign) and not g.returns:
            raise ParseError(f"{call.func} returns no value", call.line, 0)
    return prog, spec


# ----------------------------------------------------------- utilities


def _cap(name: str) -> str:
    return name[0].upper() + name[1:]


_NEG = {"==": "!=", "!=": "==", "<=": ">", "<": ">=", ">=": "<", ">": "<="}
_REL = {"==": "=", "!=": "!=", "<=": "<=", "<": "<", ">=": ">=", ">": ">"}


def _negate(c: Cond) -> list[Cond]:
    """Disjuncts of the negation of a conjunction."""
    return [(Cmp(_NEG[k.op], k.left, k.right),) for k in c]


class _Scope:
    """Variable names of one clause."""

    def __init__(self, taken: Iterable[str] = ()):
        self.taken = set(taken)

    def fresh(self, base: str) -> str:
        n = fresh_name(_cap(base), self.taken)
        self.taken.add(n)
        return n


@dataclass
class _Path:
    cons: list
    atoms: list
    env: dict

    def copy(self) -> "_Path":
        return _Path(list(self.cons), list(self.atoms), dict(self.env))


def _term(e: Expr, env: dict, on_call) -> LinearTerm:
    if isinstance(e, Num):
        return LinearTerm.num(e.value)
    if isinstance(e, Var):
        if e.name not in env:
            raise ParseError(f"variable '{e.name}' is read before it is assigned", 0, 0)
        return env[e.name]
    if isinstance(e, Neg):
        return -_term(e.arg, env, on_call)
    if isinstance(e, Call):
        return on_call(e, [_term(a, env, on_call) for a in e.args])
    l, r = _term(e.left, env, on_call), _term(e.right, env, on_call)
    if e.op == "+":
        return l + r
    if e.op == "-":
        return l - r
    if l.is_const:
        return r.scale(l.const)
    if r.is_const:
        return l.scale(r.const)
    raise ParseError("non-linear expression (product of variables)", 0, 0)


def _constraints(c: Cond, env: dict) -> list[AtomicConstraint]:
    def nocall(call, args):
        raise ParseError("calls are not allowed here", call.line, 0)

    return [AtomicConstraint(_term(k.left, env, nocall), _REL[k.op], _term(k.right, env, nocall)) for k in c]


def _assigned(stmts: list) -> set[str]:
    out: set[str] = set()
    for s in stmts:
        if isinstance(s, Assign):
            out.add(s.var)
        elif isinstance(s, If):
            out |= _assigned(s.then) | _assigned(s.els)
        elif isinstance(s, While):
            out |= _assigned(s.body)
    return out


def _live(stmts: list, after: set[str], record: dict) -> set[str]:
    """Variables live before ``stmts``; loop heads are recorded in ``record``."""
    live = set(after)
    for s in reversed(stmts):
        if isinstance(s, Assign):
            live = (live - {s.var}) | (set(_expr_vars(s.expr)) if s.expr is not None else set())
        elif isinstance(s, ExprStmt):
            live = live | set(_expr_vars(s.call))
        elif isinstance(s, Return):
            live = set(_expr_vars(s.expr)) if s.expr is not None else set()
        elif isinstance(s, If):
            live = set(_cond_vars(s.cond)) | _live(s.then, live, record) | _live(s.els, live, record)
        elif isinstance(s, While):
            head = set(live) | set(_cond_vars(s.cond))
            while True:
                nxt = head | _live(s.body, head, record)
                if nxt == head:
                    break
                head = nxt
            _live(s.body, head, record)
            record[id(s)] = (head, set(live))
            live = head
    return live


def _flat_args(args: Sequence[LinearTerm], path: _Path, scope: _Scope, base: str = "A") -> tuple[LinearTerm, ...]:
    out = []
    for t in args:
        if t.is_const or t.as_var() is not None:
            out.append(t)
            continue
        v = scope.fresh(base)
        path.cons.append(AtomicConstraint(LinearTerm.var(v), "=", t))
        out.append(LinearTerm.var(v))
    return tuple(out)


def _no_globals(f: Function) -> None:
    if f.uses_globals:
        raise ParseError(f"function {f.name} uses global variables, which cannot be translated", 0, 0)


def _pred_name(name: str) -> str:
    n = re.sub(r"[^A-Za-z0-9_]", "_", name)
    return n[0].lower() + n[1:]


# -------------------------------------------------------------- big-step


class _BigStep:
    def __init__(self, prog: ImpProgram):
        self.prog = prog
        self.clauses: list[Clause] = []
        self.taken = {"false"}
        self.fpred: dict[str, str] = {}
        for f in prog.functions:
            n = fresh_name(_pred_name(f), self.taken)
            self.taken.add(n)
            self.fpred[f] = n
        self.loops: dict[int, tuple[str, list[str], list[str]]] = {}
        self.done_funcs: set[str] = set()
        self.pending: list[str] = []

    def order(self, f: Function, names: Iterable[str]) -> list[str]:
        rank = {v: i for i, v in enumerate(f.params + f.locals)}
        return sorted(set(names), key=lambda v: rank.get(v, len(rank)))

    def need(self, fname: str) -> None:
        if fname not in self.done_funcs and fname not in self.pending:
            self.pending.append(fname)

    def call(self, path: _Path, scope: _Scope, call: Call, args: list, target: Optional[str]) -> LinearTerm:
        g = self.prog.functions[call.func]
        self.need(call.func)
        flat = _flat_args(args, path, scope, g.params[0] if g.params else "A")
        res: tuple = ()
        out = None
        if g.returns:
            out = LinearTerm.var(scope.fresh(target or "R"))
            res = (out,)
        path.atoms.append(Atom(self.fpred[call.func], flat + res))
        return out

    def run(self, f: Function, stmts: list, paths: list[_Path], scope: _Scope, live_rec: dict) -> list[_Path]:
        for s in stmts:
            nxt: list[_Path] = []
            for path in paths:
                nxt.extend(self.step(f, s, path, scope, live_rec))
            paths = nxt
        return paths

    def step(self, f: Function, s, path: _Path, scope: _Scope, live_rec: dict) -> list[_Path]:
        if isinstance(s, Assign):
            if s.expr is None:
                path.env.pop(s.var, None)
                return [path]
            target = s.var if isinstance(s.expr, Call) else None
            t = _term(s.expr, path.env, lambda c, a: self.call(path, scope, c, a, target))
            if isinstance(s.expr, Call):
                path.env[s.var] = t
                return [path]
            v = scope.fresh(s.var)
            path.cons.append(AtomicConstraint(LinearTerm.var(v), "=", t))
            path.env[s.var] = LinearTerm.var(v)
            return [path]
        if isinstance(s, ExprStmt):
            _term(s.call, path.env, lambda c, a: self.call(path, scope, c, a, None))
            return [path]
        if isinstance(s, Return):
            if s.expr is not None:
                path.env["$ret"] = _term(s.expr, path.env, lambda c, a: self.call(path, scope, c, a, None))
            return [path]
        if isinstance(s, If):
            out = []
            p1 = path.copy()
            p1.cons.extend(_constraints(s.cond, p1.env))
            out.extend(self.run(f, s.then, [p1], scope, live_rec))
            for d in _negate(s.cond):
                p2 = path.copy()
                p2.cons.extend(_constraints(d, p2.env))
                out.extend(self.run(f, s.els, [p2], scope, live_rec))
            return out
        if isinstance(s, While):
            name, ins, outs = self.loop(f, s, live_rec)
            args = tuple(path.env[v] for v in ins)
            fresh_outs = []
            for v in outs:
                w = LinearTerm.var(scope.fresh(v))
                fresh_outs.append(w)
            path.atoms.append(Atom(name, _flat_args(args, path, scope) + tuple(fresh_outs)))
            for v, w in zip(outs, fresh_outs):
                path.env[v] = w
            return [path]
        raise TypeError(s)

    def loop(self, f: Function, w: While, live_rec: dict):
        if id(w) in self.loops:
            return self.loops[id(w)]
        head, after = live_rec[id(w)]
        ins = self.order(f, head)
        outs = self.order(f, _assigned(w.body) & after)
        name = fresh_name("while", self.taken)
        self.taken.add(name)
        self.loops[id(w)] = (name, ins, outs)
        scope = _Scope()
        hin = [LinearTerm.var(scope.fresh(v)) for v in ins]
        hout = [LinearTerm.var(scope.fresh(v)) for v in outs]
        head_atom = Atom(name, tuple(hin) + tuple(hout))
        env = dict(zip(ins, hin))
        start = _Path(_constraints(w.cond, env), [], dict(env))
        for path in self.run(f, w.body, [start], scope, live_rec):
            args = _flat_args([path.env[v] for v in ins], path, scope)
            path.atoms.append(Atom(name, args + tuple(hout)))
            self.clauses.append(Clause(head_atom, Constraint.of(path.cons), tuple(path.atoms)))
        for d in _negate(w.cond):
            cons = _constraints(d, env) + [AtomicConstraint(o, "=", env[v]) for v, o in zip(outs, hout)]
            self.clauses.append(Clause(head_atom, Constraint.of(cons)))
        return self.loops[id(w)]

    def function(self, fname: str) -> None:
        f = self.prog.functions[fname]
        _no_globals(f)
        self.done_funcs.add(fname)
        live_rec: dict = {}
        _live(f.body, set(), live_rec)
        scope = _Scope()
        params = [LinearTerm.var(scope.fresh(v)) for v in f.params]
        env = dict(zip(f.params, params))
        for path in self.run(f, f.body, [_Path([], [], dict(env))], scope, live_rec):
            res: tuple = ()
            if f.returns:
                r = path.env["$ret"]
                v = r.as_var()
                if v is None or r in params:
                    v = scope.fresh("R")
                    path.cons.append(AtomicConstraint(LinearTerm.var(v), "=", r))
                res = (LinearTerm.var(v),)
            head = Atom(self.fpred[fname], tuple(params) + res)
            self.clauses.append(Clause(head, Constraint.of(path.cons), tuple(path.atoms)))

    def drain(self) -> None:
        while self.pending:
            self.function(self.pending.pop(0))


def _spec_vars(spec: TripleSpec, inputs_only: bool = False) -> list[str]:
    """Variables of the specification in order of appearance.

    With ``inputs_only``, variables the entries assign before reading are left out.
    """
    seen: dict[str, None] = {}
    assigned: set[str] = set()
    for v in _cond_vars(spec.pre):
        seen.setdefault(v)
    for s in spec.entries:
        call = s.call if isinstance(s, ExprStmt) else s.expr
        for a in call.args:
            for v in _expr_vars(a):
                if v not in assigned:
                    seen.setdefault(v)
        if isinstance(s, Assign):
            assigned.add(s.var)
            if not inputs_only:
                seen.setdefault(s.var)
    for v in _cond_vars(spec.post):
        if not (inputs_only and v in assigned):
            seen.setdefault(v)
    return list(seen)


def translate_bigstep(prog: ImpProgram, spec: TripleSpec) -> Program:
    """Big-step verification conditions (integer mode)."""
    bs = _BigStep(prog)
    scope = _Scope()
    env0 = {v: LinearTerm.var(scope.fresh(v)) for v in _spec_vars(spec, inputs_only=True)}
    dummy = Function("$entry", [], False, list(spec.entries))
    paths = bs.run(dummy, spec.entries, [_Path([], [], dict(env0))], scope, {})
    goals = []
    if spec.post:
        for path in paths:
            pre = _constraints(spec.pre, env0)
            for d in _negate(spec.post):
                cons = _constraints(d, path.env) + pre + path.cons
                goals.append(Clause(None, Constraint.of(cons), tuple(path.atoms)))
    else:
        # nothing to check; still translate what the entries call
        pass
    bs.drain()
    return Program(tuple(goals) + tuple(bs.clauses), "int")


# ---------------------------------------------------------- reachability


class _Inliner:
    """Replace calls by the callee bodies, renaming callee variables apart."""

    def __init__(self, prog: ImpProgram, used: Iterable[str]):
        self.prog = prog
        self.used = set(used)
        self.stack: list[str] = []

    def fresh(self, base: str) -> str:
        n = fresh_name(base, self.used)
        self.used.add(n)
        return n

    def expr(self, e: Expr, pre: list) -> Expr:
        if isinstance(e, Call):
            args = [self.expr(a, pre) for a in e.args]
            t = self.fresh("ret")
            pre.extend(self.inline(e, args, t))
            return Var(t)
        if isinstance(e, Bin):
            return Bin(e.op, self.expr(e.left, pre), self.expr(e.right, pre))
        if isinstance(e, Neg):
            return Neg(self.expr(e.arg, pre))
        return e

    def inline(self, call: Call, args: list, target: Optional[str]) -> list:
        g = self.prog.functions[call.func]
        _no_globals(g)
        if call.func in self.stack:
            raise ParseError(f"reachability translation cannot inline recursive function {call.func}", call.line, 0)
        self.stack.append(call.func)
        ren = {v: self.fresh(v) for v in g.params + g.locals}
        out: list = [Assign(ren[p], a) for p, a in zip(g.params, args)]
        out.extend(self.stmts(g.body, ren, target))
        self.stack.pop()
        return out

    def stmts(self, stmts: list, ren: dict, target: Optional[str]) -> list:
        out = []
        for s in stmts:
            if isinstance(s, Assign):
                if s.expr is None:
                    out.append(Assign(ren.get(s.var, s.var), None))
                    continue
                pre: list = []
                if isinstance(s.expr, Call):
                    args = [self.expr(_rename(a, ren), pre) for a in s.expr.args]
                    out.extend(pre)
                    out.extend(self.inline(s.expr, args, ren.get(s.var, s.var)))
                    continue
                e = self.expr(_rename(s.expr, ren), pre)
                out.extend(pre)
                out.append(Assign(ren.get(s.var, s.var), e))
            elif isinstance(s, ExprStmt):
                pre = []
                args = [self.expr(_rename(a, ren), pre) for a in s.call.args]
                out.extend(pre)
                out.extend(self.inline(s.call, args, None))
            elif isinstance(s, Return):
                if s.expr is not None and target is not None:
                    pre = []
                    e = self.expr(_rename(s.expr, ren), pre)
                    out.extend(pre)
                    out.append(Assign(target, e))
            elif isinstance(s, If):
                out.append(If(_rename_cond(s.cond, ren), self.stmts(s.then, ren, target), self.stmts(s.els, ren, target)))
            elif isinstance(s, While):
                out.append(While(_rename_cond(s.cond, ren), self.stmts(s.body, ren, target)))
        return out


def _rename(e: Expr, ren: dict) -> Expr:
    if isinstance(e, Var):
        return Var(ren.get(e.name, e.name))
    if isinstance(e, Bin):
        return Bin(e.op, _rename(e.left, ren), _rename(e.right, ren))
    if isinstance(e, Neg):
        return Neg(_rename(e.arg, ren))
    if isinstance(e, Call):
        return Call(e.func, tuple(_rename(a, ren) for a in e.args), e.line)
    return e


def _rename_cond(c: Cond, ren: dict) -> Cond:
    return tuple(Cmp(k.op, _rename(k.left, ren), _rename(k.right, ren)) for k in c)


def _walk(k: tuple, path: _Path, scope: _Scope, conts: dict) -> Iterator[tuple[Optional[While], _Path]]:
    """Symbolic paths until the next loop head (``While``) or the exit (``None``)."""
    while k and not k[0]:
        k = k[1:]
    if not k:
        yield None, path
        return
    s, rest = k[0][0], (k[0][1:],) + k[1:]
    if isinstance(s, Assign):
        if s.expr is None:
            path.env[s.var] = LinearTerm.var(scope.fresh(s.var))
        else:
            t = _term(s.expr, path.env, None)
            v = scope.fresh(s.var)
            path.cons.append(AtomicConstraint(LinearTerm.var(v), "=", t))
            path.env[s.var] = LinearTerm.var(v)
        yield from _walk(rest, path, scope, conts)
    elif isinstance(s, If):
        p1 = path.copy()
        p1.cons.extend(_constraints(s.cond, p1.env))
        yield from _walk((s.then,) + rest, p1, scope, conts)
        for d in _negate(s.cond):
            p2 = path.copy()
            p2.cons.extend(_constraints(d, p2.env))
            yield from _walk((s.els,) + rest, p2, scope, conts)
    elif isinstance(s, While):
        conts.setdefault(id(s), (s, rest))
        yield s, path
    else:
        raise TypeError(s)


def translate_reach(prog: ImpProgram, spec: TripleSpec) -> Program:
    """Backward-reachability verification conditions (linear, integer mode)."""
    svars = _spec_vars(spec)
    inl = _Inliner(prog, svars)
    main = inl.stmts(list(spec.entries), {}, None)
    rank = {v: i for i, v in enumerate(svars)}

    def order(vs: Iterable[str]) -> list[str]:
        return sorted(set(vs), key=lambda v: (rank.get(v, len(rank)), v))

    record: dict = {}
    end_live = set(_cond_vars(spec.post))
    entry_live = _live(main, end_live, record)
    taken = {"false"}
    entry_name = "assign_error" if spec.entries and isinstance(spec.entries[0], Assign) else "entry_error"
    entry_name = fresh_name(entry_name, taken)
    taken.add(entry_name)
    cut: dict[int, tuple[str, list[str]]] = {}
    conts: dict[int, tuple] = {}
    clauses: list[Clause] = []

    def cutpoint(w: While) -> tuple[str, list[str]]:
        if id(w) not in cut:
            n = fresh_name("while_error", taken)
            taken.add(n)
            cut[id(w)] = (n, order(record[id(w)][0]))
        return cut[id(w)]

    def emit(name: str, live: list[str], k: tuple, extra: Optional[Cond]):
        scope = _Scope()
        hv = [LinearTerm.var(scope.fresh(v)) for v in live]
        env = dict(zip(live, hv))
        head = Atom(name, tuple(hv))
        starts = [[]] if extra is None else [_constraints(extra, env)]
        for cons0 in starts:
            for w, path in _walk(k, _Path(list(cons0), [], dict(env)), scope, conts):
                if w is None:
                    for d in _negate(spec.post):
                        c = Constraint.of(path.cons + _constraints(d, path.env))
                        clauses.append(Clause(head, la.proj_exact(c, [t.as_var() for t in hv], "int")))
                else:
                    n, lv = cutpoint(w)
                    args = _flat_args([path.env[v] for v in lv], path, scope)
                    clauses.append(Clause(head, Constraint.of(path.cons), (Atom(n, args),)))

    entry_vars = order(entry_live)
    emit(entry_name, entry_vars, (main,), None)
    done: set[int] = set()
    while True:
        todo = [wid for wid in cut if wid not in done]
        if not todo:
            break
        for wid in todo:
            done.add(wid)
            w, rest = conts[wid]
            name, live = cut[wid]
            emit(name, live, (w.body, [w]) + rest, w.cond)
            for d in _negate(w.cond):
                emit(name, live, rest, d)
    goals = []
    if spec.post:
        scope = _Scope()
        env = {v: LinearTerm.var(scope.fresh(v)) for v in entry_vars}
        for v in _cond_vars(spec.pre):
            env.setdefault(v, LinearTerm.var(scope.fresh(v)))
        goals.append(
            Clause(None, Constraint.of(_constraints(spec.pre, env)), (Atom(entry_name, tuple(env[v] for v in entry_vars)),))
        )
    return Program(tuple(goals) + tuple(clauses), "int")


def compile_source(text: str, style: str = "bigstep") -> Program:
    prog, spec = parse_imp(text)
    if style == "bigstep":
        return translate_bigstep(prog, spec)
    if style == "reach":
        return translate_reach(prog, spec)
    raise ValueError(f"unknown translation style {style!r}")
