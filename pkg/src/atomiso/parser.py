"""Concrete syntax for set-builder expressions and guard formulas.

`parse` turns source text into a canonical expression AST and `print_expr`
renders one back; the two are mutually inverse on canonical ASTs (those the
parser itself produces).  Set-shaped syntax always lands in a `Union` node:
a bare comprehension becomes a one-clause union, an enumeration becomes a
union of binder-free clauses, and `empty` is the empty union.  `atoms` stays
a bare `AtomsSet` unless it meets `+`.

Comments start with `#` unless a digit follows (then it is an atom literal)
and run to the end of the line.
"""

from fractions import Fraction

from .errors import ParseError
from .exprs import (
    ATOMS,
    AtomParam,
    AtomsSet,
    ETuple,
    EVar,
    Expr,
    SetComp,
    Union,
    clauses,
)
from .theories.base import Backend
from .theories.formulas import (
    FALSE,
    TRUE,
    And,
    Bot,
    Const,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Rel,
    Term,
    Top,
    Var,
    land,
    lnot,
    lor,
)

KEYWORDS = {
    "in",
    "atoms",
    "empty",
    "and",
    "or",
    "not",
    "exists",
    "forall",
    "true",
    "false",
    "R",
}

_SYMBOLS = ("->", "!=", "<=", "{", "}", "(", ")", "|", ",", ".", "+", "=", "<")


class _Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind = kind  # 'ident' | 'kw' | 'atom' | 'sym' | 'eof'
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"_Token({self.kind}, {self.value!r}, {self.line}, {self.col})"


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def err(msg):
        raise ParseError(msg, line, col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            if i + 1 < n and text[i + 1].isdigit():
                j = i + 1
                while j < n and text[j].isdigit():
                    j += 1
                toks.append(_Token("atom", int(text[i + 1 : j]), line, col))
                col += j - i
                i = j
                continue
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "/" and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            frag = text[i:j]
            try:
                value = Fraction(frag)
            except ZeroDivisionError:
                err(f"zero denominator in atom literal {frag!r}")
            toks.append(_Token("atom", value, line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            toks.append(_Token("kw" if word in KEYWORDS else "ident", word, line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(_Token("sym", sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            err(f"unexpected character {ch!r}")
    toks.append(_Token("eof", None, line, col))
    return toks


class _Parser:
    """Recursive descent over the token stream.

    Expression and formula parsers return (ast, free) where free maps each
    still-unbound variable name to the position of its first use; completing
    a comprehension or quantifier discharges its binders from that map.
    """

    def __init__(self, toks: list[_Token]):
        self.toks = toks
        self.pos = 0

    # -- token plumbing -------------------------------------------------

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at_sym(self, s: str) -> bool:
        t = self.peek()
        return t.kind == "sym" and t.value == s

    def at_kw(self, w: str) -> bool:
        t = self.peek()
        return t.kind == "kw" and t.value == w

    def expect_sym(self, s: str) -> _Token:
        t = self.next()
        if t.kind != "sym" or t.value != s:
            raise ParseError(f"expected {s!r}", t.line, t.col)
        return t

    def expect_kw(self, w: str) -> _Token:
        t = self.next()
        if t.kind != "kw" or t.value != w:
            raise ParseError(f"expected {w!r}", t.line, t.col)
        return t

    def expect_ident(self) -> _Token:
        t = self.next()
        if t.kind != "ident":
            raise ParseError("expected an identifier", t.line, t.col)
        return t

    def err_here(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # -- expressions -----------------------------------------------------

    def parse_expr(self):
        t0 = self.peek()
        ast, free = self.parse_primary()
        if not self.at_sym("+"):
            return ast, free
        parts = [(ast, t0)]
        while self.at_sym("+"):
            self.next()
            tn = self.peek()
            nxt, f2 = self.parse_primary()
            parts.append((nxt, tn))
            _merge_free(free, f2)
        out: list[SetComp] = []
        for p, tok in parts:
            if not isinstance(p, (Union, SetComp, AtomsSet)):
                raise ParseError("operands of + must be sets", tok.line, tok.col)
            out.extend(clauses(p))
        return Union(tuple(out)), free

    def parse_primary(self):
        t = self.peek()
        if t.kind == "kw" and t.value == "atoms":
            self.next()
            return ATOMS, {}
        if t.kind == "kw" and t.value == "empty":
            self.next()
            return Union(()), {}
        if t.kind == "atom":
            self.next()
            return AtomParam(t.value), {}
        if t.kind == "ident":
            self.next()
            return EVar(t.value), {t.value: (t.line, t.col)}
        if t.kind == "sym" and t.value == "(":
            return self.parse_tuple()
        if t.kind == "sym" and t.value == "{":
            return self.parse_brace()
        self.err_here("expected an expression")

    def parse_tuple(self):
        opener = self.expect_sym("(")
        items = []
        free: dict = {}
        ast, f = self.parse_expr()
        items.append(ast)
        _merge_free(free, f)
        while self.at_sym(","):
            self.next()
            ast, f = self.parse_expr()
            items.append(ast)
            _merge_free(free, f)
        self.expect_sym(")")
        if len(items) < 2:
            raise ParseError(
                "a tuple needs at least two components", opener.line, opener.col
            )
        return ETuple(tuple(items)), free

    def parse_brace(self):
        self.expect_sym("{")
        head, head_free = self.parse_expr()
        if self.at_sym("|"):
            self.next()
            return self.parse_comp_tail(head, head_free)
        elements = [head]
        free = dict(head_free)
        while self.at_sym(","):
            self.next()
            ast, f = self.parse_expr()
            elements.append(ast)
            _merge_free(free, f)
        self.expect_sym("}")
        return Union(tuple(SetComp(e, (), TRUE) for e in elements)), free

    def parse_comp_tail(self, element, element_free):
        binders = []
        seen = set()
        while True:
            t = self.expect_ident()
            if t.value in seen:
                raise ParseError(f"duplicate binder {t.value!r}", t.line, t.col)
            seen.add(t.value)
            binders.append(t.value)
            if self.at_sym(","):
                self.next()
                continue
            break
        self.expect_kw("in")
        self.expect_kw("atoms")
        guard = TRUE
        guard_free: dict = {}
        if self.at_sym(","):
            self.next()
            guard, guard_free = self.parse_formula()
        self.expect_sym("}")
        free: dict = {}
        for name, pos in element_free.items():
            if name not in seen:
                free[name] = pos
        for name, pos in guard_free.items():
            if name not in seen:
                _merge_free(free, {name: pos})
        comp = SetComp(element, tuple(binders), guard)
        return Union((comp,)), free

    # -- formulas ----------------------------------------------------------

    def parse_formula(self):
        return self.parse_implies()

    def parse_implies(self):
        lhs, free = self.parse_or()
        if self.at_sym("->"):
            self.next()
            rhs, f2 = self.parse_implies()
            _merge_free(free, f2)
            return Implies(lhs, rhs), free
        return lhs, free

    def parse_or(self):
        lhs, free = self.parse_and()
        parts = [lhs]
        while self.at_kw("or"):
            self.next()
            nxt, f2 = self.parse_and()
            parts.append(nxt)
            _merge_free(free, f2)
        return (lor(*parts) if len(parts) > 1 else lhs), free

    def parse_and(self):
        lhs, free = self.parse_unary()
        parts = [lhs]
        while self.at_kw("and"):
            self.next()
            nxt, f2 = self.parse_unary()
            parts.append(nxt)
            _merge_free(free, f2)
        return (land(*parts) if len(parts) > 1 else lhs), free

    def parse_unary(self):
        if self.at_kw("not"):
            self.next()
            body, free = self.parse_unary()
            return lnot(body), free
        if self.at_kw("exists") or self.at_kw("forall"):
            ctor = Exists if self.peek().value == "exists" else Forall
            self.next()
            v = self.expect_ident()
            self.expect_sym(".")
            body, free = self.parse_formula()
            free.pop(v.value, None)
            return ctor(v.value, body), free
        return self.parse_atomic()

    def parse_atomic(self):
        t = self.peek()
        if t.kind == "kw" and t.value == "true":
            self.next()
            return TRUE, {}
        if t.kind == "kw" and t.value == "false":
            self.next()
            return FALSE, {}
        if t.kind == "kw" and t.value == "R":
            self.next()
            self.expect_sym("(")
            args = [self.parse_term()]
            for _ in range(2):
                self.expect_sym(",")
                args.append(self.parse_term())
            self.expect_sym(")")
            free: dict = {}
            for term, pos in args:
                if isinstance(term, Var):
                    _merge_free(free, {term.name: pos})
            return Rel("R", tuple(term for term, _ in args)), free
        if t.kind == "sym" and t.value == "(":
            self.next()
            inner, free = self.parse_formula()
            self.expect_sym(")")
            return inner, free
        lhs, lpos = self.parse_term()
        op = self.next()
        if op.kind != "sym" or op.value not in ("=", "!=", "<", "<="):
            raise ParseError("expected a comparison operator", op.line, op.col)
        rhs, rpos = self.parse_term()
        free = {}
        if isinstance(lhs, Var):
            _merge_free(free, {lhs.name: lpos})
        if isinstance(rhs, Var):
            _merge_free(free, {rhs.name: rpos})
        if op.value == "=":
            out = Rel("=", (lhs, rhs))
        elif op.value == "!=":
            out = lnot(Rel("=", (lhs, rhs)))
        elif op.value == "<":
            out = Rel("<", (lhs, rhs))
        else:
            out = Rel("<=", (lhs, rhs))
        return out, free

    def parse_term(self):
        t = self.next()
        if t.kind == "ident":
            return Var(t.value), (t.line, t.col)
        if t.kind == "atom":
            return Const(t.value), (t.line, t.col)
        raise ParseError("expected a variable or an atom literal", t.line, t.col)


def _merge_free(into: dict, new: dict) -> None:
    for name, pos in new.items():
        into.setdefault(name, pos)


def parse(text: str, backend: Backend | None = None) -> Expr:
    """Parse a closed expression; with a backend, also validate guards and
    atom literals against its vocabulary."""
    p = _Parser(_tokenize(text))
    ast, free = p.parse_expr()
    t = p.peek()
    if t.kind != "eof":
        raise ParseError("trailing input after expression", t.line, t.col)
    if free:
        name = min(free, key=lambda k: free[k])
        line, col = free[name]
        raise ParseError(f"unbound variable {name!r}", line, col)
    if backend is not None:
        validate_expr(ast, backend)
    return ast


def parse_formula(text: str, backend: Backend | None = None) -> Formula:
    """Parse a closed formula (no free variables)."""
    p = _Parser(_tokenize(text))
    ast, free = p.parse_formula()
    t = p.peek()
    if t.kind != "eof":
        raise ParseError("trailing input after formula", t.line, t.col)
    if free:
        name = min(free, key=lambda k: free[k])
        line, col = free[name]
        raise ParseError(f"unbound variable {name!r}", line, col)
    if backend is not None:
        backend.validate(ast)
    return ast


def validate_expr(e: Expr, backend: Backend) -> None:
    """Check every guard and every atom of e against the backend."""
    if isinstance(e, (EVar, AtomsSet)):
        return
    if isinstance(e, AtomParam):
        backend.check_atom(e.value)
        return
    if isinstance(e, ETuple):
        for i in e.items:
            validate_expr(i, backend)
        return
    if isinstance(e, SetComp):
        validate_expr(e.element, backend)
        backend.validate(e.guard)
        return
    if isinstance(e, Union):
        for c in e.clauses:
            validate_expr(c, backend)
        return
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# canonical printing

_LVL_IMPLIES = 0
_LVL_OR = 1
_LVL_AND = 2
_LVL_UNARY = 3


def format_atom_value(v) -> str:
    if isinstance(v, int):
        return f"#{v}"
    return str(v)


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    return format_atom_value(t.value)


def print_formula(f: Formula, level: int = _LVL_IMPLIES) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Rel):
        if f.name == "=":
            return f"{print_term(f.args[0])} = {print_term(f.args[1])}"
        if f.name == "<":
            return f"{print_term(f.args[0])} < {print_term(f.args[1])}"
        if f.name == "<=":
            return f"{print_term(f.args[0])} <= {print_term(f.args[1])}"
        args = ", ".join(print_term(a) for a in f.args)
        return f"{f.name}({args})"
    if isinstance(f, Not):
        if isinstance(f.body, Rel) and f.body.name == "=":
            a, b = f.body.args
            return f"{print_term(a)} != {print_term(b)}"
        return _wrap(f"not {print_formula(f.body, _LVL_UNARY)}", _LVL_UNARY, level)
    if isinstance(f, And):
        body = " and ".join(print_formula(g, _LVL_UNARY) for g in f.args)
        return _wrap(body, _LVL_AND, level)
    if isinstance(f, Or):
        body = " or ".join(print_formula(g, _LVL_AND) for g in f.args)
        return _wrap(body, _LVL_OR, level)
    if isinstance(f, Implies):
        body = (
            f"{print_formula(f.premise, _LVL_OR)} -> "
            f"{print_formula(f.conclusion, _LVL_IMPLIES)}"
        )
        return _wrap(body, _LVL_IMPLIES, level)
    if isinstance(f, Exists):
        return _wrap(f"exists {f.var}. {print_formula(f.body)}", _LVL_IMPLIES, level)
    if isinstance(f, Forall):
        return _wrap(f"forall {f.var}. {print_formula(f.body)}", _LVL_IMPLIES, level)
    raise TypeError(f"not a formula: {f!r}")


def _wrap(body: str, own: int, required: int) -> str:
    return f"({body})" if own < required else body


def print_expr(e: Expr) -> str:
    if isinstance(e, EVar):
        return e.name
    if isinstance(e, AtomParam):
        return format_atom_value(e.value)
    if isinstance(e, AtomsSet):
        return "atoms"
    if isinstance(e, ETuple):
        return "(" + ", ".join(print_expr(i) for i in e.items) + ")"
    if isinstance(e, SetComp):
        return _print_clause(e)
    if isinstance(e, Union):
        if not e.clauses:
            return "empty"
        return " + ".join(_print_clause(c) for c in e.clauses)
    raise TypeError(f"not an expression: {e!r}")


def _print_clause(c: SetComp) -> str:
    if not c.binders:
        return "{" + print_expr(c.element) + "}"
    head = print_expr(c.element)
    binders = ", ".join(c.binders)
    if c.guard == TRUE:
        return f"{{{head} | {binders} in atoms}}"
    return f"{{{head} | {binders} in atoms, {print_formula(c.guard)}}}"
