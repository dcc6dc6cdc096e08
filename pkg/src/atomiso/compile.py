"""Translation of expression-level questions into first-order formulas.

Equality of two expression values, membership of a value in a set, and set
inclusion all compile to formulas over the atom vocabulary whose free
variables are exactly the free expression variables involved.  Results are
quantifier-free (each construction runs the backend's eliminator before
caching) and cached per expression pair, keyed by structural keys.  All
bound names are drawn from one monotone supply per compiler, so a cached
formula can never capture a variable of a later query.
"""

from .errors import BindingError
from .exprs import (
    AtomParam,
    EVar,
    Expr,
    clauses,
    expr_names,
    kind,
    rename_clause,
)
from .theories.base import Backend
from .theories.formulas import (
    FALSE,
    Const,
    Exists,
    Forall,
    Formula,
    Implies,
    NameSource,
    Rel,
    Var,
    land,
    lor,
)


def _term(e: Expr):
    if isinstance(e, EVar):
        return Var(e.name)
    if isinstance(e, AtomParam):
        return Const(e.value)
    raise BindingError(f"expected an atom-denoting expression, got {e!r}")


class Compiler:
    """Holds a backend, a fresh-name supply, and the formula caches."""

    def __init__(self, backend: Backend):
        self.backend = backend
        self.names = NameSource()
        self._eq_cache: dict[tuple, Formula] = {}
        self._mem_cache: dict[tuple, Formula] = {}
        self._sub_cache: dict[tuple, Formula] = {}

    # ------------------------------------------------------------------

    def equal(self, e1: Expr, e2: Expr) -> Formula:
        """Quantifier-free formula stating that e1 and e2 denote the same
        value; values of different kinds are simply never equal."""
        key = (e1.key, e2.key)
        hit = self._eq_cache.get(key)
        if hit is not None:
            return hit
        self.names.reserve(expr_names(e1) | expr_names(e2))
        k1, k2 = kind(e1), kind(e2)
        if k1 != k2:
            out = FALSE
        elif k1 == "atom":
            out = Rel("=", (_term(e1), _term(e2)))
        elif k1 == "tuple":
            if len(e1.items) != len(e2.items):
                out = FALSE
            else:
                out = land(*(self.equal(a, b) for a, b in zip(e1.items, e2.items)))
        else:
            out = land(self.subset(e1, e2), self.subset(e2, e1))
        out = self.backend.qe(out)
        self._eq_cache[key] = out
        return out

    def member(self, x: Expr, s: Expr) -> Formula:
        """Quantifier-free formula stating that the value of x belongs to
        the set denoted by s."""
        key = (x.key, s.key)
        hit = self._mem_cache.get(key)
        if hit is not None:
            return hit
        self.names.reserve(expr_names(x) | expr_names(s))
        parts = []
        for c in clauses(s):
            c2 = rename_clause(c, self.names)
            body = land(c2.guard, self.equal(x, c2.element))
            for b in reversed(c2.binders):
                body = Exists(b, body)
            parts.append(body)
        out = self.backend.qe(lor(*parts))
        self._mem_cache[key] = out
        return out

    def subset(self, s1: Expr, s2: Expr) -> Formula:
        key = (s1.key, s2.key)
        hit = self._sub_cache.get(key)
        if hit is not None:
            return hit
        self.names.reserve(expr_names(s1) | expr_names(s2))
        parts = []
        for c in clauses(s1):
            c2 = rename_clause(c, self.names)
            body = Implies(c2.guard, self.member(c2.element, s2))
            for b in reversed(c2.binders):
                body = Forall(b, body)
            parts.append(body)
        out = self.backend.qe(land(*parts))
        self._sub_cache[key] = out
        return out

    # ------------------------------------------------------------------
    # clause-wise bounded quantification

    def forall_elem(self, s: Expr, body_fn) -> Formula:
        """forall v in s: body_fn(v), unfolded clause by clause.  body_fn
        receives the instantiated element expression and returns a formula."""
        self.names.reserve(expr_names(s))
        parts = []
        for c in clauses(s):
            c2 = rename_clause(c, self.names)
            body = Implies(c2.guard, body_fn(c2.element))
            for b in reversed(c2.binders):
                body = Forall(b, body)
            parts.append(body)
        return land(*parts)

    def exists_elem(self, s: Expr, body_fn) -> Formula:
        self.names.reserve(expr_names(s))
        parts = []
        for c in clauses(s):
            c2 = rename_clause(c, self.names)
            body = land(c2.guard, body_fn(c2.element))
            for b in reversed(c2.binders):
                body = Exists(b, body)
            parts.append(body)
        return lor(*parts)

    # ------------------------------------------------------------------

    def holds(self, sentence: Formula) -> bool:
        return self.backend.holds(sentence)
