"""First-order formulas over a relational atom vocabulary.

Terms are variables or concrete atoms (ints for the pure-set backend,
Fractions for the ordered backends).  Formulas are immutable; conjunction
and disjunction are n-ary and kept flattened, deduplicated, and sorted by a
structural key, so equal formulas compare and hash equal.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

Atom = Union[int, Fraction]


@dataclass(frozen=True)
class Var:
    name: str

    @property
    def key(self):
        return ("v", self.name)


@dataclass(frozen=True)
class Const:
    value: Atom

    @property
    def key(self):
        return ("c", self.value)


Term = Union[Var, Const]


class Formula:
    """Base class; subclasses are frozen dataclasses with a structural key."""

    __slots__ = ()

    @property
    def key(self):  # pragma: no cover - overridden everywhere
        raise NotImplementedError


@dataclass(frozen=True)
class Top(Formula):
    @property
    def key(self):
        return ("1",)


@dataclass(frozen=True)
class Bot(Formula):
    @property
    def key(self):
        return ("0",)


TRUE = Top()
FALSE = Bot()


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple[Term, ...]

    @property
    def key(self):
        return ("r", self.name) + tuple(a.key for a in self.args)


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    @property
    def key(self):
        return ("n", self.body.key)


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    @property
    def key(self):
        return ("a",) + tuple(f.key for f in self.args)


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    @property
    def key(self):
        return ("o",) + tuple(f.key for f in self.args)


@dataclass(frozen=True)
class Implies(Formula):
    premise: Formula
    conclusion: Formula

    @property
    def key(self):
        return ("i", self.premise.key, self.conclusion.key)


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    @property
    def key(self):
        return ("e", self.var, self.body.key)


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula

    @property
    def key(self):
        return ("f", self.var, self.body.key)


def eq(a: Term, b: Term) -> Formula:
    return Rel("=", (a, b))


def ne(a: Term, b: Term) -> Formula:
    return Not(Rel("=", (a, b)))


def lt(a: Term, b: Term) -> Formula:
    return Rel("<", (a, b))


def le(a: Term, b: Term) -> Formula:
    return Rel("<=", (a, b))


def cyc(a: Term, b: Term, c: Term) -> Formula:
    return Rel("R", (a, b, c))


def land(*parts: Formula) -> Formula:
    """Flattened, deduplicated, sorted conjunction."""
    seen: dict[tuple, Formula] = {}
    for p in _flatten(parts, And):
        if isinstance(p, Bot):
            return FALSE
        if isinstance(p, Top):
            continue
        seen.setdefault(p.key, p)
    if not seen:
        return TRUE
    parts2 = [seen[k] for k in sorted(seen)]
    return parts2[0] if len(parts2) == 1 else And(tuple(parts2))


def lor(*parts: Formula) -> Formula:
    """Flattened, deduplicated, sorted disjunction."""
    seen: dict[tuple, Formula] = {}
    for p in _flatten(parts, Or):
        if isinstance(p, Top):
            return TRUE
        if isinstance(p, Bot):
            continue
        seen.setdefault(p.key, p)
    if not seen:
        return FALSE
    parts2 = [seen[k] for k in sorted(seen)]
    return parts2[0] if len(parts2) == 1 else Or(tuple(parts2))


def lnot(f: Formula) -> Formula:
    if isinstance(f, Top):
        return FALSE
    if isinstance(f, Bot):
        return TRUE
    if isinstance(f, Not):
        return f.body
    return Not(f)


def _flatten(parts: Iterable[Formula], kind) -> Iterator[Formula]:
    for p in parts:
        if isinstance(p, kind):
            yield from _flatten(p.args, kind)
        else:
            yield p


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, (Top, Bot)):
        return frozenset()
    if isinstance(f, Rel):
        return frozenset(t.name for t in f.args if isinstance(t, Var))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        out: frozenset[str] = frozenset()
        for g in f.args:
            out |= free_vars(g)
        return out
    if isinstance(f, Implies):
        return free_vars(f.premise) | free_vars(f.conclusion)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def all_names(f: Formula) -> frozenset[str]:
    """Every variable name occurring in f, bound or free."""
    if isinstance(f, (Top, Bot)):
        return frozenset()
    if isinstance(f, Rel):
        return frozenset(t.name for t in f.args if isinstance(t, Var))
    if isinstance(f, Not):
        return all_names(f.body)
    if isinstance(f, (And, Or)):
        out: frozenset[str] = frozenset()
        for g in f.args:
            out |= all_names(g)
        return out
    if isinstance(f, Implies):
        return all_names(f.premise) | all_names(f.conclusion)
    if isinstance(f, (Exists, Forall)):
        return all_names(f.body) | {f.var}
    raise TypeError(f"not a formula: {f!r}")


def formula_atoms(f: Formula) -> frozenset[Atom]:
    """Concrete atoms mentioned in f."""
    if isinstance(f, (Top, Bot)):
        return frozenset()
    if isinstance(f, Rel):
        return frozenset(t.value for t in f.args if isinstance(t, Const))
    if isinstance(f, Not):
        return formula_atoms(f.body)
    if isinstance(f, (And, Or)):
        out: frozenset[Atom] = frozenset()
        for g in f.args:
            out |= formula_atoms(g)
        return out
    if isinstance(f, Implies):
        return formula_atoms(f.premise) | formula_atoms(f.conclusion)
    if isinstance(f, (Exists, Forall)):
        return formula_atoms(f.body)
    raise TypeError(f"not a formula: {f!r}")


def subst(f: Formula, mapping: dict[str, Term]) -> Formula:
    """Capture-avoiding substitution of terms for free variables."""
    if not mapping:
        return f
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Rel):
        return Rel(
            f.name,
            tuple(
                mapping.get(t.name, t) if isinstance(t, Var) else t
                for t in f.args
            ),
        )
    if isinstance(f, Not):
        return lnot(subst(f.body, mapping))
    if isinstance(f, And):
        return land(*(subst(g, mapping) for g in f.args))
    if isinstance(f, Or):
        return lor(*(subst(g, mapping) for g in f.args))
    if isinstance(f, Implies):
        return Implies(subst(f.premise, mapping), subst(f.conclusion, mapping))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        captured = {v.name for v in inner.values() if isinstance(v, Var)}
        if f.var in captured:
            # rename the binder away from incoming terms
            used = all_names(f.body) | set(inner) | captured
            new = fresh_name(f.var, used)
            body = subst(f.body, {f.var: Var(new)})
            body = subst(body, inner)
            return type(f)(new, body)
        return type(f)(f.var, subst(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def fresh_name(stem: str, used: set[str] | frozenset[str]) -> str:
    if stem not in used:
        return stem
    i = 1
    while f"{stem}{i}" in used:
        i += 1
    return f"{stem}{i}"


class NameSource:
    """Deterministic supply of variable names avoiding a given set."""

    def __init__(self, used: Iterable[str] = ()):
        self._used = set(used)
        self._next = 1

    def reserve(self, names: Iterable[str]) -> None:
        self._used.update(names)

    def fresh(self, stem: str = "q") -> str:
        while True:
            cand = f"{stem}{self._next}"
            self._next += 1
            if cand not in self._used:
                self._used.add(cand)
                return cand


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form; implications expanded, negation pushed onto
    relation symbols, quantifiers dualised as needed."""
    if isinstance(f, Top):
        return FALSE if negate else TRUE
    if isinstance(f, Bot):
        return TRUE if negate else FALSE
    if isinstance(f, Rel):
        return lnot(f) if negate else f
    if isinstance(f, Not):
        return nnf(f.body, not negate)
    if isinstance(f, And):
        parts = [nnf(g, negate) for g in f.args]
        return lor(*parts) if negate else land(*parts)
    if isinstance(f, Or):
        parts = [nnf(g, negate) for g in f.args]
        return land(*parts) if negate else lor(*parts)
    if isinstance(f, Implies):
        if negate:
            return land(nnf(f.premise), nnf(f.conclusion, True))
        return lor(nnf(f.premise, True), nnf(f.conclusion))
    if isinstance(f, Exists):
        body = nnf(f.body, negate)
        return Forall(f.var, body) if negate else Exists(f.var, body)
    if isinstance(f, Forall):
        body = nnf(f.body, negate)
        return Exists(f.var, body) if negate else Forall(f.var, body)
    raise TypeError(f"not a formula: {f!r}")


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Top, Bot, Rel)):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(g) for g in f.args)
    if isinstance(f, Implies):
        return is_quantifier_free(f.premise) and is_quantifier_free(f.conclusion)
    return False
