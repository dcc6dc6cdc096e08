"""Set-builder expression ASTs.

An expression denotes an atom, a tuple, or a set.  Set values are unions of
comprehensions `{ element | binders in atoms, guard }`; the atom universe,
finite enumerations, and `empty` all normalize into that shape on demand via
`clauses`.  Union nodes canonicalize (sort + dedupe) their clauses at
construction so that syntactic equality of canonical ASTs is stable under
printing and re-parsing.
"""

from dataclasses import dataclass

from .errors import BindingError, DomainError, ValidationError
from .theories.formulas import (
    TRUE,
    Atom,
    Const,
    Formula,
    NameSource,
    Var,
    all_names,
    formula_atoms,
    free_vars,
    land,
    subst,
)


class Expr:
    __slots__ = ()

    @property
    def key(self) -> tuple:
        raise NotImplementedError


@dataclass(frozen=True)
class EVar(Expr):
    """A variable bound by an enclosing comprehension (denotes an atom)."""

    name: str

    @property
    def key(self):
        return ("v", self.name)


@dataclass(frozen=True)
class AtomParam(Expr):
    """A concrete atom appearing directly in the expression."""

    value: Atom

    @property
    def key(self):
        return ("p", self.value)


@dataclass(frozen=True)
class AtomsSet(Expr):
    """The set of all atoms."""

    @property
    def key(self):
        return ("A",)


ATOMS = AtomsSet()


@dataclass(frozen=True)
class ETuple(Expr):
    items: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValidationError("a tuple needs at least two components")

    @property
    def key(self):
        return ("t",) + tuple(i.key for i in self.items)


@dataclass(frozen=True)
class SetComp(Expr):
    """One comprehension clause { element | binders in atoms, guard }."""

    element: Expr
    binders: tuple[str, ...]
    guard: Formula

    def __post_init__(self):
        if len(set(self.binders)) != len(self.binders):
            dup = sorted(b for b in set(self.binders) if self.binders.count(b) > 1)
            raise BindingError(f"duplicate binder: {', '.join(dup)}")
        if not self.binders and self.guard != TRUE:
            raise ValidationError(
                "a comprehension without binders cannot carry a guard"
            )

    @property
    def key(self):
        return ("s", self.element.key, self.binders, self.guard.key)


@dataclass(frozen=True)
class Union(Expr):
    """Union of comprehension clauses; canonically sorted and deduplicated."""

    clauses: tuple[SetComp, ...]

    def __post_init__(self):
        seen = set()
        out = []
        for c in sorted(self.clauses, key=lambda c: c.key):
            if not isinstance(c, SetComp):
                raise ValidationError("union clauses must be comprehensions")
            if c.key not in seen:
                seen.add(c.key)
                out.append(c)
        object.__setattr__(self, "clauses", tuple(out))

    @property
    def key(self):
        return ("u",) + tuple(c.key for c in self.clauses)


EMPTY = Union(())


def kind(e: Expr) -> str:
    """What an expression denotes: 'atom', 'tuple', or 'set'."""
    if isinstance(e, (EVar, AtomParam)):
        return "atom"
    if isinstance(e, ETuple):
        return "tuple"
    if isinstance(e, (AtomsSet, SetComp, Union)):
        return "set"
    raise TypeError(f"not an expression: {e!r}")


def clauses(e: Expr) -> tuple[SetComp, ...]:
    """A set-denoting expression as comprehension clauses."""
    if isinstance(e, Union):
        return e.clauses
    if isinstance(e, SetComp):
        return (e,)
    if isinstance(e, AtomsSet):
        return (SetComp(EVar("a"), ("a",), TRUE),)
    raise ValidationError(f"not a set expression: {e!r}")


def union_of(*parts: Expr) -> Union:
    """Union of set expressions, normalized to canonical clause form."""
    out: list[SetComp] = []
    for p in parts:
        out.extend(clauses(p))
    return Union(tuple(out))


def value_shape(e: Expr):
    """Coarse shape of the denoted value; values of different shapes are
    never equal (atoms, k-tuples by component shape, sets)."""
    k = kind(e)
    if k == "atom":
        return "atom"
    if k == "tuple":
        return ("tuple",) + tuple(value_shape(i) for i in e.items)
    return "set"


def expr_params(e: Expr) -> frozenset[Atom]:
    """Every atom occurring in the expression (including guard constants)."""
    if isinstance(e, (EVar, AtomsSet)):
        return frozenset()
    if isinstance(e, AtomParam):
        return frozenset((e.value,))
    if isinstance(e, ETuple):
        return frozenset().union(*(expr_params(i) for i in e.items))
    if isinstance(e, SetComp):
        return expr_params(e.element) | formula_atoms(e.guard)
    if isinstance(e, Union):
        if not e.clauses:
            return frozenset()
        return frozenset().union(*(expr_params(c) for c in e.clauses))
    raise TypeError(f"not an expression: {e!r}")


def param_occurrences(e: Expr) -> list[Atom]:
    """Atoms in first-occurrence order of a deterministic pre-order walk."""
    seen: list[Atom] = []

    def walk(x: Expr):
        if isinstance(x, AtomParam):
            if x.value not in seen:
                seen.append(x.value)
        elif isinstance(x, ETuple):
            for i in x.items:
                walk(i)
        elif isinstance(x, SetComp):
            walk(x.element)
            for a in _formula_atom_occurrences(x.guard):
                if a not in seen:
                    seen.append(a)
        elif isinstance(x, Union):
            for c in x.clauses:
                walk(c)

    walk(e)
    return seen


def _formula_atom_occurrences(f: Formula) -> list[Atom]:
    from .theories.formulas import And, Exists, Forall, Implies, Not, Or, Rel

    out: list[Atom] = []

    def walk(g):
        if isinstance(g, Rel):
            for t in g.args:
                if isinstance(t, Const) and t.value not in out:
                    out.append(t.value)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or)):
            for h in g.args:
                walk(h)
        elif isinstance(g, Implies):
            walk(g.premise)
            walk(g.conclusion)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body)

    walk(f)
    return out


def free_expr_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, EVar):
        return frozenset((e.name,))
    if isinstance(e, (AtomParam, AtomsSet)):
        return frozenset()
    if isinstance(e, ETuple):
        return frozenset().union(*(free_expr_vars(i) for i in e.items))
    if isinstance(e, SetComp):
        inner = free_expr_vars(e.element) | free_vars(e.guard)
        return inner - set(e.binders)
    if isinstance(e, Union):
        if not e.clauses:
            return frozenset()
        return frozenset().union(*(free_expr_vars(c) for c in e.clauses))
    raise TypeError(f"not an expression: {e!r}")


def expr_names(e: Expr) -> frozenset[str]:
    """Every variable name appearing anywhere (bound or free)."""
    if isinstance(e, EVar):
        return frozenset((e.name,))
    if isinstance(e, (AtomParam, AtomsSet)):
        return frozenset()
    if isinstance(e, ETuple):
        return frozenset().union(*(expr_names(i) for i in e.items))
    if isinstance(e, SetComp):
        return expr_names(e.element) | all_names(e.guard) | set(e.binders)
    if isinstance(e, Union):
        if not e.clauses:
            return frozenset()
        return frozenset().union(*(expr_names(c) for c in e.clauses))
    raise TypeError(f"not an expression: {e!r}")


def subst_expr_vars(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Substitute expression variables; shadowed binders are respected.
    Formula guards receive the corresponding term substitution, so mapped
    values there must denote atoms (EVar or AtomParam)."""
    if not mapping:
        return e
    if isinstance(e, EVar):
        return mapping.get(e.name, e)
    if isinstance(e, (AtomParam, AtomsSet)):
        return e
    if isinstance(e, ETuple):
        return ETuple(tuple(subst_expr_vars(i, mapping) for i in e.items))
    if isinstance(e, SetComp):
        inner = {k: v for k, v in mapping.items() if k not in e.binders}
        terms = {}
        for k, v in inner.items():
            if isinstance(v, EVar):
                terms[k] = Var(v.name)
            elif isinstance(v, AtomParam):
                terms[k] = Const(v.value)
            else:
                raise ValidationError(
                    f"variable {k} is used as an atom but mapped to a non-atom"
                )
        return SetComp(
            subst_expr_vars(e.element, inner),
            e.binders,
            subst(e.guard, terms) if terms else e.guard,
        )
    if isinstance(e, Union):
        return Union(tuple(subst_expr_vars(c, mapping) for c in e.clauses))
    raise TypeError(f"not an expression: {e!r}")


def instantiate(e: Expr, valuation: dict[str, Atom]) -> Expr:
    """Replace free expression variables by concrete atoms."""
    return subst_expr_vars(e, {k: AtomParam(v) for k, v in valuation.items()})


def act(mapping: dict[Atom, Atom], e: Expr) -> Expr:
    """Rename every atom of e through a finite partial automorphism.

    Atoms of e missing from the mapping are kept fixed; the caller-facing
    contract is that the mapping extended with those fixed points must still
    be injective (the backend validates the full automorphism conditions).
    """
    here = expr_params(e)
    full = dict(mapping)
    for a in here:
        if a not in full:
            full[a] = a
    targets = list(full.values())
    if len(set(targets)) != len(targets):
        raise DomainError(
            "atom map cannot fix the missing parameters injectively; extend it first"
        )

    def ren(x: Expr) -> Expr:
        if isinstance(x, AtomParam):
            return AtomParam(full[x.value])
        if isinstance(x, (EVar, AtomsSet)):
            return x
        if isinstance(x, ETuple):
            return ETuple(tuple(ren(i) for i in x.items))
        if isinstance(x, SetComp):
            return SetComp(ren(x.element), x.binders, _rename_formula_atoms(x.guard, full))
        if isinstance(x, Union):
            return Union(tuple(ren(c) for c in x.clauses))
        raise TypeError(f"not an expression: {x!r}")

    return ren(e)


def abstract_params(e: Expr, mapping: dict[Atom, str]) -> Expr:
    """Replace concrete atoms by expression variables (the reverse of
    instantiation); every occurrence of a mapped atom is rewritten, guards
    included.  Unmapped atoms stay."""

    def ren(x: Expr) -> Expr:
        if isinstance(x, AtomParam):
            if x.value in mapping:
                return EVar(mapping[x.value])
            return x
        if isinstance(x, (EVar, AtomsSet)):
            return x
        if isinstance(x, ETuple):
            return ETuple(tuple(ren(i) for i in x.items))
        if isinstance(x, SetComp):
            return SetComp(ren(x.element), x.binders, _abstract_formula(x.guard, mapping))
        if isinstance(x, Union):
            return Union(tuple(ren(c) for c in x.clauses))
        raise TypeError(f"not an expression: {x!r}")

    return ren(e)


def _abstract_formula(f: Formula, mapping: dict[Atom, str]) -> Formula:
    from .theories.formulas import And, Exists, Forall, Implies, Not, Or, Rel

    def ren(g):
        if isinstance(g, Rel):
            return Rel(
                g.name,
                tuple(
                    Var(mapping[t.value])
                    if isinstance(t, Const) and t.value in mapping
                    else t
                    for t in g.args
                ),
            )
        if isinstance(g, Not):
            return Not(ren(g.body))
        if isinstance(g, And):
            return And(tuple(ren(h) for h in g.args))
        if isinstance(g, Or):
            return Or(tuple(ren(h) for h in g.args))
        if isinstance(g, Implies):
            return Implies(ren(g.premise), ren(g.conclusion))
        if isinstance(g, (Exists, Forall)):
            if g.var in mapping.values():
                raise ValidationError(
                    f"abstraction variable {g.var!r} is already bound in a guard"
                )
            return type(g)(g.var, ren(g.body))
        return g

    return ren(f)


def _rename_formula_atoms(f: Formula, full: dict[Atom, Atom]) -> Formula:
    from .theories.formulas import And, Exists, Forall, Implies, Not, Or, Rel

    def ren(g):
        if isinstance(g, Rel):
            return Rel(
                g.name,
                tuple(
                    Const(full[t.value]) if isinstance(t, Const) else t for t in g.args
                ),
            )
        if isinstance(g, Not):
            return Not(ren(g.body))
        if isinstance(g, And):
            return And(tuple(ren(h) for h in g.args))
        if isinstance(g, Or):
            return Or(tuple(ren(h) for h in g.args))
        if isinstance(g, Implies):
            return Implies(ren(g.premise), ren(g.conclusion))
        if isinstance(g, Exists):
            return Exists(g.var, ren(g.body))
        if isinstance(g, Forall):
            return Forall(g.var, ren(g.body))
        return g

    return ren(f)


def rename_clause(c: SetComp, fresh: NameSource) -> SetComp:
    """The same clause with binders renamed to globally fresh names."""
    if not c.binders:
        return c
    new = tuple(fresh.fresh() for _ in c.binders)
    mapping = {b: EVar(n) for b, n in zip(c.binders, new)}
    element = subst_expr_vars(c.element, mapping)
    guard = subst(c.guard, {b: Var(n) for b, n in zip(c.binders, new)})
    return SetComp(element, new, guard)


def product_expr(*sets: Expr, fresh: NameSource | None = None) -> Union:
    """The set of tuples pairing one element from each factor."""
    import itertools

    if len(sets) < 2:
        raise ValidationError("a product needs at least two factors")
    if fresh is None:
        fresh = NameSource()
    for s in sets:
        fresh.reserve(expr_names(s))
    out = []
    for combo in itertools.product(*(clauses(s) for s in sets)):
        renamed = [rename_clause(c, fresh) for c in combo]
        element = ETuple(tuple(c.element for c in renamed))
        binders = tuple(b for c in renamed for b in c.binders)
        guard = land(*(c.guard for c in renamed))
        out.append(SetComp(element, binders, guard))
    return Union(tuple(out))
