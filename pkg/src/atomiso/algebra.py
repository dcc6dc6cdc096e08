"""Operations on definable sets: comparison queries, orbit decomposition,
orbit expressions, least supports, subset enumeration, and functions given
by definable graphs.

Orbits here are always orbits under the automorphisms fixing a finite set S
of atoms pointwise.  A set expression decomposes into orbit pieces by pairing
each comprehension clause with every complete S-type of its binder tuple;
each satisfiable pairing carves out one orbit, and pieces carving the same
orbit (which visibly happens for symmetric elements such as unordered pairs)
are merged by a membership test on representatives.
"""

from dataclasses import dataclass

from .compile import Compiler
from .errors import (
    BindingError,
    DomainError,
    ResourceError,
    SupportError,
    ValidationError,
)
from .exprs import (
    EMPTY,
    AtomParam,
    ETuple,
    EVar,
    Expr,
    SetComp,
    Union,
    abstract_params,
    clauses,
    expr_names,
    expr_params,
    free_expr_vars,
    instantiate,
    param_occurrences,
    product_expr,
    subst_expr_vars,
    union_of,
    value_shape,
)
from .theories.formulas import (
    Atom,
    Forall,
    Formula,
    Implies,
    NameSource,
    land,
)

DEFAULT_SUBSET_BUDGET = 1 << 16


def _require_closed(e: Expr) -> None:
    fv = free_expr_vars(e)
    if fv:
        raise BindingError(
            f"expression must be closed; unbound: {', '.join(sorted(fv))}"
        )


# ---------------------------------------------------------------------------
# boolean queries on closed expressions


def set_equal(comp: Compiler, e1: Expr, e2: Expr) -> bool:
    _require_closed(e1)
    _require_closed(e2)
    return comp.holds(comp.equal(e1, e2))


def is_member(comp: Compiler, x: Expr, s: Expr) -> bool:
    _require_closed(x)
    _require_closed(s)
    return comp.holds(comp.member(x, s))


def is_subset(comp: Compiler, s1: Expr, s2: Expr) -> bool:
    _require_closed(s1)
    _require_closed(s2)
    return comp.holds(comp.subset(s1, s2))


def sets_disjoint(comp: Compiler, s1: Expr, s2: Expr) -> bool:
    _require_closed(s1)
    _require_closed(s2)
    meet = comp.exists_elem(s1, lambda v: comp.member(v, s2))
    return not comp.holds(meet)


# ---------------------------------------------------------------------------
# orbit decomposition


@dataclass(frozen=True)
class OrbitDescriptor:
    """One orbit of a definable set under the S-pointwise stabilizer,
    presented as a clause of the set restricted to one complete S-type of
    the clause's binders."""

    clause: SetComp
    type_formula: Formula
    params: frozenset
    rep: tuple[tuple[str, Atom], ...]

    def rep_valuation(self) -> dict[str, Atom]:
        return dict(self.rep)

    def rep_element(self) -> Expr:
        return instantiate(self.clause.element, self.rep_valuation())

    def piece(self) -> Union:
        guard = land(self.clause.guard, self.type_formula)
        return Union((SetComp(self.clause.element, self.clause.binders, guard),))


def _element_injective(c: SetComp) -> bool:
    """True when distinct binder tuples always yield distinct elements:
    the element is pure atom/tuple structure mentioning every binder."""
    used: set[str] = set()

    def walk(e: Expr) -> bool:
        if isinstance(e, EVar):
            used.add(e.name)
            return True
        if isinstance(e, AtomParam):
            return True
        if isinstance(e, ETuple):
            return all(walk(i) for i in e.items)
        return False

    return walk(c.element) and set(c.binders) <= used


def orbit_decomposition(comp: Compiler, X: Expr, S) -> list[OrbitDescriptor]:
    """The orbits of X under automorphisms fixing S pointwise, in a
    deterministic order.  S must contain every atom of X."""
    _require_closed(X)
    S = frozenset(S)
    missing = expr_params(X) - S
    if missing:
        names = ", ".join(comp.backend.format_atom(a) for a in sorted(missing))
        raise SupportError(f"parameter set must contain the atoms of X; missing: {names}")
    backend = comp.backend
    descs: list[OrbitDescriptor] = []
    for c in clauses(X):
        for ti in backend.types_with_reps(c.binders, S):
            # guard truth is constant across a complete type, so testing the
            # representative is exact
            if backend.sat(c.guard, ti.rep_valuation()):
                descs.append(OrbitDescriptor(c, ti.formula, S, ti.rep))
    kept: list[OrbitDescriptor] = []
    shapes: list = []
    for d in descs:
        shape = value_shape(d.clause.element)
        duplicate = False
        for k, ks in zip(kept, shapes):
            if ks != shape:
                continue
            if k.clause == d.clause and _element_injective(d.clause):
                continue
            if is_member(comp, d.rep_element(), k.piece()):
                duplicate = True
                break
        if not duplicate:
            kept.append(d)
            shapes.append(shape)
    return kept


def orbit_expression(comp: Compiler, x: Expr, S) -> Union:
    """An expression for the orbit of the value of x under automorphisms
    fixing S pointwise."""
    _require_closed(x)
    S = frozenset(S)
    occs = param_occurrences(x)
    names = NameSource()
    names.reserve(expr_names(x))
    binders = tuple(names.fresh() for _ in occs)
    body = abstract_params(x, dict(zip(occs, binders)))
    t = comp.backend.type_of(binders, tuple(occs), S)
    return Union((SetComp(body, binders, t),))


# ---------------------------------------------------------------------------
# least supports


def least_support(comp: Compiler, x: Expr) -> frozenset:
    """The least finite atom set whose pointwise stabilizer fixes the value
    of x.  Greedy removal is exact because supports are closed upward and a
    least one exists."""
    _require_closed(x)
    backend = comp.backend
    occs = param_occurrences(x)
    if not occs:
        return frozenset()
    names = NameSource()
    names.reserve(expr_names(x))
    binders = tuple(names.fresh() for _ in occs)
    body = abstract_params(x, dict(zip(occs, binders)))
    support = set(occs)
    for a in sorted(occs):
        cand = frozenset(support - {a})
        t = backend.type_of(binders, tuple(occs), cand)
        sentence: Formula = Implies(t, comp.equal(body, x))
        for b in reversed(binders):
            sentence = Forall(b, sentence)
        if comp.holds(sentence):
            support = set(cand)
    return frozenset(support)


# ---------------------------------------------------------------------------
# definable subsets


def definable_subsets(
    comp: Compiler, X: Expr, T, budget: int = DEFAULT_SUBSET_BUDGET
) -> list[Expr]:
    """Every T-definable subset of X, as unions of orbit pieces, in mask
    order (bit i selects orbit i of the decomposition)."""
    orbits = orbit_decomposition(comp, X, T)
    total = 1 << len(orbits)
    if total > budget:
        raise ResourceError(
            f"{total} definable subsets exceed the budget of {budget}", count=total
        )
    out = []
    for mask in range(total):
        picked = [o.piece() for i, o in enumerate(orbits) if mask >> i & 1]
        out.append(union_of(*picked) if picked else EMPTY)
    return out


# ---------------------------------------------------------------------------
# definable functions


@dataclass(frozen=True)
class DefFunction:
    """A function presented by its graph, a definable set of pairs."""

    dom: Expr
    cod: Expr
    graph: Expr


def fn_validate(comp: Compiler, fn: DefFunction) -> None:
    """Well-formedness: closed parts, explicit pair elements, and graph
    contained in dom x cod."""
    for e in (fn.dom, fn.cod, fn.graph):
        _require_closed(e)
    for c in clauses(fn.graph):
        if not (isinstance(c.element, ETuple) and len(c.element.items) == 2):
            raise ValidationError(
                "every graph clause must produce an explicit pair"
            )
    if not is_subset(comp, fn.graph, product_expr(fn.dom, fn.cod)):
        raise ValidationError("graph is not contained in dom x cod")


def fn_check(
    comp: Compiler,
    fn: DefFunction,
    *,
    functional: bool = True,
    total: bool = True,
    injective: bool = False,
    surjective: bool = False,
) -> bool:
    """Decide the requested function properties of the graph."""
    g = fn.graph
    if functional:
        s = comp.forall_elem(
            g,
            lambda p: comp.forall_elem(
                g,
                lambda q: Implies(
                    comp.equal(p.items[0], q.items[0]),
                    comp.equal(p.items[1], q.items[1]),
                ),
            ),
        )
        if not comp.holds(s):
            return False
    if total:
        s = comp.forall_elem(
            fn.dom,
            lambda x: comp.exists_elem(g, lambda p: comp.equal(x, p.items[0])),
        )
        if not comp.holds(s):
            return False
    if injective:
        s = comp.forall_elem(
            g,
            lambda p: comp.forall_elem(
                g,
                lambda q: Implies(
                    comp.equal(p.items[1], q.items[1]),
                    comp.equal(p.items[0], q.items[0]),
                ),
            ),
        )
        if not comp.holds(s):
            return False
    if surjective:
        s = comp.forall_elem(
            fn.cod,
            lambda y: comp.exists_elem(g, lambda p: comp.equal(y, p.items[1])),
        )
        if not comp.holds(s):
            return False
    return True


def fn_bijective(comp: Compiler, fn: DefFunction) -> bool:
    return fn_check(comp, fn, injective=True, surjective=True)


def fn_apply(comp: Compiler, fn: DefFunction, x: Expr) -> Expr:
    """The value of the function at x; raises DomainError off the domain.
    Expects a validated, functional graph."""
    _require_closed(x)
    backend = comp.backend
    for c in clauses(fn.graph):
        constraint = land(c.guard, comp.equal(x, c.element.items[0]))
        witness = backend.find_witness(constraint)
        if witness is None:
            continue
        missing = [b for b in c.binders if b not in witness]
        if missing:
            # binders absent from the constraint are unconstrained; any
            # fresh choice yields the same value because the graph is
            # functional
            used = frozenset(witness.values()) | expr_params(fn.graph) | expr_params(x)
            fill = backend.independent_atoms(used, len(missing))
            witness = dict(witness)
            witness.update(zip(missing, fill))
        return subst_expr_vars(
            c.element.items[1], {b: AtomParam(witness[b]) for b in c.binders}
        )
    raise DomainError("value lies outside the function's domain")


def fn_inverse(fn: DefFunction) -> DefFunction:
    out = []
    for c in clauses(fn.graph):
        fst, snd = c.element.items
        out.append(SetComp(ETuple((snd, fst)), c.binders, c.guard))
    return DefFunction(fn.cod, fn.dom, Union(tuple(out)))


def fn_domain_expr(fn: DefFunction) -> Union:
    return Union(
        tuple(SetComp(c.element.items[0], c.binders, c.guard) for c in clauses(fn.graph))
    )


def fn_image_expr(fn: DefFunction) -> Union:
    return Union(
        tuple(SetComp(c.element.items[1], c.binders, c.guard) for c in clauses(fn.graph))
    )
