"""Relational structures over definable universes.

A structure carries a universe expression, plain relation symbols, and
indexed families of unary-or-wider relations; family members are stored as
flat tuples whose first component is the index.  Structures serialize to a
small JSON document holding expressions in concrete syntax.

`check_isomorphism` decides whether a definable bijection is an isomorphism
by testing each symbol on one representative per orbit of the relevant
product, with all parameters in play fixed; membership in a definable set is
constant along such orbits, so the finitely many tests are exact.
"""

import json
from dataclasses import dataclass

from .algebra import (
    DefFunction,
    fn_apply,
    fn_check,
    fn_validate,
    is_member,
    is_subset,
    orbit_decomposition,
    set_equal,
)
from .compile import Compiler
from .errors import ValidationError
from .exprs import ETuple, Expr, expr_params, product_expr
from .parser import parse, print_expr
from .theories import get_backend

MAX_ARITY = 4


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    arity: int
    interp: Expr


@dataclass(frozen=True)
class FamilySymbol:
    """A family of relations sharing one name, indexed by the elements of a
    definable set.  The interpretation is a set of (1+arity)-tuples whose
    head is the index."""

    name: str
    arity: int
    index_set: Expr
    interp: Expr


@dataclass(frozen=True)
class Structure:
    name: str
    backend_name: str
    universe: Expr
    relations: tuple[RelationSymbol, ...] = ()
    families: tuple[FamilySymbol, ...] = ()

    def params(self) -> frozenset:
        out = expr_params(self.universe)
        for r in self.relations:
            out |= expr_params(r.interp)
        for f in self.families:
            out |= expr_params(f.index_set) | expr_params(f.interp)
        return out


# ---------------------------------------------------------------------------
# JSON


def structure_from_dict(doc: dict, *, max_arity: int = MAX_ARITY) -> Structure:
    try:
        backend = get_backend(doc["backend"])
        name = doc.get("name", "structure")
        universe = parse(doc["universe"], backend)
        relations = []
        for r in doc.get("relations", ()):
            relations.append(
                RelationSymbol(r["name"], int(r["arity"]), parse(r["interp"], backend))
            )
        families = []
        for f in doc.get("families", ()):
            families.append(
                FamilySymbol(
                    f["name"],
                    int(f["arity"]),
                    parse(f["index"], backend),
                    parse(f["interp"], backend),
                )
            )
    except KeyError as ex:
        raise ValidationError(f"structure document lacks required field {ex}") from ex
    st = Structure(name, backend.name, universe, tuple(relations), tuple(families))
    _check_shape(st, max_arity)
    return st


def structure_to_dict(st: Structure) -> dict:
    doc = {
        "backend": st.backend_name,
        "name": st.name,
        "universe": print_expr(st.universe),
    }
    doc["relations"] = [
        {"name": r.name, "arity": r.arity, "interp": print_expr(r.interp)}
        for r in st.relations
    ]
    doc["families"] = [
        {
            "name": f.name,
            "arity": f.arity,
            "index": print_expr(f.index_set),
            "interp": print_expr(f.interp),
        }
        for f in st.families
    ]
    return doc


def load_structure(path: str, *, max_arity: int = MAX_ARITY) -> Structure:
    with open(path) as fh:
        return structure_from_dict(json.load(fh), max_arity=max_arity)


def save_structure(st: Structure, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(structure_to_dict(st), fh, indent=2)
        fh.write("\n")


def function_from_dict(doc: dict) -> tuple[str, DefFunction]:
    try:
        backend = get_backend(doc["backend"])
        fn = DefFunction(
            parse(doc["dom"], backend),
            parse(doc["cod"], backend),
            parse(doc["graph"], backend),
        )
    except KeyError as ex:
        raise ValidationError(f"function document lacks required field {ex}") from ex
    return backend.name, fn


def function_to_dict(backend_name: str, fn: DefFunction) -> dict:
    return {
        "backend": backend_name,
        "dom": print_expr(fn.dom),
        "cod": print_expr(fn.cod),
        "graph": print_expr(fn.graph),
    }


def load_function(path: str) -> tuple[str, DefFunction]:
    with open(path) as fh:
        return function_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# validation


def _check_shape(st: Structure, max_arity: int) -> None:
    seen = set()
    for sym in (*st.relations, *st.families):
        if sym.name in seen:
            raise ValidationError(f"symbol {sym.name!r} declared twice")
        seen.add(sym.name)
        if not 1 <= sym.arity <= max_arity:
            raise ValidationError(
                f"symbol {sym.name!r} has arity {sym.arity}; allowed range is "
                f"1..{max_arity}"
            )


def validate_structure(comp: Compiler, st: Structure) -> None:
    """Containment checks: every interpretation lives in the matching power
    of the universe (with the index set in front for families)."""
    if comp.backend.name != st.backend_name:
        raise ValidationError(
            f"structure {st.name!r} targets backend {st.backend_name!r}, "
            f"not {comp.backend.name!r}"
        )
    for r in st.relations:
        target = _power(st.universe, r.arity)
        if not is_subset(comp, r.interp, target):
            raise ValidationError(
                f"interpretation of {r.name!r} is not contained in the "
                f"{r.arity}-fold product of the universe"
            )
    for f in st.families:
        target = _indexed_power(f.index_set, st.universe, f.arity)
        if not is_subset(comp, f.interp, target):
            raise ValidationError(
                f"interpretation of {f.name!r} is not contained in "
                f"index x universe^{f.arity}"
            )


def _power(universe: Expr, r: int) -> Expr:
    if r == 1:
        return universe
    return product_expr(*([universe] * r))


def _indexed_power(index_set: Expr, universe: Expr, r: int) -> Expr:
    return product_expr(index_set, *([universe] * r))


# ---------------------------------------------------------------------------
# isomorphism checking


def signatures_match(comp: Compiler, A: Structure, B: Structure) -> bool:
    if {(r.name, r.arity) for r in A.relations} != {
        (r.name, r.arity) for r in B.relations
    }:
        return False
    if {(f.name, f.arity) for f in A.families} != {
        (f.name, f.arity) for f in B.families
    }:
        return False
    bidx = {f.name: f.index_set for f in B.families}
    for f in A.families:
        if not set_equal(comp, f.index_set, bidx[f.name]):
            return False
    return True


def check_isomorphism(
    comp: Compiler,
    fn: DefFunction,
    A: Structure,
    B: Structure,
    *,
    verify_function: bool = True,
) -> bool:
    """Whether fn is an isomorphism from A onto B: a bijection between the
    universes that preserves and reflects every symbol."""
    if A.backend_name != comp.backend.name or B.backend_name != comp.backend.name:
        raise ValidationError("structures and compiler use different backends")
    if not signatures_match(comp, A, B):
        return False
    if verify_function:
        fn_validate(comp, fn)
        if not set_equal(comp, fn.dom, A.universe):
            return False
        if not set_equal(comp, fn.cod, B.universe):
            return False
        if not fn_check(comp, fn, injective=True, surjective=True):
            return False
    T = A.params() | B.params() | expr_params(fn.graph)
    brel = {r.name: r for r in B.relations}
    for r in A.relations:
        if not _symbol_transported(comp, fn, r.interp, brel[r.name].interp,
                                   _power(A.universe, r.arity), r.arity, T,
                                   indexed=False):
            return False
    bfam = {f.name: f for f in B.families}
    for f in A.families:
        prod = _indexed_power(f.index_set, A.universe, f.arity)
        if not _symbol_transported(comp, fn, f.interp, bfam[f.name].interp,
                                   prod, f.arity, T, indexed=True):
            return False
    return True


def _symbol_transported(
    comp: Compiler,
    fn: DefFunction,
    interp_a: Expr,
    interp_b: Expr,
    prod: Expr,
    arity: int,
    T: frozenset,
    *,
    indexed: bool,
) -> bool:
    """Membership agreement between a tuple and its image, tested on one
    representative per T-orbit of the ambient product."""
    T = frozenset(T)
    for orbit in orbit_decomposition(comp, prod, T):
        rep = orbit.rep_element()
        if arity == 1 and not indexed:
            xs = [rep]
        else:
            xs = list(rep.items)
        if indexed:
            head, xs = xs[0], xs[1:]
        ys = [fn_apply(comp, fn, x) for x in xs]
        if indexed:
            image = ETuple(tuple([head, *ys]))
        else:
            image = ys[0] if arity == 1 else ETuple(tuple(ys))
        if is_member(comp, rep, interp_a) != is_member(comp, image, interp_b):
            return False
    return True
