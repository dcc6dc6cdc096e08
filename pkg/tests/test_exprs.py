"""Expression AST invariants: canonical unions, parameter collection,
substitution, atom-map action, and products."""

import random

import pytest

from atomiso.errors import BindingError, DomainError, ValidationError
from atomiso.exprs import (
    ATOMS,
    EMPTY,
    AtomParam,
    ETuple,
    EVar,
    SetComp,
    Union,
    abstract_params,
    act,
    clauses,
    expr_params,
    free_expr_vars,
    instantiate,
    kind,
    param_occurrences,
    product_expr,
    subst_expr_vars,
    union_of,
    value_shape,
)
from atomiso.parser import parse, print_expr
from atomiso.theories import get_backend
from atomiso.theories.formulas import TRUE, ne, Var
from generators import gen_set_expr, sample_atoms


def test_tuple_needs_two_items():
    with pytest.raises(ValidationError):
        ETuple((EVar("a"),))
    ETuple((EVar("a"), EVar("b")))


def test_setcomp_duplicate_binders():
    with pytest.raises(BindingError):
        SetComp(EVar("a"), ("a", "a"), TRUE)


def test_zero_binder_guard_must_be_trivial():
    with pytest.raises(ValidationError):
        SetComp(AtomParam(1), (), ne(Var("x"), Var("y")))
    SetComp(AtomParam(1), (), TRUE)


def test_union_sorts_and_dedupes():
    c1 = SetComp(EVar("a"), ("a",), TRUE)
    c2 = SetComp(ETuple((EVar("a"), EVar("b"))), ("a", "b"), TRUE)
    u1 = Union((c1, c2, c1))
    u2 = Union((c2, c1))
    assert u1 == u2
    assert len(u1.clauses) == 2


def test_union_rejects_non_clause():
    with pytest.raises(ValidationError):
        Union((EVar("a"),))


def test_empty_and_atoms_kinds():
    assert kind(EMPTY) == "set"
    assert kind(ATOMS) == "set"
    assert kind(AtomParam(3)) == "atom"
    assert kind(ETuple((AtomParam(1), AtomParam(2)))) == "tuple"


def test_clauses_desugars_atoms():
    cs = clauses(ATOMS)
    assert len(cs) == 1
    assert cs[0].binders and cs[0].guard == TRUE
    assert isinstance(cs[0].element, EVar)


def test_value_shape():
    e = ETuple((AtomParam(1), Union((SetComp(EVar("a"), ("a",), TRUE),))))
    assert value_shape(e) == ("tuple", "atom", "set")


def test_expr_params_and_free_vars():
    e = parse("{(a, #3) | a in atoms, a != #5}")
    assert expr_params(e) == frozenset({3, 5})
    assert free_expr_vars(e) == frozenset()
    inner = SetComp(ETuple((EVar("a"), EVar("b"))), ("a",), TRUE)
    assert free_expr_vars(Union((inner,))) == frozenset({"b"})


def test_param_occurrences_first_only():
    e = parse("{(#2, a, #2) | a in atoms, a != #2}")
    occs = param_occurrences(e)
    assert set(occs) == {2}


def test_subst_shadowing():
    e = Union((SetComp(ETuple((EVar("a"), EVar("b"))), ("a",), TRUE),))
    out = subst_expr_vars(e, {"a": AtomParam(9), "b": AtomParam(7)})
    c = out.clauses[0]
    # bound a untouched, free b replaced
    assert c.element.items[0] == EVar("a")
    assert c.element.items[1] == AtomParam(7)


def test_instantiate_then_abstract_roundtrip():
    rng = random.Random(3)
    for _ in range(40):
        e = gen_set_expr(rng, "equality", [1, 2], max_binders=2, depth=1)
        cs = clauses(e)
        if not cs or not cs[0].binders:
            continue
        c = cs[0]
        vals = {b: 10 + i for i, b in enumerate(c.binders)}
        inst = instantiate(c.element, vals)
        assert free_expr_vars(inst) == free_expr_vars(c.element) - set(vals)
        back = abstract_params(inst, {v: k for k, v in vals.items()})
        assert back == c.element


def test_act_applies_and_extends():
    e = parse("{(a, #1) | a in atoms, a != #2}")
    out = act({1: 4, 2: 5}, e)
    assert expr_params(out) == frozenset({4, 5})
    # missing parameters ride along unchanged
    out2 = act({1: 4}, e)
    assert expr_params(out2) == frozenset({4, 2})


def test_act_rejects_collisions():
    e = parse("{(#1, #2)}")
    with pytest.raises(DomainError):
        act({1: 2}, e)  # would glue #1 onto the untouched #2


def test_act_is_action():
    rng = random.Random(13)
    b = get_backend("equality")
    for _ in range(30):
        e = gen_set_expr(rng, "equality", [1, 2, 3], max_binders=2, depth=1)
        params = expr_params(e)
        m1 = b.extend_automorphism({}, params | {4})
        m2 = b.extend_automorphism({}, set(m1.values()))
        lhs = act(m2, act(m1, e))
        comp = {k: m2[v] for k, v in m1.items()}
        rhs = act(comp, e)
        assert lhs == rhs


def test_product_expr_shapes():
    a = parse("atoms")
    b = parse("{ {x,y} | x,y in atoms, x != y }")
    p = product_expr(a, b)
    cs = clauses(p)
    assert len(cs) == 1
    el = cs[0].element
    assert isinstance(el, ETuple) and len(el.items) == 2
    assert value_shape(el) == ("tuple", "atom", "set")
    assert len(cs[0].binders) == 3


def test_product_expr_requires_two():
    with pytest.raises(ValidationError):
        product_expr(parse("atoms"))


def test_union_of_flattens():
    u = union_of(parse("{#1}"), parse("{#2} + {#1}"), EMPTY)
    assert len(u.clauses) == 2
    assert print_expr(u) in ("{#1} + {#2}", "{#2} + {#1}")
