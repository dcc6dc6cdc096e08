"""Backend-level behavior: atom handling, quantifier elimination, complete
types, witnesses, and partial automorphisms."""

import random
from fractions import Fraction

import pytest

from atomiso.errors import DensenessError, ValuationError, VocabularyError
from atomiso.theories import backend_names, get_backend
from atomiso.theories.formulas import (
    Const,
    Exists,
    Forall,
    Var,
    cyc,
    eq,
    free_vars,
    land,
    lnot,
    lor,
    lt,
    ne,
)
from generators import gen_formula, sample_atoms
from oracles import (
    count_tuple_orbits,
    eval_formula,
    exhaustive_pool,
    quantifier_depth,
)


def test_backend_names():
    assert set(backend_names()) == {"equality", "dlo", "cyclic"}


def test_atom_parsing_roundtrip():
    eqb = get_backend("equality")
    assert eqb.parse_atom("#7") == 7
    assert eqb.format_atom(7) == "#7"
    dlo = get_backend("dlo")
    assert dlo.parse_atom("-3/2") == Fraction(-3, 2)
    assert dlo.format_atom(Fraction(5, 3)) == "5/3"
    cyc_b = get_backend("cyclic")
    assert cyc_b.parse_atom("1/4") == Fraction(1, 4)


def test_check_atom_rejects_foreign_values():
    eqb = get_backend("equality")
    with pytest.raises(Exception):
        eqb.check_atom(Fraction(1, 2))
    with pytest.raises(Exception):
        eqb.check_atom(-1)


def test_validate_vocabulary():
    eqb = get_backend("equality")
    with pytest.raises(VocabularyError):
        eqb.validate(lt(Var("x"), Var("y")))
    dlo = get_backend("dlo")
    dlo.validate(lt(Var("x"), Var("y")))
    with pytest.raises(VocabularyError):
        dlo.validate(cyc(Var("x"), Var("y"), Var("z")))


def test_qe_removes_quantifiers_simple():
    dlo = get_backend("dlo")
    f = Exists("x", land(lt(Var("a"), Var("x")), lt(Var("x"), Var("b"))))
    q = dlo.qe(f)
    assert free_vars(q) <= {"a", "b"}
    # density: a < b already guarantees a point in between
    assert dlo.sat(q, {"a": Fraction(0), "b": Fraction(1)})
    assert not dlo.sat(q, {"a": Fraction(1), "b": Fraction(0)})
    eqb = get_backend("equality")
    g = Exists("x", land(ne(Var("x"), Var("a")), ne(Var("x"), Var("b"))))
    assert eqb.holds(Forall("a", Forall("b", g)))


def test_sat_requires_full_valuation():
    eqb = get_backend("equality")
    with pytest.raises(ValuationError):
        eqb.sat(eq(Var("x"), Var("y")), {"x": 1})


def test_find_witness_prefers_parameters_then_fresh():
    eqb = get_backend("equality")
    w = eqb.find_witness(ne(Var("x"), Const(0)))
    assert w == {"x": 1}
    w2 = eqb.find_witness(land(ne(Var("x"), Const(0)), ne(Var("x"), Const(1))))
    assert w2 == {"x": 2}
    dlo = get_backend("dlo")
    w3 = dlo.find_witness(lt(Const(Fraction(2)), Var("x")))
    assert w3 is not None and w3["x"] > 2
    assert dlo.find_witness(lt(Var("x"), Var("x"))) is None


def test_find_witness_deterministic():
    dlo = get_backend("dlo")
    f = land(lt(Const(Fraction(0)), Var("x")), lt(Var("x"), Const(Fraction(1))))
    assert dlo.find_witness(f) == dlo.find_witness(f)


def test_types_with_reps_counts_match_rn():
    for name in backend_names():
        b = get_backend(name)
        for n in range(4):
            variables = tuple(f"v{i}" for i in range(n))
            types = b.types_with_reps(variables, frozenset())
            assert len(types) == b.rn_count(n)


def test_rn_counts_match_bruteforce():
    for name in backend_names():
        b = get_backend(name)
        for n in range(5):
            assert b.rn_count(n) == count_tuple_orbits(name, n)


def test_types_partition_realizations():
    # every tuple satisfies exactly one complete type over the parameters
    for name in backend_names():
        b = get_backend(name)
        atoms = sample_atoms(random.Random(5), name, 3)
        params = frozenset(atoms[:1])
        types = b.types_with_reps(("x", "y"), params)
        pool = exhaustive_pool(name, params, 1)
        for vx in pool:
            for vy in pool:
                sats = [
                    t
                    for t in types
                    if b.sat(t.formula, {"x": vx, "y": vy})
                ]
                assert len(sats) == 1


def test_type_of_agrees_with_enumeration():
    for name in backend_names():
        b = get_backend(name)
        params = frozenset(sample_atoms(random.Random(7), name, 2))
        pool = exhaustive_pool(name, params, 1)
        types = b.types_with_reps(("x", "y"), params)
        for vx in pool[:4]:
            for vy in pool[:4]:
                f = b.type_of(("x", "y"), (vx, vy), params)
                assert b.sat(f, {"x": vx, "y": vy})
                # f must agree with exactly one complete type, semantically
                matching = [t for t in types if b.sat(f, t.rep_valuation())]
                assert len(matching) == 1
                t = matching[0]
                assert b.sat(t.formula, {"x": vx, "y": vy})


def test_type_of_empty_tuple():
    b = get_backend("equality")
    f = b.type_of((), (), frozenset())
    assert b.holds(f)


def test_partial_automorphism_checks():
    eqb = get_backend("equality")
    assert eqb.is_partial_automorphism({1: 5, 2: 2})
    assert not eqb.is_partial_automorphism({1: 5, 2: 5})
    dlo = get_backend("dlo")
    good = {Fraction(0): Fraction(10), Fraction(1): Fraction(12)}
    bad = {Fraction(0): Fraction(12), Fraction(1): Fraction(10)}
    assert dlo.is_partial_automorphism(good)
    assert not dlo.is_partial_automorphism(bad)
    cy = get_backend("cyclic")
    rot = {Fraction(0): Fraction(1), Fraction(1): Fraction(2), Fraction(2): Fraction(0)}
    flip = {Fraction(0): Fraction(0), Fraction(1): Fraction(2), Fraction(2): Fraction(1)}
    assert cy.is_partial_automorphism(rot)
    assert not cy.is_partial_automorphism(flip)


def test_extend_automorphism_covers_new_atoms():
    rng = random.Random(11)
    for name in backend_names():
        b = get_backend(name)
        for _ in range(25):
            base = sample_atoms(rng, name, 3)
            imgs = sample_atoms(rng, name, 3)
            mapping = dict(zip(sorted(base), sorted(imgs)))
            if not b.is_partial_automorphism(mapping):
                continue
            extra = sample_atoms(rng, name, 2)
            out = b.extend_automorphism(mapping, extra)
            assert set(out) >= set(mapping) | set(extra)
            assert all(out[k] == v for k, v in mapping.items())
            assert b.is_partial_automorphism(out)


def test_independent_atoms_dense_only():
    eqb = get_backend("equality")
    picked = eqb.independent_atoms(frozenset({0, 1, 5}), 2)
    assert len(picked) == 2 and not set(picked) & {0, 1, 5}
    cy = get_backend("cyclic")
    with pytest.raises(DensenessError):
        cy.independent_atoms(frozenset(), 1)
    with pytest.raises(DensenessError):
        cy.independence_formula("x", frozenset(), frozenset())


def test_independence_formula_pins_region():
    dlo = get_backend("dlo")
    avoid = frozenset({Fraction(0), Fraction(1)})
    f = dlo.independence_formula("x", avoid, frozenset())
    w = dlo.find_witness(f)
    assert w is not None and w["x"] not in avoid


def test_qe_soundness_sample():
    rng = random.Random(2024)
    for name in backend_names():
        b = get_backend(name)
        checked = 0
        while checked < 120:
            atoms = sample_atoms(rng, name, 2)
            f = gen_formula(rng, name, ["u", "v"], atoms, depth=3, qdepth=2)
            q = b.qe(f)
            assert quantifier_depth(q) == 0
            assert free_vars(q) <= free_vars(f) | {"u", "v"}
            base = exhaustive_pool(name, set(atoms), 0)
            for vu in base[:3]:
                for vv in base[-3:]:
                    val = {"u": vu, "v": vv}
                    want = eval_formula(name, f, val)
                    got = eval_formula(name, q, val)
                    assert want == got, (name, f, q, val)
            checked += 1
