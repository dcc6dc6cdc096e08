"""Structure documents: JSON round trips, shape validation, interpretation
checks, and isomorphism verification including indexed families."""

import json

import pytest

from atomiso.algebra import DefFunction, set_equal
from atomiso.errors import ValidationError
from atomiso.parser import parse
from atomiso.structures import (
    check_isomorphism,
    function_from_dict,
    function_to_dict,
    load_structure,
    save_structure,
    signatures_match,
    structure_from_dict,
    structure_to_dict,
    validate_structure,
)
from fixtures_helpers import kneser_pair, smoothing_parts


def test_roundtrip(tmp_path, eq_comp):
    A, _ = kneser_pair()
    path = tmp_path / "a.json"
    save_structure(A, str(path))
    B = load_structure(str(path))
    assert structure_to_dict(A) == structure_to_dict(B)
    assert set_equal(eq_comp, A.universe, B.universe)


def test_missing_field_rejected():
    with pytest.raises(ValidationError):
        structure_from_dict({"backend": "equality", "name": "x"})


def test_duplicate_symbol_rejected():
    doc = {
        "backend": "equality",
        "name": "x",
        "universe": "atoms",
        "relations": [
            {"name": "E", "arity": 1, "interp": "atoms"},
            {"name": "E", "arity": 1, "interp": "empty"},
        ],
        "families": [],
    }
    with pytest.raises(ValidationError):
        structure_from_dict(doc)


def test_arity_bounds():
    doc = {
        "backend": "equality",
        "name": "x",
        "universe": "atoms",
        "relations": [{"name": "E", "arity": 9, "interp": "empty"}],
        "families": [],
    }
    with pytest.raises(ValidationError):
        structure_from_dict(doc)


def test_validate_structure_checks_interps(eq_comp):
    doc = {
        "backend": "equality",
        "name": "x",
        "universe": "{a | a in atoms, a != #1}",
        "relations": [{"name": "E", "arity": 1, "interp": "atoms"}],
        "families": [],
    }
    st = structure_from_dict(doc)
    with pytest.raises(ValidationError) as ei:
        validate_structure(eq_comp, st)
    assert "E" in str(ei.value)


def test_validate_structure_family_interp(eq_comp):
    doc = {
        "backend": "equality",
        "name": "x",
        "universe": "atoms",
        "relations": [],
        "families": [
            {
                "name": "N",
                "arity": 1,
                "index": "atoms",
                "interp": "{(a, a) | a in atoms}",
            }
        ],
    }
    st = structure_from_dict(doc)
    validate_structure(eq_comp, st)
    bad = dict(doc)
    bad["families"] = [
        {
            "name": "N",
            "arity": 1,
            "index": "{a | a in atoms, a != #1}",
            "interp": "{(#1, #1)}",
        }
    ]
    st2 = structure_from_dict(bad)
    with pytest.raises(ValidationError):
        validate_structure(eq_comp, st2)


def test_signatures_match(eq_comp):
    A, B = kneser_pair()
    assert signatures_match(eq_comp, A, B)
    doc = structure_to_dict(A)
    doc["relations"][0]["arity"] = 1
    doc["relations"][0]["interp"] = "empty"
    C = structure_from_dict(doc)
    assert not signatures_match(eq_comp, A, C)


def test_check_isomorphism_identity(eq_comp):
    A, B = kneser_pair()
    u = A.universe
    ident = DefFunction(
        u, u, parse("{({a,b},{a,b}) | a,b in atoms, a != b}", eq_comp.backend)
    )
    assert check_isomorphism(eq_comp, ident, A, B)


def test_check_isomorphism_rejects_non_morphism(eq_comp):
    doc = {
        "backend": "equality",
        "name": "loops",
        "universe": "atoms",
        "relations": [{"name": "E", "arity": 2, "interp": "{(#1, #1)}"}],
        "families": [],
    }
    A = structure_from_dict(doc)
    other = dict(doc)
    other["relations"] = [{"name": "E", "arity": 2, "interp": "{(#2, #2)}"}]
    B = structure_from_dict(other)
    ident = DefFunction(A.universe, B.universe, parse("{(a, a) | a in atoms}"))
    assert not check_isomorphism(eq_comp, ident, A, B)
    # swapping the named atoms repairs it
    swap = parse("{(#1, #2)} + {(#2, #1)} + {(a, a) | a in atoms, a != #1 and a != #2}")
    f = DefFunction(A.universe, B.universe, swap)
    assert check_isomorphism(eq_comp, f, A, B)


def test_check_isomorphism_families(eq_comp):
    base = {
        "backend": "equality",
        "name": "fam",
        "universe": "atoms",
        "relations": [],
        "families": [
            {
                "name": "N",
                "arity": 1,
                "index": "atoms",
                "interp": "{(a, b) | a, b in atoms, a != b}",
            }
        ],
    }
    A = structure_from_dict(base)
    ident = DefFunction(A.universe, A.universe, parse("{(a, a) | a in atoms}"))
    assert check_isomorphism(eq_comp, ident, A, A)
    # same family at a shifted index set must fail the signature check
    other = json.loads(json.dumps(base))
    other["families"][0]["index"] = "{a | a in atoms, a != #1}"
    B = structure_from_dict(other)
    assert not signatures_match(eq_comp, A, B)


def test_function_document_roundtrip(eq_comp):
    _, fn = smoothing_parts()
    doc = function_to_dict("equality", fn)
    backend_name, fn2 = function_from_dict(doc)
    assert backend_name == "equality"
    assert fn2.graph == fn.graph
    assert set_equal(eq_comp, fn2.dom, fn.dom)
