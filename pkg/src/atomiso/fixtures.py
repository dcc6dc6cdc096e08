"""Built-in example structures used by the test-suite and the command line.

Each fixture is a small family of JSON documents: one or two structures and
optionally a definable map between them.
"""

from .errors import ValidationError

_PAIRS = "{ {a,b} | a,b in atoms, a != b }"
_DISJOINT = (
    "{ ({a,b}, {c,d}) | a,b,c,d in atoms, "
    "a != b and a != c and a != d and b != c and b != d and c != d }"
)

_TRIPLES = "{(a, b, c) | a, b, c in atoms, R(a, b, c)}"
_ROT_LEFT = "{((a, b, c), (b, c, a)) | a, b, c in atoms, R(a, b, c)}"
_ROT_RIGHT = "{((a, b, c), (c, a, b)) | a, b, c in atoms, R(a, b, c)}"

_MIXED = "{(a, b) | a, b in atoms} + {a | a in atoms}"
_SMOOTH_GRAPH = (
    "{(a, (a, #1)) | a in atoms} + {((a, #1), a) | a in atoms} + "
    "{((a, b), (a, b)) | a, b in atoms, b != #1}"
)


def kneser() -> dict:
    """The disjointness graph on unordered pairs of atoms; isomorphic to
    itself by the identity, which the search should rediscover."""
    st = {
        "backend": "equality",
        "name": "kneser",
        "universe": _PAIRS,
        "relations": [{"name": "E", "arity": 2, "interp": _DISJOINT}],
        "families": [],
    }
    return {"a": st, "b": {**st, "name": "kneser"}}


def nondefiso() -> dict:
    """Edgeless graphs on atoms and on unordered pairs: both countable, but
    no definable bijection exists between the universes."""
    a = {
        "backend": "equality",
        "name": "atoms-edgeless",
        "universe": "atoms",
        "relations": [{"name": "E", "arity": 2, "interp": "empty"}],
        "families": [],
    }
    b = {
        "backend": "equality",
        "name": "pairs-edgeless",
        "universe": _PAIRS,
        "relations": [{"name": "E", "arity": 2, "interp": "empty"}],
        "families": [],
    }
    return {"a": a, "b": b}


def smoothing() -> dict:
    """A bijection of the mixed universe (pairs plus atoms) with itself that
    uses the parameter #1; the parameter can be eliminated."""
    st = {
        "backend": "equality",
        "name": "mixed",
        "universe": _MIXED,
        "relations": [],
        "families": [],
    }
    fmap = {
        "backend": "equality",
        "dom": _MIXED,
        "cod": _MIXED,
        "graph": _SMOOTH_GRAPH,
    }
    return {"a": st, "b": {**st}, "map": fmap}


def circle() -> dict:
    """Directed graphs on the oriented triples of the circular order: one
    rotates triples left, the other right.  They are isomorphic only once a
    parameter atom is allowed."""
    a = {
        "backend": "cyclic",
        "name": "rotate-left",
        "universe": _TRIPLES,
        "relations": [{"name": "E", "arity": 2, "interp": _ROT_LEFT}],
        "families": [],
    }
    b = {
        "backend": "cyclic",
        "name": "rotate-right",
        "universe": _TRIPLES,
        "relations": [{"name": "E", "arity": 2, "interp": _ROT_RIGHT}],
        "families": [],
    }
    return {"a": a, "b": b}


def neighborhoods() -> dict:
    """The disjointness graph extended with a family indexed by vertices:
    the member at index v collects the neighbors of v."""
    st = {
        "backend": "equality",
        "name": "kneser-neighborhoods",
        "universe": _PAIRS,
        "relations": [{"name": "E", "arity": 2, "interp": _DISJOINT}],
        "families": [
            {"name": "N", "arity": 1, "index": _PAIRS, "interp": _DISJOINT}
        ],
    }
    return {"a": st, "b": {**st}}


FIXTURES = {
    "kneser": kneser,
    "nondefiso": nondefiso,
    "smoothing": smoothing,
    "circle": circle,
    "neighborhoods": neighborhoods,
}


def fixture_documents(name: str) -> dict:
    try:
        builder = FIXTURES[name]
    except KeyError:
        known = ", ".join(sorted(FIXTURES))
        raise ValidationError(f"unknown fixture {name!r}; available: {known}")
    return builder()
