"""Shared decision machinery for the atom backends.

Each backend describes one countable homogeneous structure whose first-order
theory admits quantifier elimination.  The base class owns the elimination
pipeline (negation normal form, miniscoping, disjunctive normal form with
consistency pruning, per-conjunct variable elimination) and the derived
operations: satisfiability under a valuation, deterministic witness search,
complete-type enumeration, and finite partial automorphisms.
"""

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ValuationError, VocabularyError
from .formulas import (
    And,
    Atom,
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
    eq,
    formula_atoms,
    free_vars,
    land,
    lnot,
    lor,
    ne,
    nnf,
    subst,
)

Valuation = dict[str, Atom]


@dataclass(frozen=True)
class TypeInfo:
    """One complete type over a parameter set, with a concrete realization."""

    formula: Formula
    rep: tuple[tuple[str, Atom], ...]

    def rep_valuation(self) -> Valuation:
        return dict(self.rep)


def set_partitions(items: tuple) -> list[list[list]]:
    """All partitions of `items`, blocks listed in first-occurrence order,
    enumerated in restricted-growth order (coarsest assignment first)."""
    out: list[list[list]] = []

    def rec(i: int, blocks: list[list]):
        if i == len(items):
            out.append([list(b) for b in blocks])
            return
        for b in blocks:
            b.append(items[i])
            rec(i + 1, blocks)
            b.pop()
        blocks.append([items[i]])
        rec(i + 1, blocks)
        blocks.pop()

    rec(0, [])
    return out


class Backend:
    """One atom structure: vocabulary, semantics, and decision procedures."""

    name: str = ""
    #: input vocabulary: relation name -> arity
    relations: dict[str, int] = {}
    #: extra relations the backend's own elimination may leave in its output;
    #: formulas fed back into qe are checked against relations | work_relations,
    #: while the input grammar stays gated by `relations` alone
    work_relations: dict[str, int] = {}
    #: whether the structure embeds into itself avoiding any finite region;
    #: needed for independent-atom picking and parameter elimination
    dense: bool = True

    def __init__(self):
        self._qe_cache: dict[tuple, Formula] = {}

    # ------------------------------------------------------------------
    # atoms

    def parse_atom(self, text: str) -> Atom:
        raise NotImplementedError

    def format_atom(self, a: Atom) -> str:
        raise NotImplementedError

    def check_atom(self, a: Atom) -> None:
        raise NotImplementedError

    # ------------------------------------------------------------------
    # vocabulary validation

    def validate(self, f: Formula, internal: bool = False) -> None:
        if isinstance(f, (Top, Bot)):
            return
        if isinstance(f, Rel):
            arity = self.relations.get(f.name)
            if arity is None and internal:
                arity = self.work_relations.get(f.name)
            if arity is None:
                raise VocabularyError(
                    f"relation {f.name!r} is not part of the {self.name} vocabulary"
                )
            if len(f.args) != arity:
                raise VocabularyError(
                    f"relation {f.name!r} expects {arity} arguments, got {len(f.args)}"
                )
            for t in f.args:
                if isinstance(t, Const):
                    self.check_atom(t.value)
            return
        if isinstance(f, Not):
            return self.validate(f.body, internal)
        if isinstance(f, (And, Or)):
            for g in f.args:
                self.validate(g, internal)
            return
        if isinstance(f, Implies):
            self.validate(f.premise, internal)
            self.validate(f.conclusion, internal)
            return
        if isinstance(f, (Exists, Forall)):
            return self.validate(f.body, internal)
        raise TypeError(f"not a formula: {f!r}")

    # ------------------------------------------------------------------
    # literal normalization (theory hooks)

    def pre_transform(self, f: Formula) -> Formula:
        """Rewrite defined relation symbols before elimination."""
        return f

    def normalize_literal(self, name: str, args: tuple[Term, ...], positive: bool) -> Formula:
        """Rewrite one literal into the backend's literal normal form,
        folding ground comparisons to TRUE/FALSE."""
        raise NotImplementedError

    def _norm(self, f: Formula) -> Formula:
        """Normalize every literal of a negation-normal formula."""
        if isinstance(f, (Top, Bot)):
            return f
        if isinstance(f, Rel):
            return self.normalize_literal(f.name, f.args, True)
        if isinstance(f, Not):
            body = f.body
            if isinstance(body, Rel):
                return self.normalize_literal(body.name, body.args, False)
            return self._norm(nnf(f))
        if isinstance(f, And):
            return land(*(self._norm(g) for g in f.args))
        if isinstance(f, Or):
            return lor(*(self._norm(g) for g in f.args))
        if isinstance(f, Exists):
            return Exists(f.var, self._norm(f.body))
        if isinstance(f, Forall):
            return Forall(f.var, self._norm(f.body))
        return self._norm(nnf(f))

    # ------------------------------------------------------------------
    # conjunct-level theory hooks

    def conjunct_consistent(self, lits) -> bool:
        raise NotImplementedError

    def eliminate_from_conjunct(self, var: str, lits: frozenset[Formula]) -> Formula:
        raise NotImplementedError

    def conjunct_witness(self, lits, fvs: list[str], params: list[Atom]) -> Valuation | None:
        raise NotImplementedError

    # ------------------------------------------------------------------
    # quantifier elimination

    def qe(self, f: Formula) -> Formula:
        """Equivalent quantifier-free formula; parameters never grow."""
        key = f.key
        hit = self._qe_cache.get(key)
        if hit is not None:
            return hit
        self.validate(f, internal=True)
        out = self._eliminate(self._norm(nnf(self.pre_transform(f))))
        self._qe_cache[key] = out
        return out

    def _eliminate(self, f: Formula) -> Formula:
        if isinstance(f, (Top, Bot, Rel, Not)):
            return f
        if isinstance(f, And):
            return land(*(self._eliminate(g) for g in f.args))
        if isinstance(f, Or):
            return lor(*(self._eliminate(g) for g in f.args))
        if isinstance(f, Exists):
            return self._exists(f.var, self._eliminate(f.body))
        if isinstance(f, Forall):
            inner = self._eliminate(f.body)
            neg = self._norm(nnf(lnot(inner)))
            return self._norm(nnf(lnot(self._exists(f.var, neg))))
        raise TypeError(f"not a formula: {f!r}")

    def _exists(self, var: str, f: Formula) -> Formula:
        """Eliminate one existential from a quantifier-free formula."""
        if var not in free_vars(f):
            return f
        if isinstance(f, Or):
            return lor(*(self._exists(var, d) for d in f.args))
        if isinstance(f, And):
            outside = [g for g in f.args if var not in free_vars(g)]
            if outside:
                inside = [g for g in f.args if var in free_vars(g)]
                return land(*outside, self._exists(var, land(*inside)))
        return lor(
            *(self.eliminate_from_conjunct(var, c) for c in self.conjuncts(f))
        )

    def conjuncts(self, f: Formula) -> list[frozenset[Formula]]:
        """Disjunctive normal form as literal sets, theory-pruned."""
        if isinstance(f, Top):
            return [frozenset()]
        if isinstance(f, Bot):
            return []
        if isinstance(f, (Rel, Not)):
            return [frozenset((f,))]
        if isinstance(f, Or):
            seen: set[frozenset] = set()
            out = []
            for d in f.args:
                for c in self.conjuncts(d):
                    if c not in seen:
                        seen.add(c)
                        out.append(c)
            return out
        if isinstance(f, And):
            acc: list[frozenset[Formula]] = [frozenset()]
            for g in f.args:
                branches = self.conjuncts(g)
                nxt = []
                seen = set()
                for c in acc:
                    for b in branches:
                        u = c | b
                        if u in seen:
                            continue
                        seen.add(u)
                        if self._conjunct_ok(u):
                            nxt.append(u)
                acc = nxt
                if not acc:
                    return []
            return acc
        raise TypeError(f"unexpected in DNF conversion: {f!r}")

    def _conjunct_ok(self, lits: frozenset[Formula]) -> bool:
        for lit in lits:
            if lnot(lit) in lits:
                return False
        return self.conjunct_consistent(lits)

    # ------------------------------------------------------------------
    # satisfiability and witnesses

    def sat(self, f: Formula, valuation: Valuation) -> bool:
        """Truth of f under a valuation covering its free variables."""
        missing = free_vars(f) - set(valuation)
        if missing:
            raise ValuationError(
                f"valuation misses variables: {', '.join(sorted(missing))}"
            )
        for v in valuation.values():
            self.check_atom(v)
        q = self.qe(f)
        g = subst(q, {k: Const(v) for k, v in valuation.items() if k in free_vars(q)})
        g = self._norm(g)
        if isinstance(g, Top):
            return True
        if isinstance(g, Bot):
            return False
        raise AssertionError(f"ground formula did not fold: {g!r}")

    def holds(self, sentence: Formula) -> bool:
        return self.sat(sentence, {})

    def find_witness(self, f: Formula) -> Valuation | None:
        """Deterministic satisfying valuation, or None.

        Preference order: parameter atoms of the formula first, then the
        canonical fresh choice of the backend (least unused id for the pure
        set, simplest rational in the leftmost feasible gap for the orders).
        """
        q = self.qe(f)
        fvs = sorted(free_vars(f))
        params = sorted(formula_atoms(f) | formula_atoms(q))
        if not fvs:
            return {} if isinstance(q, Top) else None
        if isinstance(q, Bot):
            return None
        conjs = self.conjuncts(q)
        conjs.sort(key=lambda c: tuple(sorted(l.key for l in c)))
        for c in conjs:
            w = self.conjunct_witness(c, fvs, params)
            if w is not None:
                return w
        return None

    # ------------------------------------------------------------------
    # types and orbits of atom tuples

    def complete_types(self, variables: tuple[str, ...], params: frozenset[Atom]) -> list[Formula]:
        return [t.formula for t in self.types_with_reps(variables, params)]

    def types_with_reps(self, variables: tuple[str, ...], params: frozenset[Atom]) -> list[TypeInfo]:
        raise NotImplementedError

    def type_of(self, variables: tuple[str, ...], values: tuple[Atom, ...], params: frozenset[Atom]) -> Formula:
        """The complete type over `params` realized by concrete `values`."""
        raise NotImplementedError

    def rn_count(self, n: int) -> int:
        """Number of orbits of n-tuples of atoms under all automorphisms."""
        raise NotImplementedError

    # ------------------------------------------------------------------
    # independence regions (dense backends only)

    def independent_atoms(self, params: frozenset[Atom], n: int) -> tuple[Atom, ...]:
        raise NotImplementedError

    def independence_formula(self, var: str, avoid: frozenset[Atom], keep: frozenset[Atom]) -> Formula:
        """Constraint placing `var` inside a self-embedding image that avoids
        `avoid` except for the pinned atoms `keep`."""
        raise NotImplementedError

    # ------------------------------------------------------------------
    # finite partial automorphisms

    def is_partial_automorphism(self, mapping: dict[Atom, Atom]) -> bool:
        vals = list(mapping.values())
        for v in list(mapping.keys()) + vals:
            self.check_atom(v)
        if len(set(vals)) != len(vals):
            return False
        return self._preserves_relations(mapping)

    def _preserves_relations(self, mapping: dict[Atom, Atom]) -> bool:
        raise NotImplementedError

    def extend_automorphism(self, mapping: dict[Atom, Atom], atoms) -> dict[Atom, Atom]:
        """Extend a finite partial automorphism to cover more atoms; the
        homogeneity of every shipped backend makes this always possible."""
        out = dict(mapping)
        for a in sorted(set(atoms) - set(out)):
            # the self-equation keeps x in the formula even when there are
            # no images to avoid yet
            constraints = [eq(Var("x"), Var("x"))]
            constraints += [ne(Var("x"), Const(img)) for img in sorted(out.values())]
            constraints += self._extension_constraints(a, out)
            w = self.find_witness(land(*constraints))
            if w is None:  # pragma: no cover - homogeneity guarantees success
                raise AssertionError("partial automorphism extension failed")
            out[a] = w["x"]
        return out

    def _extension_constraints(self, a: Atom, mapping: dict[Atom, Atom]) -> list[Formula]:
        raise NotImplementedError


def pinned_classes(lits) -> tuple[dict[Term, Term], dict[Term, set], bool]:
    """Union-find over the terms of equality literals.

    Returns (find-map as parent pointers flattened, class->members, ok) where
    ok is False when two distinct constants were merged.
    """
    parent: dict[Term, Term] = {}

    def find(t: Term) -> Term:
        parent.setdefault(t, t)
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    def union(a: Term, b: Term) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            # keep constants as class representatives when present
            if isinstance(rb, Const):
                ra, rb = rb, ra
            parent[rb] = ra

    ok = True
    for lit in lits:
        if isinstance(lit, Rel) and lit.name == "=":
            union(lit.args[0], lit.args[1])
    members: dict[Term, set] = {}
    for t in list(parent):
        members.setdefault(find(t), set()).add(t)
    for root, mem in members.items():
        consts = {m.value for m in mem if isinstance(m, Const)}
        if len(consts) > 1:
            ok = False
    flat = {t: find(t) for t in parent}
    return flat, members, ok
