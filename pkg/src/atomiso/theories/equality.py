"""The pure-set backend: countably many atoms, equality only.

Atoms are written #0, #1, #2, ...  Orbits of n-tuples correspond to the
partitions of an n-element set, so the orbit count is the Bell number.
"""

import itertools
import re

from ..errors import VocabularyError
from .base import Backend, TypeInfo, Valuation, pinned_classes, set_partitions
from .formulas import (
    FALSE,
    TRUE,
    Atom,
    Const,
    Formula,
    Not,
    Rel,
    Term,
    Var,
    eq,
    free_vars,
    land,
    lor,
    ne,
)

_ATOM_RE = re.compile(r"#(\d+)$")


class EqualityBackend(Backend):
    name = "equality"
    relations = {"=": 2}

    # -- atoms ---------------------------------------------------------

    def parse_atom(self, text: str) -> Atom:
        m = _ATOM_RE.match(text.strip())
        if not m:
            raise VocabularyError(f"equality atoms look like #7, got {text!r}")
        return int(m.group(1))

    def format_atom(self, a: Atom) -> str:
        return f"#{a}"

    def check_atom(self, a: Atom) -> None:
        if not isinstance(a, int) or isinstance(a, bool) or a < 0:
            raise VocabularyError(f"equality atoms are natural numbers, got {a!r}")

    def fresh_atoms(self, used, n: int) -> list[int]:
        """The n least ids not in `used`, starting from #1."""
        out = []
        i = 1
        used = set(used)
        while len(out) < n:
            if i not in used:
                out.append(i)
            i += 1
        return out

    # -- literals ------------------------------------------------------

    def normalize_literal(self, name: str, args: tuple[Term, ...], positive: bool) -> Formula:
        if name != "=":
            raise VocabularyError(f"relation {name!r} not available over the pure set")
        a, b = args
        if a == b:
            return TRUE if positive else FALSE
        if isinstance(a, Const) and isinstance(b, Const):
            return TRUE if (a.value == b.value) == positive else FALSE
        if b.key < a.key:
            a, b = b, a
        lit = Rel("=", (a, b))
        return lit if positive else Not(lit)

    # -- conjunct hooks --------------------------------------------------

    def conjunct_consistent(self, lits) -> bool:
        flat, members, ok = pinned_classes(lits)
        if not ok:
            return False
        for lit in lits:
            if isinstance(lit, Not):
                a, b = lit.body.args
                if flat.get(a, a) == flat.get(b, b):
                    return False
        return True

    def eliminate_from_conjunct(self, var: str, lits: frozenset[Formula]) -> Formula:
        v = Var(var)
        for lit in sorted(lits, key=lambda l: l.key):
            if isinstance(lit, Rel) and v in lit.args:
                other = lit.args[1] if lit.args[0] == v else lit.args[0]
                rest = []
                for l in lits:
                    if l is lit:
                        continue
                    rest.append(self._subst_literal(l, var, other))
                return land(*rest)
        keep = [l for l in lits if var not in free_vars(l)]
        return land(*keep)

    def _subst_literal(self, lit: Formula, var: str, term: Term) -> Formula:
        positive = isinstance(lit, Rel)
        rel = lit if positive else lit.body
        args = tuple(term if t == Var(var) else t for t in rel.args)
        return self.normalize_literal(rel.name, args, positive)

    # -- witnesses -------------------------------------------------------

    def conjunct_witness(self, lits, fvs: list[str], params: list[Atom]) -> Valuation | None:
        terms = {Var(v) for v in fvs}
        for lit in lits:
            rel = lit if isinstance(lit, Rel) else lit.body
            terms.update(rel.args)
        eqs = [l for l in lits if isinstance(l, Rel)]
        flat, members, ok = pinned_classes(list(eqs) + [eq(t, t) for t in terms])
        if not ok:
            return None

        def root(t: Term) -> Term:
            return flat.get(t, t)

        neighbours: dict[Term, set[Term]] = {}
        for lit in lits:
            if isinstance(lit, Not):
                a, b = (root(t) for t in lit.body.args)
                if a == b:
                    return None
                neighbours.setdefault(a, set()).add(b)
                neighbours.setdefault(b, set()).add(a)

        assigned: dict[Term, Atom] = {}
        for cls, mem in members.items():
            consts = [m.value for m in mem if isinstance(m, Const)]
            if consts:
                assigned[cls] = consts[0]
        order = sorted(
            (c for c in members if c not in assigned),
            key=lambda c: min(m.name for m in members[c] if isinstance(m, Var)),
        )
        for cls in order:
            taken = {
                assigned[nb] for nb in neighbours.get(cls, ()) if nb in assigned
            }
            value = None
            for cand in itertools.chain(params, _fresh_ids(params)):
                if cand not in taken:
                    value = cand
                    break
            assigned[cls] = value
        return {v: assigned[root(Var(v))] for v in fvs}

    # -- types -----------------------------------------------------------

    def types_with_reps(self, variables, params):
        svals = sorted(params)
        out = []
        for blocks in set_partitions(tuple(variables)):
            for anchors in _anchor_choices(len(blocks), svals):
                lits = []
                reps = []
                fresh = iter(_fresh_ids(svals))
                free_reps = []
                for block, anchor in zip(blocks, anchors):
                    head = Var(block[0])
                    for other in block[1:]:
                        lits.append(eq(head, Var(other)))
                    if anchor is None:
                        for s in svals:
                            lits.append(ne(head, Const(s)))
                        free_reps.append(head)
                        reps.append((block, next(fresh)))
                    else:
                        lits.append(eq(head, Const(anchor)))
                        reps.append((block, anchor))
                for i in range(len(free_reps)):
                    for j in range(i + 1, len(free_reps)):
                        lits.append(ne(free_reps[i], free_reps[j]))
                val = tuple(
                    (v, value) for block, value in reps for v in block
                )
                out.append(TypeInfo(land(*lits), tuple(sorted(val))))
        return out

    def type_of(self, variables, values, params):
        svals = sorted(params)
        blocks: list[list[str]] = []
        anchor_of: list[Atom | None] = []
        seen: dict[Atom, int] = {}
        for v, a in zip(variables, values):
            if a in seen:
                blocks[seen[a]].append(v)
            else:
                seen[a] = len(blocks)
                blocks.append([v])
                anchor_of.append(a if a in params else None)
        lits = []
        free_reps = []
        for block, anchor in zip(blocks, anchor_of):
            head = Var(block[0])
            for other in block[1:]:
                lits.append(eq(head, Var(other)))
            if anchor is None:
                for s in svals:
                    lits.append(ne(head, Const(s)))
                free_reps.append(head)
            else:
                lits.append(eq(head, Const(anchor)))
        for i in range(len(free_reps)):
            for j in range(i + 1, len(free_reps)):
                lits.append(ne(free_reps[i], free_reps[j]))
        return land(*lits)

    def rn_count(self, n: int) -> int:
        # Bell numbers by the triangle recurrence
        if n == 0:
            return 1
        row = [1]
        for _ in range(n - 1):
            nxt = [row[-1]]
            for x in row:
                nxt.append(nxt[-1] + x)
            row = nxt
        return row[-1]

    # -- independence ------------------------------------------------------

    def independent_atoms(self, params, n: int):
        return tuple(self.fresh_atoms(params, n))

    def independence_formula(self, var: str, avoid, keep) -> Formula:
        v = Var(var)
        outside = land(*(ne(v, Const(s)) for s in sorted(avoid)))
        pins = [eq(v, Const(t)) for t in sorted(keep)]
        return lor(outside, *pins)

    # -- partial automorphisms ---------------------------------------------

    def _preserves_relations(self, mapping) -> bool:
        return True  # injectivity is checked by the caller

    def _extension_constraints(self, a, mapping):
        return []  # distinctness from existing images is the only constraint


def _fresh_ids(skip):
    skip = set(skip)
    i = 1
    while True:
        if i not in skip:
            yield i
        i += 1


def _anchor_choices(k: int, svals: list):
    """Assignments of k blocks to distinct anchors from svals or to None,
    anchors offered in ascending order before the free choice."""
    if k == 0:
        yield ()
        return
    for head in list(svals) + [None]:
        remaining = [s for s in svals if s != head] if head is not None else svals
        for tail in _anchor_choices(k - 1, remaining):
            yield (head,) + tail
