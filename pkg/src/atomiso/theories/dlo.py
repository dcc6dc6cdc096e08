"""The dense-linear-order backend: rational atoms with < and <=.

Literal normal form uses only <, =, and != (negations of < and <= are
rewritten at normalization time), which keeps per-conjunct elimination to
the classical lower/upper bound product.  Orbit counts of n-tuples are the
ordered Bell numbers.
"""

import itertools
import math
import re
from fractions import Fraction

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
    lt,
    ne,
)

_RAT_RE = re.compile(r"-?\d+(/\d+)?$")


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The minimal-denominator rational strictly between lo and hi,
    ties broken toward the least such numerator (Stern-Brocot descent)."""
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    if lo < 0 < hi:
        return Fraction(0)
    if hi <= 0:
        return -simplest_between(-hi, -lo)
    fl = lo.numerator // lo.denominator
    if Fraction(fl + 1) < hi:
        return Fraction(fl + 1)
    frac = lo - fl
    if frac == 0:
        k = (Fraction(1) / (hi - fl)).__floor__() + 1
        return fl + Fraction(1, k)
    return fl + 1 / simplest_between(Fraction(1) / (hi - fl), Fraction(1) / frac)


def simplest_above(lo: Fraction) -> Fraction:
    return Fraction(math.floor(lo) + 1)


def simplest_below(hi: Fraction) -> Fraction:
    return Fraction(math.ceil(hi) - 1)


class DloBackend(Backend):
    name = "dlo"
    relations = {"=": 2, "<": 2, "<=": 2}

    # -- atoms ---------------------------------------------------------

    def parse_atom(self, text: str) -> Atom:
        text = text.strip()
        if not _RAT_RE.match(text):
            raise VocabularyError(f"rational atoms look like 2, -1, or 5/3, got {text!r}")
        return Fraction(text)

    def format_atom(self, a: Atom) -> str:
        return str(a)

    def check_atom(self, a: Atom) -> None:
        if not isinstance(a, Fraction):
            raise VocabularyError(f"ordered atoms are Fractions, got {a!r}")

    # -- literals ------------------------------------------------------

    def normalize_literal(self, name: str, args: tuple[Term, ...], positive: bool) -> Formula:
        a, b = args
        if name == "=":
            if a == b:
                return TRUE if positive else FALSE
            if isinstance(a, Const) and isinstance(b, Const):
                return TRUE if (a.value == b.value) == positive else FALSE
            if b.key < a.key:
                a, b = b, a
            lit = Rel("=", (a, b))
            return lit if positive else Not(lit)
        if name == "<":
            if positive:
                if a == b:
                    return FALSE
                if isinstance(a, Const) and isinstance(b, Const):
                    return TRUE if a.value < b.value else FALSE
                return Rel("<", (a, b))
            return lor(
                self.normalize_literal("<", (b, a), True),
                self.normalize_literal("=", (a, b), True),
            )
        if name == "<=":
            if positive:
                return lor(
                    self.normalize_literal("<", (a, b), True),
                    self.normalize_literal("=", (a, b), True),
                )
            return self.normalize_literal("<", (b, a), True)
        raise VocabularyError(f"relation {name!r} not available over the dense order")

    # -- conjunct hooks --------------------------------------------------

    def conjunct_consistent(self, lits) -> bool:
        flat, _, ok = pinned_classes(lits)
        if not ok:
            return False

        def root(t: Term) -> Term:
            return flat.get(t, t)

        edges: dict[Term, set[Term]] = {}
        nodes: set[Term] = set()
        for lit in lits:
            if isinstance(lit, Not):
                a, b = (root(t) for t in lit.body.args)
                if a == b:
                    return False
                nodes.update((a, b))
            elif lit.name == "<":
                a, b = (root(t) for t in lit.args)
                if a == b:
                    return False
                edges.setdefault(a, set()).add(b)
                nodes.update((a, b))
            else:
                nodes.update(root(t) for t in lit.args)
        # class representatives prefer constants, so every pinned class
        # (and every bare constant in an order literal) is a Const node
        pinned = {u: u.value for u in nodes if isinstance(u, Const)}
        consts = sorted(pinned.items(), key=lambda kv: kv[1])
        for (c1, v1), (c2, v2) in zip(consts, consts[1:]):
            if v1 < v2:
                edges.setdefault(c1, set()).add(c2)
        # cycle check over the strict-order digraph
        state: dict[Term, int] = {}

        def dfs(u: Term) -> bool:
            state[u] = 1
            for w in edges.get(u, ()):
                s = state.get(w, 0)
                if s == 1:
                    return False
                if s == 0 and not dfs(w):
                    return False
            state[u] = 2
            return True

        for u in list(nodes) + list(edges):
            if state.get(u, 0) == 0 and not dfs(u):
                return False
        return True

    def eliminate_from_conjunct(self, var: str, lits: frozenset[Formula]) -> Formula:
        v = Var(var)
        for lit in sorted(lits, key=lambda l: l.key):
            if isinstance(lit, Rel) and lit.name == "=" and v in lit.args:
                other = lit.args[1] if lit.args[0] == v else lit.args[0]
                rest = []
                for l in lits:
                    if l is lit:
                        continue
                    rest.append(self._subst_literal(l, var, other))
                return land(*rest)
        lowers: list[Term] = []
        uppers: list[Term] = []
        keep: list[Formula] = []
        for lit in lits:
            if var not in free_vars(lit):
                keep.append(lit)
                continue
            if isinstance(lit, Not):
                continue  # a disequality never blocks a dense witness
            if lit.name == "<":
                a, b = lit.args
                if b == v:
                    lowers.append(a)
                else:
                    uppers.append(b)
        for l in lowers:
            for u in uppers:
                keep.append(self.normalize_literal("<", (l, u), True))
        return land(*keep)

    def _subst_literal(self, lit: Formula, var: str, term: Term) -> Formula:
        positive = isinstance(lit, Rel)
        rel = lit if positive else lit.body
        args = tuple(term if t == Var(var) else t for t in rel.args)
        if positive and rel.name == "=":
            return self.normalize_literal("=", args, True)
        if not positive:
            return self.normalize_literal(rel.name, args, False)
        return self.normalize_literal(rel.name, args, True)

    # -- witnesses -------------------------------------------------------

    def conjunct_witness(self, lits, fvs: list[str], params: list[Atom]) -> Valuation | None:
        base = list(lits)
        flat, members, ok = pinned_classes(list(lits) + [eq(Var(v), Var(v)) for v in fvs])
        if not ok:
            return None

        def root(t: Term) -> Term:
            return flat.get(t, t)

        assigned: dict[Term, Fraction] = {}
        anchor_var: dict[Term, str] = {}
        for cls, mem in members.items():
            consts = [m.value for m in mem if isinstance(m, Const)]
            names = sorted(m.name for m in mem if isinstance(m, Var))
            if names:
                anchor_var[cls] = names[0]
            if consts:
                assigned[cls] = consts[0]
        order = sorted(
            (c for c in members if c not in assigned and c in anchor_var),
            key=lambda c: anchor_var[c],
        )
        for cls in order:
            pins = [
                eq(Var(anchor_var[c]), Const(v))
                for c, v in assigned.items()
                if c in anchor_var
            ]
            landmarks = sorted(set(assigned.values()) | set(params))
            cands = list(params)
            cands += [v for v in sorted(set(assigned.values())) if v not in set(params)]
            cands += _gap_candidates(landmarks)
            value = None
            for c in cands:
                trial = base + pins + [eq(Var(anchor_var[cls]), Const(c))]
                if self.conjunct_consistent(frozenset(trial)):
                    value = c
                    break
            if value is None:
                return None
            assigned[cls] = value
        return {v: assigned[root(Var(v))] for v in fvs}

    # -- types -----------------------------------------------------------

    def types_with_reps(self, variables, params):
        svals = sorted(params)
        out = []
        for blocks in set_partitions(tuple(variables)):
            for anchors in _anchor_choices(len(blocks), svals):
                free = [b for b, a in zip(blocks, anchors) if a is None]
                for placement in _gap_placements(len(free), len(svals) + 1):
                    orderings = [
                        list(p)
                        for p in itertools.product(
                            *(itertools.permutations(g) for g in placement)
                        )
                    ]
                    for per_gap in orderings:
                        out.append(
                            self._linear_type(blocks, anchors, free, per_gap, svals)
                        )
        return out

    def _linear_type(self, blocks, anchors, free, per_gap, svals) -> TypeInfo:
        lits = []
        values: dict[int, Fraction] = {}
        for block, anchor in zip(blocks, anchors):
            head = Var(block[0])
            for other in block[1:]:
                lits.append(eq(head, Var(other)))
            if anchor is not None:
                lits.append(eq(head, Const(anchor)))
                values[id(block)] = anchor
        for g, ordered in enumerate(per_gap):
            lo = Const(svals[g - 1]) if g > 0 else None
            hi = Const(svals[g]) if g < len(svals) else None
            heads = [Var(free[i][0]) for i in ordered]
            if heads and lo is not None:
                lits.append(lt(lo, heads[0]))
            for a, b in zip(heads, heads[1:]):
                lits.append(lt(a, b))
            if heads and hi is not None:
                lits.append(lt(heads[-1], hi))
            for pos, i in enumerate(ordered):
                values[id(free[i])] = _gap_value(
                    lo.value if lo else None,
                    hi.value if hi else None,
                    pos,
                    len(ordered),
                )
        rep = tuple(
            sorted((v, values[id(block)]) for block in blocks for v in block)
        )
        return TypeInfo(land(*lits), rep)

    def type_of(self, variables, values, params):
        svals = sorted(params)
        blocks: list[list[str]] = []
        block_val: list[Fraction] = []
        seen: dict[Atom, int] = {}
        for v, a in zip(variables, values):
            if a in seen:
                blocks[seen[a]].append(v)
            else:
                seen[a] = len(blocks)
                blocks.append([v])
                block_val.append(a)
        lits = []
        by_gap: dict[int, list[int]] = {}
        for i, (block, a) in enumerate(zip(blocks, block_val)):
            head = Var(block[0])
            for other in block[1:]:
                lits.append(eq(head, Var(other)))
            if a in params:
                lits.append(eq(head, Const(a)))
            else:
                g = _gap_index(svals, a)
                by_gap.setdefault(g, []).append(i)
        for g, idxs in by_gap.items():
            idxs.sort(key=lambda i: block_val[i])
            heads = [Var(blocks[i][0]) for i in idxs]
            if g > 0:
                lits.append(lt(Const(svals[g - 1]), heads[0]))
            for a, b in zip(heads, heads[1:]):
                lits.append(lt(a, b))
            if g < len(svals):
                lits.append(lt(heads[-1], Const(svals[g])))
        return land(*lits)

    def rn_count(self, n: int) -> int:
        # ordered Bell numbers
        a = [1] + [0] * n
        for m in range(1, n + 1):
            a[m] = sum(math.comb(m, k) * a[m - k] for k in range(1, m + 1))
        return a[n]

    # -- independence ------------------------------------------------------

    def independence_interval(self, params) -> tuple[Fraction, Fraction]:
        """One open rational interval avoiding every parameter."""
        svals = sorted(params)
        if not svals:
            return Fraction(0), Fraction(1)
        if len(svals) == 1:
            return svals[0], svals[0] + 1
        return svals[0], svals[1]

    def independent_atoms(self, params, n: int):
        lo, hi = self.independence_interval(params)
        out: list[Fraction] = []
        for _ in range(n):
            hi_now = out[0] if out else hi
            out.insert(0, simplest_between(lo, hi_now))
        return tuple(out)

    def independence_formula(self, var: str, avoid, keep) -> Formula:
        v = Var(var)
        choices = [eq(v, Const(t)) for t in sorted(keep)]
        for lo, hi in self._region_intervals(avoid, keep):
            parts = []
            if lo is not None:
                parts.append(lt(Const(lo), v))
            if hi is not None:
                parts.append(lt(v, Const(hi)))
            choices.append(land(*parts))
        return lor(*choices)

    def _region_intervals(self, avoid, keep):
        """Per gap of `keep`, one open interval free of `avoid`."""
        pins = sorted(keep)
        others = sorted(set(avoid) - set(keep))
        gaps = []
        bounds = [None] + pins + [None]
        for lo, hi in zip(bounds, bounds[1:]):
            inside = [
                s
                for s in others
                if (lo is None or s > lo) and (hi is None or s < hi)
            ]
            if inside:
                hi = inside[0]
            if lo is not None and hi is not None and not lo < hi:
                continue
            gaps.append((lo, hi))
        return gaps

    # -- partial automorphisms ---------------------------------------------

    def _preserves_relations(self, mapping) -> bool:
        items = sorted(mapping.items())
        for (a1, b1), (a2, b2) in zip(items, items[1:]):
            if not b1 < b2:
                return False
        return True

    def _extension_constraints(self, a, mapping):
        out = []
        for d, img in sorted(mapping.items()):
            if a < d:
                out.append(lt(Var("x"), Const(img)))
            elif a > d:
                out.append(lt(Const(img), Var("x")))
        return out


def _gap_candidates(landmarks: list[Fraction]) -> list[Fraction]:
    if not landmarks:
        return [Fraction(0)]
    out = [simplest_below(landmarks[0])]
    for lo, hi in zip(landmarks, landmarks[1:]):
        out.append(simplest_between(lo, hi))
    out.append(simplest_above(landmarks[-1]))
    return out


def _gap_value(lo, hi, pos: int, count: int) -> Fraction:
    if lo is None and hi is None:
        return Fraction(pos + 1)
    if lo is None:
        return hi - (count - pos)
    if hi is None:
        return lo + pos + 1
    return lo + (hi - lo) * Fraction(pos + 1, count + 1)


def _gap_index(svals, a) -> int:
    g = 0
    while g < len(svals) and a > svals[g]:
        g += 1
    return g


def _anchor_choices(k: int, svals: list):
    if k == 0:
        yield ()
        return
    for head in list(svals) + [None]:
        remaining = [s for s in svals if s != head] if head is not None else svals
        for tail in _anchor_choices(k - 1, remaining):
            yield (head,) + tail


def _gap_placements(k: int, gaps: int):
    """Distributions of k ordered block indices into `gaps` buckets."""
    if k == 0:
        yield [[] for _ in range(gaps)]
        return
    for assign in itertools.product(range(gaps), repeat=k):
        buckets: list[list[int]] = [[] for _ in range(gaps)]
        for i, g in enumerate(assign):
            buckets[g].append(i)
        yield buckets
