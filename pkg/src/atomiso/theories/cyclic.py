"""The circular-order backend: rational atoms with a ternary betweenness
relation R, where R(a,b,c) holds when b lies on the arc from a to c taken
counterclockwise (equivalently a<b<c up to rotation of the three).

Elimination reuses the dense-linear machinery by expanding R into its three
linear readings up front; complete types are built natively in the circular
vocabulary so orbit formulas never mention <.  The circle is not dense in
the sense the independence operations need (no self-embedding misses a
point of every arc), so those raise DensenessError.
"""

import itertools
import math
from fractions import Fraction

from ..errors import DensenessError
from .base import TypeInfo, set_partitions
from .formulas import (
    And,
    Bot,
    Const,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Rel,
    Top,
    Var,
    cyc,
    eq,
    land,
    lnot,
    lor,
    lt,
    ne,
)
from .dlo import DloBackend, _anchor_choices, _gap_placements, _gap_value


def _cyc3(a, b, c) -> bool:
    return a < b < c or b < c < a or c < a < b


class CyclicBackend(DloBackend):
    name = "cyclic"
    relations = {"=": 2, "R": 3}
    # elimination cuts the circle open, so its own output uses the linear order
    work_relations = {"<": 2, "<=": 2}
    dense = False

    # -- R expansion ------------------------------------------------------

    def pre_transform(self, f: Formula) -> Formula:
        if isinstance(f, (Top, Bot)):
            return f
        if isinstance(f, Rel):
            if f.name != "R":
                return f
            a, b, c = f.args
            return lor(
                land(lt(a, b), lt(b, c)),
                land(lt(b, c), lt(c, a)),
                land(lt(c, a), lt(a, b)),
            )
        if isinstance(f, Not):
            return lnot(self.pre_transform(f.body))
        if isinstance(f, And):
            return land(*(self.pre_transform(g) for g in f.args))
        if isinstance(f, Or):
            return lor(*(self.pre_transform(g) for g in f.args))
        if isinstance(f, Implies):
            return Implies(self.pre_transform(f.premise), self.pre_transform(f.conclusion))
        if isinstance(f, Exists):
            return Exists(f.var, self.pre_transform(f.body))
        if isinstance(f, Forall):
            return Forall(f.var, self.pre_transform(f.body))
        raise TypeError(f"not a formula: {f!r}")

    # -- types -------------------------------------------------------------

    def types_with_reps(self, variables, params):
        svals = sorted(params)
        out = []
        for blocks in set_partitions(tuple(variables)):
            for anchors in _anchor_choices(len(blocks), svals):
                free = [b for b, a in zip(blocks, anchors) if a is None]
                if not svals:
                    out.extend(self._whole_circle_types(blocks, anchors, free))
                    continue
                for placement in _gap_placements(len(free), len(svals)):
                    orderings = itertools.product(
                        *(itertools.permutations(g) for g in placement)
                    )
                    for per_arc in orderings:
                        out.append(
                            self._arc_type(blocks, anchors, free, list(per_arc), svals)
                        )
        return out

    def _block_literals(self, blocks, anchors, values):
        lits = []
        for block, anchor in zip(blocks, anchors):
            head = Var(block[0])
            for other in block[1:]:
                lits.append(eq(head, Var(other)))
            if anchor is not None:
                lits.append(eq(head, Const(anchor)))
                values[id(block)] = anchor
        return lits

    def _whole_circle_types(self, blocks, anchors, free) -> list[TypeInfo]:
        """Types over the empty parameter set: one per circular arrangement
        of the blocks with the first block held fixed."""
        out = []
        if len(free) <= 1:
            arrangements = [()]
        else:
            arrangements = itertools.permutations(range(1, len(free)))
        for arr in arrangements:
            values: dict[int, object] = {}
            lits = self._block_literals(blocks, anchors, values)
            z0 = Var(free[0][0]) if free else None
            if free:
                values[id(free[0])] = Fraction(0)
            if len(free) == 2:
                lits.append(ne(z0, Var(free[1][0])))
                values[id(free[1])] = Fraction(1)
            elif len(free) >= 3:
                heads = [Var(free[i][0]) for i in arr]
                for a, b in zip(heads, heads[1:]):
                    lits.append(cyc(z0, a, b))
                for pos, i in enumerate(arr):
                    values[id(free[i])] = Fraction(pos + 1)
            rep = tuple(
                sorted((v, values[id(block)]) for block in blocks for v in block)
            )
            out.append(TypeInfo(land(*lits), rep))
        return out

    def _arc_type(self, blocks, anchors, free, per_arc, svals) -> TypeInfo:
        values: dict[int, object] = {}
        lits = self._block_literals(blocks, anchors, values)
        m = len(svals)
        for g, ordered in enumerate(per_arc):
            heads = [Var(free[i][0]) for i in ordered]
            if m == 1:
                lits += self._open_arc_literals(Const(svals[0]), heads, None)
                for pos, i in enumerate(ordered):
                    values[id(free[i])] = svals[0] + pos + 1
            elif g < m - 1:
                lits += self._open_arc_literals(
                    Const(svals[g]), heads, Const(svals[g + 1])
                )
                for pos, i in enumerate(ordered):
                    values[id(free[i])] = _gap_value(
                        svals[g], svals[g + 1], pos, len(ordered)
                    )
            else:  # the arc wrapping from the greatest anchor back to the least
                lits += self._open_arc_literals(Const(svals[-1]), heads, Const(svals[0]))
                for pos, i in enumerate(ordered):
                    values[id(free[i])] = svals[-1] + pos + 1
        rep = tuple(
            sorted((v, values[id(block)]) for block in blocks for v in block)
        )
        return TypeInfo(land(*lits), rep)

    def _open_arc_literals(self, lo: Const, heads, hi: Const | None) -> list[Formula]:
        """Pin `heads` in order onto the arc from lo to hi (hi None means the
        arc is the whole circle minus lo)."""
        if not heads:
            return []
        lits = []
        if hi is None and len(heads) == 1:
            return [ne(heads[0], lo)]
        for a, b in zip(heads, heads[1:]):
            lits.append(cyc(lo, a, b))
        if hi is not None:
            lits.append(cyc(lo, heads[-1], hi))
        return lits

    def type_of(self, variables, values, params):
        svals = sorted(params)
        pset = set(svals)
        blocks: list[list[str]] = []
        block_val = []
        seen: dict = {}
        for v, a in zip(variables, values):
            if a in seen:
                blocks[seen[a]].append(v)
            else:
                seen[a] = len(blocks)
                blocks.append([v])
                block_val.append(a)
        lits = []
        free_idx = []
        for i, (block, a) in enumerate(zip(blocks, block_val)):
            head = Var(block[0])
            for other in block[1:]:
                lits.append(eq(head, Var(other)))
            if a in pset:
                lits.append(eq(head, Const(a)))
            else:
                free_idx.append(i)
        m = len(svals)
        if m == 0:
            if len(free_idx) == 2:
                lits.append(ne(Var(blocks[free_idx[0]][0]), Var(blocks[free_idx[1]][0])))
            elif len(free_idx) >= 3:
                i0 = free_idx[0]
                v0 = block_val[i0]
                rest = sorted(
                    free_idx[1:],
                    key=lambda i: (0, block_val[i]) if block_val[i] > v0 else (1, block_val[i]),
                )
                z0 = Var(blocks[i0][0])
                heads = [Var(blocks[i][0]) for i in rest]
                for a, b in zip(heads, heads[1:]):
                    lits.append(cyc(z0, a, b))
        elif m == 1:
            s = svals[0]
            idxs = sorted(
                free_idx,
                key=lambda i: (0, block_val[i]) if block_val[i] > s else (1, block_val[i]),
            )
            heads = [Var(blocks[i][0]) for i in idxs]
            lits += self._open_arc_literals(Const(s), heads, None)
        else:
            by_arc: dict[int, list[int]] = {}
            for i in free_idx:
                by_arc.setdefault(_arc_index(svals, block_val[i]), []).append(i)
            for g, idxs in by_arc.items():
                if g < m - 1:
                    idxs.sort(key=lambda i: block_val[i])
                    lo, hi = Const(svals[g]), Const(svals[g + 1])
                else:
                    idxs.sort(
                        key=lambda i: (0, block_val[i])
                        if block_val[i] > svals[-1]
                        else (1, block_val[i])
                    )
                    lo, hi = Const(svals[-1]), Const(svals[0])
                heads = [Var(blocks[i][0]) for i in idxs]
                lits += self._open_arc_literals(lo, heads, hi)
        return land(*lits)

    def rn_count(self, n: int) -> int:
        # sum over block counts k of S(n,k) * (k-1)!  (circular arrangements)
        if n == 0:
            return 1
        s = [[0] * (n + 1) for _ in range(n + 1)]
        s[0][0] = 1
        for m in range(1, n + 1):
            for k in range(1, m + 1):
                s[m][k] = k * s[m - 1][k] + s[m - 1][k - 1]
        return sum(s[n][k] * math.factorial(k - 1) for k in range(1, n + 1))

    # -- independence --------------------------------------------------------

    def independent_atoms(self, params, n: int):
        raise DensenessError(
            "the circular order has no proper self-embedding avoiding a region, "
            "so independent atoms are unavailable"
        )

    def independence_formula(self, var: str, avoid, keep) -> Formula:
        raise DensenessError(
            "the circular order has no proper self-embedding avoiding a region, "
            "so independence constraints are unavailable"
        )

    # -- partial automorphisms ------------------------------------------------

    def _preserves_relations(self, mapping) -> bool:
        atoms = sorted(mapping)
        for a, b, c in itertools.combinations(atoms, 3):
            if not _cyc3(mapping[a], mapping[b], mapping[c]):
                return False
        return True

    def _extension_constraints(self, a, mapping):
        if len(mapping) < 2:
            return []
        doms = sorted(mapping)
        below = [d for d in doms if d < a]
        above = [d for d in doms if d > a]
        prev = below[-1] if below else doms[-1]
        nxt = above[0] if above else doms[0]
        return [cyc(Const(mapping[prev]), Var("x"), Const(mapping[nxt]))]


def _arc_index(svals, a) -> int:
    """Index of the anchor arc containing a non-anchor value; the wrap arc
    from svals[-1] around to svals[0] is the last index."""
    m = len(svals)
    if a < svals[0] or a > svals[-1]:
        return m - 1
    g = 0
    while a > svals[g + 1]:
        g += 1
    return g
