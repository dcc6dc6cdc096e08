"""Search for definable isomorphisms and removal of unneeded parameters.

The search works orbit by orbit.  Any definable bijection restricts, on each
orbit of the domain universe, to the graph of a bijection onto one orbit of
the target universe, and that restriction is itself a single orbit of pairs.
Such a piece is pinned down by where it sends one representative x0, and the
image y0 must be fixed by every automorphism fixing x0 and the allowed
parameters, i.e. its least support lies inside theirs.  Enumerating those
finitely many candidate images yields every piece; a backtracking perfect
matching over pieces, pruned by per-symbol compatibility checks on orbit
representatives, then decides existence.

Pieces and compatibility checks quantify over whole orbits but always fix
one representative pair; this is sound because orbits are transitive under
the parameter-fixing automorphisms and every set in play is invariant.
"""

import itertools
from dataclasses import dataclass, field

from .algebra import (
    DefFunction,
    fn_apply,
    fn_check,
    fn_image_expr,
    fn_inverse,
    fn_validate,
    is_member,
    least_support,
    orbit_decomposition,
    orbit_expression,
    set_equal,
)
from .compile import Compiler
from .errors import (
    DensenessError,
    EliminationError,
    ResourceError,
    ValidationError,
)
from .exprs import ETuple, Expr, expr_names, expr_params, rename_clause, union_of
from .structures import Structure, check_isomorphism, signatures_match
from .theories.formulas import And, Forall, Implies, land

DEFAULT_BUDGET = 1 << 16

FOUND = "FOUND"
NOT_FOUND = "NOT_FOUND"
NOT_FOUND_INCOMPLETE = "NOT_FOUND_INCOMPLETE"


@dataclass(frozen=True)
class GraphPiece:
    """One candidate orbit of pairs: the T-orbit of (x0, y0), a bijection
    from the a_index-th domain orbit onto the b_index-th target orbit."""

    expr: Expr
    x0: Expr
    y0: Expr
    a_index: int
    b_index: int


@dataclass
class Certificate:
    verdict: str
    witness: DefFunction | None
    params: tuple
    stats: dict
    caveat: str | None = None

    def to_dict(self, backend_name: str) -> dict:
        from .parser import print_expr
        from .structures import function_to_dict

        out = {
            "verdict": self.verdict,
            "params": [
                f"#{a}" if isinstance(a, int) else str(a) for a in self.params
            ],
            "stats": self.stats,
        }
        if self.witness is not None:
            out["witness"] = function_to_dict(backend_name, self.witness)
        if self.caveat:
            out["caveat"] = self.caveat
        return out


# ---------------------------------------------------------------------------
# piece enumeration


def _clause_of(piece_expr: Expr):
    return piece_expr.clauses[0]


def _quantify(binders, body):
    for b in reversed(binders):
        body = Forall(b, body)
    return body


def _piece_functional(comp: Compiler, piece: GraphPiece) -> bool:
    c = _clause_of(piece.expr)
    body = Implies(
        c.guard,
        Implies(
            comp.equal(c.element.items[0], piece.x0),
            comp.equal(c.element.items[1], piece.y0),
        ),
    )
    return comp.holds(_quantify(c.binders, body))


def _piece_injective(comp: Compiler, piece: GraphPiece) -> bool:
    c = _clause_of(piece.expr)
    body = Implies(
        c.guard,
        Implies(
            comp.equal(c.element.items[1], piece.y0),
            comp.equal(c.element.items[0], piece.x0),
        ),
    )
    return comp.holds(_quantify(c.binders, body))


def enumerate_pieces(
    comp: Compiler,
    A: Structure,
    B: Structure,
    T: frozenset,
    *,
    require_injective: bool = True,
    budget: int = DEFAULT_BUDGET,
):
    """All functional (optionally also injective) orbit graph pieces between
    the universes, grouped by domain orbit index."""
    a_orbits = orbit_decomposition(comp, A.universe, T)
    b_orbits = orbit_decomposition(comp, B.universe, T)
    pieces: list[GraphPiece] = []
    examined = 0
    for i, oa in enumerate(a_orbits):
        x0 = oa.rep_element()
        anchor = T | least_support(comp, x0)
        for cand in orbit_decomposition(comp, B.universe, anchor):
            y0 = cand.rep_element()
            # the image of x0 must be fixed whenever x0 and T are, i.e. its
            # least support must lie inside the anchor; atoms of y0 inside
            # the anchor settle this cheaply, otherwise compute the support
            if not expr_params(y0) <= anchor:
                if not least_support(comp, y0) <= anchor:
                    continue
            examined += 1
            if examined > budget:
                raise ResourceError(
                    f"piece enumeration exceeded the budget of {budget}",
                    count=examined,
                )
            pair = ETuple((x0, y0))
            piece_expr = orbit_expression(comp, pair, T)
            piece = GraphPiece(piece_expr, x0, y0, i, -1)
            if not _piece_functional(comp, piece):
                continue
            if require_injective and not _piece_injective(comp, piece):
                continue
            j = _orbit_index_of(comp, y0, b_orbits)
            pieces.append(GraphPiece(piece_expr, x0, y0, i, j))
    return pieces, a_orbits, b_orbits


def _orbit_index_of(comp: Compiler, x: Expr, orbits) -> int:
    for j, o in enumerate(orbits):
        if is_member(comp, x, o.piece()):
            return j
    raise EliminationError("element not covered by the orbit decomposition")


# ---------------------------------------------------------------------------
# per-symbol compatibility of piece tuples


class _MorphismChecker:
    """Checks the preservation condition symbol by symbol on tuples of
    assigned pieces, with the first piece fixed at its representative pair
    and the rest (plus any family index) quantified."""

    def __init__(self, comp: Compiler, A: Structure, B: Structure, two_way: bool):
        self.comp = comp
        self.A = A
        self.B = B
        self.two_way = two_way
        self.cache: dict[tuple, bool] = {}

    def compatible_with(self, assigned: list[GraphPiece], new: GraphPiece) -> bool:
        """All symbol conditions on tuples over assigned+new that involve
        the new piece."""
        pool = assigned + [new]
        for sym_kind, sym in self._symbols():
            r = sym.arity
            for combo in itertools.product(pool, repeat=r):
                if not any(p is new for p in combo):
                    continue
                if not self._tuple_ok(sym_kind, sym, combo):
                    return False
        return True

    def _symbols(self):
        for r in self.A.relations:
            yield "rel", r
        for f in self.A.families:
            yield "fam", f

    def _tuple_ok(self, sym_kind: str, sym, combo) -> bool:
        key = (sym.name, tuple(id(p) for p in combo))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        ok = self._check_tuple(sym_kind, sym, combo)
        self.cache[key] = ok
        return ok

    def _check_tuple(self, sym_kind: str, sym, combo) -> bool:
        comp = self.comp
        interp_a = sym.interp
        if sym_kind == "rel":
            interp_b = next(
                r.interp for r in self.B.relations if r.name == sym.name
            )
        else:
            interp_b = next(
                f.interp for f in self.B.families if f.name == sym.name
            )
        for p in combo:
            comp.names.reserve(expr_names(p.expr))
        xs: list[Expr] = [combo[0].x0]
        ys: list[Expr] = [combo[0].y0]
        binders: list[str] = []
        guards = []
        for p in combo[1:]:
            c = rename_clause(_clause_of(p.expr), comp.names)
            binders.extend(c.binders)
            guards.append(c.guard)
            xs.append(c.element.items[0])
            ys.append(c.element.items[1])

        def condition(extra_head=None):
            xa = _mk_tuple(extra_head, xs)
            yb = _mk_tuple(extra_head, ys)
            ma = comp.member(xa, interp_a)
            mb = comp.member(yb, interp_b)
            if self.two_way:
                return And((Implies(ma, mb), Implies(mb, ma)))
            return Implies(ma, mb)

        if sym_kind == "fam":
            inner = comp.forall_elem(sym.index_set, lambda v: condition(v))
        else:
            inner = condition()
        body = Implies(land(*guards), inner) if guards else inner
        return comp.holds(_quantify(binders, body))


def _mk_tuple(head, items: list[Expr]) -> Expr:
    parts = ([head] if head is not None else []) + items
    if len(parts) == 1:
        return parts[0]
    return ETuple(tuple(parts))


# ---------------------------------------------------------------------------
# the search


def find_definable_map(
    comp: Compiler,
    A: Structure,
    B: Structure,
    T,
    *,
    mode: str = "iso",
    budget: int = DEFAULT_BUDGET,
) -> Certificate:
    """Search for a T-definable isomorphism (mode 'iso'), embedding ('emb'),
    or homomorphism ('hom') from A to B.

    FOUND answers carry a verified witness and are exact in every mode.
    Negative answers are exact only for 'iso' over a backend with dense
    supports; otherwise they are reported as NOT_FOUND_INCOMPLETE.
    """
    if mode not in ("iso", "hom", "emb"):
        raise ValidationError(f"unknown search mode {mode!r}")
    T = frozenset(T)
    needed = A.params() | B.params()
    if not needed <= T:
        names = ", ".join(
            comp.backend.format_atom(a) for a in sorted(needed - T)
        )
        raise ValidationError(
            f"parameter set must contain the structures' atoms; missing: {names}"
        )
    stats = {"orbits_a": 0, "orbits_b": 0, "pieces": 0, "candidates": 0}

    def negative() -> Certificate:
        if mode != "iso" or not comp.backend.dense:
            caveat = (
                "the search only rules out maps assembled from orbit-graph "
                "pieces; other definable maps of this mode may exist"
                if mode != "iso"
                else "negative answers are not conclusive over this backend"
            )
            return Certificate(NOT_FOUND_INCOMPLETE, None, tuple(sorted(T)), stats, caveat)
        return Certificate(NOT_FOUND, None, tuple(sorted(T)), stats)

    if not signatures_match(comp, A, B):
        return Certificate(NOT_FOUND, None, tuple(sorted(T)), stats)

    pieces, a_orbits, b_orbits = enumerate_pieces(
        comp, A, B, T, require_injective=mode != "hom", budget=budget
    )
    stats["orbits_a"] = len(a_orbits)
    stats["orbits_b"] = len(b_orbits)
    stats["pieces"] = len(pieces)

    if mode == "iso" and len(a_orbits) != len(b_orbits):
        return negative()
    if mode == "emb" and len(a_orbits) > len(b_orbits):
        return negative()

    by_a: dict[int, list[GraphPiece]] = {}
    for p in pieces:
        by_a.setdefault(p.a_index, []).append(p)
    if any(i not in by_a for i in range(len(a_orbits))):
        return negative()

    # larger types first; ties broken by orbit index for determinism
    order = sorted(
        range(len(a_orbits)),
        key=lambda i: (-len(str(a_orbits[i].type_formula.key)), i),
    )
    checker = _MorphismChecker(comp, A, B, two_way=mode != "hom")
    use_b_once = mode != "hom"

    assigned: list[GraphPiece] = []
    used_b: set[int] = set()

    def matchings(k: int):
        if k == len(order):
            yield list(assigned)
            return
        i = order[k]
        for p in by_a[i]:
            if use_b_once and p.b_index in used_b:
                continue
            if not checker.compatible_with(assigned, p):
                continue
            assigned.append(p)
            used_b.add(p.b_index)
            yield from matchings(k + 1)
            assigned.pop()
            used_b.discard(p.b_index)

    mismatch = False
    for solution in matchings(0):
        stats["candidates"] += 1
        if stats["candidates"] > budget:
            raise ResourceError(
                f"candidate verification exceeded the budget of {budget}",
                count=stats["candidates"],
            )
        witness = DefFunction(
            A.universe, B.universe, union_of(*(p.expr for p in solution))
        )
        if _verify_witness(comp, witness, A, B, mode):
            return Certificate(FOUND, witness, tuple(sorted(T)), stats)
        # pruning should never let a bad candidate through; if it does,
        # keep searching but remember the answer may not be conclusive
        mismatch = True
    out = negative()
    if mismatch and out.verdict == NOT_FOUND:
        return Certificate(
            NOT_FOUND_INCOMPLETE,
            None,
            out.params,
            stats,
            caveat="a candidate failed final verification; result inconclusive",
        )
    return out


def _verify_witness(
    comp: Compiler, fn: DefFunction, A: Structure, B: Structure, mode: str
) -> bool:
    fn_validate(comp, fn)
    if mode == "iso":
        return check_isomorphism(comp, fn, A, B)
    if not fn_check(comp, fn, injective=mode == "emb"):
        return False
    T = A.params() | B.params() | expr_params(fn.graph)
    return _preserves_symbols(comp, fn, A, B, T, reflect=mode == "emb")


def _preserves_symbols(comp, fn, A, B, T, *, reflect: bool) -> bool:
    from .structures import _indexed_power, _power, _symbol_transported

    brel = {r.name: r for r in B.relations}
    bfam = {f.name: f for f in B.families}
    for r in A.relations:
        prod = _power(A.universe, r.arity)
        for orbit in orbit_decomposition(comp, prod, frozenset(T)):
            rep = orbit.rep_element()
            xs = [rep] if r.arity == 1 else list(rep.items)
            ys = [fn_apply(comp, fn, x) for x in xs]
            image = ys[0] if r.arity == 1 else ETuple(tuple(ys))
            in_a = is_member(comp, rep, r.interp)
            in_b = is_member(comp, image, brel[r.name].interp)
            if in_a and not in_b:
                return False
            if reflect and in_b and not in_a:
                return False
    for f in A.families:
        prod = _indexed_power(f.index_set, A.universe, f.arity)
        for orbit in orbit_decomposition(comp, prod, frozenset(T)):
            rep = orbit.rep_element()
            head, xs = rep.items[0], list(rep.items[1:])
            ys = [fn_apply(comp, fn, x) for x in xs]
            image = ETuple(tuple([head, *ys]))
            in_a = is_member(comp, rep, f.interp)
            in_b = is_member(comp, image, bfam[f.name].interp)
            if in_a and not in_b:
                return False
            if reflect and in_b and not in_a:
                return False
    return True


def decide_definable_iso(
    comp: Compiler,
    A: Structure,
    B: Structure,
    extra_params=(),
    *,
    mode: str = "iso",
    budget: int = DEFAULT_BUDGET,
) -> Certificate:
    """Decide existence of a definable isomorphism using the structures' own
    atoms plus any explicitly allowed extra ones."""
    T = A.params() | B.params() | frozenset(extra_params)
    return find_definable_map(comp, A, B, T, mode=mode, budget=budget)


# ---------------------------------------------------------------------------
# tiny-scale oracle search (exhaustive over unions of product orbits)


def naive_find_iso(
    comp: Compiler,
    A: Structure,
    B: Structure,
    T,
    *,
    max_orbits: int = 12,
) -> Certificate:
    """Exhaustive reference search: tries every union of orbits of the pair
    product as a graph.  Exponential; intended for cross-checking the main
    search on small inputs."""
    from .exprs import product_expr

    T = frozenset(T)
    stats = {"orbits_a": 0, "orbits_b": 0, "pieces": 0, "candidates": 0}
    if not signatures_match(comp, A, B):
        return Certificate(NOT_FOUND, None, tuple(sorted(T)), stats)
    prod = product_expr(A.universe, B.universe)
    orbits = orbit_decomposition(comp, prod, T)
    if len(orbits) > max_orbits:
        raise ResourceError(
            f"{len(orbits)} product orbits exceed the oracle bound {max_orbits}",
            count=len(orbits),
        )
    stats["pieces"] = len(orbits)
    for mask in range(1 << len(orbits)):
        picked = [o.piece() for i, o in enumerate(orbits) if mask >> i & 1]
        fn = DefFunction(A.universe, B.universe, union_of(*picked))
        stats["candidates"] += 1
        try:
            fn_validate(comp, fn)
        except ValidationError:
            continue
        if not fn_check(comp, fn, injective=True, surjective=True):
            continue
        if check_isomorphism(comp, fn, A, B, verify_function=False):
            return Certificate(FOUND, fn, tuple(sorted(T)), stats)
    if comp.backend.dense:
        return Certificate(NOT_FOUND, None, tuple(sorted(T)), stats)
    return Certificate(
        NOT_FOUND_INCOMPLETE,
        None,
        tuple(sorted(T)),
        stats,
        caveat="negative answers are not conclusive over this backend",
    )


# ---------------------------------------------------------------------------
# parameter elimination for isomorphisms


@dataclass
class SmoothingStep:
    side: str  # 'dom' when the orbit was picked in A, 'cod' for B
    a_index: int
    b_index: int
    x0: Expr
    exit_value: Expr
    walk: list


@dataclass
class SmoothingReport:
    steps: list = field(default_factory=list)
    walk_bound: int = 0


def eliminate_parameters(
    comp: Compiler,
    fn: DefFunction,
    A: Structure,
    B: Structure,
    T=(),
) -> tuple[DefFunction, SmoothingReport]:
    """Rebuild an isomorphism using only the parameters in T, given one that
    may use more.

    Works one universe orbit at a time, highest support dimension first.
    For the chosen orbit a representative is picked whose support is, apart
    from T, independent of every parameter in play; following the given map
    forward (and the partial result backward) from that representative must
    leave the already-covered region within finitely many steps, and the
    orbit of the resulting (start, exit) pair is the next graph piece.
    """
    backend = comp.backend
    if not backend.dense:
        raise DensenessError(
            f"the {backend.name} backend has no region-avoiding self-embedding, "
            "so parameter elimination is unavailable"
        )
    T = frozenset(T)
    needed = A.params() | B.params()
    if not needed <= T:
        names = ", ".join(backend.format_atom(a) for a in sorted(needed - T))
        raise ValidationError(
            f"parameter set must contain the structures' atoms; missing: {names}"
        )
    fn_validate(comp, fn)
    if not check_isomorphism(comp, fn, A, B):
        raise ValidationError("the given function is not an isomorphism")

    S = T | expr_params(fn.graph)
    a_orbits = orbit_decomposition(comp, A.universe, T)
    b_orbits = orbit_decomposition(comp, B.universe, T)
    if len(a_orbits) != len(b_orbits):
        raise EliminationError(
            "an isomorphism exists yet the universes have different orbit counts"
        )
    report = SmoothingReport()
    report.walk_bound = max(
        len(orbit_decomposition(comp, B.universe, S)),
        len(orbit_decomposition(comp, A.universe, S)),
    ) + 1

    dims_a = [len(least_support(comp, o.rep_element())) for o in a_orbits]
    dims_b = [len(least_support(comp, o.rep_element())) for o in b_orbits]
    remaining_a = set(range(len(a_orbits)))
    remaining_b = set(range(len(b_orbits)))

    fn_back = fn_inverse(fn)
    graph_pieces: list[Expr] = []

    for _ in range(len(a_orbits)):
        best = None  # (dim, side_rank, index)
        for i in sorted(remaining_a):
            cand = (-dims_a[i], 0, i)
            if best is None or cand < best:
                best = cand
        for j in sorted(remaining_b):
            cand = (-dims_b[j], 1, j)
            if best is None or cand < best:
                best = cand
        _, side_rank, idx = best
        h_cur = DefFunction(A.universe, B.universe, union_of(*graph_pieces))
        if side_rank == 0:
            orbit = a_orbits[idx]
            forward = fn
            covered = fn_image_expr(h_cur)
            step_back = fn_inverse(h_cur)
        else:
            orbit = b_orbits[idx]
            forward = fn_back
            covered = _domain_expr(h_cur)
            step_back = h_cur

        x0 = _independent_representative(comp, orbit, S, T)
        walk = []
        x = x0
        while True:
            y = fn_apply(comp, forward, x)
            walk.append((x, y))
            if len(walk) > report.walk_bound:
                raise EliminationError("the forward walk failed to terminate")
            if not is_member(comp, y, covered):
                break
            x = fn_apply(comp, step_back, y)
        exit_value = walk[-1][1]

        if side_rank == 0:
            pair = ETuple((x0, exit_value))
            a_done, b_done = idx, _orbit_index_of(comp, exit_value, b_orbits)
        else:
            pair = ETuple((exit_value, x0))
            a_done, b_done = _orbit_index_of(comp, exit_value, a_orbits), idx
        if a_done not in remaining_a or b_done not in remaining_b:
            raise EliminationError("the walk exited into an orbit already covered")
        piece = orbit_expression(comp, pair, T)
        graph_pieces.append(piece)
        remaining_a.discard(a_done)
        remaining_b.discard(b_done)
        report.steps.append(
            SmoothingStep(
                "dom" if side_rank == 0 else "cod",
                a_done,
                b_done,
                x0,
                exit_value,
                walk,
            )
        )

    h = DefFunction(A.universe, B.universe, union_of(*graph_pieces))
    fn_validate(comp, h)
    if not fn_check(comp, h, injective=True, surjective=True):
        raise EliminationError("the rebuilt map is not a bijection")
    if not check_isomorphism(comp, h, A, B, verify_function=False):
        raise EliminationError("the rebuilt map is not an isomorphism")
    return h, report


def _domain_expr(fn: DefFunction) -> Expr:
    from .algebra import fn_domain_expr

    return fn_domain_expr(fn)


def _independent_representative(comp: Compiler, orbit, S: frozenset, T: frozenset):
    c = orbit.clause
    constraints = [c.guard, orbit.type_formula]
    for b in c.binders:
        constraints.append(comp.backend.independence_formula(b, S, T))
    witness = comp.backend.find_witness(land(*constraints))
    if witness is None:
        raise EliminationError(
            "no orbit representative independent of the parameters exists"
        )
    missing = [b for b in c.binders if b not in witness]
    if missing:
        used = frozenset(witness.values()) | S
        fill = comp.backend.independent_atoms(used, len(missing))
        witness = dict(witness)
        witness.update(zip(missing, fill))
    from .exprs import instantiate

    return instantiate(c.element, {b: witness[b] for b in c.binders})
