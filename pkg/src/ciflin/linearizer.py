"""Linearization: turn a composition into one single-location automaton.

Fresh location-pointer variables track the location of every original
automaton.  Initial and invariant predicates become case distinctions over
the pointers, and every LiTS action transition becomes a self-loop whose
reset also tests and updates the pointers of the automata that move.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .explicit import VarScope
from .linear import WILDCARD, build_lits
from .model import (
    FALSE,
    TRUE,
    And,
    Atom,
    Automaton,
    BinOp,
    Cmp,
    Composition,
    Const,
    Edge,
    ListLit,
    Lit,
    Loc,
    LocDomain,
    Member,
    Or,
    VarRef,
    automata_of,
    composition_vars,
    conjoin,
    disjoin,
    eq,
)


@dataclass(frozen=True)
class LinearizationResult:
    automaton: Automaton
    pointers: tuple
    pointer_domains: tuple = field(default=())  # (pointer, LocDomain) pairs

    @property
    def location(self) -> str:
        return self.automaton.locations[0]


def fresh_pointers(p: Composition, declared=()) -> list:
    """The first ``n`` names ``l0, l1, ...`` not free in ``p`` nor in ``declared``."""
    taken = set(composition_vars(p)) | set(declared)
    n = len(automata_of(p))
    out, k = [], 0
    while len(out) < n:
        name = f"l{k}"
        if name not in taken:
            out.append(name)
        k += 1
    return out


def fresh_location(p: Composition) -> str:
    used = {v for a in automata_of(p) for v in a.locations}
    if "X" not in used:
        return "X"
    k = 0
    while f"X{k}" in used:
        k += 1
    return f"X{k}"


def implies(guard_var: str, location: str, locations, q):
    """``(ptr = v ⇒ q)`` without negation: ``(ptr = w1 ∨ ... ∨ ptr = wk) ∨ q`` over ``w ≠ v``."""
    ptr = VarRef(guard_var)
    others = disjoin(eq(ptr, Lit(Loc(w))) for w in locations if w != location)
    return Or(others, q)


def linearize(p: Composition, declared=(), name: str = None, simplify: bool = False) -> LinearizationResult:
    """Build the linear automaton of ``p`` and its location pointers.

    ``declared`` names model variables the pointers must avoid.  With
    ``simplify`` set, predicates are passed through :func:`simplify_predicate`.
    """
    lits = build_lits(p)
    st = lits.static
    automata = automata_of(p)
    ptrs = fresh_pointers(p, declared)
    x = fresh_location(p)
    tidy = simplify_predicate if simplify else (lambda q: q)

    init_parts, inv_parts = [], []
    for ptr, a, f, g in zip(ptrs, automata, st.inits, st.invs):
        for v in a.locations:
            init_parts.append(implies(ptr, v, a.locations, f[v]))
        for v in a.locations:
            inv_parts.append(implies(ptr, v, a.locations, g[v]))
    members = [Member(VarRef(ptr), a.locations) for ptr, a in zip(ptrs, automata)]
    init = tidy(conjoin(init_parts + members))
    inv = tidy(conjoin(inv_parts))

    edges = []
    for t in lits.transitions:
        parts = list(t.reset)
        for ptr, v, w in zip(ptrs, t.source, t.target):
            if v is WILDCARD:
                continue
            parts.append(eq(VarRef(ptr), Lit(Loc(v))))
            parts.append(eq(VarRef(ptr, True), Lit(Loc(w))))
        edges.append(Edge(x, t.action, tidy(conjoin(parts)), x))

    automaton = Automaton(name or "Linear", (x,), (init,), (inv,), tuple(edges), st.sync)
    domains = tuple((ptr, LocDomain(a.locations)) for ptr, a in zip(ptrs, automata))
    return LinearizationResult(automaton, tuple(ptrs), domains)


def scope_linearized(res: LinearizationResult) -> VarScope:
    """``|[ {ℓ ↦ ⊥} :: α_p ]|``."""
    return VarScope(tuple((ptr, None) for ptr in res.pointers), Atom(res.automaton), res.pointer_domains)


# -- best-effort simplification -------------------------------------------------


def simplify_predicate(p):
    """Constant folding and ``true``/``false`` absorption; meaning is preserved."""
    if isinstance(p, And):
        lhs, rhs = simplify_predicate(p.lhs), simplify_predicate(p.rhs)
        if lhs == FALSE or rhs == FALSE:
            return FALSE
        if lhs == TRUE:
            return rhs
        if rhs == TRUE:
            return lhs
        return And(lhs, rhs)
    if isinstance(p, Or):
        lhs, rhs = simplify_predicate(p.lhs), simplify_predicate(p.rhs)
        if lhs == TRUE or rhs == TRUE:
            return TRUE
        if lhs == FALSE:
            return rhs
        if rhs == FALSE:
            return lhs
        return Or(lhs, rhs)
    if isinstance(p, Cmp):
        lhs, rhs = _fold(p.lhs), _fold(p.rhs)
        if _is_const(lhs) and _is_const(rhs):
            a, b = _const_value(lhs), _const_value(rhs)
            if p.op == "==" and type(a) is type(b):
                return Const(a == b)
            if p.op == "<=" and type(a) is int and type(b) is int:
                return Const(a <= b)
        return Cmp(lhs, p.op, rhs)
    return p


def _fold(e):
    if isinstance(e, BinOp):
        lhs, rhs = _fold(e.lhs), _fold(e.rhs)
        if e.op in "+-" and isinstance(lhs, Lit) and isinstance(rhs, Lit) \
                and type(lhs.value) is int and type(rhs.value) is int:
            return Lit(lhs.value + rhs.value if e.op == "+" else lhs.value - rhs.value)
        if e.op == "++" and isinstance(lhs, ListLit) and isinstance(rhs, ListLit):
            return ListLit(lhs.items + rhs.items)
        return BinOp(e.op, lhs, rhs)
    if isinstance(e, ListLit):
        return ListLit(tuple(_fold(i) for i in e.items))
    return e


def _is_const(e):
    if isinstance(e, Lit):
        return True
    if isinstance(e, ListLit):
        return all(_is_const(i) for i in e.items)
    return False


def _const_value(e):
    if isinstance(e, Lit):
        return e.value
    return tuple(_const_value(i) for i in e.items)
