"""Linear transition systems (LiTS).

States are location sequences that may contain wild-cards; a wild-card
position stands for any location of that automaton and is left untouched by
the transition.  Besides action transitions, a LiTS records four static
relations per composition: its synchronizing actions, the initial-predicate
functions, the invariant functions and the all-wild-card vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Atom, Composition, Par, Sync, automata_of, conjuncts, reinit
from .symbolic import SymbolicActionTransition, SymbolicEnvTransition, locsof


class _Wildcard:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "_"

    def __reduce__(self):
        return (_Wildcard, ())


WILDCARD = _Wildcard()


def subseq(xs, ys) -> bool:
    """``xs ⊑ ys``: every entry of ``xs`` is a wild-card or equals ``ys`` there."""
    if len(xs) > len(ys):
        raise ValueError("left sequence is longer than the right one")
    return all(x is WILDCARD or x == y for x, y in zip(xs, ys))


def overwrite(xs, ys) -> tuple:
    """``xs ▷ ys``: take ``ys`` wherever ``xs`` has a wild-card or has ended."""
    if len(xs) > len(ys):
        raise ValueError("left sequence is longer than the right one")
    head = tuple(y if x is WILDCARD else x for x, y in zip(xs, ys))
    return head + tuple(ys[len(xs):])


@dataclass(frozen=True)
class LitsActionTransition:
    source: tuple
    action: str
    reset: tuple
    target: tuple


@dataclass(frozen=True)
class LitsStatic:
    sync: frozenset
    inits: tuple  # per automaton: dict location -> Predicate
    invs: tuple
    wildcards: tuple


@dataclass(frozen=True)
class LiTS:
    composition: Composition
    static: LitsStatic
    transitions: tuple


def lits_static(p: Composition) -> LitsStatic:
    if isinstance(p, Atom):
        a = p.automaton
        return LitsStatic(a.sync, (dict(zip(a.locations, a.init)),),
                          (dict(zip(a.locations, a.inv)),), (WILDCARD,))
    if isinstance(p, Par):
        l, r = lits_static(p.left), lits_static(p.right)
        return LitsStatic(l.sync | r.sync, l.inits + r.inits, l.invs + r.invs, l.wildcards + r.wildcards)
    if isinstance(p, Sync):
        s = lits_static(p.body)
        return LitsStatic(s.sync | p.actions, s.inits, s.invs, s.wildcards)
    raise TypeError(f"not a composition: {p!r}")


def lits_action_transitions(p: Composition) -> list:
    if isinstance(p, Atom):
        return [LitsActionTransition((e.source,), e.action, conjuncts(e.reset), (e.target,))
                for e in p.automaton.edges]
    if isinstance(p, Par):
        left, right = lits_action_transitions(p.left), lits_action_transitions(p.right)
        ls, rs = lits_static(p.left), lits_static(p.right)
        out = []
        for t in left:
            if t.action not in rs.sync:
                out.append(LitsActionTransition(t.source + rs.wildcards, t.action, t.reset,
                                                t.target + rs.wildcards))
        for t in right:
            if t.action not in ls.sync:
                out.append(LitsActionTransition(ls.wildcards + t.source, t.action, t.reset,
                                                ls.wildcards + t.target))
        both = ls.sync & rs.sync
        for t in left:
            for s in right:
                if t.action == s.action and t.action in both:
                    out.append(LitsActionTransition(t.source + s.source, t.action,
                                                    t.reset + s.reset, t.target + s.target))
        return out
    if isinstance(p, Sync):
        return lits_action_transitions(p.body)
    raise TypeError(f"not a composition: {p!r}")


def build_lits(p: Composition) -> LiTS:
    return LiTS(p, lits_static(p), tuple(lits_action_transitions(p)))


class SizeHypothesisError(ValueError):
    """The composition is outside the scope of the size formula."""


def _check_size_hypothesis(p, a):
    s = lits_static(p)
    if s.sync - {a}:
        raise SizeHypothesisError(f"synchronizing actions other than {a}: {sorted(s.sync - {a})}")
    if isinstance(p, Par):
        if a not in lits_static(p.left).sync or a not in lits_static(p.right).sync:
            raise SizeHypothesisError(f"{a} does not synchronize across every parallel composition")
        _check_size_hypothesis(p.left, a)
        _check_size_hypothesis(p.right, a)
    elif isinstance(p, Sync):
        _check_size_hypothesis(p.body, a)


def predict_size(p: Composition, a: str) -> int:
    """Number of LiTS action transitions when ``a`` is the only synchronizing action.

    Every other edge interleaves and contributes once; the ``a``-edges of all
    automata combine into one joint transition per choice of one edge each.
    """
    _check_size_hypothesis(p, a)
    automata = automata_of(p)
    others = sum(sum(1 for e in m.edges if e.action != a) for m in automata)
    joint = math.prod(sum(1 for e in m.edges if e.action == a) for m in automata)
    return others + joint


# -- reconstruction of the symbolic level --------------------------------------


def reconstruct_action_transitions(p: Composition, lits: LiTS = None) -> list:
    """Symbolic action transitions rebuilt from the LiTS of ``p``."""
    lits = lits or build_lits(p)
    st = lits.static
    out = []
    for t in lits.transitions:
        for ls in locsof(p):
            if not subseq(t.source, ls):
                continue
            after = overwrite(t.target, ls)
            u = sum((conjuncts(f[l]) for f, l in zip(st.inits, ls)), ())
            n = sum((conjuncts(g[l]) for g, l in zip(st.invs, ls)), ())
            n2 = sum((conjuncts(g[l]) for g, l in zip(st.invs, after)), ())
            out.append(SymbolicActionTransition(p, t.action, t.action in st.sync, u, n, n2,
                                                t.reset, reinit(p, after)))
    return out


def reconstruct_env_transitions(p: Composition, lits: LiTS = None) -> list:
    """Symbolic environment transitions rebuilt from the static LiTS relations."""
    st = (lits or build_lits(p)).static
    out = []
    for ls in locsof(p):
        u = sum((conjuncts(f[l]) for f, l in zip(st.inits, ls)), ())
        n = sum((conjuncts(g[l]) for g, l in zip(st.invs, ls)), ())
        out.append(SymbolicEnvTransition(p, u, n, st.sync, reinit(p, ls)))
    return out
