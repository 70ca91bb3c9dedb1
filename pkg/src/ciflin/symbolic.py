"""Symbolic semantics: transitions between bare compositions.

State changes are carried on the labels as predicates.  Every label
predicate is stored as a flat tuple of conjuncts with literal ``true``
units removed, in the order the rules build them (left operand first).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import (
    FALSE,
    Atom,
    Composition,
    Par,
    Sync,
    automata_of,
    conjuncts,
)


@dataclass(frozen=True)
class SymbolicActionTransition:
    source: Composition
    action: str
    sync: bool
    init: tuple
    inv: tuple
    inv_next: tuple
    reset: tuple
    target: Composition

    def label(self) -> tuple:
        return (self.action, self.sync, self.init, self.inv, self.inv_next, self.reset)


@dataclass(frozen=True)
class SymbolicEnvTransition:
    source: Composition
    init: tuple
    inv: tuple
    actions: frozenset
    target: Composition

    def label(self) -> tuple:
        return (self.init, self.inv, self.actions)


def _actions(p):
    """Yield ``(a, b, u, n, n', r, target)`` tuples."""
    if isinstance(p, Atom):
        a = p.automaton
        for e in a.edges:
            yield (e.action, e.action in a.sync, conjuncts(a.init_of(e.source)),
                   conjuncts(a.inv_of(e.source)), conjuncts(a.inv_of(e.target)),
                   conjuncts(e.reset), Atom(a.reinit(e.target)))
    elif isinstance(p, Par):
        left, right = list(_actions(p.left)), list(_actions(p.right))
        left_env, right_env = list(_envs(p.left)), list(_envs(p.right))
        for a, b, u, n, n2, r, t in left:
            for a2, b2, u2, m, m2, r2, t2 in right:
                if b and b2 and a == a2:
                    yield (a, True, u + u2, n + m, n2 + m2, r + r2, Par(t, t2))
        for a, b, u, n, n2, r, t in left:
            for u2, m, acts, t2 in right_env:
                if a not in acts:
                    yield (a, b, u + u2, n + m, n2 + m, r, Par(t, t2))
        for a, b, u2, m, m2, r, t2 in right:
            for u, n, acts, t in left_env:
                if a not in acts:
                    yield (a, b, u + u2, n + m, n + m2, r, Par(t, t2))
    elif isinstance(p, Sync):
        for a, b, u, n, n2, r, t in _actions(p.body):
            yield (a, b or a in p.actions, u, n, n2, r, Sync(p.actions, t))
    else:
        raise TypeError(f"not a composition: {p!r}")


def _envs(p):
    """Yield ``(u, n, A, target)`` tuples."""
    if isinstance(p, Atom):
        a = p.automaton
        for v, i, n in zip(a.locations, a.init, a.inv):
            yield conjuncts(i), conjuncts(n), a.sync, Atom(a.reinit(v))
    elif isinstance(p, Par):
        right = list(_envs(p.right))
        for u, n, acts, t in _envs(p.left):
            for u2, m, acts2, t2 in right:
                yield u + u2, n + m, acts | acts2, Par(t, t2)
    elif isinstance(p, Sync):
        for u, n, acts, t in _envs(p.body):
            yield u, n, acts | p.actions, Sync(p.actions, t)
    else:
        raise TypeError(f"not a composition: {p!r}")


def symbolic_action_transitions(p: Composition) -> list:
    return [SymbolicActionTransition(p, *x[:6], x[6]) for x in _actions(p)]


def symbolic_env_transitions(p: Composition) -> list:
    return [SymbolicEnvTransition(p, *x) for x in _envs(p)]


def is_pruned(t) -> bool:
    """A transition whose init predicate has a literal ``false`` conjunct can never fire."""
    return FALSE in t.init


@dataclass
class STS:
    root: Composition
    states: list
    action_transitions: list
    env_transitions: list

    @property
    def state_count(self) -> int:
        return len(self.states)

    def outgoing(self, state):
        acts = [t for t in self.action_transitions if t.source == state]
        envs = [t for t in self.env_transitions if t.source == state]
        return acts, envs


def build_sts(p: Composition, prune: bool = True) -> STS:
    """Breadth-first exploration of the symbolic transition system from ``p``.

    With ``prune`` set, transitions whose init predicate contains a literal
    ``false`` conjunct are dropped and their targets left unexplored.
    """
    states = [p]
    seen = {p}
    acts, envs = [], []
    head = 0
    while head < len(states):
        q = states[head]
        head += 1
        for t in itertools.chain(symbolic_action_transitions(q), symbolic_env_transitions(q)):
            if prune and is_pruned(t):
                continue
            (acts if isinstance(t, SymbolicActionTransition) else envs).append(t)
            if t.target not in seen:
                seen.add(t.target)
                states.append(t.target)
    return STS(p, states, acts, envs)


def locsof(p: Composition) -> list:
    """All location vectors of ``p``, in automaton order."""
    return list(itertools.product(*(a.locations for a in automata_of(p))))
