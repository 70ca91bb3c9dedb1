"""Explicit semantics: transitions between (term, valuation) states.

Successors are computed in two phases.  The rule premises that only involve
the source valuation (initial predicates, invariants, synchronization flags
and sets) are resolved structurally, producing *pending* steps that still
carry the constraints on the target valuation.  A pending step is then
completed by enumerating target valuations that differ from the source only
in variables updated by the participating resets.

The frame condition is thus applied to the union of the participating
resets, not to each automaton in isolation.  Applying it per automaton would
forbid every synchronization whose partners update different variables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

from .lts import BudgetExceeded, TransitionSystem
from .model import (
    Atom,
    Composition,
    DomainSpec,
    Par,
    Sync,
    Valuation,
    compile_predicate,
    conjuncts,
    primed_names,
)


@dataclass(frozen=True)
class VarScope:
    """``|[ {x ↦ v} :: body ]|``; a bound value of ``None`` is undefined (⊥).

    ``domains`` pairs every bound variable with its finite domain.
    """

    binding: tuple
    body: "ScopedTerm"
    domains: tuple

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.binding)


ScopedTerm = Union[Composition, VarScope]


@dataclass(frozen=True)
class ActionStep:
    action: str
    sync: bool
    target: ScopedTerm
    valuation: Valuation


@dataclass(frozen=True)
class EnvStep:
    actions: frozenset
    target: ScopedTerm
    valuation: Valuation


@dataclass(frozen=True)
class _PendingAction:
    action: str
    sync: bool
    changed: frozenset
    target: Composition
    resets: tuple
    invariants: tuple


@dataclass(frozen=True)
class _PendingEnv:
    actions: frozenset
    target: Composition
    invariants: tuple


def _sat(p, sigma):
    return compile_predicate(p)(sigma, {})


def _pending_actions(p: Composition, sigma) -> list:
    if isinstance(p, Atom):
        a = p.automaton
        out = []
        ok = {v: _sat(i, sigma) and _sat(n, sigma) for v, i, n in zip(a.locations, a.init, a.inv)}
        for e in a.edges:
            if ok[e.source]:
                out.append(_PendingAction(
                    e.action, e.action in a.sync, primed_names(e.reset),
                    Atom(a.reinit(e.target)), (e.reset,), (a.inv_of(e.target),)))
        return out
    if isinstance(p, Par):
        left, right = _pending_actions(p.left, sigma), _pending_actions(p.right, sigma)
        left_env, right_env = _pending_env(p.left, sigma), _pending_env(p.right, sigma)
        out = []
        for x in left:
            for y in right:
                if x.sync and y.sync and x.action == y.action:
                    out.append(_PendingAction(
                        x.action, True, x.changed | y.changed, Par(x.target, y.target),
                        x.resets + y.resets, x.invariants + y.invariants))
        for x in left:
            for e in right_env:
                if x.action not in e.actions:
                    out.append(_PendingAction(
                        x.action, x.sync, x.changed, Par(x.target, e.target),
                        x.resets, x.invariants + e.invariants))
        for y in right:
            for e in left_env:
                if y.action not in e.actions:
                    out.append(_PendingAction(
                        y.action, y.sync, y.changed, Par(e.target, y.target),
                        y.resets, e.invariants + y.invariants))
        return out
    if isinstance(p, Sync):
        return [
            _PendingAction(x.action, x.sync or x.action in p.actions, x.changed,
                           Sync(p.actions, x.target), x.resets, x.invariants)
            for x in _pending_actions(p.body, sigma)
        ]
    raise TypeError(f"not a composition: {p!r}")


def _pending_env(p: Composition, sigma) -> list:
    if isinstance(p, Atom):
        a = p.automaton
        return [
            _PendingEnv(a.sync, Atom(a.reinit(v)), (n,))
            for v, i, n in zip(a.locations, a.init, a.inv)
            if _sat(i, sigma) and _sat(n, sigma)
        ]
    if isinstance(p, Par):
        return [
            _PendingEnv(x.actions | y.actions, Par(x.target, y.target), x.invariants + y.invariants)
            for x in _pending_env(p.left, sigma)
            for y in _pending_env(p.right, sigma)
        ]
    if isinstance(p, Sync):
        return [
            _PendingEnv(x.actions | p.actions, Sync(p.actions, x.target), x.invariants)
            for x in _pending_env(p.body, sigma)
        ]
    raise TypeError(f"not a composition: {p!r}")


_plan_cache: dict = {}


def _plan(resets: tuple, changed: frozenset):
    """Order the changed variables and attach every reset conjunct to the first
    depth at which all of its primed variables are assigned."""
    key = (resets, changed)
    plan = _plan_cache.get(key)
    if plan is None:
        names = sorted(changed)
        depth = {n: i + 1 for i, n in enumerate(names)}
        stages = [[] for _ in range(len(names) + 1)]
        for r in resets:
            for c in conjuncts(r):
                k = max((depth[n] for n in primed_names(c)), default=0)
                stages[k].append(compile_predicate(c))
        if len(_plan_cache) > 4096:
            _plan_cache.clear()
        plan = _plan_cache[key] = (names, stages)
    return plan


def _complete_action(x: _PendingAction, sigma: Valuation, domains: DomainSpec):
    names, stages = _plan(x.resets, x.changed)
    invs = [compile_predicate(n) for n in x.invariants]
    if not all(c(sigma, sigma) for c in stages[0]):
        return

    def extend(k, post):
        if k == len(names):
            if all(n(post, {}) for n in invs):
                yield post
            return
        for v in domains.values(names[k]):
            nxt = post.updated({names[k]: v})
            if all(c(sigma, nxt) for c in stages[k + 1]):
                yield from extend(k + 1, nxt)

    yield from extend(0, sigma)


_env_cache: dict = {}


def _env_targets(invariants: tuple, domains: DomainSpec, fixed: tuple) -> list:
    """Valuations of ``domains`` (extended with ``fixed`` pairs) satisfying all invariants."""
    key = (invariants, domains, fixed)
    try:
        return _env_cache[key]
    except KeyError:
        pass
    invs = [compile_predicate(n) for n in invariants]
    out = []
    for sigma in domains.universe():
        full = sigma.updated(fixed) if fixed else sigma
        if all(n(full, {}) for n in invs):
            out.append(full)
    if len(_env_cache) > 4096:
        _env_cache.clear()
    _env_cache[key] = out
    return out


def _unique(items):
    return list(dict.fromkeys(items))


def _scope_variants(t: VarScope):
    """Concrete bindings of a scope: every vector for ⊥ entries."""
    names = t.names
    doms = dict(t.domains)
    choices = [(v,) if v is not None else doms[n].values() for n, v in t.binding]
    for combo in itertools.product(*choices):
        yield tuple(zip(names, combo))


def action_steps(t: ScopedTerm, sigma, domains: DomainSpec) -> list:
    """Action steps of ``(t, sigma)``, duplicate-free, in derivation order."""
    sigma = sigma if isinstance(sigma, Valuation) else Valuation(sigma)
    if isinstance(t, VarScope):
        out = []
        inner_domains = domains.extend(t.domains)
        for binding in _scope_variants(t):
            inner = sigma.updated(binding)
            for step in action_steps(t.body, inner, inner_domains):
                new_binding = tuple((n, step.valuation[n]) for n, _ in binding)
                out.append(ActionStep(
                    step.action, step.sync,
                    VarScope(new_binding, step.target, t.domains),
                    _outer(step.valuation, binding, sigma)))
        return _unique(out)
    out = []
    for x in _pending_actions(t, sigma):
        for post in _complete_action(x, sigma, domains):
            out.append(ActionStep(x.action, x.sync, x.target, post))
    return _unique(out)


def env_steps(t: ScopedTerm, sigma, domains: DomainSpec, _fixed: tuple = ()) -> list:
    """Environment steps of ``(t, sigma)``.

    Scope-bound variables are local: the environment cannot change them, so
    an environment step of a scope keeps its binding.
    """
    sigma = sigma if isinstance(sigma, Valuation) else Valuation(sigma)
    if isinstance(t, VarScope):
        out = []
        for binding in _scope_variants(t):
            inner = sigma.updated(binding)
            for step in env_steps(t.body, inner, domains, _fixed + binding):
                new_binding = tuple((n, step.valuation[n]) for n, _ in binding)
                out.append(EnvStep(
                    step.actions, VarScope(new_binding, step.target, t.domains),
                    _outer(step.valuation, binding, sigma)))
        return _unique(out)
    out = []
    for x in _pending_env(t, sigma):
        for post in _env_targets(x.invariants, domains, _fixed):
            out.append(EnvStep(x.actions, x.target, post))
    return _unique(out)


def _outer(post: Valuation, binding: tuple, sigma: Valuation) -> Valuation:
    # a bound name shadowing an outer variable leaves the outer value untouched
    names = [n for n, _ in binding]
    restored = {n: sigma[n] for n in names if n in sigma}
    return post.without(names).updated(restored) if restored else post.without(names)


def explicit_lts(t: ScopedTerm, initial, domains: DomainSpec, bound: int = 100_000) -> TransitionSystem:
    """Reachable part of the explicit transition system from ``(t, σ)``, σ ∈ ``initial``.

    States are ``(term, valuation)`` pairs numbered in breadth-first order.
    Raises :class:`BudgetExceeded` (carrying the partial system) once more
    than ``bound`` states are discovered.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    ts = TransitionSystem()
    frontier = []
    for sigma in initial:
        sigma = sigma if isinstance(sigma, Valuation) else Valuation(sigma)
        i, new = ts.add_state((t, sigma), initial=True)
        if new:
            frontier.append(i)
    if len(ts) > bound:
        raise BudgetExceeded(f"more than {bound} states", ts)
    head = 0
    while head < len(frontier):
        i = frontier[head]
        head += 1
        term, sigma = ts.states[i]
        steps = [(("action", s.action, s.sync), s) for s in action_steps(term, sigma, domains)]
        steps += [(("env", tuple(sorted(s.actions))), s) for s in env_steps(term, sigma, domains)]
        for label, s in steps:
            j, new = ts.add_state((s.target, s.valuation))
            if new:
                if len(ts) > bound:
                    raise BudgetExceeded(f"more than {bound} states", ts)
                frontier.append(j)
            ts.add_transition(i, label, j)
    return ts


def initial_valuations(p: ScopedTerm, domains: DomainSpec) -> list:
    """Valuations admitting an initial environment step of ``p``."""
    return [s for s in domains.universe() if _pending_env_any(p, s)]


def _pending_env_any(p, sigma):
    if isinstance(p, VarScope):
        return any(_pending_env_any(p.body, sigma.updated(b)) for b in _scope_variants(p))
    return bool(_pending_env(p, sigma))
