import pytest
from hypothesis import given, settings, strategies as st

from ciflin.explicit import VarScope, action_steps, env_steps, explicit_lts, initial_valuations
from ciflin.generate import GeneratorConfig, random_automaton
from ciflin.linearizer import linearize, scope_linearized
from ciflin.lts import BudgetExceeded
from ciflin.model import (
    TRUE,
    Atom,
    Automaton,
    DomainSpec,
    Edge,
    IntRange,
    Lit,
    Loc,
    LocDomain,
    Par,
    Valuation,
    VarRef,
    eq,
    holds,
    primed_names,
    reinit,
)

import random

SIGMA0 = Valuation({"n": 0, "wq": (), "id": 0, "p": 0})


def brute_force_atom(a: Automaton, sigma, d: DomainSpec):
    """Single-automaton rules, enumerating the whole universe for σ'."""
    acts, envs = set(), set()
    for e in a.edges:
        if not (holds(a.init_of(e.source), sigma) and holds(a.inv_of(e.source), sigma)):
            continue
        changed = primed_names(e.reset)
        for post in d.universe():
            if any(post[k] != sigma[k] for k in sigma if k not in changed):
                continue
            if holds(e.reset, sigma, post) and holds(a.inv_of(e.target), post):
                acts.add((e.action, e.action in a.sync, Atom(a.reinit(e.target)), post))
    for v in a.locations:
        if holds(a.init_of(v), sigma) and holds(a.inv_of(v), sigma):
            for post in d.universe():
                if holds(a.inv_of(v), post):
                    envs.add((a.sync, Atom(a.reinit(v)), post))
    return acts, envs


def as_sets(t, sigma, d):
    return ({(s.action, s.sync, s.target, s.valuation) for s in action_steps(t, sigma, d)},
            {(s.actions, s.target, s.valuation) for s in env_steps(t, sigma, d)})


@pytest.mark.parametrize("name", ["Train0", "Train1", "Gate"])
def test_atoms_match_brute_force(traingate, name):
    a = traingate.automaton(name)
    d = traingate.domains
    for q in [Atom(a)] + [Atom(a.reinit(v)) for v in a.locations]:
        for sigma in d.universe():
            assert as_sets(q, sigma, d) == brute_force_atom(q.automaton, sigma, d)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_random_atoms_match_brute_force(seed):
    cfg = GeneratorConfig()
    a = random_automaton(random.Random(seed), cfg, "M")
    d = cfg.domains()
    for sigma in d.universe():
        assert as_sets(Atom(a), sigma, d) == brute_force_atom(a, sigma, d)


def test_initial_rq_synchronizations(tg, traingate):
    steps = action_steps(tg, SIGMA0, traingate.domains)
    assert {(s.action, s.sync) for s in steps} == {("rq", True)}
    got = {(s.target, s.valuation["wq"], s.valuation["id"]) for s in steps}
    assert got == {
        (reinit(tg, ("N", "F", "C")), (0,), 0),
        (reinit(tg, ("F", "N", "C")), (1,), 1),
    }


def test_sync_frame_is_the_union_of_resets(tg, traingate):
    # Train updates id, Gate updates wq; both change in one synchronized step
    for s in action_steps(tg, SIGMA0, traingate.domains):
        assert s.valuation["n"] == 0 and s.valuation["p"] == 0
        assert s.valuation["wq"] == (s.valuation["id"],)


def test_environment_steps_respect_invariants(tg, traingate):
    d = traingate.domains
    steps = env_steps(tg, SIGMA0, d)
    assert {s.target for s in steps} == {reinit(tg, ("F", "F", "C"))}
    assert {s.valuation for s in steps} == {v for v in d.universe() if v["n"] == 0}
    assert all(s.actions == frozenset({"rq", "go", "out"}) for s in steps)


def test_initial_valuations(tg, traingate):
    init = initial_valuations(tg, traingate.domains)
    assert init and all(v["wq"] == () and v["n"] == 0 for v in init)
    assert len(init) == 4


def test_scope_steps_agree_with_composition(tg, traingate):
    d = traingate.domains
    lin = scope_linearized(linearize(tg, declared=d.names))
    for sigma in d.universe()[:20] + [SIGMA0]:
        a1 = {(s.action, s.sync, s.valuation) for s in action_steps(tg, sigma, d)}
        a2 = {(s.action, s.sync, s.valuation) for s in action_steps(lin, sigma, d)}
        assert a1 == a2
        e1 = {(s.actions, s.valuation) for s in env_steps(tg, sigma, d)}
        e2 = {(s.actions, s.valuation) for s in env_steps(lin, sigma, d)}
        assert e1 == e2


def test_scope_environment_keeps_binding(tg, traingate):
    d = traingate.domains
    lin = scope_linearized(linearize(tg, declared=d.names))
    for s in env_steps(lin, SIGMA0, d):
        assert dict(s.target.binding) == {"l0": Loc("F"), "l1": Loc("F"), "l2": Loc("C")}
        assert "l0" not in s.valuation


def test_scope_shadowing_restores_outer_value():
    x = VarRef("x")
    a = Automaton("M", ("A",), (TRUE,), (TRUE,), (Edge("A", "a", eq(VarRef("x", True), Lit(1)), "A"),))
    d = DomainSpec.of({"x": IntRange(0, 1)})
    scope = VarScope((("x", 0),), Atom(a), (("x", IntRange(0, 1)),))
    (step,) = action_steps(scope, Valuation({"x": 0}), d)
    assert step.valuation == {"x": 0}
    assert step.target.binding == (("x", 1),)
    assert holds(eq(x, Lit(0)), step.valuation)


def test_bottom_binding_enumerates_domain():
    a = Automaton("M", ("A",), (eq(VarRef("l"), Lit(Loc("A"))),), (TRUE,), (Edge("A", "a", TRUE, "A"),))
    scope = VarScope((("l", None),), Atom(a), (("l", LocDomain(("A", "B"))),))
    steps = action_steps(scope, Valuation({}), DomainSpec())
    assert [s.target.binding for s in steps] == [(("l", Loc("A")),)]


def test_explicit_lts_and_budget(tg, traingate):
    d = traingate.domains
    ts = explicit_lts(tg, [SIGMA0], d)
    assert ts.initial == [0]
    labels = {label for _, label, _ in ts.transitions}
    assert ("action", "stop", False) in labels and ("action", "go", True) in labels
    with pytest.raises(BudgetExceeded) as info:
        explicit_lts(tg, [SIGMA0], d, bound=5)
    assert len(info.value.partial) > 5
    with pytest.raises(ValueError):
        explicit_lts(tg, [SIGMA0], d, bound=0)


def test_interleaving_of_unsynchronized_actions(traingate):
    t0, t1 = traingate.automaton("Train0"), traingate.automaton("Train1")
    p = Par(Atom(t0.reinit("N")), Atom(t1.reinit("N")))
    steps = action_steps(p, SIGMA0, traingate.domains)
    stops = {s.target for s in steps if s.action == "stop"}
    assert stops == {reinit(p, ("S", "N")), reinit(p, ("N", "S"))}


def test_gate_alone_request_updates_queue_and_id(gate, traingate):
    steps = action_steps(gate, SIGMA0, traingate.domains)
    a = gate.automaton
    want = ("rq", True, Atom(a.reinit("C")), SIGMA0.updated({"wq": (1,), "id": 1}))
    assert want in {(s.action, s.sync, s.target, s.valuation) for s in steps}


def test_gate_alone_environment(gate, traingate):
    d = traingate.domains
    steps = env_steps(gate, SIGMA0, d)
    a = gate.automaton
    assert {s.target for s in steps} == {Atom(a.reinit("C"))}
    assert {s.valuation for s in steps} == {v for v in d.universe() if v["n"] == 0}
