from ciflin.dsl import print_predicate
from ciflin.model import FALSE, Atom, current_locations, reinit
from ciflin.symbolic import build_sts, is_pruned, locsof, symbolic_action_transitions, symbolic_env_transitions


def strs(parts):
    return tuple(print_predicate(c) for c in parts)


def test_traingate_sts_has_16_states(tg):
    sts = build_sts(tg, prune=True)
    assert sts.state_count == 16
    assert sts.states[0] == tg
    assert len(set(sts.states)) == 16


def test_unpruned_sts_is_larger(tg):
    assert build_sts(tg, prune=False).state_count > build_sts(tg, prune=True).state_count


def test_root_rq_transition(tg):
    target = reinit(tg, ("N", "F", "C"))
    (t,) = [t for t in symbolic_action_transitions(tg) if t.target == target and not is_pruned(t)]
    assert t.action == "rq" and t.sync
    assert strs(t.reset) == ("id' == 0", "wq' == wq ++ [id']")
    assert strs(t.inv) == strs(t.inv_next) == ("n == 0",)
    assert strs(t.init) == ("wq == []",)


def test_root_env_transition(tg):
    live = [t for t in symbolic_env_transitions(tg) if not is_pruned(t)]
    assert [current_locations(t.target) for t in live] == [("F", "F", "C")]
    assert strs(live[0].init) == ("wq == []",)
    assert strs(live[0].inv) == ("n == 0",)
    assert live[0].actions == frozenset({"rq", "go", "out"})


def test_pruning_drops_literal_false(tg):
    for t in symbolic_action_transitions(tg) + symbolic_env_transitions(tg):
        assert is_pruned(t) == (FALSE in t.init)
    for t in build_sts(tg).action_transitions:
        assert not is_pruned(t)


def test_gate_alone(gate):
    sts = build_sts(gate)
    a = gate.automaton
    assert set(sts.states) == {gate, Atom(a.reinit("C")), Atom(a.reinit("O"))}
    # the root's go edge already moves to O
    assert any(t.source == gate and t.target == Atom(a.reinit("O")) for t in sts.action_transitions)


def test_sync_flag_propagates(tg):
    acts = build_sts(tg).action_transitions
    assert {t.action for t in acts if not t.sync} == {"stop"}
    assert all(t.sync for t in acts if t.action in {"rq", "go", "out"})


def test_locsof(tg):
    assert len(locsof(tg)) == 4 * 4 * 2
    assert locsof(tg)[0] == ("F", "F", "C")


def test_every_state_is_root_or_reinitialized(tg):
    for s in build_sts(tg).states[1:]:
        assert current_locations(s) is not None


def test_gate_rules(gate):
    a = gate.automaton
    rq = [t for t in symbolic_action_transitions(gate) if t.action == "rq" and t.target == Atom(a.reinit("C"))]
    assert [(t.sync, strs(t.init), strs(t.inv), strs(t.inv_next), strs(t.reset)) for t in rq] == [
        (True, ("wq == []",), ("n == 0",), ("n == 0",), ("wq' == wq ++ [id']",))]
    envs = symbolic_env_transitions(gate)
    assert [(strs(t.init), strs(t.inv), t.target) for t in envs] == [
        (("wq == []",), ("n == 0",), Atom(a.reinit("C"))),
        (("false",), ("n <= 1",), Atom(a.reinit("O"))),
    ]
    assert all(t.actions == frozenset({"rq", "go", "out"}) for t in envs)
