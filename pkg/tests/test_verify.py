import json

import pytest
from hypothesis import given, settings, strategies as st

from ciflin.generate import random_model
from ciflin.linearizer import linearize
from ciflin.lts import BudgetExceeded
from ciflin.model import Atom, Cmp, Lit, VarRef
from ciflin.verify import (
    BisimRelation,
    CheckReport,
    check_correctness_of_linearization,
    check_lits_soundness_completeness,
    check_symbolic_soundness_completeness,
    check_transfer,
    drop_lits_transition,
    drop_pointer_update,
    candidate_relation,
    replace_conjunct,
    replay,
)

GATE_FAULT = replace_conjunct(Cmp(VarRef("n"), "==", Lit(0)), Cmp(VarRef("n"), "==", Lit(1)))


@pytest.mark.parametrize("name", ["Gate", "Train0"])
def test_checks_pass_on_single_automata(traingate, name):
    p, d = Atom(traingate.automaton(name)), traingate.domains
    assert check_symbolic_soundness_completeness(p, d).passed
    assert check_lits_soundness_completeness(p).passed
    assert check_correctness_of_linearization(p, d).passed


def test_symbolic_fault_on_gate(gate, traingate):
    d = traingate.domains
    r = check_symbolic_soundness_completeness(gate, d, hook=GATE_FAULT)
    assert not r.passed
    assert r.counterexample["onlyExplicit"] or r.counterexample["onlySymbolic"]
    assert replay(r.counterexample, gate, d, GATE_FAULT)
    assert not replay(r.counterexample, gate, d)


def test_lits_fault(tg, traingate):
    hook = drop_lits_transition(3)
    r = check_lits_soundness_completeness(tg, hook=hook)
    assert not r.passed
    assert replay(r.counterexample, tg, traingate.domains, hook)
    assert not replay(r.counterexample, tg, traingate.domains)


def test_linearization_fault_on_gate(gate, traingate):
    d = traingate.domains
    hook = drop_pointer_update()
    r = check_correctness_of_linearization(gate, d, hook=hook)
    assert not r.passed
    cex = r.counterexample
    assert cex["kind"] == "partition" and cex["trace"]
    assert cex["trace"][-1]["answers"] == []
    assert replay(cex, gate, d, hook)
    assert not replay(cex, gate, d)


def test_pointer_fault_really_changes_an_edge(tg, traingate):
    res = linearize(tg, declared=traingate.domains.names)
    mutated = drop_pointer_update()(res)
    diff = [(a, b) for a, b in zip(res.automaton.edges, mutated.automaton.edges) if a != b]
    assert len(diff) == 1


def test_report_serialization(gate, traingate):
    r = check_lits_soundness_completeness(gate)
    d = r.to_dict()
    assert d["passed"] and d["scope"] == "bounded-domain"
    assert "seconds" not in d and "seconds" in r.to_dict(timing=True)
    json.dumps(d)
    assert r.to_text().startswith("[PASS] linear-symbolic")
    failing = check_symbolic_soundness_completeness(gate, traingate.domains, hook=GATE_FAULT)
    text = failing.to_text()
    assert "[FAIL]" in text and "counterexample" in text
    json.dumps(failing.to_dict())


def test_candidate_relation_shape(tg, traingate):
    res = linearize(tg, declared=traingate.domains.names)
    rel = candidate_relation(tg, res)
    assert rel.candidate and len(rel.pairs) == 33
    a, b = next(iter(rel.pairs))
    assert (b, a) in rel


def test_transfer_detects_a_bad_relation(gate, traingate):
    d = traingate.domains
    res = linearize(gate, declared=d.names)
    good = candidate_relation(gate, res)
    assert check_transfer(good, d) is None
    bad = BisimRelation(frozenset(p for p in good.pairs if p[0] == gate), candidate=True)
    assert check_transfer(bad, d) is not None


def test_budget(tg, traingate):
    with pytest.raises(BudgetExceeded):
        check_symbolic_soundness_completeness(tg, traingate.domains, budget=10)
    with pytest.raises(BudgetExceeded):
        check_correctness_of_linearization(tg, traingate.domains, budget=3)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 100_000))
def test_partition_and_candidate_agree(seed):
    m = random_model(seed)
    r = check_correctness_of_linearization(m.main, m.domains)
    assert r.stats["roots_related"] == r.stats["candidate_ok"]


def test_checkreport_defaults():
    r = CheckReport("x", True)
    assert r.counterexample is None and r.stats == {}
