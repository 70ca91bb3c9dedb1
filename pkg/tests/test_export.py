import json

from hypothesis import given, strategies as st

from ciflin.export import (
    explicit_to_json,
    format_term,
    lits_to_dot,
    lits_to_json,
    sts_to_json,
    term_from_json,
    term_to_json,
    value_from_json,
    value_to_json,
)
from ciflin.explicit import explicit_lts
from ciflin.linear import build_lits
from ciflin.linearizer import linearize, scope_linearized
from ciflin.model import Loc, Valuation, reinit
from ciflin.symbolic import build_sts, locsof

values = st.recursive(
    st.one_of(st.integers(-5, 5), st.booleans(), st.sampled_from("ABC").map(Loc)),
    lambda inner: st.lists(inner, max_size=3).map(tuple),
    max_leaves=8,
)


@given(values)
def test_value_json_roundtrip(v):
    assert value_from_json(json.loads(json.dumps(value_to_json(v)))) == v


def test_term_json_roundtrip(tg, traingate):
    assert term_from_json(term_to_json(tg), tg) == tg
    for ls in locsof(tg):
        q = reinit(tg, ls)
        assert term_from_json(term_to_json(q), tg) == q
    res = linearize(tg, declared=traingate.domains.names)
    s = scope_linearized(res)
    assert term_from_json(term_to_json(s), s.body, res.pointer_domains) == s
    assert format_term(s) == "|[{l0↦⊥, l1↦⊥, l2↦⊥} :: Linear]|"
    assert format_term(reinit(tg, ("F", "N", "O"))) == "⟨F,N,O⟩"


def test_sts_json(tg):
    d = sts_to_json(build_sts(tg))
    assert d["stateCount"] == len(d["states"]) == 16
    assert d["states"][0]["locations"] is None
    t = d["actionTransitions"][0]
    assert set(t) == {"source", "target", "action", "sync", "init", "inv", "invNext", "reset"}


def test_lits_json_renders_wildcards(tg):
    d = lits_to_json(build_lits(tg))
    assert d["transitionCount"] == 12
    assert d["transitions"][0]["source"] == ["N", "_", "_"]
    assert d["wildcards"] == ["_", "_", "_"]
    assert d["inits"][2] == {"C": "wq == []", "O": "false"}
    assert lits_to_dot(build_lits(tg)).count("->") == 12


def test_explicit_json(tg, traingate):
    ts = explicit_lts(tg, [Valuation({"n": 0, "wq": (), "id": 0, "p": 0})], traingate.domains)
    d = explicit_to_json(ts)
    assert d["states"][0]["valuation"] == {"id": 0, "n": 0, "p": 0, "wq": []}
    assert {t["kind"] for t in d["transitions"]} == {"action", "env"}
