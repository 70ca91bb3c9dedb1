import pytest
from hypothesis import given, settings, strategies as st

from ciflin.dsl import ParseError, parse_model, print_model, print_predicate
from ciflin.generate import random_model, random_size_model
from ciflin.model import ListDomain, LocDomain, Par, Sync, TRUE, FALSE

from conftest import TRAINGATE


def test_traingate_structure(traingate):
    assert traingate.actions == ("rq", "go", "out", "stop")
    assert [a.name for a in traingate.automata] == ["Train0", "Train1", "Gate"]
    gate = traingate.automaton("Gate")
    assert gate.sync == frozenset({"rq", "go", "out"})
    assert print_predicate(gate.init_of("C")) == "wq == []"
    assert gate.init_of("O") == FALSE
    assert print_predicate(gate.inv_of("O")) == "n <= 1"
    assert isinstance(traingate.domains["wq"], ListDomain)
    p = traingate.main
    assert isinstance(p, Par) and isinstance(p.left, Sync)
    assert p.left.actions == frozenset({"rq", "go", "out"})
    assert traingate.automaton("Train0").init_of("F") == TRUE


def test_roundtrip_traingate(traingate):
    text = print_model(traingate)
    assert parse_model(text) == traingate
    assert print_model(parse_model(text)) == text


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_roundtrip_random_models(seed):
    for m in (random_model(seed), random_size_model(seed)):
        assert parse_model(print_model(m)) == m


def test_location_pointer_domains_parse():
    m = parse_model("""
        domain l : loc {A, B};
        actions a;
        automaton M { location A { initial when l == @A; edge a when l' == @B goto A; } }
    """)
    assert m.domains["l"] == LocDomain(("A", "B"))
    assert m.composition is None
    with pytest.raises(ValueError):
        m.main


def test_comments_and_precedence():
    m = parse_model("""
        // comment
        domain x : int 0..3;  # another
        actions a;
        automaton M { location A { initial when x == 0 or x == 1 and x <= 2; } }
    """)
    assert print_predicate(m.automata[0].init[0]) == "x == 0 or x == 1 and x <= 2"


@pytest.mark.parametrize("src, fragment", [
    ("domain x : int 0..1; domain x : bool;", "duplicate domain"),
    ("actions a, a;", "duplicate action"),
    ("actions tau;", "tau is reserved"),
    ("actions a; automaton M { sync b; location A { initial; } }", "undeclared action"),
    ("actions a; automaton M { sync tau; location A { initial; } }", "tau cannot"),
    ("automaton M { location A { initial when x == 0; } }", "undeclared variable"),
    ("domain x : int 0..1; automaton M { location A { invariant x' == 0; } }", "primed variable"),
    ("domain x : int 0..1; automaton M { location A { initial when x == true; } }", ""),
    ("automaton M { location A { edge tau goto B; } }", "unknown location B"),
    ("automaton M { location A { } location A { } }", "duplicate location"),
    ("automaton M { location A { } } composition C = M || M;", "used twice"),
    ("automaton M { location A { } } composition C = N;", "undeclared automaton"),
    ("domain x : loc {A}; automaton M { location A { initial when x == @Q; } }", "unknown location literal"),
    ("automaton M { location A { initial; initial; } }", "duplicate initial"),
])
def test_static_errors(src, fragment):
    with pytest.raises(ParseError) as info:
        parse_model(src)
    assert fragment in info.value.message


def test_error_positions():
    with pytest.raises(ParseError) as info:
        parse_model("actions a;\nautomaton M {\n  location A { edge b goto A; }\n}")
    assert (info.value.line, info.value.column) == (3, 21)


def test_model_file_parses():
    m = parse_model(TRAINGATE.read_text())
    assert m.composition_name == "Main"
    assert m.domains.size() == 3 * 7 * 2 * 2
