"""JSON, DOT and text renderings of the artifacts built by the toolkit.

All output is deterministic: lists keep construction order, sets are sorted
and JSON keys are emitted sorted.
"""
from __future__ import annotations

import json

from .dsl import print_model, print_predicate
from .explicit import VarScope
from .linear import WILDCARD, LiTS
from .linearizer import LinearizationResult
from .model import (
    Atom,
    Composition,
    Loc,
    Model,
    automata_of,
    current_locations,
    reinit,
)
from .symbolic import STS


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- values and terms -----------------------------------------------------------


def value_to_json(v):
    if isinstance(v, Loc):
        return "@" + v.name
    if isinstance(v, tuple):
        return [value_to_json(x) for x in v]
    return v


def value_from_json(v):
    if isinstance(v, str) and v.startswith("@"):
        return Loc(v[1:])
    if isinstance(v, list):
        return tuple(value_from_json(x) for x in v)
    return v


def valuation_to_json(sigma) -> dict:
    return {k: value_to_json(v) for k, v in sorted(sigma.items())}


def format_valuation(sigma) -> str:
    return "{" + ", ".join(f"{k}={_show(v)}" for k, v in sorted(sigma.items())) + "}"


def _show(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Loc):
        return "@" + v.name
    if isinstance(v, tuple):
        return "[" + ", ".join(_show(x) for x in v) + "]"
    return str(v)


def term_to_json(t):
    """Compositions are encoded by their reinitialized location vector
    (``null`` for the original term); scopes carry their binding."""
    if isinstance(t, VarScope):
        return {
            "scope": {n: (None if v is None else v.name) for n, v in t.binding},
            "body": term_to_json(t.body),
        }
    locs = current_locations(t)
    return {"locations": None if locs is None else list(locs)}


def term_from_json(obj, p: Composition, scope_domains=()):
    """Inverse of :func:`term_to_json` relative to the original term ``p``.

    Inside a scope, ``p`` should be the scoped body (the linear automaton).
    """
    if "scope" in obj:
        binding = tuple((n, None if v is None else Loc(v)) for n, v in obj["scope"].items())
        return VarScope(binding, term_from_json(obj["body"], p), tuple(scope_domains))
    locs = obj["locations"]
    return p if locs is None else reinit(p, locs)


def format_term(t) -> str:
    if isinstance(t, VarScope):
        inner = ", ".join(f"{n}↦{'⊥' if v is None else v.name}" for n, v in t.binding)
        return f"|[{{{inner}}} :: {format_term(t.body)}]|"
    locs = current_locations(t)
    if locs is None:
        name = automata_of(t)[0].name if isinstance(t, Atom) else "p"
        return name
    return "⟨" + ",".join(locs) + "⟩"


def _preds(parts) -> list:
    return [print_predicate(q) for q in parts]


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


# -- symbolic transition systems --------------------------------------------------


def sts_to_json(sts: STS) -> dict:
    index = {s: i for i, s in enumerate(sts.states)}
    return {
        "stateCount": sts.state_count,
        "root": 0,
        "states": [{"id": i, **term_to_json(s)} for i, s in enumerate(sts.states)],
        "actionTransitions": [
            {
                "source": index[t.source], "target": index[t.target], "action": t.action,
                "sync": t.sync, "init": _preds(t.init), "inv": _preds(t.inv),
                "invNext": _preds(t.inv_next), "reset": _preds(t.reset),
            }
            for t in sts.action_transitions
        ],
        "envTransitions": [
            {
                "source": index[t.source], "target": index[t.target],
                "actions": sorted(t.actions), "init": _preds(t.init), "inv": _preds(t.inv),
            }
            for t in sts.env_transitions
        ],
    }


def _conj(parts) -> str:
    return " ∧ ".join(_preds(parts)) if parts else "true"


def sts_to_dot(sts: STS) -> str:
    """Action transitions are solid, environment transitions dashed."""
    index = {s: i for i, s in enumerate(sts.states)}
    lines = ["digraph sts {", "  node [shape=box];"]
    for s, i in index.items():
        lines.append(f'  s{i} [label="{_dot_escape(format_term(s))}"];')
    for t in sts.action_transitions:
        label = (f"{t.action}, b={str(t.sync).lower()}\nu: {_conj(t.init)}\nn: {_conj(t.inv)}"
                 f"\nn': {_conj(t.inv_next)}\nr: {_conj(t.reset)}")
        lines.append(f'  s{index[t.source]} -> s{index[t.target]} [label="{_dot_escape(label)}"];')
    for t in sts.env_transitions:
        label = f"{{{', '.join(sorted(t.actions))}}}\nu: {_conj(t.init)}\nn: {_conj(t.inv)}"
        lines.append(
            f'  s{index[t.source]} -> s{index[t.target]} [style=dashed, label="{_dot_escape(label)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def sts_to_text(sts: STS) -> str:
    index = {s: i for i, s in enumerate(sts.states)}
    out = [f"states: {sts.state_count}"]
    for s, i in index.items():
        out.append(f"  s{i} {format_term(s)}")
    out.append(f"action transitions: {len(sts.action_transitions)}")
    for t in sts.action_transitions:
        out.append(f"  s{index[t.source]} --{t.action}, b={str(t.sync).lower()}--> s{index[t.target]}"
                   f"  u: {_conj(t.init)}; n: {_conj(t.inv)}; n': {_conj(t.inv_next)}; r: {_conj(t.reset)}")
    out.append(f"environment transitions: {len(sts.env_transitions)}")
    for t in sts.env_transitions:
        out.append(f"  s{index[t.source]} ~~{{{', '.join(sorted(t.actions))}}}~~> s{index[t.target]}"
                   f"  u: {_conj(t.init)}; n: {_conj(t.inv)}")
    return "\n".join(out) + "\n"


# -- linear transition systems ---------------------------------------------------


def _vec(v) -> list:
    return ["_" if x is WILDCARD else x for x in v]


def lits_to_json(lits: LiTS) -> dict:
    st = lits.static
    automata = automata_of(lits.composition)
    return {
        "automata": [a.name for a in automata],
        "sync": sorted(st.sync),
        "inits": [{v: print_predicate(f[v]) for v in a.locations} for a, f in zip(automata, st.inits)],
        "invs": [{v: print_predicate(g[v]) for v in a.locations} for a, g in zip(automata, st.invs)],
        "wildcards": _vec(st.wildcards),
        "transitionCount": len(lits.transitions),
        "transitions": [
            {"source": _vec(t.source), "action": t.action, "reset": _preds(t.reset), "target": _vec(t.target)}
            for t in lits.transitions
        ],
    }


def lits_to_text(lits: LiTS) -> str:
    st = lits.static
    out = [f"sync: {{{', '.join(sorted(st.sync))}}}", f"transitions: {len(lits.transitions)}"]
    for t in lits.transitions:
        out.append(f"  ⟨{','.join(_vec(t.source))}⟩ --{t.action}: {_conj(t.reset)}--> ⟨{','.join(_vec(t.target))}⟩")
    return "\n".join(out) + "\n"


def lits_to_dot(lits: LiTS) -> str:
    states = []
    for t in lits.transitions:
        for v in (t.source, t.target):
            key = ",".join(_vec(v))
            if key not in states:
                states.append(key)
    lines = ["digraph lits {", "  node [shape=box];"]
    for i, s in enumerate(states):
        lines.append(f'  v{i} [label="⟨{_dot_escape(s)}⟩"];')
    for t in lits.transitions:
        i, j = states.index(",".join(_vec(t.source))), states.index(",".join(_vec(t.target)))
        lines.append(f'  v{i} -> v{j} [label="{_dot_escape(t.action + ": " + _conj(t.reset))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- linearization results ----------------------------------------------------------


def linear_model(m: Model, res: LinearizationResult) -> Model:
    """A stand-alone model holding the linear automaton and its pointer domains."""
    return Model(
        actions=m.actions,
        domains=m.domains.extend(res.pointer_domains),
        automata=(res.automaton,),
        composition_name=m.composition_name or "Main",
        composition=Atom(res.automaton),
    )


def linear_to_dsl(m: Model, res: LinearizationResult) -> str:
    return print_model(linear_model(m, res))


def linear_to_json(m: Model, res: LinearizationResult) -> dict:
    a = res.automaton
    sources = automata_of(m.main)
    return {
        "automaton": a.name,
        "location": res.location,
        "sync": sorted(a.sync),
        "pointers": [
            {"name": ptr, "automaton": src.name, "locations": list(dom.locations)}
            for (ptr, dom), src in zip(res.pointer_domains, sources)
        ],
        "init": print_predicate(a.init[0]),
        "inv": print_predicate(a.inv[0]),
        "edges": [{"action": e.action, "reset": print_predicate(e.reset)} for e in a.edges],
    }


def linear_to_dot(res: LinearizationResult) -> str:
    a = res.automaton
    x = res.location
    lines = [
        "digraph linear {",
        f'  {x} [shape=circle, label="{_dot_escape(x)}"];',
        '  init [shape=point];',
        f'  init -> {x} [label="{_dot_escape(print_predicate(a.init[0]))}"];',
    ]
    for e in a.edges:
        lines.append(f'  {x} -> {x} [label="{_dot_escape(e.action + ": " + print_predicate(e.reset))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- explicit transition systems -------------------------------------------------------


def _label_to_json(label):
    if label[0] == "action":
        return {"kind": "action", "action": label[1], "sync": label[2]}
    return {"kind": "env", "actions": list(label[1])}


def _label_str(label) -> str:
    if label[0] == "action":
        return f"{label[1]}, b={str(label[2]).lower()}"
    return "env {" + ", ".join(label[1]) + "}"


def explicit_to_json(ts) -> dict:
    return {
        "stateCount": len(ts.states),
        "initial": list(ts.initial),
        "states": [
            {"id": i, "term": term_to_json(t), "valuation": valuation_to_json(s)}
            for i, (t, s) in enumerate(ts.states)
        ],
        "transitions": [
            {"source": i, "target": j, **_label_to_json(label)} for i, label, j in ts.transitions
        ],
    }


def explicit_to_text(ts) -> str:
    out = [f"states: {len(ts.states)}", f"transitions: {len(ts.transitions)}"]
    for i, (t, s) in enumerate(ts.states):
        mark = " (initial)" if i in ts.initial else ""
        out.append(f"  s{i} {format_term(t)} {format_valuation(s)}{mark}")
    for i, label, j in ts.transitions:
        out.append(f"  s{i} --{_label_str(label)}--> s{j}")
    return "\n".join(out) + "\n"


def explicit_to_dot(ts) -> str:
    lines = ["digraph explicit {", "  node [shape=box];"]
    for i, (t, s) in enumerate(ts.states):
        extra = ", peripheries=2" if i in ts.initial else ""
        lines.append(f'  s{i} [label="{_dot_escape(format_term(t) + chr(10) + format_valuation(s))}"{extra}];')
    for i, label, j in ts.transitions:
        style = "" if label[0] == "action" else ", style=dashed"
        lines.append(f'  s{i} -> s{j} [label="{_dot_escape(_label_str(label))}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"

