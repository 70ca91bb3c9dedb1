"""Bounded-domain checks relating the explicit, symbolic and linear levels.

Every check quantifies over the finite valuation universe of a
:class:`DomainSpec`.  Each check accepts an optional ``hook`` that mutates
one side before comparison; the hooks in this module inject the documented
faults used to show that a check is not vacuous.
"""
from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass, field, replace

from .bisim import refine
from .explicit import VarScope, action_steps, env_steps
from .export import format_term, format_valuation, term_from_json, term_to_json, valuation_to_json, value_from_json
from .linear import LiTS, build_lits, reconstruct_action_transitions, reconstruct_env_transitions
from .linearizer import LinearizationResult, linearize, scope_linearized
from .lts import BudgetExceeded
from .model import (
    Atom,
    Cmp,
    Composition,
    DomainSpec,
    Edge,
    Loc,
    Valuation,
    VarRef,
    compile_predicate,
    conjoin,
    conjuncts,
    primed_names,
    reinit,
)
from .symbolic import build_sts, is_pruned, locsof, symbolic_action_transitions, symbolic_env_transitions

SYMBOLIC = "symbolic-explicit"
LITS = "linear-symbolic"
LINEARIZATION = "linearization"


@dataclass
class CheckReport:
    name: str
    passed: bool
    counterexample: dict = None
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "check": self.name,
            "passed": self.passed,
            "scope": "bounded-domain",
            "stats": dict(self.stats),
            "counterexample": self.counterexample,
        }
        if timing:
            d["seconds"] = round(self.seconds, 3)
        return d

    def to_text(self, timing: bool = False) -> str:
        status = "PASS" if self.passed else "FAIL"
        stats = ", ".join(f"{k}={v}" for k, v in sorted(self.stats.items()))
        line = f"[{status}] {self.name} (bounded-domain; {stats})"
        if timing:
            line += f" in {self.seconds:.2f}s"
        lines = [line]
        if self.counterexample is not None:
            lines.append("  counterexample: " + self.counterexample.get("summary", ""))
        return "\n".join(lines)


@dataclass(frozen=True)
class BisimRelation:
    """A set of term pairs, closed under symmetry on lookup."""

    pairs: frozenset
    candidate: bool  # True: the hand-built witness; False: computed partition

    def __contains__(self, pair) -> bool:
        a, b = pair
        return (a, b) in self.pairs or (b, a) in self.pairs


def _check_budget(count, budget, what):
    if budget is not None and count > budget:
        raise BudgetExceeded(f"more than {budget} {what}")


def _step_json(action=None, sync=None, actions=None, target=None, valuation=None):
    d = {"target": term_to_json(target), "valuation": valuation_to_json(valuation)}
    if actions is None:
        d.update(kind="action", action=action, sync=sync)
    else:
        d.update(kind="env", actions=sorted(actions))
    return d


# -- symbolic vs explicit ------------------------------------------------------------


class _Frames:
    """Groups the universe by the values of all variables outside a given set."""

    def __init__(self, universe):
        self.universe = universe
        self._groups = {}

    def candidates(self, changed: frozenset, sigma):
        groups = self._groups.get(changed)
        if groups is None:
            groups = defaultdict(list)
            for s in self.universe:
                groups[self._key(s, changed)].append(s)
            self._groups[changed] = groups
        return groups.get(self._key(sigma, changed), ())

    @staticmethod
    def _key(sigma, changed):
        return tuple(sorted((k, v) for k, v in sigma.items() if k not in changed))


def _all(preds, pre, post=None):
    return all(compile_predicate(q)(pre, post or {}) for q in preds)


def symbolic_steps(acts, envs, sigma, universe, frames: _Frames):
    """Explicit steps read off symbolic transitions at ``sigma``."""
    out_a, out_e = set(), set()
    for t in acts:
        if not (_all(t.init, sigma) and _all(t.inv, sigma)):
            continue
        changed = frozenset().union(*(primed_names(r) for r in t.reset)) if t.reset else frozenset()
        for post in frames.candidates(changed, sigma):
            if _all(t.inv_next, post) and all(compile_predicate(r)(sigma, post) for r in t.reset):
                out_a.add((t.action, t.sync, t.target, post))
    for t in envs:
        if not (_all(t.init, sigma) and _all(t.inv, sigma)):
            continue
        for post in universe:
            if _all(t.inv, post):
                out_e.add((t.actions, t.target, post))
    return out_a, out_e


def explicit_step_sets(q, sigma, d: DomainSpec):
    acts = {(s.action, s.sync, s.target, s.valuation) for s in action_steps(q, sigma, d)}
    envs = {(s.actions, s.target, s.valuation) for s in env_steps(q, sigma, d)}
    return acts, envs


def _symbolic_side(q, hook):
    acts = [t for t in symbolic_action_transitions(q) if not is_pruned(t)]
    envs = [t for t in symbolic_env_transitions(q) if not is_pruned(t)]
    if hook is not None:
        acts, envs = hook(acts, envs)
    return acts, envs


def _symbolic_diff(q, sigma, d, frames, hook):
    acts, envs = _symbolic_side(q, hook)
    sa, se = symbolic_steps(acts, envs, sigma, d.universe(), frames)
    ea, ee = explicit_step_sets(q, sigma, d)
    if sa == ea and se == ee:
        return None

    def enc(items, kind):
        if kind == "action":
            return [_step_json(action=a, sync=b, target=t, valuation=v)
                    for a, b, t, v in sorted(items, key=repr)]
        return [_step_json(actions=A, target=t, valuation=v) for A, t, v in sorted(items, key=repr)]

    return {
        "onlyExplicit": enc(ea - sa, "action") + enc(ee - se, "env"),
        "onlySymbolic": enc(sa - ea, "action") + enc(se - ee, "env"),
    }


def check_symbolic_soundness_completeness(p: Composition, d: DomainSpec, hook=None,
                                          budget: int = 1_000_000) -> CheckReport:
    """Explicit steps equal the steps read off the symbolic transitions, for
    every state of the pruned STS and every valuation of ``d``."""
    start = time.perf_counter()
    sts = build_sts(p, prune=True)
    universe = d.universe()
    frames = _Frames(universe)
    pairs = 0
    for q in sts.states:
        for sigma in universe:
            pairs += 1
            _check_budget(pairs, budget, "state/valuation pairs")
            diff = _symbolic_diff(q, sigma, d, frames, hook)
            if diff is not None:
                cex = {
                    "check": SYMBOLIC, "state": term_to_json(q), "valuation": valuation_to_json(sigma),
                    "summary": f"{format_term(q)} at {format_valuation(sigma)}: "
                               f"{len(diff['onlyExplicit'])} explicit-only, {len(diff['onlySymbolic'])} symbolic-only steps",
                    **diff,
                }
                return CheckReport(SYMBOLIC, False, cex, {"states": sts.state_count, "pairs": pairs},
                                   time.perf_counter() - start)
    return CheckReport(SYMBOLIC, True, None, {"states": sts.state_count, "pairs": pairs,
                                              "valuations": len(universe)}, time.perf_counter() - start)


def replace_conjunct(old, new):
    """Symbolic-side hook replacing the invariant conjunct ``old`` by ``new``."""

    def swap(parts):
        return tuple(new if c == old else c for c in parts)

    def hook(acts, envs):
        return ([replace(t, inv=swap(t.inv), inv_next=swap(t.inv_next)) for t in acts],
                [replace(t, inv=swap(t.inv)) for t in envs])

    return hook


# -- linear vs symbolic ------------------------------------------------------------------


def _lits_diff(q, hook):
    lits = build_lits(q)
    if hook is not None:
        lits = hook(lits)
    rec_a = {t for t in reconstruct_action_transitions(q, lits) if not is_pruned(t)}
    rec_e = {t for t in reconstruct_env_transitions(q, lits) if not is_pruned(t)}
    sym_a = {t for t in symbolic_action_transitions(q) if not is_pruned(t)}
    sym_e = {t for t in symbolic_env_transitions(q) if not is_pruned(t)}
    if rec_a == sym_a and rec_e == sym_e:
        return None

    def enc(items):
        out = []
        for t in sorted(items, key=repr):
            d = {"target": term_to_json(t.target), "init": [str(c) for c in t.init], "inv": [str(c) for c in t.inv]}
            if hasattr(t, "action"):
                d.update(kind="action", action=t.action, sync=t.sync, reset=[str(c) for c in t.reset])
            else:
                d.update(kind="env", actions=sorted(t.actions))
            out.append(d)
        return out

    return {"onlyLinear": enc((rec_a - sym_a) | (rec_e - sym_e)),
            "onlySymbolic": enc((sym_a - rec_a) | (sym_e - rec_e))}


def check_lits_soundness_completeness(p: Composition, hook=None, budget: int = 100_000) -> CheckReport:
    """Symbolic transitions rebuilt from the LiTS equal those of the symbolic
    rules, for every state of the pruned STS (pruning applied on both sides)."""
    start = time.perf_counter()
    sts = build_sts(p, prune=True)
    _check_budget(sts.state_count, budget, "STS states")
    for q in sts.states:
        diff = _lits_diff(q, hook)
        if diff is not None:
            cex = {
                "check": LITS, "state": term_to_json(q),
                "summary": f"{format_term(q)}: {len(diff['onlyLinear'])} linear-only, "
                           f"{len(diff['onlySymbolic'])} symbolic-only transitions",
                **diff,
            }
            return CheckReport(LITS, False, cex, {"states": sts.state_count}, time.perf_counter() - start)
    n = len(build_lits(p).transitions)
    return CheckReport(LITS, True, None, {"states": sts.state_count, "lits_transitions": n},
                       time.perf_counter() - start)


def drop_lits_transition(index: int = 0):
    """LiTS hook removing the ``index``-th action transition."""

    def hook(lits: LiTS) -> LiTS:
        ts = lits.transitions
        return LiTS(lits.composition, lits.static, ts[:index] + ts[index + 1:])

    return hook


# -- linearization correctness -------------------------------------------------------


def _all_steps(t, sigma, d, cache=None):
    if cache is not None:
        hit = cache.get((t, sigma))
        if hit is not None:
            return hit
    out = [(("act", sigma, s.action, s.sync, s.valuation), s.target) for s in action_steps(t, sigma, d)]
    out += [(("env", sigma, s.actions, s.valuation), s.target) for s in env_steps(t, sigma, d)]
    if cache is not None:
        cache[(t, sigma)] = out
    return out


def _term_graph(roots, d: DomainSpec, budget, cache=None):
    """Terms reachable from ``roots`` under any valuation, with labels
    ``(σ, a, b, σ')`` and ``(σ, A, σ')``."""
    universe = d.universe()
    states = list(dict.fromkeys(roots))
    seen = set(states)
    transitions = []
    head = 0
    while head < len(states):
        t = states[head]
        head += 1
        for sigma in universe:
            for label, target in _all_steps(t, sigma, d, cache):
                transitions.append((t, label, target))
                if target not in seen:
                    seen.add(target)
                    states.append(target)
                    _check_budget(len(states), budget, "terms")
    return states, transitions


def _distinguishing_trace(a, b, transitions, history):
    """Alternating moves showing ``a`` and ``b`` apart; the last move of the
    trace cannot be answered at all by the other term."""
    succ = defaultdict(list)
    for s, label, t in transitions:
        succ[s].append((label, t))
    trace = []
    k = next(i for i in range(len(history)) if history[i][a] != history[i][b])
    while k > 0:
        prev = history[k - 1]
        found = None
        for s, other in ((a, b), (b, a)):
            moves = {(lab, prev[t]) for lab, t in succ[other]}
            for lab, t in succ[s]:
                if (lab, prev[t]) not in moves:
                    found = (s, other, lab, t)
                    break
            if found:
                break
        s, other, lab, t = found
        answers = [u for l2, u in succ[other] if l2 == lab]
        trace.append((s, other, lab, t, answers))
        if not answers:
            break
        a, b = t, answers[0]
        k = next(i for i in range(len(history)) if history[i][a] != history[i][b])
    return trace


def _label_json(label):
    if label[0] == "act":
        _, sigma, a, sync, post = label
        return {"kind": "action", "valuation": valuation_to_json(sigma), "action": a, "sync": sync,
                "post": valuation_to_json(post)}
    _, sigma, acts, post = label
    return {"kind": "env", "valuation": valuation_to_json(sigma), "actions": sorted(acts),
            "post": valuation_to_json(post)}


def _label_from_json(obj):
    sigma = Valuation({k: value_from_json(v) for k, v in obj["valuation"].items()})
    post = Valuation({k: value_from_json(v) for k, v in obj["post"].items()})
    if obj["kind"] == "action":
        return ("act", sigma, obj["action"], obj["sync"], post)
    return ("env", sigma, frozenset(obj["actions"]), post)


def candidate_relation(p: Composition, res: LinearizationResult) -> BisimRelation:
    """The witness candidate: the roots, plus every reinitialized composition
    paired with the scope binding its location vector around ``α[X]``."""
    lin = scope_linearized(res)
    body = Atom(res.automaton.reinit(res.location))
    pairs = {(p, lin)}
    for ls in locsof(p):
        binding = tuple((ptr, Loc(v)) for ptr, v in zip(res.pointers, ls))
        pairs.add((reinit(p, ls), VarScope(binding, body, res.pointer_domains)))
    return BisimRelation(frozenset(pairs), candidate=True)


def check_transfer(rel: BisimRelation, d: DomainSpec, budget: int = 10_000_000, cache=None):
    """Transfer conditions of ``rel`` over the universe of ``d``.

    Returns ``None`` or a counterexample dict.
    """
    checked = 0
    for left, right in sorted(rel.pairs, key=repr):
        for sigma in d.universe():
            checked += 1
            _check_budget(checked, budget, "pair/valuation checks")
            sides = (_all_steps(left, sigma, d, cache), _all_steps(right, sigma, d, cache))
            for (s, other), (mine, theirs) in (((left, right), sides), ((right, left), sides[::-1])):
                answers = defaultdict(list)
                for lab, t in theirs:
                    answers[lab].append(t)
                for lab, t in mine:
                    if not any((t, u) in rel for u in answers[lab]):
                        return {
                            "term": term_to_json(s), "other": term_to_json(other),
                            "label": _label_json(lab), "target": term_to_json(t),
                            "answers": [term_to_json(u) for u in answers[lab]],
                            "summary": f"{format_term(s)} --{_label_summary(lab)}--> {format_term(t)} "
                                       f"not matched within R by {format_term(other)}",
                        }
    return None


def _label_summary(lab):
    if lab[0] == "act":
        return f"{format_valuation(lab[1])}, {lab[2]}, b={str(lab[3]).lower()}, {format_valuation(lab[4])}"
    return f"{format_valuation(lab[1])}, {{{', '.join(sorted(lab[2]))}}}, {format_valuation(lab[3])}"


def check_correctness_of_linearization(p: Composition, d: DomainSpec, hook=None,
                                       budget: int = 200_000) -> CheckReport:
    """Stateless bisimilarity of ``p`` and its scoped linearization.

    Computes the coarsest bisimulation of the combined term graph and
    independently checks the transfer conditions of the witness candidate.
    The check passes only if both succeed.
    """
    start = time.perf_counter()
    res = linearize(p, declared=d.names)
    if hook is not None:
        res = hook(res)
    lin = scope_linearized(res)
    cache = {}
    states, transitions = _term_graph([p, lin], d, budget, cache)
    block, history = refine(states, transitions)
    related = block[p] == block[lin]
    rel = candidate_relation(p, res)
    transfer = check_transfer(rel, d, cache=cache)
    stats = {"terms": len(states), "transitions": len(transitions), "classes": len(set(block.values())),
             "candidate_pairs": len(rel.pairs), "valuations": len(d.universe()),
             "bisimulation": "stateless", "roots_related": related, "candidate_ok": transfer is None}
    cex = None
    if not related:
        trace = _distinguishing_trace(p, lin, transitions, history)
        cex = {
            "check": LINEARIZATION,
            "kind": "partition",
            "roots": [term_to_json(p), term_to_json(lin)],
            "trace": [
                {"term": term_to_json(s), "other": term_to_json(o), "label": _label_json(lab),
                 "target": term_to_json(t), "answers": [term_to_json(u) for u in ans]}
                for s, o, lab, t, ans in trace
            ],
            "summary": "; ".join(
                f"{format_term(s)} --{_label_summary(lab)}--> {format_term(t)} "
                f"({len(ans)} answers from {format_term(o)})"
                for s, o, lab, t, ans in trace),
        }
    elif transfer is not None:
        cex = {"check": LINEARIZATION, "kind": "candidate", **transfer}
    return CheckReport(LINEARIZATION, cex is None, cex, stats, time.perf_counter() - start)


def _pointer_update(e: Edge, ptrs) -> int:
    """Index of a conjunct ``ℓ' = w`` whose pointer is tested for a different value."""
    parts = conjuncts(e.reset)

    def ptr_cmp(c, primed):
        return (isinstance(c, Cmp) and isinstance(c.lhs, VarRef) and c.lhs.primed == primed
                and c.lhs.name in ptrs)

    tests = {c.lhs.name: c.rhs for c in parts if ptr_cmp(c, False)}
    for i, c in enumerate(parts):
        if ptr_cmp(c, True) and tests.get(c.lhs.name) != c.rhs:
            return i
    return None


def drop_pointer_update(edge_index: int = None):
    """Linearization hook deleting one pointer-update conjunct ``ℓ' = w``.

    Without an index, the first edge whose pointer actually moves is used.
    """

    def hook(res: LinearizationResult) -> LinearizationResult:
        a = res.automaton
        edges = list(a.edges)
        for k, e in enumerate(edges):
            if edge_index is not None and k != edge_index:
                continue
            i = _pointer_update(e, set(res.pointers))
            if i is not None:
                parts = conjuncts(e.reset)
                edges[k] = Edge(e.source, e.action, conjoin(parts[:i] + parts[i + 1:]), e.target)
                break
        automaton = type(a)(a.name, a.locations, a.init, a.inv, tuple(edges), a.sync)
        return LinearizationResult(automaton, res.pointers, res.pointer_domains)

    return hook


# -- replay ---------------------------------------------------------------------------------


def replay(cex: dict, p: Composition, d: DomainSpec, hook=None) -> bool:
    """Re-examine a counterexample; ``True`` if it still exhibits the failure.

    ``hook`` must be the same mutation that produced the counterexample.
    """
    kind = cex.get("check")
    if kind == SYMBOLIC:
        q = term_from_json(cex["state"], p)
        sigma = Valuation({k: value_from_json(v) for k, v in cex["valuation"].items()})
        return _symbolic_diff(q, sigma, d, _Frames(d.universe()), hook) is not None
    if kind == LITS:
        return _lits_diff(term_from_json(cex["state"], p), hook) is not None
    if kind == LINEARIZATION:
        res = linearize(p, declared=d.names)
        if hook is not None:
            res = hook(res)
        lin_body = Atom(res.automaton)
        x_body = Atom(res.automaton.reinit(res.location))

        def decode(obj):
            if "scope" in obj:
                body = x_body if obj["body"]["locations"] is not None else lin_body
                binding = tuple((n, None if v is None else Loc(v)) for n, v in obj["scope"].items())
                return VarScope(binding, body, res.pointer_domains)
            return term_from_json(obj, p)

        moves = cex["trace"] if cex.get("kind") == "partition" else [cex]
        for move in moves:
            s, o, t = decode(move["term"]), decode(move["other"]), decode(move["target"])
            lab = _label_from_json(move["label"])
            sigma = lab[1]
            mine = dict.fromkeys(_all_steps(s, sigma, d))
            if (lab, t) not in mine:
                return False
            answers = {u for l2, u in _all_steps(o, sigma, d) if l2 == lab}
            if answers != {decode(u) for u in move["answers"]}:
                return False
            if cex.get("kind") == "candidate":
                rel = candidate_relation(p, res)
                return not any((t, u) in rel for u in answers)
        return not answers
    raise ValueError(f"unknown counterexample kind: {kind!r}")


def format_steps(t, sigma, d: DomainSpec) -> str:
    """Human-readable list of the explicit steps of ``(t, σ)``."""
    lines = [f"{format_term(t)} at {format_valuation(sigma)}:"]
    for s in action_steps(t, sigma, d):
        lines.append(f"  --{s.action}, b={str(s.sync).lower()}--> {format_term(s.target)} {format_valuation(s.valuation)}")
    for s in env_steps(t, sigma, d):
        lines.append(f"  ~~{{{', '.join(sorted(s.actions))}}}~~> {format_term(s.target)} {format_valuation(s.valuation)}")
    return "\n".join(lines)


def run_all(p: Composition, d: DomainSpec, budget: int = None) -> list:
    kw = {} if budget is None else {"budget": budget}
    return [
        check_symbolic_soundness_completeness(p, d, **kw),
        check_lits_soundness_completeness(p, **kw),
        check_correctness_of_linearization(p, d, **kw),
    ]
