"""Seeded random models for property tests and batch verification."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .model import (
    FALSE,
    TAU,
    TRUE,
    Atom,
    Automaton,
    BinOp,
    BoolDomain,
    Cmp,
    DomainSpec,
    Edge,
    IntRange,
    Lit,
    Model,
    Par,
    Sync,
    VarRef,
    conjoin,
    eq,
)


@dataclass(frozen=True)
class GeneratorConfig:
    automata: tuple = (1, 3)  # inclusive ranges
    locations: tuple = (1, 3)
    edges: tuple = (0, 4)
    actions: tuple = ("a", "b")
    x_max: int = 3  # x : int 0..x_max
    y_max: int = 2  # y : int 0..y_max
    with_bool: bool = True
    sync_wrapper_probability: float = 0.3

    def domains(self) -> DomainSpec:
        entries = [("x", IntRange(0, self.x_max)), ("y", IntRange(0, self.y_max))]
        if self.with_bool:
            entries.append(("z", BoolDomain()))
        return DomainSpec(tuple(entries))


def _guard(rng, cfg):
    x, y = VarRef("x"), VarRef("y")
    choices = [
        lambda: eq(x, Lit(rng.randint(0, cfg.x_max))),
        lambda: Cmp(x, "<=", Lit(rng.randint(0, cfg.x_max))),
        lambda: eq(y, Lit(rng.randint(0, cfg.y_max))),
        lambda: Cmp(x, "<=", y),
    ]
    if cfg.with_bool:
        choices.append(lambda: eq(VarRef("z"), Lit(rng.random() < 0.5)))
    return rng.choice(choices)()


def _update(rng, cfg):
    x, y = VarRef("x"), VarRef("y")
    xp, yp = VarRef("x", True), VarRef("y", True)
    choices = [
        lambda: eq(xp, BinOp("+", x, Lit(1))),
        lambda: eq(xp, BinOp("-", x, Lit(1))),
        lambda: eq(xp, Lit(rng.randint(0, cfg.x_max))),
        lambda: eq(yp, Lit(rng.randint(0, cfg.y_max))),
        lambda: Cmp(xp, "<=", y),
        lambda: eq(yp, BinOp("-", Lit(cfg.y_max), y)),
    ]
    if cfg.with_bool:
        z = VarRef("z")
        choices.append(lambda: eq(VarRef("z", True), Lit(rng.random() < 0.5)))
        choices.append(lambda: eq(VarRef("z", True), z))
    return rng.choice(choices)()


def _reset(rng, cfg):
    parts = []
    for _ in range(rng.randint(0, 2)):
        parts.append(_update(rng, cfg) if rng.random() < 0.7 else _guard(rng, cfg))
    return conjoin(parts)


def _init(rng, cfg, first):
    r = rng.random()
    if first:
        return TRUE if r < 0.6 else _guard(rng, cfg)
    return TRUE if r < 0.2 else FALSE if r < 0.7 else _guard(rng, cfg)


def _inv(rng, cfg):
    return TRUE if rng.random() < 0.65 else _guard(rng, cfg)


def random_automaton(rng: random.Random, cfg: GeneratorConfig, name: str,
                     edge_actions=None, sync=None) -> Automaton:
    n_locs = rng.randint(*cfg.locations)
    locs = tuple(f"L{i}" for i in range(n_locs))
    init = tuple(_init(rng, cfg, i == 0) for i in range(n_locs))
    inv = tuple(_inv(rng, cfg) for _ in range(n_locs))
    acts = edge_actions or cfg.actions + (TAU,)
    edges = [
        Edge(rng.choice(locs), rng.choice(acts), _reset(rng, cfg), rng.choice(locs))
        for _ in range(rng.randint(*cfg.edges))
    ]
    # grouped by source so that printing and re-parsing preserves the order
    edges.sort(key=lambda e: locs.index(e.source))
    if sync is None:
        sync = frozenset(a for a in cfg.actions if rng.random() < 0.5)
    return Automaton(name, locs, init, inv, tuple(edges), frozenset(sync))


def _tree(rng, leaves, wrap):
    if len(leaves) == 1:
        node = leaves[0]
    else:
        k = rng.randint(1, len(leaves) - 1)
        node = Par(_tree(rng, leaves[:k], wrap), _tree(rng, leaves[k:], wrap))
    return wrap(node)


def random_model(seed: int, cfg: GeneratorConfig = GeneratorConfig()) -> Model:
    rng = random.Random(seed)
    automata = tuple(random_automaton(rng, cfg, f"A{i}") for i in range(rng.randint(*cfg.automata)))

    def wrap(node):
        if rng.random() < cfg.sync_wrapper_probability:
            acts = frozenset(a for a in cfg.actions if rng.random() < 0.5) or frozenset(cfg.actions[:1])
            return Sync(acts, node)
        return node

    comp = _tree(rng, [Atom(a) for a in automata], wrap)
    return Model(tuple(cfg.actions), cfg.domains(), automata, "Main", comp)


def random_size_model(seed: int, cfg: GeneratorConfig = GeneratorConfig(),
                      sync_action: str = "a", max_edges: int = 6) -> Model:
    """A composition where ``sync_action`` is the only synchronizing action and
    every automaton synchronizes on it (2 to 4 automata, ``max_edges`` edges each)."""
    rng = random.Random(seed)
    others = tuple(a for a in cfg.actions if a != sync_action) + (TAU,)
    shaped = GeneratorConfig(cfg.automata, cfg.locations, (0, max_edges), cfg.actions,
                             cfg.x_max, cfg.y_max, cfg.with_bool)
    automata = tuple(
        random_automaton(rng, shaped, f"A{i}", edge_actions=(sync_action,) + others,
                         sync={sync_action})
        for i in range(rng.randint(2, 4))
    )

    def wrap(node):
        return Sync(frozenset({sync_action}), node) if rng.random() < 0.25 else node

    comp = _tree(rng, [Atom(a) for a in automata], wrap)
    return Model(tuple(cfg.actions), cfg.domains(), automata, "Main", comp)
