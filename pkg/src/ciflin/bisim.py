"""Coarsest strong bisimulation by iterated signature refinement."""
from __future__ import annotations

from collections import defaultdict


def refine(states, transitions):
    """Partition ``states`` into bisimulation classes.

    ``transitions`` is an iterable of ``(source, label, target)`` with
    hashable states and labels.  Returns ``(block, history)`` where
    ``block`` maps every state to a class id and ``history`` holds the
    block map of every refinement round, starting with the trivial one.
    """
    states = list(states)
    index = {s: i for i, s in enumerate(states)}
    labels = {}
    succ = defaultdict(list)
    for s, label, t in transitions:
        lab = labels.setdefault(label, len(labels))
        succ[index[s]].append((lab, index[t]))

    block = [0] * len(states)
    history = [list(block)]
    count = 1 if states else 0
    while True:
        signatures = {}
        new_block = []
        for i in range(len(states)):
            sig = (block[i], frozenset((lab, block[j]) for lab, j in succ[i]))
            new_block.append(signatures.setdefault(sig, len(signatures)))
        block = new_block
        history.append(list(block))
        if len(signatures) == count:
            break
        count = len(signatures)
    return {s: block[i] for i, s in enumerate(states)}, [
        {s: h[i] for i, s in enumerate(states)} for h in history
    ]


def partition(block: dict) -> set:
    """The classes of a block map, as a set of frozensets."""
    groups = defaultdict(set)
    for s, b in block.items():
        groups[b].add(s)
    return {frozenset(g) for g in groups.values()}


def distinguishing_step(a, b, transitions, history):
    """A transition of ``a`` or ``b`` the other cannot match, or ``None``.

    Uses the first refinement round that separates the two states; the
    returned ``(state, label, target)`` leads into a class the other state
    cannot reach with the same label at that round.
    """
    succ = defaultdict(list)
    for s, label, t in transitions:
        if s in (a, b):
            succ[s].append((label, t))
    for k in range(1, len(history)):
        if history[k][a] != history[k][b]:
            prev = history[k - 1]
            if prev[a] != prev[b]:
                return None
            moves = {s: {(lab, prev[t]) for lab, t in succ[s]} for s in (a, b)}
            for s, other in ((a, b), (b, a)):
                for lab, t in succ[s]:
                    if (lab, prev[t]) not in moves[other]:
                        return s, lab, t
    return None
