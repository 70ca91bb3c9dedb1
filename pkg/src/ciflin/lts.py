"""A small labeled graph shared by the explicit, symbolic and linear levels."""
from __future__ import annotations


class BudgetExceeded(RuntimeError):
    """State budget exhausted; ``partial`` holds whatever was built so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TransitionSystem:
    """States in insertion order, labeled transitions as index triples."""

    def __init__(self):
        self.states = []
        self.initial = []
        self.transitions = []
        self._index = {}

    def __len__(self):
        return len(self.states)

    def add_state(self, state, initial=False):
        """Return ``(index, is_new)``."""
        i = self._index.get(state)
        new = i is None
        if new:
            i = len(self.states)
            self._index[state] = i
            self.states.append(state)
        if initial and i not in self.initial:
            self.initial.append(i)
        return i, new

    def index(self, state) -> int:
        return self._index[state]

    def add_transition(self, source: int, label, target: int):
        self.transitions.append((source, label, target))

    def successors(self, i: int):
        return [(label, j) for s, label, j in self.transitions if s == i]
