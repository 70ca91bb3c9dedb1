"""Semantics and linearization of compositions of CIF-like automata."""
from .dsl import ParseError, parse_model, print_model
from .explicit import VarScope, action_steps, env_steps, explicit_lts, initial_valuations
from .linear import build_lits, lits_action_transitions, predict_size
from .linearizer import linearize, scope_linearized
from .model import Atom, Automaton, DomainSpec, Model, Par, Sync, reinit
from .symbolic import build_sts, symbolic_action_transitions, symbolic_env_transitions
from .verify import (
    CheckReport,
    check_correctness_of_linearization,
    check_lits_soundness_completeness,
    check_symbolic_soundness_completeness,
)

__all__ = [
    "Atom", "Automaton", "CheckReport", "DomainSpec", "Model", "Par", "ParseError", "Sync", "VarScope",
    "action_steps", "build_lits", "build_sts", "check_correctness_of_linearization",
    "check_lits_soundness_completeness", "check_symbolic_soundness_completeness", "env_steps",
    "explicit_lts", "initial_valuations", "linearize", "lits_action_transitions", "parse_model",
    "predict_size", "print_model", "reinit", "scope_linearized", "symbolic_action_transitions",
    "symbolic_env_transitions",
]
