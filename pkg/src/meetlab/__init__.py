"""Adversarial meeting times of two random walks, atomic and non-atomic."""

from .adversary import MeetingSolution, policy_evaluate, solve_meeting, verify_meeteq
from .graph import Graph, generate, parse_graph, serialize
from .hidden import (
    HiddenReport, eht_leq, find_hidden, phi_atomic, phi_tilde, theorem1_bound,
)
from .hitting import (
    ExtHitTable, HitTable, check_triangle_extended, check_triangle_original,
    ext_hitting_formula, ext_hitting_oracle, hitting_times,
)
from .simulate import Scheduler, TrialResult, make_scheduler, monte_carlo, run_trial
from .states import (
    AtomicWalk, Intermediate, Original, StateSpace, bar, build_state_space, is_meeting,
    project_f, project_g,
)

__version__ = "0.1.0"

__all__ = [
    "MeetingSolution", "policy_evaluate", "solve_meeting", "verify_meeteq",
    "Graph", "generate", "parse_graph", "serialize",
    "HiddenReport", "eht_leq", "find_hidden", "phi_atomic", "phi_tilde", "theorem1_bound",
    "ExtHitTable", "HitTable", "check_triangle_extended", "check_triangle_original",
    "ext_hitting_formula", "ext_hitting_oracle", "hitting_times",
    "Scheduler", "TrialResult", "make_scheduler", "monte_carlo", "run_trial",
    "AtomicWalk", "Intermediate", "Original", "StateSpace", "bar", "build_state_space",
    "is_meeting", "project_f", "project_g",
]
