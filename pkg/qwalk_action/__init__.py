"""qwalk-action: action principles for (1+1)-D discrete-time quantum walks."""

from tools import (
    make_coin,
    make_initial_state,
    evolve_walk,
    compute_action,
    check_conservation,
    compute_totals,
    extended_action_terms,
    frame_invariance,
    continuum_convergence,
    walk_dispersion,
    run_mechanics,
)
from codes.cli_runner import main as run_cli

__all__ = [
    "make_coin",
    "make_initial_state",
    "evolve_walk",
    "compute_action",
    "check_conservation",
    "compute_totals",
    "extended_action_terms",
    "frame_invariance",
    "continuum_convergence",
    "walk_dispersion",
    "run_mechanics",
    "run_cli",
]
