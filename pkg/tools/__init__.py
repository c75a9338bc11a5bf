"""Domain-specific tools for quantum walk action analysis."""

from .walk_tools import make_coin, make_initial_state, evolve_walk, compute_action
from .conservation_tools import check_conservation, compute_totals, polar_form
from .covariance_tools import extended_action_terms, frame_invariance, boosted_stress_energy
from .continuum_tools import continuum_convergence, walk_dispersion, action_scaling
from .mechanics_tools import run_mechanics
from .experiment_tools import run_experiment
from .visualization_tools import plot_convergence, plot_residual_map, plot_mechanics_energy
from .session_tools import (
    list_datasets, describe_dataset, delete_dataset, clear_session,
    preview_dataset, compute_statistics
)

__all__ = [
    "make_coin",
    "make_initial_state",
    "evolve_walk",
    "compute_action",
    "check_conservation",
    "compute_totals",
    "polar_form",
    "extended_action_terms",
    "frame_invariance",
    "boosted_stress_energy",
    "continuum_convergence",
    "walk_dispersion",
    "action_scaling",
    "run_mechanics",
    "run_experiment",
    "plot_convergence",
    "plot_residual_map",
    "plot_mechanics_energy",
    "list_datasets",
    "describe_dataset",
    "delete_dataset",
    "clear_session",
    "preview_dataset",
    "compute_statistics",
]
